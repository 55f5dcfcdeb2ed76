#include "pmap/model_io.hpp"

#include <fstream>
#include <sstream>

#include "pmap/errors.hpp"

namespace pmap {

namespace {

double parse_entry(const Json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && v.get<std::string>() == "-inf") return kNegInf;
  throw InvalidInput(where + ": expected a number or \"-inf\"");
}

const Json& require(const Json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInput(std::string("missing field \"") + key + "\"");
  const Json& v = j.at(key);
  if (!v.is_array()) throw InvalidInput(std::string("field \"") + key + "\" must be an array");
  return v;
}

}  // namespace

Json number_or_neg_inf(double v) {
  if (v == kNegInf) return "-inf";
  return v;
}

Json model_to_json(const PairwiseModel& model) {
  Json j;
  j["domain_sizes"] = model.domain_sizes();
  Json unary = Json::array();
  for (int i = 0; i < model.num_vertices(); ++i) {
    Json row = Json::array();
    for (double v : model.unary(i)) row.push_back(number_or_neg_inf(v));
    unary.push_back(std::move(row));
  }
  j["unary"] = std::move(unary);
  Json edges = Json::array();
  for (const auto& e : model.edges()) edges.push_back(Json::array({e.u, e.v}));
  j["edges"] = std::move(edges);
  Json pairwise = Json::array();
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto [u, v] = model.edge(e);
    Json table = Json::array();
    for (int a = 0; a < model.domain_size(u); ++a) {
      Json row = Json::array();
      for (int b = 0; b < model.domain_size(v); ++b)
        row.push_back(number_or_neg_inf(model.pairwise(e, a, b)));
      table.push_back(std::move(row));
    }
    pairwise.push_back(std::move(table));
  }
  j["pairwise"] = std::move(pairwise);
  return j;
}

PairwiseModel model_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("model JSON must be an object");
  ModelTables t;
  for (const auto& d : require(j, "domain_sizes")) {
    if (!d.is_number_integer()) throw InvalidInput("domain_sizes entries must be integers");
    t.domain_sizes.push_back(d.get<int>());
  }
  int i = 0;
  for (const auto& row : require(j, "unary")) {
    if (!row.is_array()) throw InvalidInput("unary rows must be arrays");
    std::vector<double> r;
    for (const auto& v : row) r.push_back(parse_entry(v, "unary[" + std::to_string(i) + "]"));
    t.unary.push_back(std::move(r));
    ++i;
  }
  for (const auto& e : require(j, "edges")) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer())
      throw InvalidInput("edges must be [i,j] integer pairs");
    t.edges.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  int k = 0;
  for (const auto& table : require(j, "pairwise")) {
    if (!table.is_array()) throw InvalidInput("pairwise tables must be arrays of rows");
    std::vector<double> flat;
    std::size_t width = 0;
    bool first = true;
    for (const auto& row : table) {
      if (!row.is_array()) throw InvalidInput("pairwise rows must be arrays");
      if (!first && row.size() != width)
        throw InvalidInput("pairwise[" + std::to_string(k) + "] is ragged");
      width = row.size();
      first = false;
      for (const auto& v : row)
        flat.push_back(parse_entry(v, "pairwise[" + std::to_string(k) + "]"));
    }
    if (static_cast<std::size_t>(k) < t.edges.size()) {
      const auto [u, v] = t.edges[k];
      const int n = static_cast<int>(t.domain_sizes.size());
      if (u >= 0 && u < n && v >= 0 && v < n &&
          (table.size() != static_cast<std::size_t>(t.domain_sizes[u]) ||
           width != static_cast<std::size_t>(t.domain_sizes[v])) &&
          !table.empty())
        throw InvalidInput("pairwise[" + std::to_string(k) +
                           "] shape does not match the domain sizes");
    }
    t.pairwise.push_back(std::move(flat));
    ++k;
  }
  return PairwiseModel(std::move(t));
}

std::string model_to_string(const PairwiseModel& model) {
  return model_to_json(model).dump();
}

PairwiseModel model_from_string(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(std::string("malformed model JSON: ") + e.what());
  }
  return model_from_json(j);
}

PairwiseModel read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open model file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_string(ss.str());
}

void write_model_file(const PairwiseModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write model file " + path);
  out << model_to_string(model) << '\n';
}

}  // namespace pmap
