#pragma once

// JSON model format:
//
//   {"domain_sizes":[...],"unary":[[...]],"edges":[[i,j]],"pairwise":[[[...]]]}
//
// Fields are always written in this order. -inf is written as the string
// "-inf"; pairwise tables are nested rows indexed [label_u][label_v].

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "pmap/model.hpp"

namespace pmap {

using Json = nlohmann::ordered_json;

Json model_to_json(const PairwiseModel& model);

/// Parses and validates; throws InvalidInput on any schema or model error.
PairwiseModel model_from_json(const Json& j);

std::string model_to_string(const PairwiseModel& model);
PairwiseModel model_from_string(const std::string& text);

PairwiseModel read_model_file(const std::string& path);
void write_model_file(const PairwiseModel& model, const std::string& path);

Json number_or_neg_inf(double v);

}  // namespace pmap
