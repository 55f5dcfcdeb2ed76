#pragma once

#include <cstdint>
#include <string>

#include "pmap/exact.hpp"
#include "pmap/model.hpp"

namespace pmap {

enum class SolverKind { AUTO, EXHAUSTIVE, TREE, GRAPHCUT };

const char* to_string(SolverKind s);
SolverKind solver_from_string(const std::string& s);

struct MapResult {
  Assignment argmax;
  double value = kNegInf;  // == energy(model, argmax)
  SolverKind solver = SolverKind::AUTO;
  bool ties_possible = false;
};

/// Global maximizer by enumeration; ties go to the lexicographically smallest
/// assignment, and ties_possible reports whether any tie occurred.
MapResult exhaustive_map(const PairwiseModel& model,
                         std::uint64_t cap = kDefaultStateCap);

/// Max-product on a forest, rooted at the smallest vertex of each component.
/// Backtracking picks the smallest maximizing label.
MapResult tree_map(const PairwiseModel& model);

/// Minimum s-t cut for attractive binary models with finite tables. Only
/// vertices that can still reach the sink in the residual graph take label 1,
/// so ties go to 0.
MapResult graphcut_map(const PairwiseModel& model);

/// AUTO prefers GRAPHCUT, then TREE, then EXHAUSTIVE.
MapResult solve_map(const PairwiseModel& model,
                    SolverKind strategy = SolverKind::AUTO,
                    std::uint64_t cap = kDefaultStateCap);

/// The concrete solver AUTO would pick for this model.
SolverKind auto_solver(const PairwiseModel& model);

}  // namespace pmap
