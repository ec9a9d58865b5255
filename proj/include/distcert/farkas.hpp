#pragma once

#include "distcert/constraints.hpp"

#include <vector>

namespace distcert {

/// Result of eliminating the mu quantifiers: a purely existential system
/// over template variables and fresh nonnegative multipliers.
struct ExistentialSystem {
  std::vector<ExistentialRelation> relations;
  std::vector<int> multipliers;  // VarTable ids of the fresh multipliers
  /// Monoid product each multiplier is attached to, parallel to multipliers.
  std::vector<Poly> products;
  std::size_t discharged = 0;    // constraints dropped by premise infeasibility
};

/// All multisets of premise indices with size <= degree, ordered by size
/// then lexicographically. The empty multiset stands for the constant 1.
std::vector<std::vector<int>> monoid_multisets(std::size_t num_premises,
                                               int degree);

/// Feasibility of a template-free affine premise over R^n. Throws
/// ContractError if a row mentions template variables or is not affine.
bool premise_feasible(const std::vector<Poly>& premise, std::size_t n);

/// Handelman relaxation: each conclusion g is equated with a nonnegative
/// combination of products of premise rows up to the given degree,
/// identically in mu. Constraints whose premise is template-free and
/// infeasible are discharged. Existential side relations pass through.
ExistentialSystem handelman_transform(const GeneratedConstraints& gc,
                                      int degree, std::size_t n,
                                      VarTable& vars,
                                      std::size_t multiplier_cap = 20000);

/// Farkas lemma for affine conclusions: identical to Handelman at degree 1.
/// Throws SemanticError when some conclusion has mu-degree above 1.
ExistentialSystem farkas_transform(const GeneratedConstraints& gc,
                                   std::size_t n, VarTable& vars,
                                   std::size_t multiplier_cap = 20000);

} // namespace distcert
