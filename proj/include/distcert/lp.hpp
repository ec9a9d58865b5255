#pragma once

#include "distcert/rational.hpp"

#include <optional>
#include <vector>

namespace distcert {

/// coeffs . x + offset, interpreted against 0 with some relation.
struct AffineRow {
  std::vector<Rational> coeffs;
  Rational offset;

  Rational eval(const std::vector<Rational>& x) const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rational value;                // objective at optimum
  std::vector<Rational> point;   // optimizer / feasible point
};

/// Exact two-phase simplex over free variables x in R^n.
/// Region: every row in ge is ">= 0", every row in eq is "= 0".
LpResult lp_minimize(const AffineRow& objective,
                     const std::vector<AffineRow>& ge,
                     const std::vector<AffineRow>& eq,
                     std::size_t num_vars);

/// Exact feasibility; returns a point of the region if nonempty.
std::optional<std::vector<Rational>> lp_feasible_point(
    const std::vector<AffineRow>& ge, const std::vector<AffineRow>& eq,
    std::size_t num_vars);

/// Rows stating mu in Delta(S): mu_i >= 0 for all i (ge) and sum mu_i = 1 (eq).
std::vector<AffineRow> simplex_ge_rows(std::size_t n);
AffineRow simplex_sum_row(std::size_t n); // 1 - sum mu_i, used as "= 0"

} // namespace distcert
