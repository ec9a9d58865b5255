#include "distcert/lp.hpp"

#include "distcert/errors.hpp"

#include <algorithm>
#include <cassert>

namespace distcert {

Rational AffineRow::eval(const std::vector<Rational>& x) const {
  Rational v = offset;
  for (std::size_t i = 0; i < coeffs.size() && i < x.size(); ++i)
    v += coeffs[i] * x[i];
  return v;
}

namespace {

// Dense exact simplex tableau. Variables are indexed 0..ncols-1; rows keep a
// canonical basis (basis column of each row is a unit vector).
struct Tableau {
  std::size_t m, n;
  std::vector<std::vector<Rational>> a; // m x n
  std::vector<Rational> b;              // m, kept >= 0
  std::vector<Rational> cost;           // n, reduced-cost row
  Rational obj;                         // current objective value (negated)
  std::vector<std::size_t> basis;       // m

  void pivot(std::size_t r, std::size_t c) {
    Rational inv = 1 / a[r][c];
    for (auto& v : a[r]) v *= inv;
    b[r] *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = 0; j < n; ++j) a[i][j] -= f * a[r][j];
      b[i] -= f * b[r];
    }
    if (cost[c] != 0) {
      Rational f = cost[c];
      for (std::size_t j = 0; j < n; ++j) cost[j] -= f * a[r][j];
      obj -= f * b[r];
    }
    basis[r] = c;
  }

  // Bland's rule; returns false when the current cost row is optimal,
  // throws on unboundedness.
  bool iterate() {
    std::size_t enter = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (cost[j] < 0) {
        enter = j;
        break;
      }
    }
    if (enter == n) return false;
    std::size_t leave = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (a[i][enter] <= 0) continue;
      Rational ratio = b[i] / a[i][enter];
      if (leave == m || ratio < best ||
          (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) throw LpStatus::Unbounded;
    pivot(leave, enter);
    return true;
  }
};

} // namespace

LpResult lp_minimize(const AffineRow& objective,
                     const std::vector<AffineRow>& ge,
                     const std::vector<AffineRow>& eq,
                     std::size_t num_vars) {
  // Free variables x = u - v with u, v >= 0; one slack per inequality;
  // one artificial per row for phase 1.
  const std::size_t nx = 2 * num_vars;
  const std::size_t m = ge.size() + eq.size();
  const std::size_t nslack = ge.size();
  const std::size_t nart = m;
  Tableau t;
  t.m = m;
  t.n = nx + nslack + nart;
  t.a.assign(m, std::vector<Rational>(t.n, Rational(0)));
  t.b.assign(m, Rational(0));
  t.basis.assign(m, 0);

  auto coeff_at = [&](const AffineRow& row, std::size_t j) {
    return j < row.coeffs.size() ? row.coeffs[j] : Rational(0);
  };

  for (std::size_t i = 0; i < m; ++i) {
    const bool is_ge = i < ge.size();
    const AffineRow& row = is_ge ? ge[i] : eq[i - ge.size()];
    // c.x + d >= 0  ->  c.u - c.v - s = -d
    for (std::size_t j = 0; j < num_vars; ++j) {
      t.a[i][j] = coeff_at(row, j);
      t.a[i][num_vars + j] = -coeff_at(row, j);
    }
    if (is_ge) t.a[i][nx + i] = Rational(-1);
    t.b[i] = -row.offset;
    if (t.b[i] < 0) {
      for (std::size_t j = 0; j < nx + nslack; ++j) t.a[i][j] = -t.a[i][j];
      t.b[i] = -t.b[i];
    }
    t.a[i][nx + nslack + i] = Rational(1);
    t.basis[i] = nx + nslack + i;
  }

  // Phase 1: minimize the sum of artificials.
  t.cost.assign(t.n, Rational(0));
  t.obj = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < nx + nslack; ++j) t.cost[j] -= t.a[i][j];
    t.obj -= t.b[i]; // t.obj tracks the negated objective value
  }
  try {
    while (t.iterate()) {}
  } catch (LpStatus) {
    // Phase 1 objective is bounded below by 0; cannot happen.
    assert(false);
  }
  if (t.obj != 0) return {LpStatus::Infeasible, Rational(0), {}};

  // Drive remaining artificials out of the basis.
  std::vector<bool> keep(m, true);
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis[i] < nx + nslack) continue;
    std::size_t c = t.n;
    for (std::size_t j = 0; j < nx + nslack; ++j) {
      if (t.a[i][j] != 0) {
        c = j;
        break;
      }
    }
    if (c == t.n) {
      keep[i] = false; // redundant row
    } else {
      t.pivot(i, c);
    }
  }
  // Compact dropped rows and forbid artificial columns.
  {
    std::size_t w = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!keep[i]) continue;
      if (w != i) {
        t.a[w] = std::move(t.a[i]);
        t.b[w] = t.b[i];
        t.basis[w] = t.basis[i];
      }
      ++w;
    }
    t.m = w;
    t.a.resize(w);
    t.b.resize(w);
    t.basis.resize(w);
    for (auto& row : t.a)
      for (std::size_t j = nx + nslack; j < t.n; ++j) row[j] = Rational(0);
  }

  // Phase 2.
  t.cost.assign(t.n, Rational(0));
  for (std::size_t j = 0; j < num_vars; ++j) {
    t.cost[j] = coeff_at(objective, j);
    t.cost[num_vars + j] = -coeff_at(objective, j);
  }
  t.obj = -objective.offset;
  for (std::size_t i = 0; i < t.m; ++i) {
    std::size_t bcol = t.basis[i];
    if (t.cost[bcol] == 0) continue;
    Rational f = t.cost[bcol];
    for (std::size_t j = 0; j < t.n; ++j) t.cost[j] -= f * t.a[i][j];
    t.obj -= f * t.b[i];
  }
  try {
    while (t.iterate()) {}
  } catch (LpStatus) {
    return {LpStatus::Unbounded, Rational(0), {}};
  }

  std::vector<Rational> x(num_vars, Rational(0));
  for (std::size_t i = 0; i < t.m; ++i) {
    std::size_t bcol = t.basis[i];
    if (bcol < num_vars)
      x[bcol] += t.b[i];
    else if (bcol < nx)
      x[bcol - num_vars] -= t.b[i];
  }
  return {LpStatus::Optimal, -t.obj, std::move(x)};
}

std::optional<std::vector<Rational>> lp_feasible_point(
    const std::vector<AffineRow>& ge, const std::vector<AffineRow>& eq,
    std::size_t num_vars) {
  AffineRow zero;
  zero.coeffs.assign(num_vars, Rational(0));
  LpResult r = lp_minimize(zero, ge, eq, num_vars);
  if (r.status != LpStatus::Optimal) return std::nullopt;
  return r.point;
}

std::vector<AffineRow> simplex_ge_rows(std::size_t n) {
  std::vector<AffineRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    AffineRow r;
    r.coeffs.assign(n, Rational(0));
    r.coeffs[i] = 1;
    rows.push_back(std::move(r));
  }
  return rows;
}

AffineRow simplex_sum_row(std::size_t n) {
  AffineRow r;
  r.coeffs.assign(n, Rational(-1));
  r.offset = 1;
  return r;
}

} // namespace distcert
