#include "distcert/templates.hpp"

#include "distcert/errors.hpp"

namespace distcert {

std::size_t CertTemplate::var_count() const {
  std::size_t per_row = num_mdp_states + 1;
  return static_cast<std::size_t>(num_nba_states) * per_row *
         (1 + static_cast<std::size_t>(invariant_size));
}

namespace {

Poly instantiate_row(const AffineTemplateRow& row,
                     const std::vector<Poly>& images,
                     const Poly& denominator) {
  Poly out = Poly::tvar(row.offset) * denominator;
  for (std::size_t i = 0; i < row.coeffs.size(); ++i)
    out += Poly::tvar(row.coeffs[i]) * images[i];
  return out;
}

} // namespace

Poly CertTemplate::ranking_at(int q, const std::vector<Poly>& images,
                              const Poly& denominator) const {
  if (q < 0 || q >= num_nba_states) throw ContractError("unknown NBA state");
  if (images.size() != num_mdp_states)
    throw ContractError("image vector dimension mismatch");
  return instantiate_row(ranking[q], images, denominator);
}

Poly CertTemplate::invariant_at(int q, int k, const std::vector<Poly>& images,
                                const Poly& denominator) const {
  if (q < 0 || q >= num_nba_states) throw ContractError("unknown NBA state");
  return instantiate_row(invariant.at(q).at(k), images, denominator);
}

CertTemplate make_cert_template(const Nba& nba, std::size_t num_mdp_states,
                                int invariant_size, VarTable& vars) {
  if (invariant_size < 1)
    throw ContractError("invariant size must be >= 1");
  CertTemplate t;
  t.num_nba_states = nba.num_states;
  t.num_mdp_states = num_mdp_states;
  t.invariant_size = invariant_size;
  for (int q = 0; q < nba.num_states; ++q) {
    AffineTemplateRow row;
    for (std::size_t i = 0; i < num_mdp_states; ++i)
      row.coeffs.push_back(vars.fresh(
          "a_q" + std::to_string(q) + "_i" + std::to_string(i),
          VarKind::CertificateCoeff));
    row.offset =
        vars.fresh("b_q" + std::to_string(q), VarKind::CertificateCoeff);
    t.ranking.push_back(std::move(row));
  }
  for (int q = 0; q < nba.num_states; ++q) {
    std::vector<AffineTemplateRow> rows;
    for (int k = 0; k < invariant_size; ++k) {
      AffineTemplateRow row;
      for (std::size_t i = 0; i < num_mdp_states; ++i)
        row.coeffs.push_back(vars.fresh(
            "c_q" + std::to_string(q) + "_k" + std::to_string(k) + "_i" +
                std::to_string(i),
            VarKind::InvariantCoeff));
      row.offset = vars.fresh(
          "d_q" + std::to_string(q) + "_k" + std::to_string(k),
          VarKind::InvariantCoeff);
      rows.push_back(std::move(row));
    }
    t.invariant.push_back(std::move(rows));
  }
  return t;
}

std::size_t StrategyTemplate::var_count() const {
  if (cls == StrategyClass::Memoryless) return prob.size();
  std::size_t total = 0;
  for (const auto& [key, row] : rows) total += row.coeffs.size() + 1;
  return total;
}

StrategyTemplate make_strategy_template(const Mdp& mdp, StrategyClass cls,
                                        VarTable& vars,
                                        const Rational& eps_den,
                                        std::size_t max_dist_states) {
  StrategyTemplate st;
  st.cls = cls;
  st.eps_den = eps_den;
  if (cls == StrategyClass::Distributional &&
      mdp.num_states() > max_dist_states)
    throw SemanticError(
        "distributional strategy class is capped at " +
        std::to_string(max_dist_states) + " MDP states (" +
        std::to_string(mdp.num_states()) +
        " given): denominator clearing raises the constraint degree to "
        "|S|+1; use the memoryless class");
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    for (int a : mdp.available[s]) {
      std::string suffix = "_s" + std::to_string(s) + "_a" + std::to_string(a);
      if (cls == StrategyClass::Memoryless) {
        st.prob[{static_cast<int>(s), a}] =
            vars.fresh("p" + suffix, VarKind::StrategyCoeff);
      } else {
        AffineTemplateRow row;
        for (std::size_t i = 0; i < mdp.num_states(); ++i)
          row.coeffs.push_back(vars.fresh(
              "e" + suffix + "_i" + std::to_string(i), VarKind::StrategyCoeff));
        row.offset = vars.fresh("f" + suffix, VarKind::StrategyCoeff);
        st.rows[{static_cast<int>(s), a}] = std::move(row);
      }
    }
  }
  return st;
}

namespace {

// Shared core: images_j = sum_{s,a} pi_{s,a}(mu) * mu_s * P(s,a)(j), with
// pi given as per-(s,a) numerator polynomials and per-state denominators.
// The returned images carry the common denominator prod_s D_s.
SymbolicStep assemble_step(const Mdp& mdp,
                           const std::map<std::pair<int, int>, Poly>& numer,
                           bool trivial_denominator) {
  const std::size_t n = mdp.num_states();
  SymbolicStep out;
  if (trivial_denominator) {
    out.denominator = Poly::constant(Rational(1));
    out.images.assign(n, Poly{});
    for (std::size_t s = 0; s < n; ++s) {
      for (int a : mdp.available[s]) {
        const Poly& pi = numer.at({static_cast<int>(s), a});
        if (pi.is_zero()) continue;
        Poly mass = pi * Poly::mu(static_cast<int>(s));
        const Distribution& p = mdp.row(static_cast<int>(s), a);
        for (std::size_t j = 0; j < n; ++j)
          if (p[j] != 0) out.images[j] += mass.scaled(p[j]);
      }
    }
    return out;
  }
  // Per-state denominators and partial products prod_{s' != s} D_{s'}.
  std::vector<Poly> den(n);
  for (std::size_t s = 0; s < n; ++s)
    for (int a : mdp.available[s]) den[s] += numer.at({static_cast<int>(s), a});
  Poly common = Poly::constant(Rational(1));
  for (std::size_t s = 0; s < n; ++s) common = common * den[s];
  std::vector<Poly> others(n);
  for (std::size_t s = 0; s < n; ++s) {
    Poly prod = Poly::constant(Rational(1));
    for (std::size_t t = 0; t < n; ++t)
      if (t != s) prod = prod * den[t];
    others[s] = std::move(prod);
  }
  out.denominator = std::move(common);
  out.images.assign(n, Poly{});
  for (std::size_t s = 0; s < n; ++s) {
    for (int a : mdp.available[s]) {
      Poly mass = numer.at({static_cast<int>(s), a}) *
                  Poly::mu(static_cast<int>(s)) * others[s];
      const Distribution& p = mdp.row(static_cast<int>(s), a);
      for (std::size_t j = 0; j < n; ++j)
        if (p[j] != 0) out.images[j] += mass.scaled(p[j]);
    }
  }
  return out;
}

} // namespace

SymbolicStep symbolic_step(const Mdp& mdp, const StrategyTemplate& st) {
  std::map<std::pair<int, int>, Poly> numer;
  if (st.cls == StrategyClass::Memoryless) {
    for (const auto& [key, var] : st.prob) numer[key] = Poly::tvar(var);
    return assemble_step(mdp, numer, true);
  }
  for (const auto& [key, row] : st.rows) {
    Poly p = Poly::tvar(row.offset);
    for (std::size_t i = 0; i < row.coeffs.size(); ++i)
      p += Poly::tvar(row.coeffs[i]) * Poly::mu(static_cast<int>(i));
    numer[key] = std::move(p);
  }
  return assemble_step(mdp, numer, false);
}

SymbolicStep concrete_step(const Mdp& mdp, const Strategy& strategy) {
  std::map<std::pair<int, int>, Poly> numer;
  if (const auto* ms = std::get_if<MemorylessStrategy>(&strategy)) {
    for (std::size_t s = 0; s < mdp.num_states(); ++s)
      for (int a : mdp.available[s])
        numer[{static_cast<int>(s), a}] =
            Poly::constant(ms->at(static_cast<int>(s), a));
    return assemble_step(mdp, numer, true);
  }
  const auto& ds = std::get<AffineDistStrategy>(strategy);
  for (const auto& [key, row] : ds.numerator) {
    Poly p = Poly::constant(row.offset);
    for (std::size_t i = 0; i < row.coeffs.size(); ++i)
      p += Poly::mu(static_cast<int>(i)).scaled(row.coeffs[i]);
    numer[key] = std::move(p);
  }
  return assemble_step(mdp, numer, false);
}

} // namespace distcert
