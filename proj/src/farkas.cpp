#include "distcert/farkas.hpp"

#include "distcert/errors.hpp"
#include "distcert/lp.hpp"

namespace distcert {

std::vector<std::vector<int>> monoid_multisets(std::size_t num_premises,
                                               int degree) {
  if (degree < 1) throw ContractError("monoid degree must be >= 1");
  std::vector<std::vector<int>> out;
  out.push_back({}); // the constant 1
  std::vector<std::vector<int>> current = {{}};
  for (int d = 1; d <= degree; ++d) {
    std::vector<std::vector<int>> next;
    for (const auto& m : current) {
      int lo = m.empty() ? 0 : m.back();
      for (int j = lo; j < static_cast<int>(num_premises); ++j) {
        auto ext = m;
        ext.push_back(j);
        next.push_back(std::move(ext));
      }
    }
    for (const auto& m : next) out.push_back(m);
    current = std::move(next);
  }
  return out;
}

bool premise_feasible(const std::vector<Poly>& premise, std::size_t n) {
  std::vector<AffineRow> ge;
  for (const auto& p : premise) {
    AffineRow row;
    row.coeffs = affine_mu_coeffs(p, n, row.offset);
    ge.push_back(std::move(row));
  }
  return lp_feasible_point(ge, {}, n).has_value();
}

namespace {

bool template_free(const std::vector<Poly>& rows) {
  for (const auto& p : rows)
    if (p.tpl_degree() > 0) return false;
  return true;
}

} // namespace

ExistentialSystem handelman_transform(const GeneratedConstraints& gc,
                                      int degree, std::size_t n,
                                      VarTable& vars,
                                      std::size_t multiplier_cap) {
  ExistentialSystem out;
  out.relations = gc.existential;
  for (const auto& fc : gc.forall) {
    if (template_free(fc.premise) && !premise_feasible(fc.premise, n)) {
      ++out.discharged;
      continue;
    }
    auto monoid = monoid_multisets(fc.premise.size(), degree);
    std::vector<Poly> products;
    products.reserve(monoid.size());
    for (const auto& m : monoid) {
      Poly prod = Poly::constant(Rational(1));
      for (int j : m) prod = prod * fc.premise[j];
      products.push_back(std::move(prod));
    }
    for (std::size_t ci = 0; ci < fc.conclusion.size(); ++ci) {
      if (out.multipliers.size() + monoid.size() > multiplier_cap)
        throw ContractError(
            "multiplier cap exceeded (" + std::to_string(multiplier_cap) +
            "); lower the Handelman degree or shrink the template");
      Poly residual = fc.conclusion[ci];
      for (std::size_t mi = 0; mi < monoid.size(); ++mi) {
        int lam = vars.fresh("lam_" + fc.label + "_c" + std::to_string(ci) +
                                 "_m" + std::to_string(mi),
                             VarKind::Multiplier);
        out.multipliers.push_back(lam);
        out.products.push_back(products[mi]);
        out.relations.push_back({Poly::tvar(lam), false,
                                 fc.label + "_c" + std::to_string(ci) +
                                     "_nonneg"});
        residual -= Poly::tvar(lam) * products[mi];
      }
      // residual must vanish identically in mu
      std::size_t idx = 0;
      for (const auto& [mono, coeff] : residual.collect_by_mu()) {
        out.relations.push_back({coeff, true,
                                 fc.label + "_c" + std::to_string(ci) + "_eq" +
                                     std::to_string(idx)});
        ++idx;
      }
    }
  }
  return out;
}

ExistentialSystem farkas_transform(const GeneratedConstraints& gc,
                                   std::size_t n, VarTable& vars,
                                   std::size_t multiplier_cap) {
  for (const auto& fc : gc.forall) {
    for (const auto& p : fc.premise)
      if (p.mu_degree() > 1)
        throw SemanticError("premise '" + fc.label +
                            "' is nonlinear in mu; this requires Handelman");
    for (const auto& g : fc.conclusion)
      if (g.mu_degree() > 1)
        throw SemanticError("conclusion of '" + fc.label +
                            "' is nonlinear in mu; this requires Handelman");
  }
  return handelman_transform(gc, 1, n, vars, multiplier_cap);
}

} // namespace distcert
