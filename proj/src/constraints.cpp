#include "distcert/constraints.hpp"

#include "distcert/errors.hpp"

#include <limits>

namespace distcert {

int SuccessorChoice::at(int q, Letter letter) const {
  auto it = chosen.find({q, letter});
  if (it == chosen.end())
    throw ContractError("successor choice not defined for this (q, letter)");
  return it->second;
}

ChoiceEnumerator::ChoiceEnumerator(const Pdts& pdts, std::size_t budget)
    : budget_(budget) {
  for (int q = 0; q < pdts.num_locations(); ++q) {
    for (const auto& cls : pdts.classes[q]) {
      if (cls.successors.empty()) continue;
      domain_.push_back({{q, cls.letter}, cls.successors});
      std::uint64_t deg = cls.successors.size();
      if (total_ > std::numeric_limits<std::uint64_t>::max() / deg)
        total_ = std::numeric_limits<std::uint64_t>::max();
      else
        total_ *= deg;
    }
  }
  cursor_.assign(domain_.size(), 0);
}

std::optional<SuccessorChoice> ChoiceEnumerator::next() {
  if (done_) return std::nullopt;
  if (emitted_ >= budget_) {
    budget_exhausted_ = true;
    done_ = true;
    return std::nullopt;
  }
  SuccessorChoice choice;
  for (std::size_t i = 0; i < domain_.size(); ++i)
    choice.chosen[domain_[i].first] = domain_[i].second[cursor_[i]];
  ++emitted_;
  // lexicographic increment, last key fastest
  std::size_t i = domain_.size();
  while (i > 0) {
    --i;
    if (++cursor_[i] < domain_[i].second.size()) break;
    cursor_[i] = 0;
    if (i == 0) done_ = true;
  }
  if (domain_.empty()) done_ = true;
  return choice;
}

Poly row_to_poly(const AffineRow& row) {
  Poly p = Poly::constant(row.offset);
  for (std::size_t i = 0; i < row.coeffs.size(); ++i)
    if (row.coeffs[i] != 0) p += Poly::mu(static_cast<int>(i)).scaled(row.coeffs[i]);
  return p;
}

std::vector<Poly> simplex_premise(std::size_t n) {
  std::vector<Poly> rows;
  for (std::size_t i = 0; i < n; ++i)
    rows.push_back(Poly::mu(static_cast<int>(i)));
  // sum = 1 as an inequality pair
  Poly sum;
  for (std::size_t i = 0; i < n; ++i) sum += Poly::mu(static_cast<int>(i));
  rows.push_back(Poly::constant(Rational(1)) - sum);
  rows.push_back(sum - Poly::constant(Rational(1)));
  return rows;
}

GeneratedConstraints gen_initial(InitMode mode, const InitRegion& init,
                                 const CertTemplate& cert, int q0,
                                 std::size_t n, VarTable& vars) {
  GeneratedConstraints out;
  std::vector<Poly> identity;
  for (std::size_t i = 0; i < n; ++i)
    identity.push_back(Poly::mu(static_cast<int>(i)));
  Poly one = Poly::constant(Rational(1));

  if (mode == InitMode::Universal) {
    if (!init.feasible(n)) throw SemanticError("initial region is empty");
    ForallConstraint c;
    c.label = "init";
    for (auto& p : simplex_premise(n)) c.premise.push_back(std::move(p));
    for (const auto& row : init.premise_rows(n))
      c.premise.push_back(row_to_poly(row));
    c.conclusion.push_back(cert.ranking_at(q0, identity, one));
    for (int k = 0; k < cert.invariant_size; ++k)
      c.conclusion.push_back(cert.invariant_at(q0, k, identity, one));
    out.forall.push_back(std::move(c));
    return out;
  }

  // Existential: fresh mu0 variables, side constraints pin them to the
  // region, conclusions evaluated at mu0.
  if (init.points.size() > 1)
    throw ContractError(
        "existential mode with several candidate points: run one candidate "
        "point at a time");
  std::vector<Poly> mu0;
  for (std::size_t i = 0; i < n; ++i)
    mu0.push_back(Poly::tvar(
        vars.fresh("mu0_" + std::to_string(i), VarKind::PointVar)));
  auto emit = [&](Poly p, bool equality, const std::string& label) {
    out.existential.push_back({std::move(p), equality, label});
  };
  Poly sum;
  for (std::size_t i = 0; i < n; ++i) {
    emit(mu0[i], false, "init_simplex");
    sum += mu0[i];
  }
  emit(sum - one, true, "init_simplex");
  for (const auto& row : init.ge) {
    Poly p = Poly::constant(row.offset);
    for (std::size_t i = 0; i < n; ++i) p += mu0[i].scaled(row.coeffs[i]);
    emit(std::move(p), false, "init_region");
  }
  for (const auto& row : init.eq) {
    Poly p = Poly::constant(row.offset);
    for (std::size_t i = 0; i < n; ++i) p += mu0[i].scaled(row.coeffs[i]);
    emit(std::move(p), true, "init_region");
  }
  if (init.points.size() == 1) {
    for (std::size_t i = 0; i < n; ++i)
      emit(mu0[i] - Poly::constant(init.points[0][i]), true, "init_point");
  }
  emit(cert.ranking_at(q0, mu0, one), false, "init_ranking");
  for (int k = 0; k < cert.invariant_size; ++k)
    emit(cert.invariant_at(q0, k, mu0, one), false, "init_invariant");
  return out;
}

ForallConstraint gen_buchi(int q, const LetterClass& cls,
                           std::optional<int> chosen, bool accepting,
                           const CertTemplate& cert, const SymbolicStep& st,
                           std::size_t n) {
  ForallConstraint c;
  std::vector<Poly> identity;
  for (std::size_t i = 0; i < n; ++i)
    identity.push_back(Poly::mu(static_cast<int>(i)));
  Poly one = Poly::constant(Rational(1));

  for (auto& p : simplex_premise(n)) c.premise.push_back(std::move(p));
  for (const auto& row : cls.guard) c.premise.push_back(row_to_poly(row));
  Poly c_here = cert.ranking_at(q, identity, one);
  c.premise.push_back(c_here);
  for (int k = 0; k < cert.invariant_size; ++k)
    c.premise.push_back(cert.invariant_at(q, k, identity, one));

  if (!chosen) {
    // empty successor disjunction: the premise region must be infeasible
    c.label = "buchi_q" + std::to_string(q) + "_l" + std::to_string(cls.letter) +
              "_dead";
    c.conclusion.push_back(Poly::constant(Rational(-1)));
    return c;
  }
  int q2 = *chosen;
  c.label = "buchi_q" + std::to_string(q) + "_l" + std::to_string(cls.letter) +
            "_to_q" + std::to_string(q2) + (accepting ? "_acc" : "_nonacc");
  Poly c_next = cert.ranking_at(q2, st.images, st.denominator);
  if (!accepting) {
    // (C(q,mu) - 1) * D - C(q', M(mu)) >= 0, after denominator clearing
    c.conclusion.push_back((c_here - one) * st.denominator - c_next);
  }
  c.conclusion.push_back(c_next);
  for (int k = 0; k < cert.invariant_size; ++k)
    c.conclusion.push_back(cert.invariant_at(q2, k, st.images, st.denominator));
  return c;
}

GeneratedConstraints gen_strategy_validity(const StrategyTemplate& st,
                                           const Mdp& mdp) {
  GeneratedConstraints out;
  const std::size_t n = mdp.num_states();
  if (st.cls == StrategyClass::Memoryless) {
    for (std::size_t s = 0; s < n; ++s) {
      Poly sum;
      for (int a : mdp.available[s]) {
        int var = st.prob.at({static_cast<int>(s), a});
        out.existential.push_back(
            {Poly::tvar(var), false, "strategy_s" + std::to_string(s)});
        sum += Poly::tvar(var);
      }
      out.existential.push_back({sum - Poly::constant(Rational(1)), true,
                                 "strategy_s" + std::to_string(s)});
    }
    return out;
  }
  for (std::size_t s = 0; s < n; ++s) {
    Poly den;
    for (int a : mdp.available[s]) {
      const auto& row = st.rows.at({static_cast<int>(s), a});
      Poly numer = Poly::tvar(row.offset);
      for (std::size_t i = 0; i < n; ++i)
        numer += Poly::tvar(row.coeffs[i]) * Poly::mu(static_cast<int>(i));
      den += numer;
      ForallConstraint c;
      c.label = "strategy_s" + std::to_string(s) + "_a" + std::to_string(a);
      c.premise = simplex_premise(n);
      c.conclusion.push_back(std::move(numer));
      out.forall.push_back(std::move(c));
    }
    ForallConstraint c;
    c.label = "strategy_s" + std::to_string(s) + "_den";
    c.premise = simplex_premise(n);
    c.conclusion.push_back(den - Poly::constant(st.eps_den));
    out.forall.push_back(std::move(c));
  }
  return out;
}

GeneratedConstraints gen_system(const Pdts& pdts, const CertTemplate& cert,
                                const SymbolicStep& step,
                                const SuccessorChoice& choice, InitMode mode,
                                VarTable& vars,
                                const StrategyTemplate* strategy) {
  const std::size_t n = pdts.num_variables();
  GeneratedConstraints out =
      gen_initial(mode, pdts.init, cert, pdts.nba.initial, n, vars);
  for (int q = 0; q < pdts.num_locations(); ++q) {
    for (const auto& cls : pdts.classes[q]) {
      std::optional<int> chosen;
      if (!cls.successors.empty()) chosen = choice.at(q, cls.letter);
      out.forall.push_back(gen_buchi(q, cls, chosen, pdts.nba.accepting[q],
                                     cert, step, n));
    }
  }
  if (strategy) {
    GeneratedConstraints sv = gen_strategy_validity(*strategy, pdts.mdp);
    for (auto& c : sv.forall) out.forall.push_back(std::move(c));
    for (auto& r : sv.existential) out.existential.push_back(std::move(r));
  }
  return out;
}

} // namespace distcert
