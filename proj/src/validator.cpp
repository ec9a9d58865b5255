#include "distcert/validator.hpp"

#include "distcert/errors.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

namespace distcert {

namespace {

Poly apply_row(const AffineRow& row, const std::vector<Poly>& images,
               const Poly& den) {
  Poly out = den.scaled(row.offset);
  for (std::size_t i = 0; i < row.coeffs.size(); ++i)
    if (row.coeffs[i] != 0) out += images[i].scaled(row.coeffs[i]);
  return out;
}

std::vector<Poly> identity_images(std::size_t n) {
  std::vector<Poly> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(Poly::mu(static_cast<int>(i)));
  return v;
}

bool all_linear(const std::vector<Poly>& premise, const Poly& conclusion) {
  for (const auto& p : premise)
    if (p.mu_degree() > 1) return false;
  return conclusion.mu_degree() <= 1;
}

std::string emit_check(const std::vector<Poly>& premise, const Poly* negated,
                       std::size_t n, bool linear, const VarTable& vars) {
  std::ostringstream out;
  out << "(set-logic " << (linear ? "QF_LRA" : "QF_NRA") << ")\n";
  for (std::size_t i = 0; i < n; ++i)
    out << "(declare-fun mu" << i << " () Real)\n";
  for (const auto& p : premise)
    out << "(assert (>= " << smt_term(p, vars, true) << " 0))\n";
  if (negated)
    out << "(assert (< " << smt_term(*negated, vars, true) << " 0))\n";
  out << "(check-sat)\n(get-model)\n";
  return out.str();
}

void simplex_points(std::size_t n, int denom,
                    std::vector<std::vector<Rational>>& out) {
  std::vector<int> parts(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == n) {
      parts[i] = left;
      std::vector<Rational> pt;
      for (int p : parts) pt.emplace_back(p, denom);
      out.push_back(std::move(pt));
      return;
    }
    for (int k = 0; k <= left; ++k) {
      parts[i] = k;
      rec(i + 1, left - k);
    }
  };
  if (n > 0) rec(0, denom);
}

/// Sampled fallback: grid with denominator 20 plus 10000 seeded random
/// points; the condition must hold at every sample meeting the premise.
ConditionResult sampled_check(const std::string& label,
                              const std::vector<Poly>& premise,
                              const Poly& conclusion, std::size_t n) {
  ConditionResult res;
  res.label = label;
  res.method = "sampled";
  std::vector<std::vector<Rational>> pts;
  simplex_points(n, 20, pts);
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<int> digit(0, 1000);
  for (int t = 0; t < 10000; ++t) {
    std::vector<Rational> pt(n);
    Rational total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      pt[i] = digit(rng);
      total += pt[i];
    }
    if (total == 0) continue;
    for (auto& v : pt) v /= total;
    pts.push_back(std::move(pt));
  }
  const std::map<int, Rational> no_tpl;
  for (const auto& pt : pts) {
    bool in_region = true;
    for (const auto& p : premise)
      if (p.eval(pt, no_tpl) < 0) { in_region = false; break; }
    if (!in_region) continue;
    if (conclusion.eval(pt, no_tpl) < 0) {
      res.passed = false;
      std::ostringstream w;
      w << "violated at (";
      for (std::size_t i = 0; i < n; ++i)
        w << (i ? ", " : "") << to_string(pt[i]);
      w << ")";
      res.detail = w.str();
      return res;
    }
  }
  res.passed = true;
  res.detail = "validated (sampled)";
  return res;
}

ConditionResult negation_unsat(const std::string& label,
                               const std::vector<Poly>& premise,
                               const Poly& conclusion, std::size_t n,
                               const std::string& solver_cmd,
                               std::chrono::duration<double> timeout) {
  ConditionResult res;
  res.label = label;
  res.method = "exact";
  VarTable dummy;
  bool linear = all_linear(premise, conclusion);
  SolverOutcome oc = invoke_solver(
      emit_check(premise, &conclusion, n, linear, dummy), solver_cmd, timeout);
  switch (oc.status) {
    case SolverStatus::Unsat:
      res.passed = true;
      return res;
    case SolverStatus::Sat: {
      res.passed = false;
      std::size_t cut = oc.raw.find("\n(");
      res.detail = "counterexample: " +
                   (cut == std::string::npos ? oc.raw : oc.raw.substr(cut + 1));
      if (res.detail.size() > 400) res.detail.resize(400);
      return res;
    }
    case SolverStatus::Unknown:
      if (!linear) return sampled_check(label, premise, conclusion, n);
      res.passed = false;
      res.detail = "solver returned unknown on a linear check";
      return res;
    case SolverStatus::Timeout:
      res.passed = false;
      res.detail = "solver timeout";
      return res;
    default:
      res.passed = false;
      res.detail = "solver error: " + oc.raw.substr(0, 200);
      return res;
  }
}

ConditionResult premise_unsat(const std::string& label,
                              const std::vector<Poly>& premise, std::size_t n,
                              const std::string& solver_cmd,
                              std::chrono::duration<double> timeout) {
  ConditionResult res;
  res.label = label;
  res.method = "exact";
  bool linear = true;
  for (const auto& p : premise)
    if (p.mu_degree() > 1) linear = false;
  VarTable dummy;
  SolverOutcome oc = invoke_solver(emit_check(premise, nullptr, n, linear, dummy),
                                   solver_cmd, timeout);
  res.passed = oc.status == SolverStatus::Unsat;
  if (!res.passed)
    res.detail = "premise region is reachable but has no automaton successor (" +
                 status_name(oc.status) + ")";
  return res;
}

} // namespace

std::string ValidationReport::text() const {
  std::ostringstream out;
  for (const auto& c : conditions) {
    out << (c.passed ? "PASS" : "FAIL") << "  " << c.label << "  [" << c.method
        << "]";
    if (!c.detail.empty()) out << "  " << c.detail;
    out << "\n";
  }
  out << (passed ? (sampled ? "certificate validated (sampled)"
                            : "certificate validated")
                 : "certificate REJECTED")
      << "\n";
  return out.str();
}

ValidationReport check_certificate(const CertificateSolution& sol,
                                   const Mdp& mdp, const Nba& nba,
                                   const InitRegion& init, InitMode mode,
                                   const Strategy& strategy,
                                   const std::string& solver_cmd,
                                   std::chrono::duration<double> timeout) {
  const std::size_t n = mdp.num_states();
  if (static_cast<int>(sol.ranking.size()) != nba.num_states ||
      static_cast<int>(sol.invariant.size()) != nba.num_states)
    throw ContractError("certificate dimensions do not match the automaton");
  for (const auto& row : sol.ranking)
    if (row.coeffs.size() != n)
      throw ContractError("ranking row dimension mismatch");

  ValidationReport rep;
  rep.passed = true;
  auto record = [&](ConditionResult r) {
    if (!r.passed) rep.passed = false;
    if (r.method == "sampled" && r.passed) rep.sampled = true;
    rep.conditions.push_back(std::move(r));
  };

  SymbolicStep st = concrete_step(mdp, strategy);
  Pdts pdts = build_pdts(mdp, nba, init, UpdateKind::FixedStrategy);
  auto identity = identity_images(n);
  Poly one = Poly::constant(Rational(1));
  const int q0 = nba.initial;
  const std::size_t ni = sol.invariant.empty() ? 0 : sol.invariant[0].size();

  // Initial condition
  if (mode == InitMode::Universal) {
    std::vector<Poly> premise = simplex_premise(n);
    for (const auto& row : init.premise_rows(n))
      premise.push_back(row_to_poly(row));
    record(negation_unsat("init_ranking", premise,
                          row_to_poly(sol.ranking[q0]), n, solver_cmd,
                          timeout));
    for (std::size_t k = 0; k < ni; ++k)
      record(negation_unsat("init_invariant_k" + std::to_string(k), premise,
                            row_to_poly(sol.invariant[q0][k]), n, solver_cmd,
                            timeout));
  } else {
    std::vector<Rational> pt;
    if (!init.points.empty()) {
      pt = init.points[0].mass;
    } else {
      auto ge = simplex_ge_rows(n);
      for (const auto& r : init.ge) ge.push_back(r);
      std::vector<AffineRow> eq = {simplex_sum_row(n)};
      for (const auto& r : init.eq) eq.push_back(r);
      auto found = lp_feasible_point(ge, eq, n);
      if (!found) throw SemanticError("initial region is empty");
      pt = *found;
    }
    ConditionResult r;
    r.label = "init_ranking";
    r.method = "eval";
    Rational v = sol.ranking[q0].eval(pt);
    r.passed = v >= 0;
    r.detail = "value " + to_string(v) + " at the initial point";
    record(std::move(r));
    for (std::size_t k = 0; k < ni; ++k) {
      ConditionResult ri;
      ri.label = "init_invariant_k" + std::to_string(k);
      ri.method = "eval";
      Rational vi = sol.invariant[q0][k].eval(pt);
      ri.passed = vi >= 0;
      ri.detail = "value " + to_string(vi) + " at the initial point";
      record(std::move(ri));
    }
  }

  // Buchi ranking conditions, one group per (location, letter class)
  for (int q = 0; q < nba.num_states; ++q) {
    Poly c_here = row_to_poly(sol.ranking[q]);
    for (const auto& cls : pdts.classes[q]) {
      std::vector<Poly> premise = simplex_premise(n);
      for (const auto& g : cls.guard) premise.push_back(row_to_poly(g));
      premise.push_back(c_here);
      for (std::size_t k = 0; k < ni; ++k)
        premise.push_back(row_to_poly(sol.invariant[q][k]));
      std::string base =
          "buchi_q" + std::to_string(q) + "_l" + std::to_string(cls.letter);

      if (cls.successors.empty()) {
        record(premise_unsat(base + "_dead", premise, n, solver_cmd, timeout));
        continue;
      }

      // recorded successor first, then the remaining disjuncts
      std::vector<int> order;
      auto rec = sol.choice.chosen.find({q, cls.letter});
      if (rec != sol.choice.chosen.end()) order.push_back(rec->second);
      for (int q2 : cls.successors)
        if (std::find(order.begin(), order.end(), q2) == order.end())
          order.push_back(q2);

      bool group_ok = false;
      std::vector<ConditionResult> first_attempt;
      for (std::size_t oi = 0; oi < order.size() && !group_ok; ++oi) {
        int q2 = order[oi];
        std::vector<std::pair<std::string, Poly>> rows;
        Poly c_next = apply_row(sol.ranking[q2], st.images, st.denominator);
        if (!nba.accepting[q])
          rows.emplace_back("decrease",
                            (c_here - one) * st.denominator - c_next);
        rows.emplace_back("nonneg", c_next);
        for (std::size_t k = 0; k < ni; ++k)
          rows.emplace_back("invariant_k" + std::to_string(k),
                            apply_row(sol.invariant[q2][k], st.images,
                                      st.denominator));
        std::vector<ConditionResult> attempt;
        bool ok = true;
        for (auto& [tag, poly] : rows) {
          auto r = negation_unsat(base + "_to_q" + std::to_string(q2) + "_" +
                                      tag,
                                  premise, poly, n, solver_cmd, timeout);
          ok = ok && r.passed;
          attempt.push_back(std::move(r));
          if (!ok) break;
        }
        if (ok) {
          if (oi > 0)
            attempt.back().detail +=
                " (recorded successor failed; q" + std::to_string(q2) +
                " satisfies the disjunction)";
          for (auto& r : attempt) record(std::move(r));
          group_ok = true;
        } else if (oi == 0) {
          first_attempt = std::move(attempt);
        }
      }
      if (!group_ok)
        for (auto& r : first_attempt) record(std::move(r));
    }
  }
  return rep;
}

std::string SimulationReport::text() const {
  std::ostringstream out;
  out << "verdict: " << verdict << "\n";
  if (inconsistent_at >= 0)
    out << "monitor rejected at step " << inconsistent_at << "\n";
  if (converged_at >= 0)
    out << "converged at step " << converged_at << " with letter 0x" << std::hex
        << limit_letter << std::dec << "\n";
  out << "accepting location reachable at " << accepting_steps.size()
      << " of " << letters.size() << " steps\n";
  return out.str();
}

SimulationReport simulate_monitor(const Mdp& mdp, const Strategy& strategy,
                                  const Distribution& mu0, const Nba& nba,
                                  int steps, const Rational& tol) {
  if (steps < 1) throw ContractError("steps must be >= 1");
  SimulationReport rep;
  rep.trajectory = trajectory(mdp, strategy, mu0, steps);

  std::vector<bool> reach(nba.num_states, false);
  reach[nba.initial] = true;
  auto meets_accepting = [&](const std::vector<bool>& r) {
    for (int q = 0; q < nba.num_states; ++q)
      if (r[q] && nba.accepting[q]) return true;
    return false;
  };

  bool alive = true;
  for (int i = 0; i <= steps; ++i) {
    const Distribution& mu = rep.trajectory[i];
    Letter sigma = letter_of(nba.ap, mu);
    rep.letters.push_back(sigma);
    if (alive && meets_accepting(reach)) rep.accepting_steps.push_back(i);
    if (rep.converged_at < 0 && i >= 1) {
      Rational diff = 0;
      for (std::size_t j = 0; j < mu.size(); ++j) {
        Rational d = mu[j] - rep.trajectory[i - 1][j];
        if (d < 0) d = -d;
        if (d > diff) diff = d;
      }
      if (diff < tol) {
        rep.converged_at = i;
        rep.limit_letter = sigma;
      }
    }
    if (!alive || i == steps) continue;
    std::vector<bool> next(nba.num_states, false);
    bool any = false;
    for (int q = 0; q < nba.num_states; ++q) {
      if (!reach[q]) continue;
      for (int t : nba.delta[q][sigma]) {
        next[t] = true;
        any = true;
      }
    }
    reach = std::move(next);
    if (!any) {
      alive = false;
      rep.inconsistent_at = i;
    }
  }

  if (!alive) {
    rep.verdict = "inconsistent";
    return rep;
  }
  if (rep.converged_at < 0) {
    rep.verdict = "inconclusive";
    return rep;
  }
  // judge the constant-letter lasso from the current reach set
  Letter sigma = rep.limit_letter;
  std::vector<bool> reachable = reach;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int q = 0; q < nba.num_states; ++q) {
      if (!reachable[q]) continue;
      for (int t : nba.delta[q][sigma])
        if (!reachable[t]) {
          reachable[t] = true;
          changed = true;
        }
    }
  }
  bool lasso = false;
  for (int f = 0; f < nba.num_states && !lasso; ++f) {
    if (!nba.accepting[f] || !reachable[f]) continue;
    // f must reach itself in >= 1 step under sigma
    std::vector<bool> from_f(nba.num_states, false);
    for (int t : nba.delta[f][sigma]) from_f[t] = true;
    bool grow = true;
    while (grow) {
      grow = false;
      for (int q = 0; q < nba.num_states; ++q) {
        if (!from_f[q]) continue;
        for (int t : nba.delta[q][sigma])
          if (!from_f[t]) {
            from_f[t] = true;
            grow = true;
          }
      }
    }
    if (from_f[f]) lasso = true;
  }
  rep.verdict = lasso ? "consistent" : "inconclusive";
  return rep;
}

std::string write_certificate(const CertificateSolution& sol, const Mdp& mdp) {
  std::ostringstream out;
  out << "certificate\n";
  auto put_row = [&](const AffineRow& row) {
    for (std::size_t i = 0; i < row.coeffs.size(); ++i)
      out << to_string(row.coeffs[i]) << " ";
    out << "| " << to_string(row.offset) << "\n";
  };
  for (std::size_t q = 0; q < sol.ranking.size(); ++q) {
    out << "ranking q" << q << ": ";
    put_row(sol.ranking[q]);
  }
  for (std::size_t q = 0; q < sol.invariant.size(); ++q)
    for (std::size_t k = 0; k < sol.invariant[q].size(); ++k) {
      out << "invariant q" << q << " k" << k << ": ";
      put_row(sol.invariant[q][k]);
    }
  for (const auto& [key, q2] : sol.choice.chosen)
    out << "choice q" << key.first << " l" << key.second << ": q" << q2 << "\n";
  if (!sol.strategy) {
    out << "strategy given\n";
  } else if (const auto* ms = std::get_if<MemorylessStrategy>(&*sol.strategy)) {
    out << "strategy memoryless\n";
    for (const auto& [key, p] : ms->prob)
      out << mdp.states[key.first] << " " << mdp.actions[key.second] << ": "
          << to_string(p) << "\n";
  } else {
    const auto& ds = std::get<AffineDistStrategy>(*sol.strategy);
    out << "strategy affine\n";
    out << "eps: " << to_string(ds.eps_den) << "\n";
    for (const auto& [key, row] : ds.numerator) {
      out << mdp.states[key.first] << " " << mdp.actions[key.second] << ": ";
      for (const auto& c : row.coeffs) out << to_string(c) << " ";
      out << "| " << to_string(row.offset) << "\n";
    }
  }
  return out.str();
}

namespace {

AffineRow parse_cert_row(const std::string& body, std::size_t n, int lineno) {
  std::istringstream in(body);
  AffineRow row;
  std::string tok;
  bool after_bar = false;
  while (in >> tok) {
    if (tok == "|") {
      after_bar = true;
      continue;
    }
    auto r = parse_rational(tok);
    if (!r) throw ParseError("bad rational '" + tok + "'", lineno);
    if (after_bar)
      row.offset = *r;
    else
      row.coeffs.push_back(*r);
  }
  if (!after_bar) throw ParseError("missing '|' before offset", lineno);
  if (row.coeffs.size() != n)
    throw ParseError("row has " + std::to_string(row.coeffs.size()) +
                     " coefficients, expected " + std::to_string(n), lineno);
  return row;
}

} // namespace

CertificateSolution read_certificate(const std::string& text, const Mdp& mdp,
                                     const Nba& nba) {
  const std::size_t n = mdp.num_states();
  CertificateSolution sol;
  sol.ranking.resize(nba.num_states);
  sol.invariant.resize(nba.num_states);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  enum class Section { Header, Body, Memoryless, Affine } section =
      Section::Header;
  MemorylessStrategy ms;
  AffineDistStrategy ds;
  bool have_ms = false, have_ds = false;

  auto parse_sa = [&](const std::string& head, int lineno_) {
    std::istringstream hs(head);
    std::string sname, aname;
    hs >> sname >> aname;
    int s = mdp.state_index(sname);
    int a = mdp.action_index(aname);
    if (s < 0 || a < 0)
      throw ParseError("unknown state or action '" + head + "'", lineno_);
    return std::make_pair(s, a);
  };

  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' ||
                             line.back() == '\t'))
      line.pop_back();
    if (section == Section::Header) {
      if (line != "certificate")
        throw ParseError("expected 'certificate' header", lineno);
      section = Section::Body;
      continue;
    }
    if (line == "strategy given") continue;
    if (line == "strategy memoryless") {
      section = Section::Memoryless;
      have_ms = true;
      continue;
    }
    if (line == "strategy affine") {
      section = Section::Affine;
      have_ds = true;
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError("expected 'key: value'", lineno);
    std::string key = line.substr(0, colon);
    std::string body = line.substr(colon + 1);

    if (section == Section::Memoryless) {
      auto [s, a] = parse_sa(key, lineno);
      auto r = parse_rational(body);
      if (!r) throw ParseError("bad probability '" + body + "'", lineno);
      ms.prob[{s, a}] = *r;
      continue;
    }
    if (section == Section::Affine) {
      if (key == "eps") {
        auto r = parse_rational(body);
        if (!r) throw ParseError("bad eps '" + body + "'", lineno);
        ds.eps_den = *r;
        continue;
      }
      auto [s, a] = parse_sa(key, lineno);
      AffineRow row = parse_cert_row(body, n, lineno);
      ds.numerator[{s, a}] = {row.coeffs, row.offset};
      continue;
    }

    std::istringstream ks(key);
    std::string kind;
    ks >> kind;
    if (kind == "ranking") {
      std::string qtok;
      ks >> qtok;
      if (qtok.size() < 2 || qtok[0] != 'q')
        throw ParseError("expected 'ranking q<i>'", lineno);
      int q = std::stoi(qtok.substr(1));
      if (q < 0 || q >= nba.num_states)
        throw ParseError("automaton state out of range", lineno);
      sol.ranking[q] = parse_cert_row(body, n, lineno);
    } else if (kind == "invariant") {
      std::string qtok, ktok;
      ks >> qtok >> ktok;
      if (qtok.size() < 2 || qtok[0] != 'q' || ktok.size() < 2 ||
          ktok[0] != 'k')
        throw ParseError("expected 'invariant q<i> k<j>'", lineno);
      int q = std::stoi(qtok.substr(1));
      int k = std::stoi(ktok.substr(1));
      if (q < 0 || q >= nba.num_states)
        throw ParseError("automaton state out of range", lineno);
      auto& rows = sol.invariant[q];
      if (static_cast<int>(rows.size()) <= k) rows.resize(k + 1);
      rows[k] = parse_cert_row(body, n, lineno);
    } else if (kind == "choice") {
      std::string qtok, ltok;
      ks >> qtok >> ltok;
      std::string q2tok = body;
      auto f2 = q2tok.find_first_not_of(" \t");
      if (f2 != std::string::npos) q2tok = q2tok.substr(f2);
      if (qtok.size() < 2 || qtok[0] != 'q' || ltok.size() < 2 ||
          ltok[0] != 'l' || q2tok.size() < 2 || q2tok[0] != 'q')
        throw ParseError("expected 'choice q<i> l<letter>: q<j>'", lineno);
      sol.choice.chosen[{std::stoi(qtok.substr(1)),
                         static_cast<Letter>(std::stoul(ltok.substr(1)))}] =
          std::stoi(q2tok.substr(1));
    } else {
      throw ParseError("unknown certificate line '" + kind + "'", lineno);
    }
  }
  if (have_ms) sol.strategy = std::move(ms);
  if (have_ds) sol.strategy = std::move(ds);
  for (int q = 0; q < nba.num_states; ++q)
    if (sol.ranking[q].coeffs.size() != n)
      throw SemanticError("certificate is missing ranking row for q" +
                          std::to_string(q));
  return sol;
}

} // namespace distcert
