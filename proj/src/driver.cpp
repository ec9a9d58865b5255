#include "distcert/driver.hpp"

#include "distcert/errors.hpp"
#include "distcert/farkas.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace distcert {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// The bilinear multiplier-times-template products make the full system hard
// for NRA solvers, so each choice runs a ladder of sound restrictions before
// the unrestricted system: (a) invariant template pinned to zero, (b) the
// multipliers attached to ranking-template premise rows pinned to zero.
ExistentialSystem pin_invariant(const ExistentialSystem& sys,
                                const CertTemplate& cert) {
  ExistentialSystem pinned = sys;
  for (const auto& rows : cert.invariant) {
    for (const auto& row : rows) {
      for (int id : row.coeffs)
        pinned.relations.push_back({Poly::tvar(id), true, "invariant_pin"});
      pinned.relations.push_back({Poly::tvar(row.offset), true,
                                  "invariant_pin"});
    }
  }
  return pinned;
}

bool mentions_any(const Poly& p, const std::set<int>& tpl_ids) {
  for (const auto& [mono, coeff] : p.terms())
    for (const auto& [v, e] : mono)
      if (!v.is_mu() && tpl_ids.count(v.table_index())) return true;
  return false;
}

ExistentialSystem pin_ranking_multipliers(const ExistentialSystem& sys,
                                          const CertTemplate& cert) {
  std::set<int> rank_vars;
  for (const auto& row : cert.ranking) {
    for (int id : row.coeffs) rank_vars.insert(id);
    rank_vars.insert(row.offset);
  }
  ExistentialSystem pinned = sys;
  for (std::size_t i = 0; i < sys.multipliers.size(); ++i)
    if (mentions_any(sys.products[i], rank_vars))
      pinned.relations.push_back({Poly::tvar(sys.multipliers[i]), true,
                                  "ranking_row_pin"});
  return pinned;
}

// Greedy sparsification: zero every certificate entry whose removal keeps
// the validator green. Solver models carry arbitrary slack values; after
// this pass each remaining nonzero entry is load-bearing.
void sparsify_certificate(CertificateSolution& sol, const Mdp& mdp,
                          const Nba& nba, const InitRegion& init,
                          InitMode mode, const Strategy& strategy,
                          const PipelineOptions& opt) {
  auto still_valid = [&] {
    return check_certificate(sol, mdp, nba, init, mode, strategy,
                             opt.solver_cmd, opt.timeout)
        .passed;
  };
  auto try_zero = [&](Rational& slot) {
    if (slot == 0) return;
    Rational saved = std::move(slot);
    slot = 0;
    if (!still_valid()) slot = std::move(saved);
  };
  for (auto& row : sol.ranking) {
    for (auto& c : row.coeffs) try_zero(c);
    try_zero(row.offset);
  }
  for (auto& rows : sol.invariant)
    for (auto& row : rows) {
      for (auto& c : row.coeffs) try_zero(c);
      try_zero(row.offset);
    }
}

int needed_degree(const GeneratedConstraints& gc, int requested) {
  int deg = 1;
  for (const auto& fc : gc.forall) {
    for (const auto& g : fc.conclusion)
      if (g.mu_degree() > deg) deg = g.mu_degree();
    for (const auto& p : fc.premise)
      if (p.mu_degree() > deg) deg = p.mu_degree();
  }
  return deg <= 1 ? 1 : std::max(deg, requested);
}

} // namespace

PipelineResult run_pipeline(const Mdp& mdp, const Nba& nba,
                            const InitRegion& init,
                            const std::optional<Strategy>& given,
                            const PipelineOptions& opt) {
  PipelineResult res;
  auto t0 = std::chrono::steady_clock::now();

  const std::size_t n = mdp.num_states();
  Pdts pdts = build_pdts(mdp, nba, init,
                         given ? UpdateKind::FixedStrategy
                               : UpdateKind::SymbolicStrategy);

  VarTable base;
  CertTemplate cert = make_cert_template(nba, n, opt.invariant_size, base);
  std::optional<StrategyTemplate> stpl;
  SymbolicStep step;
  if (given) {
    step = concrete_step(mdp, *given);
  } else {
    stpl = make_strategy_template(mdp, opt.strategy_class, base, opt.eps_den);
    step = symbolic_step(mdp, *stpl);
  }
  res.coeff_count = base.size();
  res.t_build = seconds_since(t0);

  ChoiceEnumerator en(pdts, opt.choice_budget);
  while (auto choice = en.next()) {
    VarTable vars = base;
    auto t1 = std::chrono::steady_clock::now();
    GeneratedConstraints gc =
        gen_system(pdts, cert, step, *choice, opt.init_mode, vars,
                   stpl ? &*stpl : nullptr);
    int deg = needed_degree(gc, opt.handelman_degree);
    ExistentialSystem sys = deg <= 1 ? farkas_transform(gc, n, vars)
                                     : handelman_transform(gc, deg, n, vars);
    std::string smt = emit_smtlib(sys, vars);
    res.t_transform += seconds_since(t1);
    if (res.first_smtlib.empty()) {
      res.first_smtlib = smt;
      res.constraint_count = sys.relations.size();
    }
    if (!opt.emit_smt_path.empty()) {
      std::ofstream out(opt.emit_smt_path, std::ios::binary);
      if (!out) throw SemanticError("cannot write " + opt.emit_smt_path);
      out << smt;
      res.emitted_only = true;
      return res;
    }

    auto t2 = std::chrono::steady_clock::now();
    SolverOutcome oc;
    for (const std::string& stage :
         {emit_smtlib(pin_ranking_multipliers(pin_invariant(sys, cert), cert),
                      vars),
          emit_smtlib(pin_ranking_multipliers(sys, cert), vars),
          emit_smtlib(pin_invariant(sys, cert), vars), smt}) {
      oc = invoke_solver(stage, opt.solver_cmd, opt.timeout);
      if (oc.status == SolverStatus::Sat ||
          oc.status == SolverStatus::SolverError)
        break;
    }
    res.t_solve += seconds_since(t2);
    res.per_choice.push_back({*choice, oc.status, oc.wall_time.count()});
    if (oc.status == SolverStatus::SolverError)
      throw SemanticError("solver failed: " + oc.raw.substr(0, 300));
    if (oc.status != SolverStatus::Sat) continue;

    auto model = parse_model(oc.raw, vars);
    CertificateSolution sol =
        extract_solution(model, cert, stpl ? &*stpl : nullptr, mdp, *choice);
    const Strategy& effective = given ? *given : *sol.strategy;
    auto t3 = std::chrono::steady_clock::now();
    ValidationReport vr =
        check_certificate(sol, mdp, nba, init, opt.init_mode, effective,
                          opt.solver_cmd, opt.timeout);
    res.t_validate += seconds_since(t3);
    res.solution = std::move(sol);
    res.validation = std::move(vr);
    if (res.validation->passed) {
      res.solved = true;
      // Solver models can sit arbitrarily close to the feasibility
      // boundary. When the synthesized memoryless strategy is not already
      // deterministic, try its per-state rounding (all mass on the most
      // probable action); keep it if it admits a certificate of its own.
      if (!given && res.solution->strategy) {
        if (const auto* ms =
                std::get_if<MemorylessStrategy>(&*res.solution->strategy)) {
          MemorylessStrategy rounded;
          bool already = true;
          for (std::size_t s = 0; s < n; ++s) {
            int best = -1;
            Rational best_p(-1);
            for (int a : mdp.available[s]) {
              auto it = ms->prob.find({static_cast<int>(s), a});
              Rational p = it == ms->prob.end() ? Rational(0) : it->second;
              if (p > best_p) {
                best_p = p;
                best = a;
              }
            }
            for (int a : mdp.available[s]) {
              Rational p(a == best ? 1 : 0);
              rounded.prob[{static_cast<int>(s), a}] = p;
              auto it = ms->prob.find({static_cast<int>(s), a});
              if ((it == ms->prob.end() ? Rational(0) : it->second) != p)
                already = false;
            }
          }
          if (!already) {
            PipelineOptions vopt = opt;
            vopt.emit_smt_path.clear();
            if (vopt.timeout > std::chrono::duration<double>(30.0))
              vopt.timeout = std::chrono::duration<double>(30.0);
            PipelineResult ver =
                run_pipeline(mdp, nba, init, Strategy{rounded}, vopt);
            res.t_solve += ver.t_solve;
            res.t_validate += ver.t_validate;
            if (ver.solved) {
              res.solution = std::move(ver.solution);
              res.solution->strategy = std::move(rounded);
              res.validation = std::move(ver.validation);
              for (auto& pc : ver.per_choice)
                res.per_choice.push_back(std::move(pc));
            }
          }
        }
      }
      auto t4 = std::chrono::steady_clock::now();
      const Strategy& final_strategy =
          given ? *given : *res.solution->strategy;
      sparsify_certificate(*res.solution, mdp, nba, init, opt.init_mode,
                           final_strategy, opt);
      res.validation =
          check_certificate(*res.solution, mdp, nba, init, opt.init_mode,
                            final_strategy, opt.solver_cmd, opt.timeout);
      res.t_validate += seconds_since(t4);
      return res;
    }
    // keep the rejected candidate for the report but try other choices
  }
  res.budget_exhausted = en.budget_exhausted();
  return res;
}

Strategy parse_strategy(const std::string& text, const Mdp& mdp) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  enum class Kind { None, Memoryless, Affine } kind = Kind::None;
  MemorylessStrategy ms;
  AffineDistStrategy ds;
  const std::size_t n = mdp.num_states();

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
    if (kind == Kind::None) {
      if (line == "memoryless")
        kind = Kind::Memoryless;
      else if (line == "affine")
        kind = Kind::Affine;
      else
        throw ParseError("expected 'memoryless' or 'affine' header", lineno);
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError("expected '<state> <action>: ...'", lineno);
    std::string head = line.substr(0, colon);
    std::string body = line.substr(colon + 1);
    if (kind == Kind::Affine && head == "eps") {
      auto r = parse_rational(body);
      if (!r) throw ParseError("bad eps value", lineno);
      ds.eps_den = *r;
      continue;
    }
    std::istringstream hs(head);
    std::string sname, aname;
    hs >> sname >> aname;
    int s = mdp.state_index(sname);
    int a = mdp.action_index(aname);
    if (s < 0) throw ParseError("unknown state '" + sname + "'", lineno);
    if (a < 0) throw ParseError("unknown action '" + aname + "'", lineno);
    if (kind == Kind::Memoryless) {
      auto r = parse_rational(body);
      if (!r) throw ParseError("bad probability '" + body + "'", lineno);
      ms.prob[{s, a}] = *r;
    } else {
      std::istringstream bs(body);
      AffineDistStrategy::Row row;
      std::string tok;
      bool after_bar = false;
      while (bs >> tok) {
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
      if (row.coeffs.size() != n)
        throw ParseError("numerator row needs " + std::to_string(n) +
                         " coefficients", lineno);
      ds.numerator[{s, a}] = std::move(row);
    }
  }
  if (kind == Kind::None) throw SemanticError("empty strategy file");
  if (kind == Kind::Memoryless) {
    ms.validate(mdp);
    return ms;
  }
  ds.validate(mdp);
  return ds;
}

std::string write_strategy(const Strategy& strategy, const Mdp& mdp) {
  std::ostringstream out;
  if (const auto* ms = std::get_if<MemorylessStrategy>(&strategy)) {
    out << "memoryless\n";
    for (const auto& [key, p] : ms->prob)
      out << mdp.states[key.first] << " " << mdp.actions[key.second] << ": "
          << to_string(p) << "\n";
  } else {
    const auto& ds = std::get<AffineDistStrategy>(strategy);
    out << "affine\n";
    out << "eps: " << to_string(ds.eps_den) << "\n";
    for (const auto& [key, row] : ds.numerator) {
      out << mdp.states[key.first] << " " << mdp.actions[key.second] << ": ";
      for (const auto& c : row.coeffs) out << to_string(c) << " ";
      out << "| " << to_string(row.offset) << "\n";
    }
  }
  return out.str();
}

} // namespace distcert
