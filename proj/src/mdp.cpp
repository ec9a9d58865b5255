#include "distcert/mdp.hpp"

#include "distcert/errors.hpp"
#include "distcert/lp.hpp"

#include <algorithm>
#include <sstream>

namespace distcert {

void Distribution::validate() const {
  Rational sum = 0;
  for (const auto& p : mass) {
    if (p < 0) throw SemanticError("distribution entry " + to_string(p) + " < 0");
    sum += p;
  }
  if (sum != 1)
    throw SemanticError("distribution sums to " + to_string(sum) + " != 1");
}

int Mdp::state_index(const std::string& name) const {
  auto it = std::find(states.begin(), states.end(), name);
  return it == states.end() ? -1 : static_cast<int>(it - states.begin());
}

int Mdp::action_index(const std::string& name) const {
  auto it = std::find(actions.begin(), actions.end(), name);
  return it == actions.end() ? -1 : static_cast<int>(it - actions.begin());
}

const Distribution& Mdp::row(int s, int a) const {
  auto it = kernel.find({s, a});
  if (it == kernel.end())
    throw ContractError("kernel row (" + states.at(s) + ", " + actions.at(a) +
                        ") not defined");
  return it->second;
}

bool Mdp::is_chain() const {
  return std::all_of(available.begin(), available.end(),
                     [](const auto& acts) { return acts.size() == 1; });
}

void Mdp::validate() const {
  if (states.empty()) throw SemanticError("MDP has no states");
  if (available.size() != states.size())
    throw SemanticError("available-action table size mismatch");
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (available[s].empty())
      throw SemanticError("state " + states[s] + " has no available action");
    for (int a : available[s]) {
      if (a < 0 || a >= static_cast<int>(actions.size()))
        throw SemanticError("state " + states[s] + " references unknown action");
      auto it = kernel.find({static_cast<int>(s), a});
      if (it == kernel.end())
        throw SemanticError("missing kernel row for (" + states[s] + ", " +
                            actions[a] + ")");
      if (it->second.size() != states.size())
        throw SemanticError("kernel row dimension mismatch at (" + states[s] +
                            ", " + actions[a] + ")");
      Rational sum = 0;
      for (const auto& p : it->second.mass) {
        if (p < 0)
          throw SemanticError("negative probability in row (" + states[s] +
                              ", " + actions[a] + ")");
        sum += p;
      }
      if (sum != 1)
        throw SemanticError("row sum " + to_string(sum) + " != 1 at (" +
                            states[s] + ", " + actions[a] + ")");
    }
  }
  for (const auto& [key, dist] : kernel) {
    auto [s, a] = key;
    if (s < 0 || s >= static_cast<int>(states.size()) ||
        !std::count(available[s].begin(), available[s].end(), a))
      throw SemanticError("kernel row outside available-action domain");
    (void)dist;
  }
}

Rational MemorylessStrategy::at(int s, int a) const {
  auto it = prob.find({s, a});
  return it == prob.end() ? Rational(0) : it->second;
}

void MemorylessStrategy::validate(const Mdp& mdp) const {
  for (const auto& [key, p] : prob) {
    auto [s, a] = key;
    if (p < 0)
      throw SemanticError("strategy probability " + to_string(p) + " < 0");
    if (p > 0 && !std::count(mdp.available[s].begin(), mdp.available[s].end(), a))
      throw SemanticError("strategy puts mass on unavailable action at state " +
                          mdp.states.at(s));
  }
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    Rational sum = 0;
    for (int a : mdp.available[s]) sum += at(static_cast<int>(s), a);
    if (sum != 1)
      throw SemanticError("strategy row at state " + mdp.states[s] +
                          " sums to " + to_string(sum) + " != 1");
  }
}

Rational AffineDistStrategy::numerator_at(int s, int a,
                                          const Distribution& mu) const {
  auto it = numerator.find({s, a});
  if (it == numerator.end())
    throw ContractError("no numerator row for state/action pair");
  Rational v = it->second.offset;
  for (std::size_t i = 0; i < mu.size(); ++i) v += it->second.coeffs[i] * mu[i];
  return v;
}

Rational AffineDistStrategy::denominator_at(int s, const Distribution& mu) const {
  Rational d = 0;
  for (const auto& [key, row] : numerator) {
    if (key.first != s) continue;
    Rational v = row.offset;
    for (std::size_t i = 0; i < mu.size(); ++i) v += row.coeffs[i] * mu[i];
    d += v;
  }
  return d;
}

void AffineDistStrategy::validate(const Mdp& mdp) const {
  const std::size_t n = mdp.num_states();
  auto ge = simplex_ge_rows(n);
  std::vector<AffineRow> eq = {simplex_sum_row(n)};
  for (const auto& [key, row] : numerator) {
    AffineRow obj{row.coeffs, row.offset};
    LpResult r = lp_minimize(obj, ge, eq, n);
    if (r.status != LpStatus::Optimal || r.value < 0)
      throw SemanticError("strategy numerator at (" + mdp.states.at(key.first) +
                          ", " + mdp.actions.at(key.second) +
                          ") is negative somewhere on the simplex");
  }
  for (std::size_t s = 0; s < n; ++s) {
    AffineRow obj;
    obj.coeffs.assign(n, Rational(0));
    for (const auto& [key, row] : numerator) {
      if (key.first != static_cast<int>(s)) continue;
      for (std::size_t i = 0; i < n; ++i) obj.coeffs[i] += row.coeffs[i];
      obj.offset += row.offset;
    }
    LpResult r = lp_minimize(obj, ge, eq, n);
    if (r.status != LpStatus::Optimal || r.value < eps_den)
      throw SemanticError("strategy denominator at state " + mdp.states[s] +
                          " drops below " + to_string(eps_den) +
                          " on the simplex");
  }
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

} // namespace

Mdp parse_mdp(const std::string& text) {
  Mdp mdp;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool seen_states = false, seen_actions = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "states:") {
      if (seen_states) throw ParseError("duplicate states: line", lineno);
      mdp.states.assign(toks.begin() + 1, toks.end());
      if (mdp.states.empty()) throw ParseError("empty state list", lineno);
      seen_states = true;
      mdp.available.assign(mdp.states.size(), {});
    } else if (toks[0] == "actions:") {
      if (seen_actions) throw ParseError("duplicate actions: line", lineno);
      mdp.actions.assign(toks.begin() + 1, toks.end());
      if (mdp.actions.empty()) throw ParseError("empty action list", lineno);
      seen_actions = true;
    } else if (toks[0] == "trans") {
      if (!seen_states || !seen_actions)
        throw ParseError("trans before states:/actions: headers", lineno);
      if (toks.size() < 5 || toks[3] != "->")
        throw ParseError("expected: trans <state> <action> -> <state>:<p> ...",
                         lineno);
      int s = mdp.state_index(toks[1]);
      if (s < 0) throw ParseError("unknown state '" + toks[1] + "'", lineno);
      int a = mdp.action_index(toks[2]);
      if (a < 0) throw ParseError("unknown action '" + toks[2] + "'", lineno);
      if (mdp.kernel.count({s, a}))
        throw ParseError("duplicate trans row for (" + toks[1] + ", " +
                         toks[2] + ")", lineno);
      Distribution dist;
      dist.mass.assign(mdp.states.size(), Rational(0));
      Rational sum = 0;
      for (std::size_t i = 4; i < toks.size(); ++i) {
        auto colon = toks[i].rfind(':');
        if (colon == std::string::npos)
          throw ParseError("expected <state>:<rational>, got '" + toks[i] + "'",
                           lineno);
        int target = mdp.state_index(toks[i].substr(0, colon));
        if (target < 0)
          throw ParseError("unknown state '" + toks[i].substr(0, colon) + "'",
                           lineno);
        auto p = parse_rational(toks[i].substr(colon + 1));
        if (!p)
          throw ParseError("bad rational '" + toks[i].substr(colon + 1) + "'",
                           lineno);
        if (*p < 0) throw ParseError("negative probability", lineno);
        dist.mass[target] += *p;
        sum += *p;
      }
      if (sum != 1)
        throw SemanticError("line " + std::to_string(lineno) + ": row sum " +
                            to_string(sum) + " != 1");
      mdp.available[s].push_back(a);
      mdp.kernel.emplace(std::make_pair(s, a), std::move(dist));
    } else {
      throw ParseError("unrecognized directive '" + toks[0] + "'", lineno);
    }
  }
  if (!seen_states) throw ParseError("missing states: header", lineno);
  if (!seen_actions) throw ParseError("missing actions: header", lineno);
  for (auto& acts : mdp.available) std::sort(acts.begin(), acts.end());
  mdp.validate();
  return mdp;
}

Distribution step(const Mdp& mdp, const Strategy& strategy,
                  const Distribution& mu) {
  if (mu.size() != mdp.num_states())
    throw ContractError("distribution dimension mismatch");
  const std::size_t n = mdp.num_states();
  Distribution out;
  out.mass.assign(n, Rational(0));
  for (std::size_t s = 0; s < n; ++s) {
    if (mu[s] == 0 && std::holds_alternative<MemorylessStrategy>(strategy))
      continue;
    for (int a : mdp.available[s]) {
      Rational pi_sa;
      if (const auto* ms = std::get_if<MemorylessStrategy>(&strategy)) {
        pi_sa = ms->at(static_cast<int>(s), a);
      } else {
        const auto& ds = std::get<AffineDistStrategy>(strategy);
        Rational den = ds.denominator_at(static_cast<int>(s), mu);
        if (den == 0)
          throw SemanticError("affine strategy denominator vanishes at state " +
                              mdp.states[s]);
        pi_sa = ds.numerator_at(static_cast<int>(s), a, mu) / den;
      }
      if (pi_sa == 0 || mu[s] == 0) continue;
      const Distribution& p = mdp.row(static_cast<int>(s), a);
      for (std::size_t j = 0; j < n; ++j) out.mass[j] += pi_sa * mu[s] * p[j];
    }
  }
  return out;
}

std::vector<Distribution> trajectory(const Mdp& mdp, const Strategy& strategy,
                                     const Distribution& mu0, int n) {
  if (n < 0) throw ContractError("trajectory length must be >= 0");
  std::vector<Distribution> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  out.push_back(mu0);
  for (int i = 0; i < n; ++i) out.push_back(step(mdp, strategy, out.back()));
  return out;
}

} // namespace distcert
