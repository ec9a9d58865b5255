#include "distcert/bench.hpp"

#include "distcert/errors.hpp"

#include <queue>

namespace distcert {

namespace {

// dr, dc per action, in the fixed action order up/down/left/right
constexpr int kDr[4] = {-1, 1, 0, 0};
constexpr int kDc[4] = {0, 0, -1, 1};
// perpendicular action pairs: up/down slip to left/right and vice versa
constexpr int kPerp[4][2] = {{2, 3}, {2, 3}, {0, 1}, {0, 1}};

} // namespace

GeneratedInstance gen_gridworld(int n, const std::set<int>& walls,
                                const std::map<int, Rational>& slippery,
                                int target_cell,
                                std::optional<int> avoid_cell) {
  if (n < 2) throw SemanticError("grid size must be >= 2");
  if (walls.count(0)) throw SemanticError("top-left corner cannot be a wall");
  if (target_cell < 0 || target_cell >= n * n || walls.count(target_cell))
    throw SemanticError("target cell is out of range or a wall");

  std::map<int, int> state_of; // cell -> state index
  GeneratedInstance out;
  for (int cell = 0; cell < n * n; ++cell) {
    if (walls.count(cell)) continue;
    state_of[cell] = static_cast<int>(out.mdp.states.size());
    out.mdp.states.push_back("s" + std::to_string(cell));
  }
  out.mdp.actions = {"up", "down", "left", "right"};
  const std::size_t ns = out.mdp.states.size();
  out.mdp.available.resize(ns);

  auto cell_ok = [&](int r, int c) {
    return r >= 0 && r < n && c >= 0 && c < n && !walls.count(r * n + c);
  };
  auto move = [&](int cell, int a) {
    int r = cell / n + kDr[a], c = cell % n + kDc[a];
    return cell_ok(r, c) ? r * n + c : cell; // bounce to self when blocked
  };

  for (const auto& [cell, s] : state_of) {
    int r = cell / n, c = cell % n;
    Rational slip = 0;
    auto it = slippery.find(cell);
    if (it != slippery.end()) slip = it->second;
    for (int a = 0; a < 4; ++a) {
      if (!cell_ok(r + kDr[a], c + kDc[a])) continue;
      out.mdp.available[s].push_back(a);
      std::vector<Rational> mass(ns, Rational(0));
      mass[state_of.at(move(cell, a))] += 1 - slip;
      for (int pa : kPerp[a])
        mass[state_of.at(move(cell, pa))] += slip / 2;
      Distribution d;
      d.mass = std::move(mass);
      out.mdp.kernel[{s, a}] = std::move(d);
    }
    if (out.mdp.available[s].empty())
      throw SemanticError("cell " + std::to_string(cell) + " has no moves");
  }
  out.mdp.validate();

  // reachability of the target from the top-left corner
  std::vector<bool> seen(ns, false);
  std::queue<int> bfs;
  bfs.push(state_of.at(0));
  seen[state_of.at(0)] = true;
  while (!bfs.empty()) {
    int s = bfs.front();
    bfs.pop();
    for (int a : out.mdp.available[s]) {
      const Distribution& d = out.mdp.row(s, a);
      for (std::size_t t = 0; t < ns; ++t)
        if (d[t] != 0 && !seen[t]) {
          seen[t] = true;
          bfs.push(static_cast<int>(t));
        }
    }
  }
  if (!seen[state_of.at(target_cell)])
    throw SemanticError("target cell is unreachable from the top-left corner");

  out.spec = "G F \"V" + std::to_string(state_of.at(target_cell)) + ">=0.9\"";
  if (avoid_cell) {
    if (!state_of.count(*avoid_cell))
      throw SemanticError("avoid cell is a wall or out of range");
    out.spec += " & G \"V" + std::to_string(state_of.at(*avoid_cell)) +
                "<=0.5\"";
  }
  out.init = "point:1";
  for (std::size_t i = 1; i < ns; ++i) out.init += ",0";
  return out;
}

Mdp gen_pagerank(int num_nodes, const std::vector<std::pair<int, int>>& edges,
                 const Rational& damping) {
  if (num_nodes < 1) throw SemanticError("need at least one node");
  if (damping < 0 || damping > 1)
    throw SemanticError("damping must lie in [0, 1]");
  std::vector<std::vector<int>> out_edges(num_nodes);
  for (auto [u, v] : edges) {
    if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes)
      throw SemanticError("edge endpoint out of range");
    out_edges[u].push_back(v);
  }
  Mdp mdp;
  for (int i = 0; i < num_nodes; ++i)
    mdp.states.push_back("n" + std::to_string(i));
  mdp.actions = {"surf"};
  mdp.available.assign(num_nodes, {0});
  Rational uniform(1, num_nodes);
  for (int u = 0; u < num_nodes; ++u) {
    std::vector<Rational> mass(num_nodes, (1 - damping) * uniform);
    if (out_edges[u].empty()) {
      for (auto& m : mass) m += damping * uniform;
    } else {
      Rational share = damping / Rational(out_edges[u].size());
      for (int v : out_edges[u]) mass[v] += share;
    }
    Distribution d;
    d.mass = std::move(mass);
    mdp.kernel[{u, 0}] = std::move(d);
  }
  mdp.validate();
  return mdp;
}

} // namespace distcert
