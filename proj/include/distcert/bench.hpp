#pragma once

#include "distcert/mdp.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>

namespace distcert {

struct GeneratedInstance {
  Mdp mdp;
  std::string spec; // LTL pattern string
  std::string init; // inline "point:..." form
};

/// n x n gridworld. Cells are row-major 0..n*n-1; non-wall cells become
/// states in cell order. Actions up/down/left/right exist where the move
/// stays in bounds and off walls. A slippery cell diverts to each
/// perpendicular direction with slip/2 (bouncing to self when that move is
/// blocked). Init is the point distribution on the top-left cell. The spec
/// is G F "V<target>>=0.9", with & G "V<avoid><=0.5" when avoid is set.
GeneratedInstance gen_gridworld(int n, const std::set<int>& walls,
                                const std::map<int, Rational>& slippery,
                                int target_cell,
                                std::optional<int> avoid_cell = std::nullopt);

/// Random-surfer chain over a digraph: from each node, with probability
/// damping follow a uniformly chosen out-edge (uniform jump if the node has
/// none), otherwise jump uniformly. Single action, so the result is a chain.
Mdp gen_pagerank(int num_nodes,
                 const std::vector<std::pair<int, int>>& edges,
                 const Rational& damping = Rational(17, 20));

} // namespace distcert
