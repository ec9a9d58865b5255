#pragma once

#include "distcert/rational.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace distcert {

/// Probability vector over the MDP state enumeration. Entries are >= 0 and
/// sum to exactly 1.
struct Distribution {
  std::vector<Rational> mass;

  std::size_t size() const { return mass.size(); }
  const Rational& operator[](std::size_t i) const { return mass[i]; }

  /// Throws SemanticError unless entries are nonnegative and sum to 1.
  void validate() const;

  bool operator==(const Distribution&) const = default;
};

/// Finite MDP with exact rational transition kernel. The state order fixes
/// the enumeration s_1..s_|S| used by distributions and affine atoms.
struct Mdp {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  /// available[s] = indices into actions, nonempty, sorted.
  std::vector<std::vector<int>> available;
  /// kernel[s][a] = successor distribution; defined iff a in available[s].
  std::map<std::pair<int, int>, Distribution> kernel;

  std::size_t num_states() const { return states.size(); }
  int state_index(const std::string& name) const;  // -1 if unknown
  int action_index(const std::string& name) const; // -1 if unknown

  const Distribution& row(int s, int a) const;
  bool is_chain() const; // every state has exactly one available action

  /// Throws SemanticError on any invariant violation (empty action sets,
  /// row sums != 1, kernel domain mismatch).
  void validate() const;
};

/// pi(s,a) constant per state; rows sum to 1 over available actions.
struct MemorylessStrategy {
  std::map<std::pair<int, int>, Rational> prob;

  Rational at(int s, int a) const;
  void validate(const Mdp& mdp) const;
};

/// Affine distributionally memoryless strategy. Action probability at s is
///   N_{s,a}(mu) / D_s(mu),   N_{s,a}(mu) = e . mu + f,
/// with D_s the sum of the numerators at s, so probabilities sum to 1
/// wherever D_s is positive.
struct AffineDistStrategy {
  struct Row {
    std::vector<Rational> coeffs; // e, length |S|
    Rational offset;              // f
  };
  std::map<std::pair<int, int>, Row> numerator;
  Rational eps_den = Rational(1, 1000);

  Rational numerator_at(int s, int a, const Distribution& mu) const;
  Rational denominator_at(int s, const Distribution& mu) const;

  /// Checks, by exact linear programming over the simplex, that every
  /// numerator is nonnegative on Delta(S) and every per-state denominator is
  /// at least eps_den. Throws SemanticError with a witness on failure.
  void validate(const Mdp& mdp) const;
};

using Strategy = std::variant<MemorylessStrategy, AffineDistStrategy>;

/// Parses the MDP text format:
///   states: A B C
///   actions: a b
///   trans <state> <action> -> <state>:<rational> [<state>:<rational> ...]
/// Rationals are p/q or decimal literals, converted exactly. Lines starting
/// with '#' are comments. Throws ParseError / SemanticError.
Mdp parse_mdp(const std::string& text);

/// One-step distribution transformer: mu' = sum_{s,a} pi(s,a)(mu) mu(s) P(s,a).
Distribution step(const Mdp& mdp, const Strategy& strategy,
                  const Distribution& mu);

/// [mu_0, ..., mu_n]; length n+1.
std::vector<Distribution> trajectory(const Mdp& mdp, const Strategy& strategy,
                                     const Distribution& mu0, int n);

} // namespace distcert
