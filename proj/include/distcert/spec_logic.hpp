#pragma once

#include "distcert/lp.hpp"
#include "distcert/mdp.hpp"
#include "distcert/rational.hpp"

#include <set>
#include <string>
#include <vector>

namespace distcert {

enum class AtomRel { Geq, Gt, Eq };

/// Affine predicate over distributions: coeffs . mu + offset <rel> 0.
/// The canonical form produced by the parsers is Geq; Gt and Eq arise from
/// normalizing strict and equality input atoms.
struct AffineAtom {
  std::vector<Rational> coeffs;
  Rational offset;
  AtomRel rel = AtomRel::Geq;
  std::string source; // original atom text, kept for reports

  bool operator==(const AffineAtom& o) const {
    return coeffs == o.coeffs && offset == o.offset && rel == o.rel;
  }
};

/// Subset of AP indices as a bitmask; bit i set means atom i is present.
using Letter = unsigned;

/// Nondeterministic Buchi automaton over letters 2^AP. delta is total as a
/// map: delta[q][sigma] may be empty, which rejects the word on that run.
struct Nba {
  int num_states = 0;
  std::vector<AffineAtom> ap;
  /// delta[q] has exactly 2^|ap| entries, indexed by Letter.
  std::vector<std::vector<std::set<int>>> delta;
  int initial = 0;
  std::vector<bool> accepting;

  std::size_t num_letters() const { return std::size_t(1) << ap.size(); }
  void validate() const;
};

/// Parses "c1*V0 + c2*V1 + c >= 0" style atoms (also <=, <, >, =, ==, and
/// two-sided forms like "0.2<=V0"); Vi denotes mu(s_{i+1}).
AffineAtom parse_affine_atom(const std::string& text, std::size_t num_states);

/// Exact satisfaction of the atom's own relation (strict semantics).
bool eval_atom(const AffineAtom& atom, const Distribution& mu);

/// sigma_i = { p in AP | mu |= p }, strict semantics.
Letter letter_of(const std::vector<AffineAtom>& ap, const Distribution& mu);

/// Closed guard G(sigma): atoms in sigma as "expr >= 0" rows, atoms outside
/// sigma with their negation closed to a non-strict inequality. Negated
/// equality atoms close to the trivial constraint and contribute no row.
std::vector<AffineRow> guard_of(Letter sigma,
                                const std::vector<AffineAtom>& ap);

/// Letters whose closed guard is feasible within Delta(S), by exact linear
/// programming. Throws SemanticError if |AP| exceeds the cap.
std::vector<Letter> satisfiable_letters(const std::vector<AffineAtom>& ap,
                                        std::size_t num_states,
                                        std::size_t ap_cap = 10);

/// Parses the supported HOA v1 subset (state-based Buchi acceptance).
/// AP strings are parsed as affine atoms over num_states variables.
/// Unsupported features are rejected by name.
Nba parse_hoa(const std::string& text, std::size_t num_states);

/// Builds the NBA for one of the supported LTL patterns:
///   G p | F p | G F p | F G p | p U q | G (p -> F q) | (G F p) & (G q)
/// with p, q given inline as quoted atom strings, optionally negated with a
/// leading '!'. Example: G F "V1>=0.249".
Nba parse_ltl_pattern(const std::string& text, std::size_t num_states);

} // namespace distcert
