#pragma once

#include "distcert/lp.hpp"
#include "distcert/mdp.hpp"
#include "distcert/spec_logic.hpp"

#include <string>
#include <vector>

namespace distcert {

/// Set of initial distributions: affine inequalities/equalities over mu,
/// plus optional explicit points (used by the existential mode and by
/// singleton initial sets).
struct InitRegion {
  std::vector<AffineRow> ge; // each ">= 0"
  std::vector<AffineRow> eq; // each "= 0"
  std::vector<Distribution> points;

  /// Region rows as ">= 0" constraints, equalities expanded into pairs and
  /// a single explicit point turned into coordinate equalities.
  std::vector<AffineRow> premise_rows(std::size_t num_states) const;

  /// Feasibility of region /\ Delta(S).
  bool feasible(std::size_t num_states) const;
};

/// Parses the init file format: lines of affine relations over V0..Vn-1
/// (">=", "<=", "=", ...) and/or "point: v0 v1 ..." entries. Also accepts
/// the inline form "point:v0,v1,...".
InitRegion parse_init(const std::string& text, std::size_t num_states);

enum class UpdateKind { FixedStrategy, SymbolicStrategy };

/// One product transition (q, q', G(sigma), M^pi). The letter is restricted
/// to the atoms relevant at the source location; guard is the closed form
/// of G(sigma) over those atoms.
struct PdtsTransition {
  int source = 0;
  int target = 0;
  Letter letter = 0;   // bits within the relevant mask
  Letter relevant = 0; // mask of AP indices constrained at source
  std::vector<AffineRow> guard;
};

/// A letter equivalence class at a location, including classes with an
/// empty successor set (the word is rejected there).
struct LetterClass {
  Letter letter = 0;
  Letter relevant = 0;
  std::vector<AffineRow> guard;
  std::vector<int> successors; // sorted; may be empty
};

/// Product of the distribution-transformer dynamics with the NBA.
struct Pdts {
  Mdp mdp;
  Nba nba;
  InitRegion init;
  UpdateKind update = UpdateKind::FixedStrategy;

  /// relevant[q]: atoms whose value changes delta at q (computed, minimal).
  std::vector<Letter> relevant;
  /// classes[q]: satisfiable letter classes at q, ordered by letter bits.
  std::vector<std::vector<LetterClass>> classes;
  /// Flattened transitions with nonempty successor choice.
  std::vector<PdtsTransition> transitions;

  int num_locations() const { return nba.num_states; }
  std::size_t num_variables() const { return mdp.num_states(); }

  std::string report() const;
};

/// Builds the PDTS. Letters are enumerated per NBA state over the atoms
/// relevant there and pruned to the satisfiable ones by exact linear
/// feasibility. Throws SemanticError on an empty init region or a
/// dimension mismatch.
Pdts build_pdts(const Mdp& mdp, const Nba& nba, const InitRegion& init,
                UpdateKind update);

/// Concrete product successors {(q', step(mu)) | q' in delta(q, letter_of(mu))}
/// under strict letter semantics.
std::vector<std::pair<int, Distribution>> successor_states(
    const Pdts& pdts, int q, const Distribution& mu, const Strategy& strategy);

} // namespace distcert
