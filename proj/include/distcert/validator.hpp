#pragma once

#include "distcert/pdts.hpp"
#include "distcert/solver.hpp"

#include <chrono>
#include <string>
#include <vector>

namespace distcert {

struct ConditionResult {
  std::string label;
  std::string method; // "exact", "sampled", "eval"
  bool passed = false;
  std::string detail; // witness point or note
};

struct ValidationReport {
  std::vector<ConditionResult> conditions;
  bool passed = false;
  bool sampled = false; // true if any condition fell back to sampling

  std::string text() const;
};

/// Independent check of a concrete certificate against the initial and
/// Buchi ranking conditions. Every condition row is verified by asserting
/// premise and the negated row and requiring unsat from the solver (an
/// encoding path separate from the multiplier transform). The successor
/// disjunction is checked against the recorded choice first and, where that
/// fails, against every other automaton successor. Nonlinear "unknown"
/// results fall back to a sampled check over the simplex.
ValidationReport check_certificate(const CertificateSolution& sol,
                                   const Mdp& mdp, const Nba& nba,
                                   const InitRegion& init, InitMode mode,
                                   const Strategy& strategy,
                                   const std::string& solver_cmd,
                                   std::chrono::duration<double> timeout);

struct SimulationReport {
  std::vector<Letter> letters;           // sigma_0 .. sigma_{steps-1}
  std::vector<int> accepting_steps;      // i with reach set meeting accepting
  int converged_at = -1;                 // first i with max-norm step < tol
  Letter limit_letter = 0;               // letter at the converged mu
  int inconsistent_at = -1;              // step whose letter emptied the set
  std::string verdict;                   // consistent | inconsistent | inconclusive
  std::vector<Distribution> trajectory;

  std::string text() const;
};

/// Bounded-horizon consistency check: runs the trajectory, monitors the NBA
/// by subset construction under strict letter semantics, detects numeric
/// convergence, and judges the limiting letter loop for an accepting lasso.
SimulationReport simulate_monitor(const Mdp& mdp, const Strategy& strategy,
                                  const Distribution& mu0, const Nba& nba,
                                  int steps,
                                  const Rational& tol = Rational(1, 1000000000));

/// Certificate file round-trip (exact rationals; read back by check-cert).
std::string write_certificate(const CertificateSolution& sol, const Mdp& mdp);
CertificateSolution read_certificate(const std::string& text, const Mdp& mdp,
                                     const Nba& nba);

} // namespace distcert
