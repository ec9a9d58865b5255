#pragma once

#include "distcert/validator.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace distcert {

struct PipelineOptions {
  std::string solver_cmd = "z3";
  int invariant_size = 1;
  int handelman_degree = 2;
  std::size_t choice_budget = 256;
  std::chrono::duration<double> timeout{300.0};
  StrategyClass strategy_class = StrategyClass::Memoryless;
  InitMode init_mode = InitMode::Universal;
  Rational eps_den = Rational(1, 1000);
  std::string emit_smt_path; // dump the first emission and stop
};

struct ChoiceReport {
  SuccessorChoice choice;
  SolverStatus status = SolverStatus::SolverError;
  double seconds = 0;
};

struct PipelineResult {
  bool solved = false;
  std::optional<CertificateSolution> solution;
  std::optional<ValidationReport> validation;
  std::vector<ChoiceReport> per_choice;
  bool budget_exhausted = false;
  bool emitted_only = false;      // --emit-smt run, no solving attempted
  std::size_t coeff_count = 0;    // template variables before transformation
  std::size_t constraint_count = 0; // relations in the first emitted system
  std::string first_smtlib;       // first emission (determinism checks)
  double t_build = 0, t_transform = 0, t_solve = 0, t_validate = 0;
};

/// Full verify/synthesize pipeline. With a given strategy the system is
/// built over certificate variables only; without one a strategy template
/// of the configured class is added and its extraction validated.
PipelineResult run_pipeline(const Mdp& mdp, const Nba& nba,
                            const InitRegion& init,
                            const std::optional<Strategy>& given,
                            const PipelineOptions& opt);

/// Strategy file: "memoryless" header with "<state> <action>: p" lines, or
/// "affine" with "eps: r" and "<state> <action>: e... | f" rows.
Strategy parse_strategy(const std::string& text, const Mdp& mdp);
std::string write_strategy(const Strategy& strategy, const Mdp& mdp);

} // namespace distcert
