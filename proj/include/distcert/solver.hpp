#pragma once

#include "distcert/farkas.hpp"
#include "distcert/lp.hpp"
#include "distcert/mdp.hpp"
#include "distcert/templates.hpp"

#include <chrono>
#include <map>
#include <optional>
#include <string>

namespace distcert {

enum class SolverStatus { Sat, Unsat, Unknown, Timeout, SolverError };

struct SolverOutcome {
  SolverStatus status = SolverStatus::SolverError;
  std::optional<std::map<int, Rational>> model; // VarTable id -> value
  std::string raw;
  std::chrono::duration<double> wall_time{0};
};

std::string status_name(SolverStatus s);

/// Exact rational as an SMT-LIB2 literal: p, (/ p q), (- ...).
std::string smt_rational(const Rational& r);

/// Polynomial as an SMT-LIB2 term. With allow_mu, distribution variables
/// print as mu0, mu1, ...; otherwise they raise ContractError.
std::string smt_term(const Poly& p, const VarTable& vars,
                     bool allow_mu = false);

/// Concrete certificate extracted from a sat model. strategy is empty in
/// verification mode (the given strategy stands).
struct CertificateSolution {
  std::vector<AffineRow> ranking;                // [q]
  std::vector<std::vector<AffineRow>> invariant; // [q][k]
  std::optional<Strategy> strategy;
  SuccessorChoice choice;
};

/// Deterministic SMT-LIB2 emission: QF_NRA header, one declaration per
/// variable occurring in the system (ascending id), one assertion per
/// relation preceded by its label as a comment.
std::string emit_smtlib(const ExistentialSystem& sys, const VarTable& vars);

/// Runs `solver_cmd <file>` in its own process group; on timeout the whole
/// group is killed and the status is Timeout.
SolverOutcome invoke_solver(const std::string& smtlib,
                            const std::string& solver_cmd,
                            std::chrono::duration<double> timeout);

/// Parses `(define-fun name () Real value)` entries. Accepted value forms:
/// integer, finite decimal, (/ p q), and (- x) around any of those. An
/// algebraic root-obj value is rejected.
std::map<int, Rational> parse_model(const std::string& raw,
                                    const VarTable& vars);

/// Instantiates the templates with the model values. Strategy simplex
/// invariants are re-checked exactly; a violation is a hard error.
CertificateSolution extract_solution(const std::map<int, Rational>& model,
                                     const CertTemplate& cert,
                                     const StrategyTemplate* strategy,
                                     const Mdp& mdp,
                                     const SuccessorChoice& choice);

} // namespace distcert
