#pragma once

#include "distcert/mdp.hpp"
#include "distcert/spec_logic.hpp"
#include "distcert/symbolic.hpp"

#include <map>
#include <vector>

namespace distcert {

/// Affine template row: variable indices for the per-state coefficients and
/// the offset.
struct AffineTemplateRow {
  std::vector<int> coeffs; // VarTable indices, length |S|
  int offset = -1;         // VarTable index
};

/// Symbolic template for the ranking function and invariant: one ranking row
/// per NBA state, invariant_size rows of invariant per NBA state.
struct CertTemplate {
  int num_nba_states = 0;
  std::size_t num_mdp_states = 0;
  int invariant_size = 1;
  std::vector<AffineTemplateRow> ranking;               // [q]
  std::vector<std::vector<AffineTemplateRow>> invariant; // [q][k]

  std::size_t var_count() const;

  /// sum_i a^q_i * images[i] + b^q * denominator.
  Poly ranking_at(int q, const std::vector<Poly>& images,
                  const Poly& denominator) const;
  Poly invariant_at(int q, int k, const std::vector<Poly>& images,
                    const Poly& denominator) const;
};

CertTemplate make_cert_template(const Nba& nba, std::size_t num_mdp_states,
                                int invariant_size, VarTable& vars);

enum class StrategyClass { Memoryless, Distributional };

/// Symbolic strategy template. Memoryless: one probability variable per
/// available (s, a). Distributional: affine numerator rows per (s, a); the
/// per-state denominator is the sum of the numerators, so probabilities sum
/// to 1 structurally.
struct StrategyTemplate {
  StrategyClass cls = StrategyClass::Memoryless;
  std::map<std::pair<int, int>, int> prob;                // memoryless
  std::map<std::pair<int, int>, AffineTemplateRow> rows;  // distributional
  Rational eps_den = Rational(1, 1000);

  std::size_t var_count() const;
};

/// Distributional templates are capped at |S| <= max_dist_states because
/// denominator clearing raises the conclusion mu-degree to |S| + 1.
StrategyTemplate make_strategy_template(const Mdp& mdp, StrategyClass cls,
                                        VarTable& vars,
                                        const Rational& eps_den = Rational(1, 1000),
                                        std::size_t max_dist_states = 6);

/// One-step distribution transformer in symbolic form. For memoryless
/// strategies the denominator is 1 and images are affine in mu. For
/// distributional strategies the images are the cleared numerators over the
/// common denominator prod_s D_s(mu).
struct SymbolicStep {
  std::vector<Poly> images;
  Poly denominator;
};

SymbolicStep symbolic_step(const Mdp& mdp, const StrategyTemplate& st);

/// Same shape for a concrete strategy (used in verification mode).
SymbolicStep concrete_step(const Mdp& mdp, const Strategy& strategy);

} // namespace distcert
