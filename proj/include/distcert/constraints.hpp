#pragma once

#include "distcert/pdts.hpp"
#include "distcert/symbolic.hpp"
#include "distcert/templates.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace distcert {

/// forall mu in R^|S|:  /\ premise_i >= 0  ==>  /\ conclusion_j >= 0.
/// Premises are affine in mu (template variables may occur in their
/// coefficients); conclusions are polynomial in mu.
struct ForallConstraint {
  std::vector<Poly> premise;
  std::vector<Poly> conclusion;
  std::string label;
};

/// Purely existential side constraints (no mu variables).
struct ExistentialRelation {
  Poly expr;
  bool equality = false; // true: expr = 0, false: expr >= 0
  std::string label;
};

struct GeneratedConstraints {
  std::vector<ForallConstraint> forall;
  std::vector<ExistentialRelation> existential;
};

/// One successor per (location, letter class), resolving the disjunction in
/// the Buchi ranking conditions. Keys are (q, class letter bits).
struct SuccessorChoice {
  std::map<std::pair<int, Letter>, int> chosen;

  int at(int q, Letter letter) const;
};

/// Lexicographic enumeration over the product of successor sets, with a
/// configurable budget.
class ChoiceEnumerator {
 public:
  ChoiceEnumerator(const Pdts& pdts, std::size_t budget = 256);

  /// Next choice, or nullopt when exhausted. budget_exhausted() tells the
  /// two cases apart.
  std::optional<SuccessorChoice> next();
  bool budget_exhausted() const { return budget_exhausted_; }
  /// Total number of choices (product of branch degrees), saturated at
  /// 2^63-1.
  std::uint64_t total() const { return total_; }

 private:
  std::vector<std::pair<std::pair<int, Letter>, std::vector<int>>> domain_;
  std::vector<std::size_t> cursor_;
  std::size_t budget_;
  std::size_t emitted_ = 0;
  bool done_ = false;
  bool budget_exhausted_ = false;
  std::uint64_t total_ = 1;
};

enum class InitMode { Universal, Existential };

Poly row_to_poly(const AffineRow& row);
std::vector<Poly> simplex_premise(std::size_t num_states);

/// Initial condition. Universal mode yields one ForallConstraint; the
/// existential mode introduces fresh point variables mu0 and yields purely
/// existential relations.
GeneratedConstraints gen_initial(InitMode mode, const InitRegion& init,
                                 const CertTemplate& cert, int q0,
                                 std::size_t num_states, VarTable& vars);

/// Buchi ranking condition for one (q, letter class) with the chosen
/// successor. An empty successor set yields the premise-infeasibility
/// obligation (conclusion "-1 >= 0").
ForallConstraint gen_buchi(int q, const LetterClass& cls,
                           std::optional<int> chosen, bool accepting,
                           const CertTemplate& cert, const SymbolicStep& st,
                           std::size_t num_states);

/// Strategy validity. Memoryless: existential simplex conditions per state.
/// Distributional: one ForallConstraint per numerator row ("N >= 0 on
/// Delta(S)") and one per state ("D_s - eps >= 0 on Delta(S)").
GeneratedConstraints gen_strategy_validity(const StrategyTemplate& st,
                                           const Mdp& mdp);

/// Full constraint system for one successor choice (initial + Buchi over
/// every location/class + strategy validity when a template is given).
GeneratedConstraints gen_system(const Pdts& pdts, const CertTemplate& cert,
                                const SymbolicStep& step,
                                const SuccessorChoice& choice, InitMode mode,
                                VarTable& vars,
                                const StrategyTemplate* strategy = nullptr);

} // namespace distcert
