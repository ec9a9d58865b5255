#pragma once

#include "distcert/rational.hpp"

#include "distcert/errors.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace distcert {

enum class VarKind {
  CertificateCoeff,
  InvariantCoeff,
  StrategyCoeff,
  Multiplier,
  PointVar, // fresh mu_0 components for existential initial conditions
};

/// Registry of symbolic template variables for one problem instance.
/// Variable ids are creation-order indices; names are unique.
class VarTable {
 public:
  int fresh(std::string name, VarKind kind);
  int lookup(const std::string& name) const; // -1 if absent

  std::size_t size() const { return names_.size(); }
  const std::string& name(int idx) const { return names_.at(idx); }
  VarKind kind(int idx) const { return kinds_.at(idx); }

 private:
  std::vector<std::string> names_;
  std::vector<VarKind> kinds_;
  std::map<std::string, int> index_;
};

/// Variable reference inside a Poly: ids >= 0 are distribution variables
/// mu_{id+1}; ids < 0 refer to VarTable entry (-id - 1).
struct Vref {
  int id;
  static Vref mu(int i) { return {i}; }
  static Vref tpl(int table_idx) { return {-table_idx - 1}; }
  bool is_mu() const { return id >= 0; }
  int table_index() const { return -id - 1; }
  auto operator<=>(const Vref&) const = default;
};

/// Power product, sorted by variable id, exponents > 0.
using Monomial = std::vector<std::pair<Vref, int>>;

struct MonomialLess {
  // graded lexicographic: total degree first, then factor list
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sparse exact polynomial over distribution variables and template
/// variables. Canonical form: merged monomials, no zero coefficients.
class Poly {
 public:
  Poly() = default;
  static Poly constant(Rational c);
  static Poly var(Vref v);
  static Poly mu(int i) { return var(Vref::mu(i)); }
  static Poly tvar(int table_idx) { return var(Vref::tpl(table_idx)); }

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  Poly scaled(const Rational& c) const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);

  bool operator==(const Poly& o) const { return terms_ == o.terms_; }
  bool is_zero() const { return terms_.empty(); }

  int mu_degree() const;
  int tpl_degree() const;
  Rational constant_term() const;

  /// Replaces mu_i by images[i]; template variables are untouched.
  Poly substitute_mu(const std::vector<Poly>& images) const;

  /// Exact evaluation; every variable occurring in the polynomial must be
  /// assigned. mu_assign is indexed by mu id, tpl_assign by table index.
  Rational eval(const std::vector<Rational>& mu_assign,
                const std::map<int, Rational>& tpl_assign) const;

  /// Specializes template variables with known values (partial is fine);
  /// mu variables remain symbolic.
  Poly substitute_tpl(const std::map<int, Rational>& tpl_assign) const;

  /// Groups terms by their mu-part: result maps each mu-monomial to the
  /// polynomial (in template variables only) that multiplies it.
  std::map<Monomial, Poly, MonomialLess> collect_by_mu() const;

  const std::map<Monomial, Rational, MonomialLess>& terms() const {
    return terms_;
  }

  /// Affine-in-mu accessors: coefficient of mu_i (must be a template-free
  /// rational if tpl_free) -- general form returns the Poly coefficient.
  Poly mu_coefficient(int i) const;

  std::string str(const VarTable* table = nullptr) const;

 private:
  std::map<Monomial, Rational, MonomialLess> terms_;
  void add_term(Monomial m, Rational c);
};

/// Affine expression over mu with plain rational coefficients; bridges to
/// the LP layer. Throws ContractError if p is not affine in mu or mentions
/// template variables.
std::vector<Rational> affine_mu_coeffs(const Poly& p, std::size_t n,
                                       Rational& offset_out);

} // namespace distcert
