#include "distcert/symbolic.hpp"

#include <sstream>

namespace distcert {

int VarTable::fresh(std::string name, VarKind kind) {
  if (index_.count(name))
    throw ContractError("duplicate template variable name: " + name);
  int idx = static_cast<int>(names_.size());
  index_.emplace(name, idx);
  names_.push_back(std::move(name));
  kinds_.push_back(kind);
  return idx;
}

int VarTable::lookup(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  int da = 0, db = 0;
  for (const auto& [v, e] : a) da += e;
  for (const auto& [v, e] : b) db += e;
  if (da != db) return da < db;
  return a < b;
}

void Poly::add_term(Monomial m, Rational c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(std::move(m), c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly Poly::constant(Rational c) {
  Poly p;
  p.add_term({}, std::move(c));
  return p;
}

Poly Poly::var(Vref v) {
  Poly p;
  p.add_term({{v, 1}}, Rational(1));
  return p;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly Poly::operator+(const Poly& o) const {
  Poly p = *this;
  p += o;
  return p;
}

Poly Poly::operator-(const Poly& o) const {
  Poly p = *this;
  p -= o;
  return p;
}

Poly Poly::operator-() const { return scaled(Rational(-1)); }

Poly Poly::scaled(const Rational& c) const {
  Poly p;
  if (c == 0) return p;
  for (const auto& [m, k] : terms_) p.terms_.emplace(m, k * c);
  return p;
}

namespace {

Monomial mul_monomials(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

} // namespace

Poly Poly::operator*(const Poly& o) const {
  Poly p;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_)
      p.add_term(mul_monomials(ma, mb), ca * cb);
  return p;
}

int Poly::mu_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    int t = 0;
    for (const auto& [v, e] : m)
      if (v.is_mu()) t += e;
    d = std::max(d, t);
  }
  return d;
}

int Poly::tpl_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    int t = 0;
    for (const auto& [v, e] : m)
      if (!v.is_mu()) t += e;
    d = std::max(d, t);
  }
  return d;
}

Rational Poly::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

Poly Poly::substitute_mu(const std::vector<Poly>& images) const {
  Poly out;
  for (const auto& [m, c] : terms_) {
    Poly acc = Poly::constant(c);
    for (const auto& [v, e] : m) {
      if (v.is_mu()) {
        if (v.id >= static_cast<int>(images.size()))
          throw ContractError("substitute_mu: image vector too short");
        for (int k = 0; k < e; ++k) acc = acc * images[v.id];
      } else {
        Poly f = Poly::var(v);
        for (int k = 0; k < e; ++k) acc = acc * f;
      }
    }
    out += acc;
  }
  return out;
}

Rational Poly::eval(const std::vector<Rational>& mu_assign,
                    const std::map<int, Rational>& tpl_assign) const {
  Rational total = 0;
  for (const auto& [m, c] : terms_) {
    Rational v = c;
    for (const auto& [var, e] : m) {
      Rational base;
      if (var.is_mu()) {
        if (var.id >= static_cast<int>(mu_assign.size()))
          throw ContractError("eval: unassigned distribution variable");
        base = mu_assign[var.id];
      } else {
        auto it = tpl_assign.find(var.table_index());
        if (it == tpl_assign.end())
          throw ContractError("eval: unassigned template variable");
        base = it->second;
      }
      for (int k = 0; k < e; ++k) v *= base;
    }
    total += v;
  }
  return total;
}

Poly Poly::substitute_tpl(const std::map<int, Rational>& tpl_assign) const {
  Poly out;
  for (const auto& [m, c] : terms_) {
    Rational coeff = c;
    Monomial rest;
    for (const auto& [var, e] : m) {
      if (!var.is_mu()) {
        auto it = tpl_assign.find(var.table_index());
        if (it != tpl_assign.end()) {
          for (int k = 0; k < e; ++k) coeff *= it->second;
          continue;
        }
      }
      rest.emplace_back(var, e);
    }
    out.add_term(std::move(rest), coeff);
  }
  return out;
}

std::map<Monomial, Poly, MonomialLess> Poly::collect_by_mu() const {
  std::map<Monomial, Poly, MonomialLess> out;
  for (const auto& [m, c] : terms_) {
    Monomial mu_part, tpl_part;
    for (const auto& [v, e] : m)
      (v.is_mu() ? mu_part : tpl_part).emplace_back(v, e);
    out[mu_part].add_term(std::move(tpl_part), c);
  }
  return out;
}

Poly Poly::mu_coefficient(int i) const {
  Poly out;
  Vref target = Vref::mu(i);
  for (const auto& [m, c] : terms_) {
    Monomial rest;
    bool found = false;
    for (const auto& [v, e] : m) {
      if (v == target && e == 1) {
        found = true;
      } else {
        rest.emplace_back(v, e);
      }
    }
    if (found) out.add_term(std::move(rest), c);
  }
  return out;
}

std::string Poly::str(const VarTable* table) const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) out << " + ";
    first = false;
    out << to_string(c);
    for (const auto& [v, e] : m) {
      out << "*";
      if (v.is_mu())
        out << "mu" << v.id;
      else if (table)
        out << table->name(v.table_index());
      else
        out << "t" << v.table_index();
      if (e > 1) out << "^" << e;
    }
  }
  return out.str();
}

std::vector<Rational> affine_mu_coeffs(const Poly& p, std::size_t n,
                                       Rational& offset_out) {
  std::vector<Rational> coeffs(n, Rational(0));
  offset_out = 0;
  for (const auto& [m, c] : p.terms()) {
    if (m.empty()) {
      offset_out = c;
      continue;
    }
    if (m.size() != 1 || m[0].second != 1 || !m[0].first.is_mu())
      throw ContractError("expression is not affine in mu with rational "
                          "coefficients: " + p.str());
    if (m[0].first.id >= static_cast<int>(n))
      throw ContractError("mu index out of range");
    coeffs[m[0].first.id] = c;
  }
  return coeffs;
}

} // namespace distcert
