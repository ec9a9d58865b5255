#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "distcert/symbolic.hpp"

#include <random>

using namespace distcert;

namespace {

Poly c(int n, int d = 1) { return Poly::constant(Rational(n, d)); }

Poly random_poly(std::mt19937& rng) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  std::uniform_int_distribution<int> var(0, 2);
  Poly p;
  for (int t = 0; t < 4; ++t) {
    Poly term = c(coeff(rng));
    int deg = var(rng);
    for (int k = 0; k < deg; ++k) term = term * Poly::mu(var(rng));
    p += term;
  }
  return p;
}

} // namespace

TEST_CASE("difference of squares") {
  Poly p = (Poly::mu(0) + c(2)) * (Poly::mu(0) - c(2));
  CHECK(p == Poly::mu(0) * Poly::mu(0) - c(4));
}

TEST_CASE("additive inverse cancels to the zero polynomial") {
  Poly p = Poly::mu(0) * Poly::mu(1) + c(5);
  CHECK((p + p.scaled(Rational(-1))).is_zero());
}

TEST_CASE("degrees split by variable family") {
  Poly p = (Poly::tvar(0) * Poly::mu(0)) * (Poly::tvar(1) * Poly::mu(1));
  CHECK(p.mu_degree() == 2);
  CHECK(p.tpl_degree() == 2);
}

TEST_CASE("substitute_mu composes a ranking row with the update") {
  // C(q1, mu) = 5/4 - 5/4 mu3, image mu3 -> mu2 + 1/2 mu3
  Poly p = c(5, 4) - Poly::mu(2).scaled(Rational(5, 4));
  std::vector<Poly> images = {Poly::mu(0), Poly::mu(1),
                              Poly::mu(1) + Poly::mu(2).scaled(Rational(1, 2))};
  Poly q = p.substitute_mu(images);
  CHECK(q == c(5, 4) - Poly::mu(1).scaled(Rational(5, 4)) -
                 Poly::mu(2).scaled(Rational(5, 8)));
}

TEST_CASE("identity and zero images") {
  Poly p = Poly::mu(0).scaled(Rational(3)) + c(7);
  std::vector<Poly> id = {Poly::mu(0), Poly::mu(1), Poly::mu(2)};
  CHECK(p.substitute_mu(id) == p);
  std::vector<Poly> zero = {Poly{}, Poly{}, Poly{}};
  CHECK(p.substitute_mu(zero) == c(7));
}

TEST_CASE("ranking evaluation at the initial point") {
  // 1 + 250 mu1 + 750 mu3 at (1/3, 1/3, 1/3)
  Poly p = c(1) + Poly::mu(0).scaled(Rational(250)) +
           Poly::mu(2).scaled(Rational(750));
  std::vector<Rational> mu = {Rational(1, 3), Rational(1, 3), Rational(1, 3)};
  CHECK(p.eval(mu, {}) == Rational(1003, 3));
  CHECK(Poly{}.eval(mu, {}) == 0);
  CHECK((Poly::mu(0) * Poly::mu(1))
            .eval({Rational(2, 3), Rational(3, 4)}, {}) == Rational(1, 2));
}

TEST_CASE("ring axioms on random polynomials") {
  std::mt19937 rng(3);
  for (int t = 0; t < 50; ++t) {
    Poly p = random_poly(rng), q = random_poly(rng), r = random_poly(rng);
    CHECK(p + q == q + p);
    CHECK(p * q == q * p);
    CHECK((p + q) + r == p + (q + r));
    CHECK((p * q) * r == p * (q * r));
    CHECK(p * (q + r) == p * q + p * r);
  }
}

TEST_CASE("substitute_mu is a ring homomorphism") {
  std::mt19937 rng(9);
  for (int t = 0; t < 50; ++t) {
    Poly p = random_poly(rng), q = random_poly(rng);
    std::vector<Poly> images = {random_poly(rng), random_poly(rng),
                                random_poly(rng)};
    CHECK((p * q).substitute_mu(images) ==
          p.substitute_mu(images) * q.substitute_mu(images));
    CHECK((p + q).substitute_mu(images) ==
          p.substitute_mu(images) + q.substitute_mu(images));
  }
}

TEST_CASE("collect_by_mu groups template coefficients") {
  Poly p = Poly::tvar(0) * Poly::mu(0) + Poly::tvar(1) * Poly::mu(0) +
           Poly::tvar(2) + c(3);
  auto groups = p.collect_by_mu();
  REQUIRE(groups.size() == 2);
  CHECK(groups.begin()->second == Poly::tvar(2) + c(3));
}

TEST_CASE("substitute_tpl keeps mu symbolic") {
  Poly p = Poly::tvar(0) * Poly::mu(0) + Poly::tvar(1);
  Poly q = p.substitute_tpl({{0, Rational(2)}, {1, Rational(-1)}});
  CHECK(q == Poly::mu(0).scaled(Rational(2)) - c(1));
}

TEST_CASE("affine_mu_coeffs extracts exact rows") {
  Poly p = Poly::mu(1).scaled(Rational(-5, 4)) + c(5, 4);
  Rational offset;
  auto coeffs = affine_mu_coeffs(p, 3, offset);
  CHECK(coeffs == std::vector<Rational>{0, Rational(-5, 4), 0});
  CHECK(offset == Rational(5, 4));
  CHECK_THROWS(affine_mu_coeffs(Poly::mu(0) * Poly::mu(0), 3, offset));
  CHECK_THROWS(affine_mu_coeffs(Poly::tvar(0), 3, offset));
}

TEST_CASE("fresh variable names must be unique") {
  VarTable vars;
  int a = vars.fresh("a_q0_i0", VarKind::CertificateCoeff);
  CHECK(vars.lookup("a_q0_i0") == a);
  CHECK(vars.lookup("missing") == -1);
  CHECK_THROWS(vars.fresh("a_q0_i0", VarKind::Multiplier));
}
