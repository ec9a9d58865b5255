#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "distcert/errors.hpp"
#include "distcert/mdp.hpp"

#include <random>

using namespace distcert;

namespace {

const char* kRunning = R"(# three-state running example
states: A B C
actions: a b
trans A a -> A:1
trans A b -> B:1
trans B a -> C:1
trans C a -> C:1/2 A:1/2
)";

MemorylessStrategy b_at_a() {
  MemorylessStrategy s;
  s.prob[{0, 0}] = 0;
  s.prob[{0, 1}] = 1;
  s.prob[{1, 0}] = 1;
  s.prob[{2, 0}] = 1;
  return s;
}

Distribution dist(std::vector<Rational> m) {
  Distribution d;
  d.mass = std::move(m);
  return d;
}

} // namespace

TEST_CASE("parse the running example") {
  Mdp m = parse_mdp(kRunning);
  CHECK(m.num_states() == 3);
  CHECK(m.actions.size() == 2);
  CHECK(m.available[0] == std::vector<int>{0, 1});
  CHECK(m.available[1] == std::vector<int>{0});
  CHECK(m.row(2, 0)[0] == Rational(1, 2));
  CHECK(m.row(2, 0)[2] == Rational(1, 2));
}

TEST_CASE("single self-loop state is a valid chain") {
  Mdp m = parse_mdp("states: s\nactions: a\ntrans s a -> s:1\n");
  CHECK(m.num_states() == 1);
  CHECK(m.is_chain());
}

TEST_CASE("bad row sum is rejected with the exact sum") {
  CHECK_THROWS_WITH_AS(
      parse_mdp("states: s t\nactions: a\ntrans s a -> s:1/2 t:1/3\n"
                "trans t a -> t:1\n"),
      doctest::Contains("row sum 5/6 != 1"), SemanticError);
}

TEST_CASE("one step of the fixed running-example strategy") {
  Mdp m = parse_mdp(kRunning);
  Strategy s = b_at_a();
  Distribution mu = dist({Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  Distribution nxt = step(m, s, mu);
  CHECK(nxt.mass == std::vector<Rational>{Rational(1, 6), Rational(1, 3),
                                          Rational(1, 2)});
  Distribution nxt2 = step(m, s, nxt);
  CHECK(nxt2.mass == std::vector<Rational>{Rational(1, 4), Rational(1, 6),
                                           Rational(7, 12)});
}

TEST_CASE("fixed point of the one-state chain") {
  Mdp m = parse_mdp("states: s\nactions: a\ntrans s a -> s:1\n");
  MemorylessStrategy s;
  s.prob[{0, 0}] = 1;
  Distribution mu = dist({Rational(1)});
  CHECK(step(m, s, mu) == mu);
}

TEST_CASE("trajectory collects the iterates") {
  Mdp m = parse_mdp(kRunning);
  Strategy s = b_at_a();
  Distribution mu0 = dist({Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  auto tr = trajectory(m, s, mu0, 2);
  REQUIRE(tr.size() == 3);
  CHECK(tr[0] == mu0);
  CHECK(tr[2].mass == std::vector<Rational>{Rational(1, 4), Rational(1, 6),
                                            Rational(7, 12)});
  CHECK(trajectory(m, s, mu0, 0).size() == 1);
}

TEST_CASE("mass of B tends to the stationary value 1/4") {
  // oracle: stationary equations a = c/2, b = a, c = b + c/2 on the simplex
  Mdp m = parse_mdp(kRunning);
  Strategy s = b_at_a();
  Distribution mu0 = dist({Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  auto tr = trajectory(m, s, mu0, 200);
  Rational gap = tr.back()[1] - Rational(1, 4);
  if (gap < 0) gap = -gap;
  CHECK(gap < Rational(1, 1000000000));
}

TEST_CASE("step preserves the simplex exactly on random inputs") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> pick(0, 6);
  Mdp m = parse_mdp(kRunning);
  for (int t = 0; t < 100; ++t) {
    std::vector<Rational> w(3);
    Rational total = 0;
    for (auto& v : w) {
      v = pick(rng);
      total += v;
    }
    if (total == 0) continue;
    for (auto& v : w) v /= total;
    Rational pa = Rational(pick(rng), 6);
    if (pa > 1) pa = 1;
    MemorylessStrategy s;
    s.prob[{0, 0}] = pa;
    s.prob[{0, 1}] = 1 - pa;
    s.prob[{1, 0}] = 1;
    s.prob[{2, 0}] = 1;
    Distribution nxt = step(m, Strategy{s}, dist(w));
    Rational sum = 0;
    for (const auto& v : nxt.mass) {
      CHECK(v >= 0);
      sum += v;
    }
    CHECK(sum == 1);
  }
}

TEST_CASE("memoryless step is linear in the distribution") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pick(0, 6);
  Mdp m = parse_mdp(kRunning);
  Strategy s = b_at_a();
  for (int t = 0; t < 50; ++t) {
    std::vector<Rational> u(3), v(3);
    Rational su = 0, sv = 0;
    for (int i = 0; i < 3; ++i) {
      u[i] = pick(rng) + 1;
      v[i] = pick(rng) + 1;
      su += u[i];
      sv += v[i];
    }
    for (int i = 0; i < 3; ++i) {
      u[i] /= su;
      v[i] /= sv;
    }
    Rational lam(pick(rng), 6);
    if (lam > 1) lam = 1;
    std::vector<Rational> mix(3);
    for (int i = 0; i < 3; ++i) mix[i] = lam * u[i] + (1 - lam) * v[i];
    Distribution lhs = step(m, s, dist(mix));
    Distribution du = step(m, s, dist(u));
    Distribution dv = step(m, s, dist(v));
    for (int i = 0; i < 3; ++i)
      CHECK(lhs[i] == lam * du[i] + (1 - lam) * dv[i]);
  }
}

TEST_CASE("chains ignore the strategy argument") {
  Mdp m = parse_mdp(
      "states: s t\nactions: a\ntrans s a -> t:1\ntrans t a -> s:1/2 t:1/2\n");
  REQUIRE(m.is_chain());
  MemorylessStrategy s1;
  s1.prob[{0, 0}] = 1;
  s1.prob[{1, 0}] = 1;
  AffineDistStrategy s2;
  s2.numerator[{0, 0}] = {{Rational(0), Rational(0)}, Rational(1)};
  s2.numerator[{1, 0}] = {{Rational(0), Rational(0)}, Rational(1)};
  Distribution mu = dist({Rational(1, 4), Rational(3, 4)});
  CHECK(step(m, Strategy{s1}, mu) == step(m, Strategy{s2}, mu));
}

TEST_CASE("affine strategy validation accepts and rejects by exact LP") {
  Mdp m = parse_mdp(kRunning);
  AffineDistStrategy good;
  // pi(A,a) proportional to mu(A), pi(A,b) to 1 - mu(A) + a floor
  good.numerator[{0, 0}] = {{Rational(1), Rational(0), Rational(0)},
                            Rational(1, 100)};
  good.numerator[{0, 1}] = {{Rational(-1), Rational(0), Rational(0)},
                            Rational(1)};
  good.numerator[{1, 0}] = {{Rational(0), Rational(0), Rational(0)},
                            Rational(1)};
  good.numerator[{2, 0}] = {{Rational(0), Rational(0), Rational(0)},
                            Rational(1)};
  CHECK_NOTHROW(good.validate(m));

  AffineDistStrategy bad = good;
  bad.numerator[{0, 0}].offset = Rational(-1, 100); // negative at mu(A)=0
  CHECK_THROWS_AS(bad.validate(m), SemanticError);
}

TEST_CASE("affine strategy step uses the structural normalization") {
  Mdp m = parse_mdp(kRunning);
  AffineDistStrategy s;
  s.numerator[{0, 0}] = {{Rational(1), Rational(0), Rational(0)}, Rational(0)};
  s.numerator[{0, 1}] = {{Rational(-1), Rational(0), Rational(0)},
                         Rational(1)};
  s.numerator[{1, 0}] = {{Rational(0), Rational(0), Rational(0)}, Rational(1)};
  s.numerator[{2, 0}] = {{Rational(0), Rational(0), Rational(0)}, Rational(1)};
  Distribution mu = dist({Rational(1, 2), Rational(1, 4), Rational(1, 4)});
  // pi(A,a) = mu(A) = 1/2, pi(A,b) = 1/2
  Distribution nxt = step(m, Strategy{s}, mu);
  CHECK(nxt[0] == Rational(1, 2) * Rational(1, 2) +
                      Rational(1, 2) * Rational(1, 4)); // A:a self + C half
  CHECK(nxt[1] == Rational(1, 2) * Rational(1, 2));
  Rational sum = 0;
  for (const auto& v : nxt.mass) sum += v;
  CHECK(sum == 1);
}
