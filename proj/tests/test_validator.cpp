#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "distcert/errors.hpp"
#include "distcert/validator.hpp"

using namespace distcert;

namespace {

const char* kRunning = R"(states: A B C
actions: a b
trans A a -> A:1
trans A b -> B:1
trans B a -> C:1
trans C a -> C:1/2 A:1/2
)";

const std::chrono::seconds kTimeout{120};

Mdp running_mdp() { return parse_mdp(kRunning); }

Strategy b_at_a() {
  MemorylessStrategy s;
  s.prob[{0, 0}] = 0;
  s.prob[{0, 1}] = 1;
  s.prob[{1, 0}] = 1;
  s.prob[{2, 0}] = 1;
  return s;
}

Strategy a_at_a() {
  MemorylessStrategy s;
  s.prob[{0, 0}] = 1;
  s.prob[{0, 1}] = 0;
  s.prob[{1, 0}] = 1;
  s.prob[{2, 0}] = 1;
  return s;
}

Distribution third() {
  Distribution d;
  d.mass = {Rational(1, 3), Rational(1, 3), Rational(1, 3)};
  return d;
}

// Hand-checked certificate for the recurrence objective on the running
// example under the strategy that plays b at A.
CertificateSolution known_good(const Pdts& pdts) {
  CertificateSolution sol;
  sol.ranking.push_back({{Rational(250), Rational(0), Rational(750)},
                         Rational(1)});
  sol.ranking.push_back({{Rational(0), Rational(0), Rational(-5, 4)},
                         Rational(5, 4)});
  sol.invariant = {{{{Rational(0), Rational(0), Rational(0)}, Rational(0)}},
                   {{{Rational(0), Rational(0), Rational(0)}, Rational(0)}}};
  sol.choice.chosen[{0, pdts.classes[0][0].letter}] = 0;
  sol.choice.chosen[{0, pdts.classes[0][1].letter}] = 1;
  sol.choice.chosen[{1, pdts.classes[1][0].letter}] = 0;
  return sol;
}

} // namespace

TEST_CASE("known certificate validates exactly") {
  Mdp mdp = running_mdp();
  Nba nba = parse_ltl_pattern("G F \"V1>=0.249\"", 3);
  InitRegion init = parse_init("point: 1/3 1/3 1/3\n", 3);
  Pdts pdts = build_pdts(mdp, nba, init, UpdateKind::FixedStrategy);
  CertificateSolution sol = known_good(pdts);
  ValidationReport rep =
      check_certificate(sol, mdp, nba, init, InitMode::Universal, b_at_a(),
                        DISTCERT_SOLVER, kTimeout);
  CHECK(rep.passed);
  CHECK(!rep.sampled);
  CHECK(!rep.conditions.empty());
  for (const auto& c : rep.conditions) {
    CHECK(c.passed);
    CHECK(c.method == "exact");
  }
  CHECK(rep.text().find("certificate validated") != std::string::npos);
}

TEST_CASE("negative initial value is rejected with a witness") {
  Mdp mdp = running_mdp();
  Nba nba = parse_ltl_pattern("G F \"V1>=0.249\"", 3);
  InitRegion init = parse_init("point: 1/3 1/3 1/3\n", 3);
  Pdts pdts = build_pdts(mdp, nba, init, UpdateKind::FixedStrategy);
  CertificateSolution sol = known_good(pdts);
  sol.ranking[0].offset = Rational(-1000);
  ValidationReport rep =
      check_certificate(sol, mdp, nba, init, InitMode::Universal, b_at_a(),
                        DISTCERT_SOLVER, kTimeout);
  CHECK(!rep.passed);
  bool init_failed = false;
  for (const auto& c : rep.conditions)
    if (c.label == "init_ranking" && !c.passed) {
      init_failed = true;
      CHECK(c.detail.find("counterexample") != std::string::npos);
    }
  CHECK(init_failed);
  CHECK(rep.text().find("REJECTED") != std::string::npos);
}

TEST_CASE("a flipped ranking coefficient breaks a ranking condition") {
  Mdp mdp = running_mdp();
  Nba nba = parse_ltl_pattern("G F \"V1>=0.249\"", 3);
  InitRegion init = parse_init("point: 1/3 1/3 1/3\n", 3);
  Pdts pdts = build_pdts(mdp, nba, init, UpdateKind::FixedStrategy);
  CertificateSolution sol = known_good(pdts);
  sol.ranking[0].coeffs[0] = Rational(-250);
  ValidationReport rep =
      check_certificate(sol, mdp, nba, init, InitMode::Universal, b_at_a(),
                        DISTCERT_SOLVER, kTimeout);
  CHECK(!rep.passed);
}

TEST_CASE("a wrong recorded choice is repaired by the disjunction") {
  Mdp mdp = running_mdp();
  Nba nba = parse_ltl_pattern("G F \"V1>=0.249\"", 3);
  InitRegion init = parse_init("point: 1/3 1/3 1/3\n", 3);
  Pdts pdts = build_pdts(mdp, nba, init, UpdateKind::FixedStrategy);
  CertificateSolution sol = known_good(pdts);
  // classes[0][1] actually moves to q1; record the letter-preserving loop
  sol.choice.chosen[{0, pdts.classes[0][1].letter}] = 0;
  ValidationReport rep =
      check_certificate(sol, mdp, nba, init, InitMode::Universal, b_at_a(),
                        DISTCERT_SOLVER, kTimeout);
  CHECK(rep.passed);
  bool repaired = false;
  for (const auto& c : rep.conditions)
    if (c.detail.find("recorded successor failed") != std::string::npos)
      repaired = true;
  CHECK(repaired);
}

TEST_CASE("dimension mismatches are contract errors") {
  Mdp mdp = running_mdp();
  Nba nba = parse_ltl_pattern("G F \"V1>=0.249\"", 3);
  InitRegion init = parse_init("point: 1/3 1/3 1/3\n", 3);
  CertificateSolution sol;
  sol.ranking.push_back({{Rational(0), Rational(0), Rational(0)}, Rational(0)});
  CHECK_THROWS_AS(check_certificate(sol, mdp, nba, init, InitMode::Universal,
                                    b_at_a(), DISTCERT_SOLVER, kTimeout),
                  ContractError);
}

TEST_CASE("simulation of the satisfying strategy is consistent") {
  Mdp mdp = running_mdp();
  Nba nba = parse_ltl_pattern("G F \"V1>=0.249\"", 3);
  SimulationReport rep = simulate_monitor(mdp, b_at_a(), third(), nba, 200);
  CHECK(rep.verdict == "consistent");
  CHECK(rep.inconsistent_at == -1);
  CHECK(rep.converged_at >= 0);
  CHECK(rep.limit_letter == 1);
  CHECK(!rep.accepting_steps.empty());
  REQUIRE(rep.letters.size() == 201);
  for (std::size_t i = 0; i < rep.letters.size(); ++i)
    CHECK(rep.letters[i] == letter_of(nba.ap, rep.trajectory[i]));
  // the stationary distribution keeps a quarter of the mass on B
  CHECK(rep.trajectory.back()[1] > Rational(249, 1000));
}

TEST_CASE("a starving strategy leaves the recurrence goal inconclusive") {
  Mdp mdp = running_mdp();
  Nba nba = parse_ltl_pattern("G F \"V1>=0.249\"", 3);
  SimulationReport rep = simulate_monitor(mdp, a_at_a(), third(), nba, 200);
  CHECK(rep.verdict == "inconclusive");
  CHECK(rep.inconsistent_at == -1);
  CHECK(rep.converged_at >= 0);
  CHECK(rep.limit_letter == 0);
  CHECK(rep.accepting_steps.size() == 1);
}

TEST_CASE("safety violation rejects the monitor at step zero") {
  Mdp mdp = running_mdp();
  Nba nba = parse_ltl_pattern("G \"V1>=0.9\"", 3);
  SimulationReport rep = simulate_monitor(mdp, b_at_a(), third(), nba, 50);
  CHECK(rep.verdict == "inconsistent");
  CHECK(rep.inconsistent_at == 0);
  CHECK(rep.text().find("rejected at step 0") != std::string::npos);
  CHECK_THROWS_AS(simulate_monitor(mdp, b_at_a(), third(), nba, 0),
                  ContractError);
}

TEST_CASE("certificate files round-trip") {
  Mdp mdp = running_mdp();
  Nba nba = parse_ltl_pattern("G F \"V1>=0.249\"", 3);
  InitRegion init = parse_init("point: 1/3 1/3 1/3\n", 3);
  Pdts pdts = build_pdts(mdp, nba, init, UpdateKind::FixedStrategy);
  CertificateSolution sol = known_good(pdts);
  MemorylessStrategy ms = std::get<MemorylessStrategy>(b_at_a());
  sol.strategy = ms;

  std::string text = write_certificate(sol, mdp);
  CertificateSolution back = read_certificate(text, mdp, nba);
  REQUIRE(back.ranking.size() == 2);
  for (int q = 0; q < 2; ++q) {
    CHECK(back.ranking[q].coeffs == sol.ranking[q].coeffs);
    CHECK(back.ranking[q].offset == sol.ranking[q].offset);
    CHECK(back.invariant[q][0].coeffs == sol.invariant[q][0].coeffs);
  }
  CHECK(back.choice.chosen == sol.choice.chosen);
  REQUIRE(back.strategy.has_value());
  CHECK(std::get<MemorylessStrategy>(*back.strategy).prob == ms.prob);

  // the round-tripped certificate still validates
  ValidationReport rep =
      check_certificate(back, mdp, nba, init, InitMode::Universal,
                        *back.strategy, DISTCERT_SOLVER, kTimeout);
  CHECK(rep.passed);
}

TEST_CASE("verification-mode certificates keep the given strategy") {
  Mdp mdp = running_mdp();
  Nba nba = parse_ltl_pattern("G F \"V1>=0.249\"", 3);
  InitRegion init = parse_init("point: 1/3 1/3 1/3\n", 3);
  Pdts pdts = build_pdts(mdp, nba, init, UpdateKind::FixedStrategy);
  CertificateSolution sol = known_good(pdts);
  std::string text = write_certificate(sol, mdp);
  CHECK(text.find("strategy given") != std::string::npos);
  CertificateSolution back = read_certificate(text, mdp, nba);
  CHECK(!back.strategy.has_value());
}

TEST_CASE("malformed certificate files raise parse errors") {
  Mdp mdp = running_mdp();
  Nba nba = parse_ltl_pattern("G F \"V1>=0.249\"", 3);
  CHECK_THROWS_AS(read_certificate("ranking q0: 1 2 3 | 0\n", mdp, nba),
                  ParseError);
  CHECK_THROWS_AS(
      read_certificate("certificate\nranking q0: 1 2 | 0\n", mdp, nba),
      ParseError);
  CHECK_THROWS_AS(
      read_certificate("certificate\nranking q0: 1 2 3 | 0\n", mdp, nba),
      SemanticError); // missing row for q1
}
