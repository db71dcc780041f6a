#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spenv/envelope.hpp"
#include "spenv/errors.hpp"

using namespace spenv;

namespace {
QuantumNumbers k7(int n) {
  QuantumNumbers qn;
  qn.mode = SpectrumMode::Radial;
  qn.d = 3;
  qn.l = 2;
  qn.n = n;
  return qn;
}
QuantumNumbers line(int n) {
  QuantumNumbers qn;
  qn.mode = SpectrumMode::Line;
  qn.n = n;
  return qn;
}
const PotentialShape kQuartic = PotentialShape::parse("1:4", Domain::FullLine);
const PotentialShape kOscLine = PotentialShape::parse("1:2", Domain::FullLine);
const PotentialShape kCombo = PotentialShape::parse("-1:-1,1:2");
const PotentialShape kCoul = PotentialShape::parse("-1:-1");
const PotentialShape kOsc = PotentialShape::parse("1:2");
}  // namespace

TEST_CASE("quartic lower bound equals 3/4 (2n+1)^{4/3} by both routes", "[envelope]") {
  for (int n : {0, 1, 2, 3}) {
    const auto base = power_law_spectrum(2.0, line(n));
    const double want = 0.75 * std::pow(2.0 * n + 1.0, 4.0 / 3.0);
    const BoundResult tangent = envelope_bound_tangent(kQuartic, kOscLine, base, 1.0, line(n));
    CHECK(std::abs(tangent.value - want) < 1e-9);
    CHECK(tangent.side == Side::Lower);
    CHECK(tangent.method == BoundMethod::TangentEnvelope);
    CHECK(tangent.converged);
    const BoundResult kinetic = envelope_bound_kinetic(kQuartic, kOscLine, base, 1.0, line(n));
    CHECK(std::abs(kinetic.value - want) < 1e-9);
    CHECK(kinetic.method == BoundMethod::KineticEnvelope);
  }
  // optimal contact point for n = 0 is t = 2^{-1/2}
  const auto base0 = power_law_spectrum(2.0, line(0));
  const BoundResult r0 = envelope_bound_tangent(kQuartic, kOscLine, base0, 1.0, line(0));
  CHECK(std::abs(r0.optimizer - 1.0 / std::sqrt(2.0)) < 1e-6);
}

TEST_CASE("combo potential brackets from the two bases", "[envelope]") {
  const auto cb = power_law_spectrum(-1.0, k7(0));
  const auto ob = power_law_spectrum(2.0, k7(0));
  const BoundResult lower = envelope_bound_tangent(kCombo, kCoul, cb, 1.0, k7(0));
  CHECK(lower.side == Side::Lower);
  CHECK(std::abs(lower.value - 5.41553413779419) < 1e-9);
  CHECK(std::abs(lower.optimizer - 1.68988350507101) < 1e-6);
  const BoundResult upper = envelope_bound_tangent(kCombo, kOsc, ob, 1.0, k7(0));
  CHECK(upper.side == Side::Upper);
  CHECK(std::abs(upper.value - 6.46027619099999) < 1e-9);
  CHECK(std::abs(upper.optimizer - 1.83477374034552) < 1e-6);

  // kinetic route lands on the same numbers
  CHECK(std::abs(envelope_bound_kinetic(kCombo, kCoul, cb, 1.0, k7(0)).value -
                 5.41553413779419) < 1e-8);
  CHECK(std::abs(envelope_bound_kinetic(kCombo, kOsc, ob, 1.0, k7(0)).value -
                 6.46027619099999) < 1e-8);
}

TEST_CASE("affine targets collapse to the exact eigenvalue", "[envelope]") {
  const PotentialShape doubled = PotentialShape::parse("2:2", Domain::FullLine);
  const auto base = power_law_spectrum(2.0, line(2));
  const BoundResult res = envelope_bound_tangent(doubled, kOscLine, base, 1.0, line(2));
  // -psi'' + 2 x^2: E_2 = 5 sqrt(2)
  CHECK(std::abs(res.value - 5.0 * std::sqrt(2.0)) < 1e-12);
  CHECK(res.converged);
  const BoundResult kin = envelope_bound_kinetic(doubled, kOscLine, base, 1.0, line(2));
  CHECK(std::abs(kin.value - res.value) < 1e-12);
}

TEST_CASE("base validation fires before any optimization", "[envelope]") {
  const auto ob = power_law_spectrum(2.0, k7(0));
  // repulsive base: coefficient sign disagrees with exponent sign
  CHECK_THROWS_AS(envelope_bound_tangent(kCombo, PotentialShape::parse("-1:2"), ob, 1.0, k7(0)),
                  NonAttractive);
  // spectrum exponent disagrees with the shape
  CHECK_THROWS_AS(envelope_bound_tangent(kCombo, kCoul, ob, 1.0, k7(0)), PairMismatch);
  // spectrum built for different quantum numbers
  const auto wrong_n = power_law_spectrum(2.0, k7(1));
  CHECK_THROWS_AS(envelope_bound_tangent(kCombo, kOsc, wrong_n, 1.0, k7(0)), PairMismatch);
  // multi-term base
  CHECK_THROWS_AS(envelope_bound_tangent(kCombo, kCombo, ob, 1.0, k7(0)), PairMismatch);
}

TEST_CASE("indefinite transformations are refused", "[envelope]") {
  const PotentialShape mixed = PotentialShape::parse("1:6,-1:4", Domain::FullLine);
  const auto base = power_law_spectrum(2.0, line(0));
  CHECK_THROWS_AS(envelope_bound_tangent(mixed, kOscLine, base, 1.0, line(0)),
                  IndefiniteConvexity);
}

TEST_CASE("repulsive tail with no envelope reports a bracket failure", "[envelope]") {
  // f = +1/r over an oscillator base: every tangent line has b <= 0
  const PotentialShape repulsive = PotentialShape::parse("1:-1");
  const auto ob = power_law_spectrum(2.0, k7(0));
  CHECK_THROWS_AS(envelope_bound_tangent(repulsive, kOsc, ob, 1.0, k7(0)), NoBracketFound);
}

TEST_CASE("bound_sweep walks a grid and records per-point errors", "[envelope]") {
  const auto cb = power_law_spectrum(-1.0, k7(0));
  const auto pts = bound_sweep(kCombo, kCoul, cb, k7(0), {0.5, 1.0, 2.0});
  REQUIRE(pts.size() == 3);
  for (const auto& pt : pts) {
    CHECK(pt.ok);
    CHECK(pt.error.empty());
  }
  CHECK(pts[0].result.value < pts[1].result.value);
  CHECK(pts[1].result.value < pts[2].result.value);
  CHECK(std::abs(pts[1].result.value - 5.41553413779419) < 1e-9);

  // v <= 0 is a per-point failure, not a crash
  const auto bad = bound_sweep(kCombo, kCoul, cb, k7(0), {1.0, -2.0});
  REQUIRE(bad.size() == 2);
  CHECK(bad[0].ok);
  CHECK_FALSE(bad[1].ok);
  CHECK_FALSE(bad[1].error.empty());

  CHECK_THROWS_AS(bound_sweep(kCombo, kCoul, cb, k7(0), {1.0}, BoundMethod::LocalEnergy),
                  ConfigError);
}

TEST_CASE("bounds scale as v^{1/3} for the quartic pair", "[envelope]") {
  const auto base = power_law_spectrum(2.0, line(0));
  const double at1 = envelope_bound_tangent(kQuartic, kOscLine, base, 1.0, line(0)).value;
  for (double v : {0.5, 2.0, 8.0}) {
    const double got = envelope_bound_tangent(kQuartic, kOscLine, base, v, line(0)).value;
    CHECK(std::abs(got - std::cbrt(v) * at1) < 1e-8);
  }
}
