#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spenv/errors.hpp"
#include "spenv/potential.hpp"

using namespace spenv;

TEST_CASE("power shapes evaluate and differentiate", "[potential]") {
  const PotentialShape quartic = PotentialShape::parse("1:4", Domain::FullLine);
  CHECK(quartic.evaluate(2.0) == 16.0);
  CHECK(quartic.evaluate(-2.0) == 16.0);  // even extension
  CHECK(std::abs(quartic.derivative(1.0, 1) - 4.0) < 1e-12);
  CHECK(std::abs(quartic.derivative(-1.0, 1) + 4.0) < 1e-12);  // odd first derivative
  CHECK(std::abs(quartic.derivative(1.5, 2) - 12.0 * 1.5 * 1.5) < 1e-10);

  const PotentialShape combo = PotentialShape::parse("-1:-1,1:2");
  CHECK(std::abs(combo.evaluate(2.0) - 3.5) < 1e-12);
  CHECK(std::abs(combo.derivative(1.0, 1) - 3.0) < 1e-12);
  CHECK_THROWS_AS(combo.evaluate(0.0), DomainViolation);
  CHECK_THROWS_AS(combo.evaluate(-1.0), DomainViolation);
}

TEST_CASE("shape parsing rejects malformed specs", "[potential]") {
  CHECK_THROWS_AS(PotentialShape::parse(""), ConfigError);
  CHECK_THROWS_AS(PotentialShape::parse("junk"), ConfigError);
  CHECK_THROWS_AS(PotentialShape::parse("1:-2.5"), DomainViolation);  // q <= -2
  CHECK_THROWS_AS(PotentialShape::parse("1:3", Domain::FullLine), DomainViolation);
  CHECK_THROWS_AS(PotentialShape::parse("1:-1", Domain::FullLine), DomainViolation);
}

TEST_CASE("shape str() round-trips through parse", "[potential]") {
  const PotentialShape combo = PotentialShape::parse("-1:-1,1:2");
  const PotentialShape again = PotentialShape::parse(combo.str());
  CHECK(again.terms().size() == combo.terms().size());
  CHECK(std::abs(again.evaluate(1.7) - combo.evaluate(1.7)) < 1e-12);
}

TEST_CASE("tangent coefficients reproduce hand values", "[potential]") {
  const PotentialShape quartic = PotentialShape::parse("1:4", Domain::FullLine);
  const PotentialShape osc = PotentialShape::parse("1:2", Domain::FullLine);
  for (double t : {0.5, 1.0, 2.0}) {
    const Tangent tg = tangent_coefficients(quartic, osc, t);
    CHECK(std::abs(tg.b - 2.0 * t * t) < 1e-12);
    CHECK(std::abs(tg.a + t * t * t * t) < 1e-12);
  }

  const PotentialShape combo = PotentialShape::parse("-1:-1,1:2");
  const PotentialShape coul = PotentialShape::parse("-1:-1");
  const Tangent tg = tangent_coefficients(combo, coul, 1.0);
  CHECK(std::abs(tg.a - 3.0) < 1e-12);
  CHECK(std::abs(tg.b - 3.0) < 1e-12);
  // tangency: a + b h(t) = f(t)
  CHECK(std::abs(tg.a + tg.b * coul.evaluate(1.0) - combo.evaluate(1.0)) < 1e-12);
}

TEST_CASE("tangent construction requires aligned monotonicity", "[potential]") {
  const PotentialShape falling = PotentialShape::parse("-1:1");
  const PotentialShape osc = PotentialShape::parse("1:2");
  CHECK_THROWS_AS(tangent_coefficients(falling, osc, 1.0), NonMonotone);
}

TEST_CASE("convexity classification over the usual pairs", "[potential]") {
  const PotentialShape quartic = PotentialShape::parse("1:4", Domain::FullLine);
  const PotentialShape osc_line = PotentialShape::parse("1:2", Domain::FullLine);
  CHECK(classify_convexity(quartic, osc_line) == Convexity::Convex);

  const PotentialShape combo = PotentialShape::parse("-1:-1,1:2");
  const PotentialShape coul = PotentialShape::parse("-1:-1");
  const PotentialShape osc = PotentialShape::parse("1:2");
  CHECK(classify_convexity(combo, coul) == Convexity::Convex);
  CHECK(classify_convexity(combo, osc) == Convexity::Concave);

  // g(y) = y^3 - y^2 flips convexity at y = 1/3
  const PotentialShape mixed = PotentialShape::parse("1:6,-1:4", Domain::FullLine);
  CHECK(classify_convexity(mixed, osc_line) == Convexity::Indefinite);
}

TEST_CASE("affine pairs are recognized", "[potential]") {
  const PotentialShape osc = PotentialShape::parse("1:2");
  CHECK(is_affine_pair(PotentialShape::parse("2:2"), osc));
  CHECK(is_affine_pair(PotentialShape::parse("-3:-1"), PotentialShape::parse("-1:-1")));
  CHECK_FALSE(is_affine_pair(PotentialShape::parse("-1:-1,1:2"), osc));
}

TEST_CASE("constructor guards exponents and domains", "[potential]") {
  CHECK_THROWS_AS(PotentialShape({{1.0, -2.0}}, Domain::HalfLine), DomainViolation);
  CHECK_NOTHROW(PotentialShape({{1.0, -1.5}}, Domain::HalfLine));
  CHECK_THROWS_AS(PotentialShape({{1.0, 2.5}}, Domain::FullLine), DomainViolation);
}
