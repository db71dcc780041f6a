#pragma once

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "spenv/errors.hpp"
#include "spenv/numerics.hpp"

// Signed power-law potential shapes f(r) = sum_i c_i r^{q_i} and the tangent
// construction f(x) >= / <= a(t) + b(t) h(x) that drives every bound here.

namespace spenv {

enum class Domain { HalfLine, FullLine };

struct PowerTerm {
  double coefficient = 0.0;
  double exponent = 0.0;
};

class PotentialShape {
 public:
  // Identically-zero placeholder so problem structs can carry a shape member;
  // any operation that needs terms treats it as an empty sum.
  PotentialShape() : domain_(Domain::HalfLine) {}

  PotentialShape(std::vector<PowerTerm> terms, Domain domain = Domain::HalfLine)
      : terms_(std::move(terms)), domain_(domain) {
    if (terms_.empty()) throw DomainViolation("PotentialShape: needs at least one term");
    for (const auto& t : terms_) {
      if (!(t.exponent > -2.0))
        throw DomainViolation("PotentialShape: every exponent must exceed -2");
      if (domain_ == Domain::FullLine) {
        const double rounded = std::round(t.exponent);
        const bool even_int = t.exponent == rounded && std::fmod(rounded, 2.0) == 0.0;
        if (!even_int || t.exponent < 0.0)
          throw DomainViolation(
              "PotentialShape: full-line shapes need even non-negative integer exponents");
      }
    }
  }

  // "coeff:exponent,coeff:exponent" e.g. "-1:-1,1:2" for -1/r + r^2.
  static PotentialShape parse(const std::string& text, Domain domain = Domain::HalfLine) {
    std::vector<PowerTerm> terms;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw ConfigError("potential term '" + item + "' is not coeff:exponent");
      terms.push_back({parse_number(item.substr(0, colon)), parse_number(item.substr(colon + 1))});
    }
    if (terms.empty()) throw ConfigError("empty potential spec '" + text + "'");
    return PotentialShape(std::move(terms), domain);
  }

  double evaluate(double r) const {
    const double x = fold(r);
    check_point(x, 0.0);
    double sum = 0.0;
    for (const auto& t : terms_) sum += t.coefficient * std::pow(x, t.exponent);
    return sum;
  }

  double derivative(double r, int order = 1) const {
    if (order != 1 && order != 2)
      throw DomainViolation("PotentialShape::derivative: order must be 1 or 2");
    const double x = fold(r);
    check_point(x, static_cast<double>(order));
    double sum = 0.0;
    for (const auto& t : terms_) {
      double factor = t.coefficient;
      double q = t.exponent;
      for (int j = 0; j < order; ++j) factor *= q - j;
      if (factor != 0.0) sum += factor * std::pow(x, q - order);
    }
    // odd derivative orders of an even function flip sign on the negative axis
    if (domain_ == Domain::FullLine && r < 0.0 && order % 2 == 1) sum = -sum;
    return sum;
  }

  const std::vector<PowerTerm>& terms() const { return terms_; }
  Domain domain() const { return domain_; }
  bool single_power() const { return terms_.size() == 1; }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i) os << ',';
      os << terms_[i].coefficient << ':' << terms_[i].exponent;
    }
    return os.str();
  }

 private:
  static double parse_number(const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0'))
      throw ConfigError("'" + s + "' is not a number");
    return value;
  }

  double fold(double r) const {
    if (domain_ == Domain::FullLine) return std::abs(r);
    if (r < 0.0) throw DomainViolation("PotentialShape: half-line shape evaluated at r < 0");
    return r;
  }

  void check_point(double x, double order) const {
    if (x != 0.0) return;
    for (const auto& t : terms_)
      if (t.exponent - order < 0.0)
        throw DomainViolation("PotentialShape: singular term evaluated at r = 0");
  }

  std::vector<PowerTerm> terms_;
  Domain domain_;
};

// Tangent line in h-space: f tangent to a + b*h at the contact point t.
struct Tangent {
  double a = 0.0;
  double b = 0.0;
};

inline Tangent tangent_coefficients(const PotentialShape& f, const PotentialShape& h, double t) {
  const double hp = h.derivative(t, 1);
  if (hp == 0.0 || !std::isfinite(hp))
    throw DegenerateBase("tangent_coefficients: h'(t) vanishes");
  const double b = f.derivative(t, 1) / hp;
  if (!(b > 0.0))
    throw NonMonotone("tangent_coefficients: slope b(t) = f'(t)/h'(t) must be positive");
  return {f.evaluate(t) - b * h.evaluate(t), b};
}

enum class Convexity { Convex, Concave, Indefinite };

struct ClassifyOptions {
  double lo = 1e-3;
  double hi = 1e3;
  int samples = 512;
};

namespace detail {

// Second derivative of the transformation g (where f = g(h)) expressed by the
// chain rule; g itself is never materialized.
inline double g_second(const PotentialShape& f, const PotentialShape& h, double x) {
  const double hp = h.derivative(x, 1);
  const double num = f.derivative(x, 2) * hp - f.derivative(x, 1) * h.derivative(x, 2);
  return num / (hp * hp * hp);
}

}  // namespace detail

// Sign of g'' sampled on a log-spaced grid. The post is strict: a pair whose
// g'' vanishes somewhere (e.g. f affine in h) is Indefinite here; the bound
// routines special-case the affine situation before calling this.
inline Convexity classify_convexity(const PotentialShape& f, const PotentialShape& h,
                                    const ClassifyOptions& opt = {}) {
  if (!(opt.lo > 0.0 && opt.hi > opt.lo && opt.samples >= 2))
    throw DomainViolation("classify_convexity: bad sample interval");
  int positive = 0;
  int negative = 0;
  const double span = std::log(opt.hi / opt.lo);
  for (int i = 0; i < opt.samples; ++i) {
    const double x = opt.lo * std::exp(span * static_cast<double>(i) / (opt.samples - 1));
    double gpp;
    try {
      gpp = detail::g_second(f, h, x);
    } catch (const Error&) {
      return Convexity::Indefinite;
    }
    if (!std::isfinite(gpp)) return Convexity::Indefinite;
    if (gpp > 0.0) ++positive;
    if (gpp < 0.0) ++negative;
  }
  if (positive == opt.samples) return Convexity::Convex;
  if (negative == opt.samples) return Convexity::Concave;
  return Convexity::Indefinite;
}

// True when f = a + b*h on the sampled interval (g'' identically zero within
// roundoff). Such pairs make every tangent bound exact.
inline bool is_affine_pair(const PotentialShape& f, const PotentialShape& h,
                           const ClassifyOptions& opt = {}) {
  const double span = std::log(opt.hi / opt.lo);
  for (int i = 0; i < opt.samples; ++i) {
    const double x = opt.lo * std::exp(span * static_cast<double>(i) / (opt.samples - 1));
    double hp, num, scale;
    try {
      hp = h.derivative(x, 1);
      const double t1 = f.derivative(x, 2) * hp;
      const double t2 = f.derivative(x, 1) * h.derivative(x, 2);
      num = t1 - t2;
      scale = std::abs(t1) + std::abs(t2);
    } catch (const Error&) {
      return false;
    }
    if (std::abs(num) > 1e-12 * scale) return false;
  }
  return true;
}

}  // namespace spenv
