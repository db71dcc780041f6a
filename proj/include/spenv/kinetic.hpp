#pragma once

#include <cmath>
#include <functional>

#include "spenv/base_spectra.hpp"
#include "spenv/errors.hpp"
#include "spenv/numerics.hpp"
#include "spenv/potential.hpp"

// Kinetic potentials fbar_n(s) and the Legendre transformation pair linking
// them to coupling curves F_n(v):
//   s = F(v) - v F'(v),   fbar(s) = F'(v)
//   1/v = -fbar'(s),      F(v)/v = fbar(s) - s fbar'(s)
// so that E_n = F_n(v) = min_s [ s + v fbar_n(s) ].

namespace spenv {

struct EnergyCurve {
  std::function<double(double)> value;       // F(v)
  std::function<double(double)> derivative;  // F'(v)
};

struct KineticPotential {
  std::function<double(double)> value;       // fbar(s)
  std::function<double(double)> derivative;  // fbar'(s)
};

struct LegendrePoint {
  double s = 0.0;
  double fbar = 0.0;
};

struct EnergyPoint {
  double v = 0.0;
  double energy = 0.0;
};

// F(v) -> (s, fbar) at coupling v. F must be concave there (every attractive
// coupling curve is); checked with a coarse finite difference.
inline LegendrePoint legendre_to_kinetic(const EnergyCurve& curve, double v) {
  if (!(v > 0.0)) throw DomainViolation("legendre_to_kinetic: v must be positive");
  const double step = 1e-3 * v;
  const double fpp = (curve.derivative(v + step) - curve.derivative(v - step)) / (2.0 * step);
  if (!(fpp < 0.0))
    throw NonAttractive("legendre_to_kinetic: energy curve is not concave at v");
  const double fp = curve.derivative(v);
  return {curve.value(v) - v * fp, fp};
}

// fbar(s) -> (v, F) at kinetic energy s, inverting the transform.
inline EnergyPoint legendre_to_energy(const KineticPotential& kin, double s) {
  if (!(s > 0.0)) throw DomainViolation("legendre_to_energy: s must be positive");
  const double slope = kin.derivative(s);
  if (!(slope < 0.0))
    throw NonAttractive("legendre_to_energy: fbar'(s) >= 0, not an attractive problem");
  const double v = -1.0 / slope;
  return {v, s + v * kin.value(s)};
}

// Pure-power kinetic potential fbar^{(q)}(s) = sgn(q) (P / sqrt(s))^q.
inline double power_kinetic(double q, double p, double s) {
  if (!(q > -2.0) || q == 0.0)
    throw UnsupportedExponent("power_kinetic: need q > -2 and q != 0");
  if (!(p > 0.0) || !(s > 0.0))
    throw DomainViolation("power_kinetic: need P > 0 and s > 0");
  const double mag = std::pow(p / std::sqrt(s), q);
  return q > 0.0 ? mag : -mag;
}

inline KineticPotential power_kinetic_potential(double q, double p) {
  if (!(q > -2.0) || q == 0.0)
    throw UnsupportedExponent("power_kinetic_potential: need q > -2 and q != 0");
  if (!(p > 0.0)) throw DomainViolation("power_kinetic_potential: need P > 0");
  const double sign = q > 0.0 ? 1.0 : -1.0;
  const double pq = std::pow(p, q);
  return {[=](double s) { return sign * pq * std::pow(s, -0.5 * q); },
          [=](double s) { return sign * pq * (-0.5 * q) * std::pow(s, -0.5 * q - 1.0); }};
}

// F(v) = E1 v^{2/(2+q)} with its analytic derivative.
inline EnergyCurve power_law_energy_curve(const PowerLawSpectrum& spec) {
  const double e1 = spec.e1;
  const double expo = 2.0 / (2.0 + spec.q);
  return {[=](double v) { return e1 * std::pow(v, expo); },
          [=](double v) { return e1 * expo * std::pow(v, expo - 1.0); }};
}

// Wrap a sampled curve (e.g. the shooting oracle at coupling v) into an
// EnergyCurve; the derivative is a Richardson-extrapolated central difference
// with relative step `rel_step`.
inline EnergyCurve energy_curve_from_function(std::function<double(double)> f,
                                              double rel_step = 1e-4) {
  auto deriv = [f, rel_step](double v) { return richardson_diff(f, v, 1, rel_step * v); };
  return {std::move(f), std::move(deriv)};
}

// E_n(v) = min_s [ s + v fbar(s) ].
inline double energy_from_kinetic(const KineticPotential& kin, double v,
                                  const ScanDomain& dom = {}, const Tolerance& tol = {}) {
  if (!(v > 0.0)) throw DomainViolation("energy_from_kinetic: v must be positive");
  auto objective = [&](double s) { return s + v * kin.value(s); };
  return minimize_on_domain(objective, dom, tol).value;
}

// Semiclassical form of the same minimum under r = P / sqrt(s):
// F(v) = min_r [ (P/r)^2 + v f(r) ].
inline double semiclassical_energy(double p, const PotentialShape& f, double v,
                                   const ScanDomain& dom = {}, const Tolerance& tol = {}) {
  if (!(p > 0.0) || !(v > 0.0))
    throw DomainViolation("semiclassical_energy: need P > 0 and v > 0");
  auto objective = [&](double r) { return (p / r) * (p / r) + v * f.evaluate(r); };
  return minimize_on_domain(objective, dom, tol).value;
}

namespace detail {

// g(hbar(s)) = f(h^{-1}(hbar(s))) for a single-power base h = c r^{qh}.
inline double transform_kinetic_unchecked(const PotentialShape& f, const PotentialShape& h,
                                          const KineticPotential& hbar, double s) {
  const PowerTerm base = h.terms().front();
  const double ratio = hbar.value(s) / base.coefficient;
  if (!(ratio > 0.0))
    throw DomainViolation("transform_kinetic: kinetic value left the range of h");
  return f.evaluate(std::pow(ratio, 1.0 / base.exponent));
}

}  // namespace detail

// Theorem-5 transformation of the base kinetic potential through g = f o h^{-1}.
inline double transform_kinetic(const PotentialShape& f, const PotentialShape& h,
                                const KineticPotential& hbar, double s) {
  if (!h.single_power())
    throw DomainViolation("transform_kinetic: base h must be a single power term");
  if (!is_affine_pair(f, h) && classify_convexity(f, h) == Convexity::Indefinite)
    throw IndefiniteConvexity("transform_kinetic: (f, h) has no definite convexity");
  return detail::transform_kinetic_unchecked(f, h, hbar, s);
}

// Parametric kinetic potential of an arbitrary concave coupling curve:
// given s, solve s(v) = s on [v_lo, v_hi] (s(v) is increasing), then
// fbar = F'(v) and fbar' = -1/v. Root solve only touches first derivatives,
// which keeps curvature tests against F'' independent.
inline KineticPotential kinetic_from_energy_curve(const EnergyCurve& curve, double v_lo,
                                                  double v_hi, const Tolerance& tol = {}) {
  if (!(0.0 < v_lo && v_lo < v_hi))
    throw DomainViolation("kinetic_from_energy_curve: need 0 < v_lo < v_hi");
  auto v_of_s = [curve, v_lo, v_hi, tol](double s) {
    auto gap = [&](double v) { return (curve.value(v) - v * curve.derivative(v)) - s; };
    return bisect_root(gap, v_lo, v_hi, tol);
  };
  auto value = [curve, v_of_s](double s) { return curve.derivative(v_of_s(s)); };
  auto deriv = [v_of_s](double s) { return -1.0 / v_of_s(s); };
  return {std::move(value), std::move(deriv)};
}

}  // namespace spenv
