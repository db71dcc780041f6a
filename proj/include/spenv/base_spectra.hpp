#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <tuple>

#include "spenv/errors.hpp"
#include "spenv/numerics.hpp"
#include "spenv/potential.hpp"

// Exactly solvable base problems -Delta + u h(r): coupling-to-energy curves
// H_n(u) = E1 u^{2/(2+q)}, the P-numbers behind their semiclassical form, and
// the closed-form trial eigenfunctions used by the local energy theorem.

namespace spenv {

enum class SpectrumMode { Line, Radial };

struct QuantumNumbers {
  SpectrumMode mode = SpectrumMode::Radial;
  int d = 3;  // dimension (radial mode)
  int l = 0;  // orbital quantum number (radial mode)
  int n = 0;  // node count of the reduced radial / line eigenfunction
  int k() const { return 2 * l + d; }
};

inline void validate(const QuantumNumbers& qn) {
  if (qn.n < 0) throw DomainViolation("QuantumNumbers: n must be >= 0");
  if (qn.mode == SpectrumMode::Radial && (qn.d < 1 || qn.l < 0))
    throw DomainViolation("QuantumNumbers: need d >= 1 and l >= 0");
}

struct PowerLawSpectrum {
  double q = 2.0;          // base exponent, sgn(q) r^q
  QuantumNumbers qn;
  double e1 = 0.0;         // eigenvalue at unit coupling
  double p = 0.0;          // P_{nk}^{(q)}
};

// P from E1 through the defining relation
//   P = (|E1| / (1 + q/2))^{(2+q)/(2q)} * (|q|/2)^{1/2},  q != 0, q > -2.
inline double p_from_e1(double q, double e1) {
  if (!(q > -2.0) || q == 0.0)
    throw UnsupportedExponent("p_from_e1: need q > -2 and q != 0");
  if (e1 == 0.0 || (q > 0.0) != (e1 > 0.0))
    throw DomainViolation("p_from_e1: E1 must carry the sign of q");
  return std::pow(std::abs(e1) / (1.0 + 0.5 * q), (2.0 + q) / (2.0 * q)) * std::sqrt(0.5 * std::abs(q));
}

// Inverse of the defining relation: E1 = sgn(q) (1 + q/2) (P sqrt(2/|q|))^{2q/(2+q)}.
inline double e1_from_p(double q, double p) {
  if (!(q > -2.0) || q == 0.0)
    throw UnsupportedExponent("e1_from_p: need q > -2 and q != 0");
  if (!(p > 0.0)) throw DomainViolation("e1_from_p: P must be positive");
  const double mag = (1.0 + 0.5 * q) * std::pow(p * std::sqrt(2.0 / std::abs(q)), 2.0 * q / (2.0 + q));
  return q > 0.0 ? mag : -mag;
}

// Closed-form P-numbers. Coulomb: P = n + (k-1)/2; oscillator: P = 2n + k/2
// radially and n + 1/2 on the line. Other exponents need an oracle E1.
inline double p_number(double q, const QuantumNumbers& qn) {
  validate(qn);
  if (!(q > -2.0) || q == 0.0)
    throw UnsupportedExponent("p_number: need q > -2 and q != 0");
  if (qn.mode == SpectrumMode::Line) {
    if (q == 2.0) return qn.n + 0.5;
    throw UnsupportedExponent("p_number: line-mode closed form only for q = 2; supply E1");
  }
  if (q == -1.0) return qn.n + 0.5 * (qn.k() - 1);
  if (q == 2.0) return 2.0 * qn.n + 0.5 * qn.k();
  throw UnsupportedExponent("p_number: closed form only for q in {-1, 2}; supply E1");
}

inline PowerLawSpectrum power_law_spectrum(double q, const QuantumNumbers& qn) {
  const double p = p_number(q, qn);
  return {q, qn, e1_from_p(q, p), p};
}

// General exponent with E1 taken from elsewhere (normally the shooting oracle).
inline PowerLawSpectrum power_law_spectrum(double q, const QuantumNumbers& qn, double e1) {
  validate(qn);
  return {q, qn, e1, p_from_e1(q, e1)};
}

// E_n as a function of the coupling: H_n(u) = E1 u^{2/(2+q)}.
inline double eigenvalue_curve(const PowerLawSpectrum& spec, double u) {
  if (!(u > 0.0)) throw DomainViolation("eigenvalue_curve: coupling must be positive");
  return spec.e1 * std::pow(u, 2.0 / (2.0 + spec.q));
}

// Memoized E1 lookup for general exponents; `compute` runs at most once per
// (q, mode, k, n). Thread safe.
inline double cached_e1(double q, const QuantumNumbers& qn, const std::function<double()>& compute) {
  using Key = std::tuple<double, int, int, int>;
  static std::map<Key, double> cache;
  static std::mutex guard;
  const Key key{q, qn.mode == SpectrumMode::Line ? 0 : 1,
                qn.mode == SpectrumMode::Line ? 1 : qn.k(), qn.n};
  {
    std::lock_guard<std::mutex> lock(guard);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double value = compute();
  std::lock_guard<std::mutex> lock(guard);
  return cache.emplace(key, value).first->second;
}

// ---------------------------------------------------------------------------
// Trial eigenfunctions phi_n(t; r) of the solvable bases, parametrized by an
// exponential scale t > 0.

enum class TrialFamily { Oscillator1D, RadialCoulomb, RadialOscillator };

struct TrialFunction {
  TrialFamily family = TrialFamily::Oscillator1D;
  QuantumNumbers qn;
  double t = 1.0;
};

struct EigenData {
  double u = 0.0;       // base coupling the trial diagonalizes
  double energy = 0.0;  // its eigenvalue H_n(u)
};

inline SpectrumMode trial_mode(TrialFamily family) {
  return family == TrialFamily::Oscillator1D ? SpectrumMode::Line : SpectrumMode::Radial;
}

// Base potential shape the family diagonalizes (unit coefficient).
inline PotentialShape trial_base_shape(TrialFamily family) {
  switch (family) {
    case TrialFamily::Oscillator1D:
      return PotentialShape({{1.0, 2.0}}, Domain::FullLine);
    case TrialFamily::RadialCoulomb:
      return PotentialShape({{-1.0, -1.0}}, Domain::HalfLine);
    default:
      return PotentialShape({{1.0, 2.0}}, Domain::HalfLine);
  }
}

inline void validate(const TrialFunction& tf) {
  validate(tf.qn);
  if (!(tf.t > 0.0)) throw DomainViolation("TrialFunction: scale t must be positive");
  if (trial_mode(tf.family) != tf.qn.mode)
    throw PairMismatch("TrialFunction: family mode does not match quantum numbers");
}

inline double trial_eval(const TrialFunction& tf, double r) {
  validate(tf);
  const double t = tf.t;
  const int n = tf.qn.n;
  switch (tf.family) {
    case TrialFamily::Oscillator1D: {
      const double y = std::pow(t, 0.25) * r;
      return hermite(n, y) * std::exp(-0.5 * std::sqrt(t) * r * r);
    }
    case TrialFamily::RadialCoulomb: {
      if (!(r > 0.0)) throw DomainViolation("trial_eval: radial trial needs r > 0");
      const int k = tf.qn.k();
      return std::pow(r, 0.5 * (k - 1)) * std::exp(-0.5 * t * r) * laguerre(n, k - 2.0, t * r);
    }
    default: {
      if (!(r > 0.0)) throw DomainViolation("trial_eval: radial trial needs r > 0");
      const int k = tf.qn.k();
      return std::pow(r, 0.5 * (k - 1)) * std::exp(-0.5 * t * r * r) *
             laguerre(n, 0.5 * (k - 2.0), t * r * r);
    }
  }
}

// Coupling and eigenvalue the trial solves exactly:
//   Oscillator1D:     u = t,    H = sqrt(t) (2n+1)
//   RadialCoulomb:    u = t P,  H = -t^2/4,   P = n + (k-1)/2
//   RadialOscillator: u = t^2,  H = 2 t P,    P = 2n + k/2
inline EigenData trial_eigendata(const TrialFunction& tf) {
  validate(tf);
  const double t = tf.t;
  switch (tf.family) {
    case TrialFamily::Oscillator1D:
      return {t, std::sqrt(t) * (2.0 * tf.qn.n + 1.0)};
    case TrialFamily::RadialCoulomb: {
      const double p = p_number(-1.0, tf.qn);
      return {t * p, -0.25 * t * t};
    }
    default: {
      const double p = p_number(2.0, tf.qn);
      return {t * t, 2.0 * t * p};
    }
  }
}

}  // namespace spenv
