#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "spenv/base_spectra.hpp"
#include "spenv/errors.hpp"
#include "spenv/kinetic.hpp"
#include "spenv/numerics.hpp"
#include "spenv/potential.hpp"

// Envelope bounds on E_n of -Delta + v f(r). Writing f = g(h) with h an
// exactly solvable power base, the tangent potentials a(t) + b(t) h(x) lie
// below f when g is convex (above when concave), so
//   E_n  >= / <=  opt_t [ v a(t) + H_n(v b(t)) ]
// and, through the base kinetic potential hbar_n,
//   E_n  >= / <=  min_s [ s + v g(hbar_n(s)) ].

namespace spenv {

enum class Side { Lower, Upper };
enum class BoundMethod { TangentEnvelope, KineticEnvelope, Semiclassical, LocalEnergy };

struct BoundResult {
  double value = 0.0;
  Side side = Side::Lower;
  BoundMethod method = BoundMethod::TangentEnvelope;
  double optimizer = 0.0;  // optimal contact point / kinetic energy / trial scale
  int iterations = 0;
  bool converged = false;
};

struct BoundOptions {
  Tolerance tol;                 // inner optimizer tolerance
  ScanDomain scan;               // bracketing domain for every 1-D optimization
  ClassifyOptions classify;      // sampling window for the convexity check
};

namespace detail {

// Shared validation: h must be a single attractive power matching the base
// spectrum and the requested state.
inline PotentialShape checked_base(const PotentialShape& h, const PowerLawSpectrum& base,
                                   const QuantumNumbers& qn) {
  validate(qn);
  if (!h.single_power())
    throw PairMismatch("bound: base potential h must be a single power term");
  const PowerTerm term = h.terms().front();
  if (term.exponent != base.q)
    throw PairMismatch("bound: base spectrum exponent does not match h");
  if ((term.coefficient > 0.0) != (term.exponent > 0.0))
    throw NonAttractive("bound: base power is not attractive (sign of c must match sign of q)");
  if (base.qn.mode != qn.mode || base.qn.n != qn.n ||
      (qn.mode == SpectrumMode::Radial && base.qn.k() != qn.k()))
    throw PairMismatch("bound: base spectrum was built for different quantum numbers");
  // positive rescalings of h only rescale the coupling, which is optimized
  // over anyway; work with the unit-coefficient representative
  const double unit = term.exponent > 0.0 ? 1.0 : -1.0;
  return PotentialShape({{unit, term.exponent}}, h.domain());
}

// Exact result for f affine in h: every tangent is the function itself.
inline BoundResult affine_bound(const PotentialShape& f, const PotentialShape& hnorm,
                                const PowerLawSpectrum& base, double v, BoundMethod method) {
  const Tangent tg = tangent_coefficients(f, hnorm, 1.0);
  BoundResult res;
  res.value = v * tg.a + eigenvalue_curve(base, v * tg.b);
  res.side = Side::Lower;  // attained, so valid as a lower bound by convention
  res.method = method;
  res.optimizer = 1.0;
  res.iterations = 0;
  res.converged = true;
  return res;
}

}  // namespace detail

// Tangent-rail bound: optimize v a(t) + H_n(v b(t)) over the contact point.
inline BoundResult envelope_bound_tangent(const PotentialShape& f, const PotentialShape& h,
                                          const PowerLawSpectrum& base, double v,
                                          const QuantumNumbers& qn,
                                          const BoundOptions& opt = {}) {
  if (!(v > 0.0)) throw DomainViolation("envelope_bound_tangent: v must be positive");
  const PotentialShape hnorm = detail::checked_base(h, base, qn);
  if (is_affine_pair(f, hnorm, opt.classify))
    return detail::affine_bound(f, hnorm, base, v, BoundMethod::TangentEnvelope);

  const Convexity conv = classify_convexity(f, hnorm, opt.classify);
  if (conv == Convexity::Indefinite)
    throw IndefiniteConvexity("envelope_bound_tangent: g = f o h^{-1} changes convexity");
  const double orient = conv == Convexity::Convex ? -1.0 : 1.0;  // maximize for convex

  // Contact points with invalid tangents (b <= 0, h' = 0) are skipped, not fatal.
  auto objective = [&](double t) -> double {
    try {
      const Tangent tg = tangent_coefficients(f, hnorm, t);
      return orient * (v * tg.a + eigenvalue_curve(base, v * tg.b));
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  Minimum m;
  try {
    m = minimize_on_domain(objective, opt.scan, opt.tol);
  } catch (const NoBracketFound&) {
    throw NoBracketFound("envelope_bound_tangent: no interior optimum over the contact point");
  }
  BoundResult res;
  res.value = orient * m.value;
  res.side = conv == Convexity::Convex ? Side::Lower : Side::Upper;
  res.method = BoundMethod::TangentEnvelope;
  res.optimizer = m.x;
  res.iterations = m.iterations;
  res.converged = true;
  return res;
}

// Kinetic-potential bound: min_s [ s + v f(h^{-1}(hbar_n(s))) ]. For the
// unit-coefficient power base, h^{-1}(hbar_n(s)) is simply r = P / sqrt(s).
inline BoundResult envelope_bound_kinetic(const PotentialShape& f, const PotentialShape& h,
                                          const PowerLawSpectrum& base, double v,
                                          const QuantumNumbers& qn,
                                          const BoundOptions& opt = {}) {
  if (!(v > 0.0)) throw DomainViolation("envelope_bound_kinetic: v must be positive");
  const PotentialShape hnorm = detail::checked_base(h, base, qn);

  Side side = Side::Lower;
  if (!is_affine_pair(f, hnorm, opt.classify)) {
    const Convexity conv = classify_convexity(f, hnorm, opt.classify);
    if (conv == Convexity::Indefinite)
      throw IndefiniteConvexity("envelope_bound_kinetic: g = f o h^{-1} changes convexity");
    side = conv == Convexity::Convex ? Side::Lower : Side::Upper;
  }

  const double p = base.p;
  auto objective = [&](double s) { return s + v * f.evaluate(p / std::sqrt(s)); };
  Minimum m;
  try {
    m = minimize_on_domain(objective, opt.scan, opt.tol);
  } catch (const NoBracketFound&) {
    throw NoBracketFound("envelope_bound_kinetic: no interior minimum over s");
  }
  BoundResult res;
  res.value = m.value;
  res.side = side;
  res.method = BoundMethod::KineticEnvelope;
  res.optimizer = m.x;
  res.iterations = m.iterations;
  res.converged = true;
  return res;
}

struct SweepPoint {
  double v = 0.0;
  bool ok = false;
  BoundResult result;
  std::string error;
};

// Evaluate one envelope bound over a coupling grid; per-point failures are
// recorded in place and the sweep continues. Results follow the input order.
// Local-theorem sweeps are composed from local_energy_bound by the caller.
inline std::vector<SweepPoint> bound_sweep(const PotentialShape& f, const PotentialShape& h,
                                           const PowerLawSpectrum& base,
                                           const QuantumNumbers& qn,
                                           const std::vector<double>& v_grid,
                                           BoundMethod method = BoundMethod::TangentEnvelope,
                                           const BoundOptions& opt = {}) {
  if (method != BoundMethod::TangentEnvelope && method != BoundMethod::KineticEnvelope)
    throw ConfigError("bound_sweep: only the tangent and kinetic envelope methods sweep here");
  std::vector<SweepPoint> out;
  out.reserve(v_grid.size());
  for (double v : v_grid) {
    SweepPoint pt;
    pt.v = v;
    try {
      pt.result = method == BoundMethod::TangentEnvelope
                      ? envelope_bound_tangent(f, h, base, v, qn, opt)
                      : envelope_bound_kinetic(f, h, base, v, qn, opt);
      pt.ok = true;
    } catch (const Error& e) {
      pt.error = e.what();
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace spenv
