#pragma once

#include <cmath>
#include <limits>

#include "spenv/base_spectra.hpp"
#include "spenv/envelope.hpp"
#include "spenv/errors.hpp"
#include "spenv/numerics.hpp"
#include "spenv/potential.hpp"

// Local energy (H phi)/phi for envelope-generated trial functions. Because
// phi is an exact eigenfunction of -Delta + u(t) hhat with eigenvalue H(t),
// the ratio collapses to the Identity form
//   w(t; r) = H(t) - u(t) hhat(r) + v f(r)
// which is defined even at nodes of phi. Extremizing over r and then over t
// reproduces the tangent envelope bound exactly (the coincidence theorem).

namespace spenv {

enum class LocalForm { Identity, NumericRatio };

struct LocalEnergyProfile {
  TrialFunction trial;
  PotentialShape target_f;
  double v = 1.0;
  LocalForm form = LocalForm::Identity;
};

// Trial family implied by a power base and the spectrum mode.
inline TrialFamily trial_family_for(double q, SpectrumMode mode) {
  if (mode == SpectrumMode::Line) {
    if (q == 2.0) return TrialFamily::Oscillator1D;
    throw UnsupportedExponent("trial_family_for: line trials exist for q = 2 only");
  }
  if (q == -1.0) return TrialFamily::RadialCoulomb;
  if (q == 2.0) return TrialFamily::RadialOscillator;
  throw UnsupportedExponent("trial_family_for: radial trials exist for q = -1 and q = 2");
}

inline double local_energy(const LocalEnergyProfile& profile, double r) {
  validate(profile.trial);
  if (!(profile.v > 0.0)) throw DomainViolation("local_energy: v must be positive");
  const PotentialShape hhat = trial_base_shape(profile.trial.family);
  if (profile.form == LocalForm::Identity) {
    const EigenData ed = trial_eigendata(profile.trial);
    return ed.energy - ed.u * hhat.evaluate(r) + profile.v * profile.target_f.evaluate(r);
  }
  // NumericRatio: -phi''/phi (+ reduced centrifugal term) + v f, as a
  // cross-check of the eigenfunction identity behind the Identity form.
  auto phi = [&](double x) { return trial_eval(profile.trial, x); };
  const double step = 1e-3 * (1.0 + std::abs(r));
  const double here = phi(r);
  const double ref = std::max({std::abs(here), std::abs(phi(r - step)), std::abs(phi(r + step))});
  if (!(std::abs(here) > 1e-8 * ref))
    throw TrialZero("local_energy: NumericRatio evaluated at a node of the trial function");
  const double d2 = richardson_diff(phi, r, 2, step);
  double centrifugal = 0.0;
  if (trial_mode(profile.trial.family) == SpectrumMode::Radial) {
    const double k = static_cast<double>(profile.trial.qn.k());
    centrifugal = (k - 1.0) * (k - 3.0) / (4.0 * r * r);
  }
  return -d2 / here + centrifugal + profile.v * profile.target_f.evaluate(r);
}

// Local energy theorem: Convex pairs give E_n >= max_t inf_r w(t; r), Concave
// pairs give E_n <= min_t sup_r w(t; r). The inner extremum uses the Identity
// form, so trial nodes need no exclusion. Parameters where the inner extremum
// runs off the domain edge (the inf/sup diverges) are skipped; if no t gives a
// finite inner extremum the bound is vacuous and UnboundedInner is thrown.
inline BoundResult local_energy_bound(const PotentialShape& f, const PotentialShape& h,
                                      const PowerLawSpectrum& base, double v,
                                      const QuantumNumbers& qn,
                                      const BoundOptions& opt = {}) {
  if (!(v > 0.0)) throw DomainViolation("local_energy_bound: v must be positive");
  const PotentialShape hnorm = detail::checked_base(h, base, qn);
  const TrialFamily family = trial_family_for(base.q, qn.mode);
  if (is_affine_pair(f, hnorm, opt.classify))
    return detail::affine_bound(f, hnorm, base, v, BoundMethod::LocalEnergy);

  const Convexity conv = classify_convexity(f, hnorm, opt.classify);
  if (conv == Convexity::Indefinite)
    throw IndefiniteConvexity("local_energy_bound: g = f o h^{-1} changes convexity");
  // Convex: inner inf over r, outer max over t. Concave: inner sup, outer min.
  const double inner_orient = conv == Convexity::Convex ? 1.0 : -1.0;
  const double outer_sign = conv == Convexity::Convex ? -1.0 : 1.0;

  Tolerance outer_tol = opt.tol;
  outer_tol.abs_x *= 10.0;
  outer_tol.abs_f *= 10.0;

  const PotentialShape hhat = trial_base_shape(family);
  bool any_inner = false;
  auto outer = [&](double t) -> double {
    const EigenData ed = trial_eigendata(TrialFunction{family, qn, t});
    auto inner = [&](double r) {
      return inner_orient * (ed.energy - ed.u * hhat.evaluate(r) + v * f.evaluate(r));
    };
    try {
      const Minimum m = minimize_on_domain(inner, opt.scan, opt.tol);
      any_inner = true;
      return outer_sign * (inner_orient * m.value);
    } catch (const NoBracketFound&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  Minimum mo;
  try {
    mo = minimize_on_domain(outer, opt.scan, outer_tol);
  } catch (const NoBracketFound&) {
    if (!any_inner)
      throw UnboundedInner("local_energy_bound: inner extremum diverges for every trial parameter");
    throw NoBracketFound("local_energy_bound: no interior optimum over the trial parameter");
  }
  BoundResult res;
  res.value = outer_sign * mo.value;
  res.side = conv == Convexity::Convex ? Side::Lower : Side::Upper;
  res.method = BoundMethod::LocalEnergy;
  res.optimizer = mo.x;
  res.iterations = mo.iterations;
  res.converged = true;
  return res;
}

// Trial parameter making r a critical point of w(t; r): solve dw/dr = 0,
// i.e. u(t) = v f'(r) / hhat'(r), then invert the family's coupling map.
inline double critical_parameter(const PotentialShape& f, const PotentialShape& h,
                                 const QuantumNumbers& qn, double r, double v = 1.0) {
  validate(qn);
  if (!(r > 0.0) && qn.mode == SpectrumMode::Radial)
    throw DomainViolation("critical_parameter: r must be positive");
  if (!h.single_power())
    throw PairMismatch("critical_parameter: base potential h must be a single power term");
  const PowerTerm term = h.terms().front();
  const TrialFamily family = trial_family_for(term.exponent, qn.mode);
  const PotentialShape hhat = trial_base_shape(family);
  const double u_req = v * f.derivative(r, 1) / hhat.derivative(r, 1);
  if (!(u_req > 0.0))
    throw NoRoot("critical_parameter: no positive coupling makes r critical");
  switch (family) {
    case TrialFamily::Oscillator1D:
      return u_req;
    case TrialFamily::RadialCoulomb:
      return u_req / p_number(-1.0, qn);
    case TrialFamily::RadialOscillator:
      return std::sqrt(u_req);
  }
  throw Error("critical_parameter: unreachable");
}

struct CoincidenceReport {
  BoundResult envelope;
  BoundResult local;
  double delta = 0.0;
};

inline CoincidenceReport coincidence_check(const PotentialShape& f, const PotentialShape& h,
                                           const PowerLawSpectrum& base, double v,
                                           const QuantumNumbers& qn,
                                           const BoundOptions& opt = {}) {
  CoincidenceReport rep;
  rep.envelope = envelope_bound_tangent(f, h, base, v, qn, opt);
  rep.local = local_energy_bound(f, h, base, v, qn, opt);
  rep.delta = std::abs(rep.envelope.value - rep.local.value);
  return rep;
}

}  // namespace spenv
