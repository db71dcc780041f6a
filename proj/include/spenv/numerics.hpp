#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "spenv/errors.hpp"

// Scalar optimization, root finding, orthogonal-polynomial recurrences and
// finite differences. Everything operates on plain callables double->double.

namespace spenv {

struct Tolerance {
  double abs_x = 1e-10;
  double abs_f = 1e-12;
  int max_iter = 200;
};

// Triple lo < mid < hi with objective(mid) strictly below both ends.
struct Bracket {
  double lo = 0.0;
  double mid = 0.0;
  double hi = 0.0;
};

struct Minimum {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
};

namespace detail {

// Non-finite objective values are treated as +infinity so that expansion and
// golden-section steps simply avoid those regions.
template <class F>
double eval_clamped(F&& fn, double x) {
  const double y = fn(x);
  return std::isfinite(y) ? y : std::numeric_limits<double>::infinity();
}

}  // namespace detail

// Golden-section search on a validated bracket. Returns the best point seen;
// linear convergence is plenty since every caller needs function values whose
// error is second order in the abscissa error.
template <class F>
Minimum minimize_scalar(F&& objective, const Bracket& br, const Tolerance& tol = {}) {
  if (!(br.lo < br.mid && br.mid < br.hi))
    throw BracketInvalid("minimize_scalar: bracket not ordered lo < mid < hi");
  const double f_lo = detail::eval_clamped(objective, br.lo);
  const double f_mid = detail::eval_clamped(objective, br.mid);
  const double f_hi = detail::eval_clamped(objective, br.hi);
  if (!(f_mid < std::min(f_lo, f_hi)))
    throw BracketInvalid("minimize_scalar: objective(mid) does not dip below the ends");

  constexpr double kShrink = 0.3819660112501051;  // 2 - golden ratio
  double a = br.lo, b = br.hi;
  double x1 = a + kShrink * (b - a);
  double x2 = b - kShrink * (b - a);
  double f1 = detail::eval_clamped(objective, x1);
  double f2 = detail::eval_clamped(objective, x2);

  Minimum best{br.mid, f_mid, 0};
  auto consider = [&best](double x, double f) {
    if (f < best.value) {
      best.x = x;
      best.value = f;
    }
  };
  consider(x1, f1);
  consider(x2, f2);

  int iter = 0;
  while (b - a > tol.abs_x) {
    if (++iter > tol.max_iter)
      throw NoConvergence("minimize_scalar: max_iter exhausted before tolerance");
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = a + kShrink * (b - a);
      f1 = detail::eval_clamped(objective, x1);
      consider(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = b - kShrink * (b - a);
      f2 = detail::eval_clamped(objective, x2);
      consider(x2, f2);
    }
  }
  best.iterations = iter;
  return best;
}

// Downhill expansion with golden-ratio step growth. Throws NoBracketFound once
// the expansion has moved more than `span` away from x0 (monotone objective,
// i.e. no discrete minimum in range).
template <class F>
Bracket bracket_minimum(F&& objective, double x0, double step, double span = 1e12) {
  if (step == 0.0) throw BracketInvalid("bracket_minimum: step must be nonzero");
  double fa = objective(x0);
  if (!std::isfinite(fa)) throw BracketInvalid("bracket_minimum: objective not finite at x0");

  double a = x0;
  double b = x0 + step;
  double fb = detail::eval_clamped(objective, b);
  if (fb > fa) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  constexpr double kGrow = 1.618033988749895;
  double c = b + kGrow * (b - a);
  double fc = detail::eval_clamped(objective, c);
  while (fc <= fb) {
    if (std::abs(c - x0) > span)
      throw NoBracketFound("bracket_minimum: expansion exceeded span without finding a dip");
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    c = b + kGrow * (b - a);
    fc = detail::eval_clamped(objective, c);
  }
  Bracket br{std::min(a, c), b, std::max(a, c)};
  if (!(fb < std::min(fa, fc)))
    throw NoBracketFound("bracket_minimum: objective appears flat");
  return br;
}

// Outcome of a grid scan for a minimum; used by the bound machinery where the
// interesting failure modes are edge divergence (no discrete optimum) and a
// flat objective (affine envelope, the bound is exact for every parameter).
enum class ScanOutcome { Interior, Flat, EdgeLo, EdgeHi, AllInvalid };

struct ScanResult {
  ScanOutcome outcome = ScanOutcome::AllInvalid;
  Bracket bracket;
  double x_best = 0.0;
  double f_best = std::numeric_limits<double>::infinity();
};

// Scan a geometric grid on [lo, hi] (optionally prepending extra abscissae,
// e.g. x = 0 for even full-line objectives) and classify the global minimum.
template <class F>
ScanResult scan_minimum(F&& objective, double lo, double hi, int points,
                        const std::vector<double>& extra = {}) {
  if (!(lo > 0.0 && hi > lo && points >= 8))
    throw BracketInvalid("scan_minimum: need 0 < lo < hi and at least 8 points");
  std::vector<double> xs(extra.begin(), extra.end());
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < points; ++i)
    xs.push_back(lo * std::exp(ratio * static_cast<double>(i) / (points - 1)));
  std::sort(xs.begin(), xs.end());

  std::vector<double> fs(xs.size());
  std::size_t best = xs.size();
  double fmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fs[i] = detail::eval_clamped(objective, xs[i]);
    if (std::isfinite(fs[i]) && fs[i] > fmax) fmax = fs[i];
    if (best == xs.size() || fs[i] < fs[best]) best = i;
  }

  ScanResult out;
  if (!std::isfinite(fs[best])) return out;  // AllInvalid
  out.x_best = xs[best];
  out.f_best = fs[best];
  const double spread = fmax - fs[best];
  if (spread <= 1e-13 * (std::abs(fmax) + std::abs(fs[best]) + 1.0)) {
    out.outcome = ScanOutcome::Flat;
    return out;
  }
  if (best == 0) {
    out.outcome = ScanOutcome::EdgeLo;
    return out;
  }
  if (best + 1 == xs.size()) {
    out.outcome = ScanOutcome::EdgeHi;
    return out;
  }
  out.outcome = ScanOutcome::Interior;
  out.bracket = Bracket{xs[best - 1], xs[best], xs[best + 1]};
  return out;
}

struct ScanDomain {
  double lo = 1e-6;
  double hi = 1e6;
  int points = 512;
};

// Scan + golden section in one go. Flat objectives return the scan best
// directly (the caller's optimum is attained everywhere); an edge minimum or
// an everywhere-invalid objective means no discrete optimum exists.
template <class F>
Minimum minimize_on_domain(F&& objective, const ScanDomain& dom = {}, const Tolerance& tol = {},
                           const std::vector<double>& extra = {}) {
  const ScanResult sr = scan_minimum(objective, dom.lo, dom.hi, dom.points, extra);
  switch (sr.outcome) {
    case ScanOutcome::Interior:
      return minimize_scalar(objective, sr.bracket, tol);
    case ScanOutcome::Flat:
      return Minimum{sr.x_best, sr.f_best, 0};
    case ScanOutcome::EdgeLo:
      throw NoBracketFound("minimize_on_domain: minimum ran into the lower scan edge");
    case ScanOutcome::EdgeHi:
      throw NoBracketFound("minimize_on_domain: minimum ran into the upper scan edge");
    default:
      throw NoBracketFound("minimize_on_domain: objective invalid on the whole scan domain");
  }
}

// Bisection for a sign change of fn on [lo, hi].
template <class F>
double bisect_root(F&& fn, double lo, double hi, const Tolerance& tol = {}) {
  if (!(lo < hi)) throw BracketInvalid("bisect_root: need lo < hi");
  double flo = fn(lo);
  double fhi = fn(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi))
    throw NoSignChange("bisect_root: fn(lo) and fn(hi) have the same sign");
  for (int iter = 0; iter < 20000 && hi - lo > tol.abs_x; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = fn(mid);
    if (fmid == 0.0) return mid;
    if (std::abs(fmid) <= tol.abs_f && hi - lo <= 1e3 * tol.abs_x) return mid;
    if (std::signbit(fmid) == std::signbit(flo)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Physicists' Hermite polynomial H_n(y) by the ascending three-term
// recurrence H_{k+1} = 2 y H_k - 2 k H_{k-1}.
inline double hermite(int n, double y) {
  if (n < 0) throw DomainViolation("hermite: n must be >= 0");
  double hkm1 = 1.0;  // H_0
  if (n == 0) return hkm1;
  double hk = 2.0 * y;  // H_1
  for (int k = 1; k < n; ++k) {
    const double hkp1 = 2.0 * y * hk - 2.0 * k * hkm1;
    hkm1 = hk;
    hk = hkp1;
  }
  return hk;
}

// Associated Laguerre polynomial L_n^(alpha)(x), same ascending scheme.
inline double laguerre(int n, double alpha, double x) {
  if (n < 0) throw DomainViolation("laguerre: n must be >= 0");
  double lkm1 = 1.0;  // L_0
  if (n == 0) return lkm1;
  double lk = 1.0 + alpha - x;  // L_1
  for (int k = 1; k < n; ++k) {
    const double lkp1 = ((2.0 * k + 1.0 + alpha - x) * lk - (k + alpha) * lkm1) / (k + 1.0);
    lkm1 = lk;
    lk = lkp1;
  }
  return lk;
}

// Central finite differences, first or second derivative.
template <class F>
double finite_diff(F&& fn, double x, int order, double step) {
  if (step <= 0.0) throw DomainViolation("finite_diff: step must be positive");
  if (order == 1) return (fn(x + step) - fn(x - step)) / (2.0 * step);
  if (order == 2) return (fn(x + step) - 2.0 * fn(x) + fn(x - step)) / (step * step);
  throw DomainViolation("finite_diff: order must be 1 or 2");
}

// One Richardson extrapolation step on the central difference: kills the h^2
// term, leaving O(h^4). Used for derivative-sensitive Legendre work.
template <class F>
double richardson_diff(F&& fn, double x, int order, double step) {
  const double coarse = finite_diff(fn, x, order, step);
  const double fine = finite_diff(fn, x, order, 0.5 * step);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace spenv
