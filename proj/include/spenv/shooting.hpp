#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "spenv/base_spectra.hpp"
#include "spenv/errors.hpp"
#include "spenv/numerics.hpp"
#include "spenv/potential.hpp"

// Independent eigenvalue oracle: fixed-step Numerov integration with
// node-counting bisection on the energy. Solves the reduced radial problem
//   -u'' + [ (k-1)(k-3)/(4 r^2) + v f(r) ] u = E u,   u(0) = 0, k = 2 l + d,
// and the 1-D problem -psi'' + v f(x) psi = E psi for even f via parity
// shooting on the half line.

namespace spenv {

struct RadialProblem {
  PotentialShape f;
  double v = 1.0;
  QuantumNumbers qn;
  double r_max = 0.0;      // 0 = choose automatically (doubling until decayed)
  int grid_n = 20000;
  double e_ceiling = 1e6;  // NoBoundState if bracketing passes this
};

struct OracleResult {
  double energy = 0.0;
  int nodes_found = 0;
  double residual = 0.0;       // truncation-error estimate exp(-2 * decay action)
  double bracket_width = 0.0;  // final energy bracket
  double r_max_used = 0.0;
  int grid_used = 0;
};

struct CurvePoint {
  double v = 0.0;
  bool ok = false;
  double energy = 0.0;
  std::string error;
};

namespace detail {

// March u'' = (W - E) u with Numerov given the first two values and count the
// sign changes; magnitudes are rescaled deep in classically forbidden regions
// so the march cannot overflow.
inline int numerov_shoot(const std::vector<double>& w, double h, double e, double u0, double u1) {
  const double h2_12 = h * h / 12.0;
  const std::size_t n = w.size();
  int nodes = 0;
  int last_sign = 0;

  auto note = [&](double u) {
    const int s = u > 0.0 ? 1 : (u < 0.0 ? -1 : 0);
    if (s != 0 && last_sign != 0 && s != last_sign) ++nodes;
    if (s != 0) last_sign = s;
  };

  double prev = u0;
  double cur = u1;
  double t_prev = h2_12 * (w[0] - e);
  double t_cur = h2_12 * (w[1] - e);
  note(prev);
  note(cur);
  for (std::size_t i = 2; i < n; ++i) {
    const double t_next = h2_12 * (w[i] - e);
    double next = (2.0 * cur * (1.0 + 5.0 * t_cur) - prev * (1.0 - t_prev)) / (1.0 - t_next);
    prev = cur;
    cur = next;
    t_prev = t_cur;
    t_cur = t_next;
    if (std::abs(cur) > 1e250) {
      prev *= 1e-250;
      cur *= 1e-250;
    }
    note(cur);
  }
  return nodes;
}

// Bisect the energy at which the node count jumps from `target` to target+1.
template <class CountFn>
OracleResult bisect_nodes(CountFn&& shoot, double e_lo, int target, double e_ceiling,
                          const Tolerance& tol) {
  // sanity: lower edge must sit at or below the target count
  for (int guard = 0; shoot(e_lo) > target; ++guard) {
    if (guard > 80) throw NoBoundState("node count positive far below the potential minimum");
    e_lo -= std::max(1.0, 0.5 * std::abs(e_lo));
  }
  double offset = 1.0;
  double e_hi = e_lo + offset;
  while (shoot(e_hi) <= target) {
    offset *= 2.0;
    e_hi = e_lo + offset;
    if (e_hi > e_ceiling)
      throw NoBoundState("node-count bracketing exceeded the energy ceiling");
  }
  int iters = 0;
  while (e_hi - e_lo > tol.abs_x && iters < 400) {
    ++iters;
    const double mid = 0.5 * (e_lo + e_hi);
    if (shoot(mid) > target)
      e_hi = mid;
    else
      e_lo = mid;
  }
  OracleResult res;
  res.energy = 0.5 * (e_lo + e_hi);
  res.bracket_width = e_hi - e_lo;
  res.nodes_found = shoot(e_lo);
  return res;
}

// WKB decay action accumulated outside the outermost turning point; the grid
// is long enough once this exceeds ~12 (truncation error then ~ e^{-24}).
inline double decay_action(const std::vector<double>& w, double h, double e) {
  std::size_t tp = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] <= e) tp = i;
  if (w.back() <= e) return 0.0;
  double action = 0.0;
  for (std::size_t i = tp; i < w.size(); ++i) action += std::sqrt(std::max(w[i] - e, 0.0));
  return action * h;
}

}  // namespace detail

inline OracleResult solve_radial(const RadialProblem& prob, const Tolerance& tol = {}) {
  validate(prob.qn);
  if (prob.qn.mode != SpectrumMode::Radial)
    throw PairMismatch("solve_radial: quantum numbers must be radial");
  if (prob.f.domain() != Domain::HalfLine)
    throw PairMismatch("solve_radial: potential must live on the half line");
  if (!(prob.v > 0.0)) throw DomainViolation("solve_radial: v must be positive");
  if (prob.grid_n < 10000) throw DomainViolation("solve_radial: grid_n must be at least 10000");

  const int k = prob.qn.k();
  const double centrifugal = 0.25 * (k - 1.0) * (k - 3.0);
  // indicial exponent of the regular solution u ~ r^sigma; k = 1 picks the
  // odd line sector (sigma = 1), see the k = 1 discussion in the README
  const double sigma = k == 1 ? 1.0 : 0.5 * (k - 1.0);

  // coefficients of the two-term indicial series u = r^sigma (1 + c1 r + c2 r^2)
  double coul = 0.0, flat = 0.0;
  for (const auto& term : prob.f.terms()) {
    if (term.exponent == -1.0) coul += prob.v * term.coefficient;
    if (term.exponent == 0.0) flat += prob.v * term.coefficient;
  }
  const double c1 = coul / (2.0 * sigma);

  const bool autosize = prob.r_max <= 0.0;
  double r_max = autosize ? 20.0 : prob.r_max;
  double grid_scale = 1.0;

  for (int attempt = 0;; ++attempt) {
    const int n = std::min(static_cast<int>(prob.grid_n * grid_scale), 4000000);
    const double r0 = r_max * 1e-6;
    const double h = (r_max - r0) / n;
    std::vector<double> w(n + 1);
    double wmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
      const double r = r0 + i * h;
      w[i] = centrifugal / (r * r) + prob.v * prob.f.evaluate(r);
      wmin = std::min(wmin, w[i]);
    }

    auto shoot = [&](double e) {
      const double c2 = (coul * c1 + flat - e) / (4.0 * sigma + 2.0);
      const double r1 = r0 + h;
      const double u0 = std::pow(r0, sigma) * (1.0 + c1 * r0 + c2 * r0 * r0);
      const double u1 = std::pow(r1, sigma) * (1.0 + c1 * r1 + c2 * r1 * r1);
      return detail::numerov_shoot(w, h, e, u0, u1);
    };

    OracleResult res = detail::bisect_nodes(shoot, wmin - 1.0 - 0.1 * std::abs(wmin), prob.qn.n,
                                            prob.e_ceiling, tol);
    res.r_max_used = r_max;
    res.grid_used = n;
    const double action = detail::decay_action(w, h, res.energy);
    res.residual = std::exp(-2.0 * std::min(action, 350.0));
    if (action >= 12.0) return res;
    if (!autosize)
      throw TruncationTooSmall("solve_radial: eigenfunction not decayed at r_max");
    if (attempt >= 8)
      throw TruncationTooSmall("solve_radial: no decay even after doubling r_max repeatedly");
    r_max *= 2.0;
    grid_scale *= 2.0;
  }
}

inline OracleResult solve_line(const PotentialShape& f, double v, int n, double x_max = 0.0,
                               int grid_n = 20000, double e_ceiling = 1e6,
                               const Tolerance& tol = {}) {
  if (f.domain() != Domain::FullLine)
    throw PairMismatch("solve_line: potential must be a full-line (even) shape");
  if (!(v > 0.0)) throw DomainViolation("solve_line: v must be positive");
  if (n < 0) throw DomainViolation("solve_line: n must be >= 0");
  if (grid_n < 10000) throw DomainViolation("solve_line: grid_n must be at least 10000");

  const int parity = n % 2;              // 0 even, 1 odd
  const int half_target = parity ? (n - 1) / 2 : n / 2;

  const bool autosize = x_max <= 0.0;
  double xm = autosize ? 20.0 : x_max;
  double grid_scale = 1.0;

  for (int attempt = 0;; ++attempt) {
    const int m = std::min(static_cast<int>(grid_n * grid_scale), 4000000);
    const double h = xm / m;
    std::vector<double> w(m + 1);
    double wmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= m; ++i) {
      w[i] = v * f.evaluate(i * h);
      wmin = std::min(wmin, w[i]);
    }

    auto shoot = [&](double e) {
      const double q0 = w[0] - e;
      double u0, u1;
      if (parity == 0) {
        u0 = 1.0;
        u1 = 1.0 + 0.5 * h * h * q0 + h * h * h * h * q0 * q0 / 24.0;
      } else {
        u0 = 0.0;
        u1 = h * (1.0 + h * h * q0 / 6.0);
      }
      return detail::numerov_shoot(w, h, e, u0, u1);
    };

    OracleResult res = detail::bisect_nodes(shoot, wmin - 1.0 - 0.1 * std::abs(wmin), half_target,
                                            e_ceiling, tol);
    res.nodes_found = 2 * res.nodes_found + parity;  // full-line node count
    res.r_max_used = xm;
    res.grid_used = m;
    const double action = detail::decay_action(w, h, res.energy);
    res.residual = std::exp(-2.0 * std::min(action, 350.0));
    if (action >= 12.0) return res;
    if (!autosize) throw TruncationTooSmall("solve_line: eigenfunction not decayed at x_max");
    if (attempt >= 8)
      throw TruncationTooSmall("solve_line: no decay even after doubling x_max repeatedly");
    xm *= 2.0;
    grid_scale *= 2.0;
  }
}

// Sample E(v) over a coupling grid; per-point failures are recorded and the
// sweep keeps going.
inline std::vector<CurvePoint> energy_curve_sample(const PotentialShape& f,
                                                   const QuantumNumbers& qn,
                                                   const std::vector<double>& v_grid,
                                                   double r_max = 0.0, int grid_n = 20000,
                                                   const Tolerance& tol = {}) {
  std::vector<CurvePoint> out;
  out.reserve(v_grid.size());
  for (const double v : v_grid) {
    CurvePoint pt;
    pt.v = v;
    try {
      const OracleResult res = qn.mode == SpectrumMode::Radial
                                   ? solve_radial({f, v, qn, r_max, grid_n}, tol)
                                   : solve_line(f, v, qn.n, r_max, grid_n, 1e6, tol);
      pt.ok = true;
      pt.energy = res.energy;
    } catch (const Error& err) {
      pt.error = err.what();
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace spenv
