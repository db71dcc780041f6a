#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spenv/base_spectra.hpp"
#include "spenv/envelope.hpp"
#include "spenv/errors.hpp"
#include "spenv/kinetic.hpp"
#include "spenv/local_energy.hpp"
#include "spenv/numerics.hpp"
#include "spenv/potential.hpp"
#include "spenv/shooting.hpp"

// Command-line front end: bound / sweep / oracle / verify. Exit codes are a
// stable scripting contract: 0 success, 1 numeric failure, 2 config error.
// CSV and JSON carry 12 significant digits; human tables show 6.

namespace spenv::cli {

struct RunConfig {
  std::string mode = "radial";
  std::string potential;
  std::vector<std::string> bases;
  int d = 3;
  int l = 0;
  int n = 0;
  std::string v_spec = "1";
  std::string method = "tangent";
  std::string output = "table";
  std::string out_path;
  double tol = 0.0;  // 0 = use default / SPECTRAL_ENVELOPE_TOL
  double e1 = 0.0;
  bool has_e1 = false;
  double r_max = 0.0;
  int grid_n = 20000;
  bool no_oracle = false;
  std::string suite = "all";
};

inline std::string fmt_g(double x, int sig) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", sig, x);
  return buf;
}

// Round through the 12-digit textual form so JSON numbers carry the same
// precision as CSV fields.
inline double round_sig12(double x) { return std::strtod(fmt_g(x, 12).c_str(), nullptr); }

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

// Coupling grids: a plain number, or lo:hi:count with geometric spacing.
inline std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto num = [&](const std::string& text) {
    char* end = nullptr;
    const double val = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || !std::isfinite(val))
      throw ConfigError("bad number in grid spec: '" + text + "'");
    return val;
  };
  if (parts.size() == 1) {
    const double v = num(parts[0]);
    if (!(v > 0.0)) throw ConfigError("coupling must be positive");
    return {v};
  }
  if (parts.size() != 3) throw ConfigError("grid spec must be a number or lo:hi:count");
  const double lo = num(parts[0]);
  const double hi = num(parts[1]);
  const double craw = num(parts[2]);
  const int count = static_cast<int>(craw);
  if (craw != count || count < 1) throw ConfigError("grid count must be a positive integer");
  if (!(lo > 0.0)) throw ConfigError("grid lo must be positive");
  if (count == 1) {
    if (hi != lo) throw ConfigError("single-point grid needs hi == lo");
    return {lo};
  }
  if (!(hi > lo)) throw ConfigError("grid must be increasing (hi > lo)");
  std::vector<double> out(count);
  const double ratio = hi / lo;
  for (int i = 0; i < count; ++i)
    out[i] = lo * std::pow(ratio, static_cast<double>(i) / (count - 1));
  out.back() = hi;
  return out;
}

inline Tolerance resolve_tolerance(const RunConfig& cfg) {
  Tolerance tol;
  double t = 0.0;
  if (cfg.tol > 0.0) {
    t = cfg.tol;
  } else if (const char* env = std::getenv("SPECTRAL_ENVELOPE_TOL")) {
    char* end = nullptr;
    const double val = std::strtod(env, &end);
    if (end != env && *end == '\0' && val > 0.0) t = val;
  }
  if (t > 0.0) {
    tol.abs_x = t;
    tol.abs_f = 0.01 * t;
  }
  return tol;
}

inline QuantumNumbers make_qn(const RunConfig& cfg) {
  QuantumNumbers qn;
  qn.mode = cfg.mode == "line" ? SpectrumMode::Line : SpectrumMode::Radial;
  qn.d = cfg.d;
  qn.l = cfg.l;
  qn.n = cfg.n;
  try {
    validate(qn);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return qn;
}

inline Domain domain_of(const RunConfig& cfg) {
  return cfg.mode == "line" ? Domain::FullLine : Domain::HalfLine;
}

inline PotentialShape parse_shape(const std::string& text, Domain dom) {
  try {
    return PotentialShape::parse(text, dom);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

inline PowerLawSpectrum base_spectrum(const PotentialShape& h, const QuantumNumbers& qn,
                                      const RunConfig& cfg) {
  if (!h.single_power()) throw ConfigError("base must be a single power term c:q");
  const double q = h.terms().front().exponent;
  try {
    return power_law_spectrum(q, qn);
  } catch (const UnsupportedExponent&) {
    if (!cfg.has_e1)
      throw ConfigError("no closed form for base exponent " + fmt_g(q, 6) +
                        "; supply --e1 (ground energy of the unit-coupling base)");
    return power_law_spectrum(q, qn, cfg.e1);
  }
}

// ---------------------------------------------------------------------------
// verify suites

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline void check_close(std::vector<Check>& out, const std::string& name, double got,
                        double want, double tol) {
  Check c;
  c.name = name;
  c.pass = std::isfinite(got) && std::abs(got - want) < tol;
  c.detail = "got " + fmt_g(got, 12) + ", want " + fmt_g(want, 12) + " +/- " + fmt_g(tol, 3);
  out.push_back(c);
}

inline void check_true(std::vector<Check>& out, const std::string& name, bool pass,
                       const std::string& detail) {
  out.push_back({name, pass, detail});
}

struct TestPair {
  std::string tag;
  PotentialShape f;
  PotentialShape h;
  QuantumNumbers qn;  // n overwritten per case
};

inline std::vector<TestPair> coincidence_pairs() {
  QuantumNumbers line;
  line.mode = SpectrumMode::Line;
  QuantumNumbers k7;
  k7.mode = SpectrumMode::Radial;
  k7.d = 3;
  k7.l = 2;
  return {
      {"quartic/oscillator", PotentialShape::parse("1:4", Domain::FullLine),
       PotentialShape::parse("1:2", Domain::FullLine), line},
      {"combo/coulomb", PotentialShape::parse("-1:-1,1:2"), PotentialShape::parse("-1:-1"), k7},
      {"combo/oscillator", PotentialShape::parse("-1:-1,1:2"), PotentialShape::parse("1:2"), k7},
  };
}

}  // namespace detail

inline std::vector<Check> suite_coincidence() {
  std::vector<Check> out;
  for (const auto& pair : detail::coincidence_pairs()) {
    for (int n : {0, 1}) {
      QuantumNumbers qn = pair.qn;
      qn.n = n;
      const double q = pair.h.terms().front().exponent;
      const auto base = power_law_spectrum(q, qn);
      for (double v : {0.5, 1.0, 2.0, 4.0}) {
        const std::string name = "coincidence " + pair.tag + " n=" + std::to_string(n) +
                                 " v=" + fmt_g(v, 6);
        try {
          const auto rep = coincidence_check(pair.f, pair.h, base, v, qn);
          detail::check_true(out, name, rep.delta < 1e-8,
                             "delta " + fmt_g(rep.delta, 6) + " (< 1e-8 expected)");
        } catch (const Error& e) {
          detail::check_true(out, name, false, e.what());
        }
      }
    }
  }
  return out;
}

inline std::vector<Check> suite_roundtrip() {
  std::vector<Check> out;

  struct ClosedCase {
    std::string tag;
    double q;
    QuantumNumbers qn;
  };
  QuantumNumbers line0;
  line0.mode = SpectrumMode::Line;
  QuantumNumbers k7n1;
  k7n1.mode = SpectrumMode::Radial;
  k7n1.d = 3;
  k7n1.l = 2;
  k7n1.n = 1;
  QuantumNumbers k3;
  k3.mode = SpectrumMode::Radial;
  const std::vector<ClosedCase> cases = {
      {"oscillator line", 2.0, line0}, {"oscillator k=7 n=1", 2.0, k7n1}, {"hydrogen", -1.0, k3}};

  for (const auto& c : cases) {
    const auto spec = power_law_spectrum(c.q, c.qn);
    const auto curve = power_law_energy_curve(spec);
    const auto pk = power_kinetic_potential(c.q, spec.p);
    for (double v : {0.5, 1.0, 2.0, 4.0}) {
      const auto lp = legendre_to_kinetic(curve, v);
      const double fbar_closed = power_kinetic(c.q, spec.p, lp.s);
      const auto ep = legendre_to_energy(pk, lp.s);
      const double scale = 1.0 + std::abs(curve.value(v));
      detail::check_close(out, "roundtrip " + c.tag + " fbar v=" + fmt_g(v, 6), lp.fbar,
                          fbar_closed, 1e-8 * scale);
      detail::check_close(out, "roundtrip " + c.tag + " v v=" + fmt_g(v, 6), ep.v, v, 1e-8 * v);
      detail::check_close(out, "roundtrip " + c.tag + " E v=" + fmt_g(v, 6), ep.energy,
                          curve.value(v), 1e-8 * scale);
    }
    // curvature product F'' fbar'' = -1/v^3 at matched points
    for (double v : {0.5, 1.0, 2.0}) {
      const auto lp = legendre_to_kinetic(curve, v);
      const double fpp = richardson_diff(curve.value, v, 2, 1e-2 * v);
      const double kpp = richardson_diff(pk.derivative, lp.s, 1, 1e-2 * lp.s);
      const double product = fpp * kpp;
      const double want = -1.0 / (v * v * v);
      detail::check_true(out, "curvature " + c.tag + " v=" + fmt_g(v, 6),
                         std::abs(product - want) < 1e-4 * std::abs(want),
                         "F'' fbar'' = " + fmt_g(product, 10) + ", want " + fmt_g(want, 10));
      detail::check_true(out, "signs " + c.tag + " v=" + fmt_g(v, 6), fpp < 0.0 && kpp > 0.0,
                         "F'' = " + fmt_g(fpp, 6) + " (<0), fbar'' = " + fmt_g(kpp, 6) + " (>0)");
    }
  }

  // oracle-derived quartic curve: curvature identity and convexity signs with
  // pinned geometry so discretization bias cancels in the differences
  try {
    const PotentialShape quartic = PotentialShape::parse("1:4", Domain::FullLine);
    Tolerance tight;
    tight.abs_x = 1e-13;
    std::map<double, double> cache;
    auto F = [&](double v) {
      auto it = cache.find(v);
      if (it != cache.end()) return it->second;
      const double e = solve_line(quartic, v, 0, 12.0, 24000, 1e6, tight).energy;
      cache.emplace(v, e);
      return e;
    };
    auto Fp = [&](double v) {
      const double h = 1e-4 * v;
      return (F(v + h) - F(v - h)) / (2.0 * h);
    };
    const EnergyCurve curve{F, Fp};
    const double v0 = 1.0;
    const double fpp = richardson_diff(curve.value, v0, 2, 0.05);
    const auto lp = legendre_to_kinetic(curve, v0);
    const auto kin = kinetic_from_energy_curve(curve, 0.3, 12.0);
    const double kpp = richardson_diff(kin.derivative, lp.s, 1, 2e-2 * lp.s);
    const double product = fpp * kpp;
    detail::check_true(out, "curvature oracle quartic v=1", std::abs(product + 1.0) < 1e-4,
                       "F'' fbar'' = " + fmt_g(product, 10) + ", want -1");
    detail::check_true(out, "signs oracle quartic", fpp < 0.0 && kpp > 0.0,
                       "F'' = " + fmt_g(fpp, 6) + " (<0), fbar'' = " + fmt_g(kpp, 6) + " (>0)");
  } catch (const Error& e) {
    detail::check_true(out, "curvature oracle quartic v=1", false, e.what());
  }
  return out;
}

inline std::vector<Check> suite_sandwich() {
  std::vector<Check> out;
  QuantumNumbers qn;
  qn.mode = SpectrumMode::Radial;
  qn.d = 3;
  qn.l = 2;
  const PotentialShape f = PotentialShape::parse("-1:-1,1:2");
  const PotentialShape hc = PotentialShape::parse("-1:-1");
  const PotentialShape ho = PotentialShape::parse("1:2");
  const auto cb = power_law_spectrum(-1.0, qn);
  const auto ob = power_law_spectrum(2.0, qn);
  const auto grid = parse_grid("0.25:4:10");
  for (double v : grid) {
    const std::string name = "sandwich combo v=" + fmt_g(v, 6);
    try {
      const double lower = envelope_bound_tangent(f, hc, cb, v, qn).value;
      const double upper = envelope_bound_tangent(f, ho, ob, v, qn).value;
      RadialProblem prob;
      prob.f = f;
      prob.v = v;
      prob.qn = qn;
      const double oracle = solve_radial(prob).energy;
      detail::check_true(out, name, lower < oracle && oracle < upper,
                         fmt_g(lower, 10) + " < " + fmt_g(oracle, 10) + " < " + fmt_g(upper, 10));
    } catch (const Error& e) {
      detail::check_true(out, name, false, e.what());
    }
  }
  return out;
}

inline std::vector<Check> suite_scaling() {
  std::vector<Check> out;
  QuantumNumbers qn;
  qn.mode = SpectrumMode::Line;
  const PotentialShape f = PotentialShape::parse("1:4", Domain::FullLine);
  const PotentialShape h = PotentialShape::parse("1:2", Domain::FullLine);
  for (int n : {0, 2}) {
    qn.n = n;
    const auto base = power_law_spectrum(2.0, qn);
    const double at1 = envelope_bound_tangent(f, h, base, 1.0, qn).value;
    for (double v : {0.5, 2.0, 4.0, 8.0}) {
      const double got = envelope_bound_tangent(f, h, base, v, qn).value;
      const double want = std::cbrt(v) * at1;
      detail::check_close(out, "scaling quartic n=" + std::to_string(n) + " v=" + fmt_g(v, 6),
                          got, want, 1e-8 * (1.0 + std::abs(want)));
    }
  }
  return out;
}

inline std::vector<Check> suite_invariance() {
  std::vector<Check> out;
  const PotentialShape f = PotentialShape::parse("-1:-1,1:2");
  const int dl[3][2] = {{3, 2}, {5, 1}, {7, 0}};
  double ref = 0.0;
  for (int i = 0; i < 3; ++i) {
    QuantumNumbers qn;
    qn.mode = SpectrumMode::Radial;
    qn.d = dl[i][0];
    qn.l = dl[i][1];
    RadialProblem prob;
    prob.f = f;
    prob.qn = qn;
    const std::string name = "dl-invariance combo (d=" + std::to_string(qn.d) +
                             ", l=" + std::to_string(qn.l) + ")";
    try {
      const double e = solve_radial(prob).energy;
      if (i == 0) {
        ref = e;
        detail::check_true(out, name, true, "reference E = " + fmt_g(e, 12));
      } else {
        detail::check_close(out, name, e, ref, 2e-6);
      }
    } catch (const Error& e) {
      detail::check_true(out, name, false, e.what());
    }
  }
  return out;
}

// PDE residual of the stocked trial eigenfunctions at randomized parameters:
// max_r |(-phi'' + (centrifugal + u hhat) phi - H phi)| / ((1 + |H|) max|phi|).
inline std::vector<Check> suite_residual(unsigned seed = 20260814u) {
  std::vector<Check> out;
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> tdist(0.6, 2.5);

  auto run_case = [&](TrialFamily family, const QuantumNumbers& qn, double t,
                      const std::string& name) {
    const TrialFunction trial{family, qn, t};
    const EigenData ed = trial_eigendata(trial);
    const PotentialShape hhat = trial_base_shape(family);
    const bool radial = trial_mode(family) == SpectrumMode::Radial;
    const double k = static_cast<double>(qn.k());
    const double cent_coeff = radial ? 0.25 * (k - 1.0) * (k - 3.0) : 0.0;

    std::vector<double> grid;
    const int points = 400;
    if (radial) {
      for (int i = 0; i <= points; ++i)
        grid.push_back(0.02 * std::pow(25.0 / 0.02, static_cast<double>(i) / points));
    } else {
      for (int i = 0; i <= points; ++i) grid.push_back(-12.0 + 24.0 * i / points);
    }
    auto phi = [&](double x) { return trial_eval(trial, x); };
    double phimax = 0.0;
    for (double r : grid) phimax = std::max(phimax, std::abs(phi(r)));
    double worst = 0.0;
    for (double r : grid) {
      const double p = phi(r);
      if (std::abs(p) < 1e-6 * phimax) continue;
      const double step = 1e-3 * (1.0 + std::abs(r));
      const double d2 = richardson_diff(phi, r, 2, step);
      const double cent = radial ? cent_coeff / (r * r) : 0.0;
      const double resid = -d2 + (cent + ed.u * hhat.evaluate(r)) * p - ed.energy * p;
      worst = std::max(worst, std::abs(resid));
    }
    const double normalized = worst / ((1.0 + std::abs(ed.energy)) * phimax);
    detail::check_true(out, name, normalized < 1e-6,
                       "normalized residual " + fmt_g(normalized, 6) + " (< 1e-6 expected)");
  };

  for (int n : {0, 1, 2}) {
    QuantumNumbers line;
    line.mode = SpectrumMode::Line;
    line.n = n;
    const double t = tdist(gen);
    run_case(TrialFamily::Oscillator1D, line, t,
             "residual oscillator1d n=" + std::to_string(n) + " t=" + fmt_g(t, 6));
  }
  for (int k : {3, 5, 7}) {
    for (int n : {0, 1, 2}) {
      QuantumNumbers qn;
      qn.mode = SpectrumMode::Radial;
      qn.d = 3;
      qn.l = (k - 3) / 2;
      qn.n = n;
      const double tc = tdist(gen);
      run_case(TrialFamily::RadialCoulomb, qn, tc,
               "residual coulomb k=" + std::to_string(k) + " n=" + std::to_string(n) +
                   " t=" + fmt_g(tc, 6));
      const double to = tdist(gen);
      run_case(TrialFamily::RadialOscillator, qn, to,
               "residual oscillator k=" + std::to_string(k) + " n=" + std::to_string(n) +
                   " t=" + fmt_g(to, 6));
    }
  }
  return out;
}

inline std::vector<Check> run_suite(const std::string& name) {
  if (name == "coincidence") return suite_coincidence();
  if (name == "roundtrip") return suite_roundtrip();
  if (name == "sandwich") return suite_sandwich();
  if (name == "scaling") return suite_scaling();
  if (name == "invariance") return suite_invariance();
  if (name == "residual") return suite_residual();
  if (name == "all") {
    std::vector<Check> out;
    for (const char* s : {"coincidence", "roundtrip", "sandwich", "scaling", "invariance",
                          "residual"}) {
      auto part = run_suite(s);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  throw ConfigError("unknown suite '" + name +
                    "'; options: coincidence, roundtrip, sandwich, scaling, invariance, "
                    "residual, all");
}

// ---------------------------------------------------------------------------
// output plumbing

inline const char* kCsvHeader = "v,lower,upper,oracle,coincidence_delta,error";

struct SweepRow {
  double v = 0.0;
  std::optional<double> lower, upper, oracle, delta;
  std::string error;
};

inline std::string csv_cell(const std::optional<double>& x) {
  return x ? fmt_g(*x, 12) : std::string();
}

inline void write_csv_rows(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kCsvHeader << "\n";
  for (const auto& r : rows) {
    os << fmt_g(r.v, 12) << ',' << csv_cell(r.lower) << ',' << csv_cell(r.upper) << ','
       << csv_cell(r.oracle) << ',' << csv_cell(r.delta) << ',' << csv_escape(r.error) << "\n";
  }
}

inline nlohmann::json config_echo(const RunConfig& cfg) {
  nlohmann::json j;
  j["mode"] = cfg.mode;
  if (!cfg.potential.empty()) j["potential"] = cfg.potential;
  if (!cfg.bases.empty()) j["bases"] = cfg.bases;
  j["d"] = cfg.d;
  j["l"] = cfg.l;
  j["n"] = cfg.n;
  j["v"] = cfg.v_spec;
  return j;
}

inline void emit_json(std::ostream& os, const std::string& command, const RunConfig& cfg,
                      nlohmann::json results) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["command"] = command;
  j["config"] = config_echo(cfg);
  j["results"] = std::move(results);
  os << j.dump(2) << "\n";
}

inline const char* side_name(Side s) { return s == Side::Lower ? "lower" : "upper"; }

inline const char* method_name(BoundMethod m) {
  switch (m) {
    case BoundMethod::TangentEnvelope: return "tangent";
    case BoundMethod::KineticEnvelope: return "kinetic";
    case BoundMethod::Semiclassical: return "semiclassical";
    case BoundMethod::LocalEnergy: return "local";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// subcommands

namespace detail {

inline BoundResult semiclassical_bound(const PotentialShape& f, const PotentialShape& h,
                                       const PowerLawSpectrum& base, double v,
                                       const QuantumNumbers& qn, const BoundOptions& opt) {
  const PotentialShape hnorm = spenv::detail::checked_base(h, base, qn);
  Side side = Side::Lower;
  if (!is_affine_pair(f, hnorm, opt.classify)) {
    const Convexity conv = classify_convexity(f, hnorm, opt.classify);
    if (conv == Convexity::Indefinite)
      throw IndefiniteConvexity("semiclassical: g = f o h^{-1} changes convexity");
    side = conv == Convexity::Convex ? Side::Lower : Side::Upper;
  }
  auto objective = [&](double r) { return (base.p / r) * (base.p / r) + v * f.evaluate(r); };
  const Minimum m = minimize_on_domain(objective, opt.scan, opt.tol);
  BoundResult res;
  res.value = m.value;
  res.side = side;
  res.method = BoundMethod::Semiclassical;
  res.optimizer = m.x;
  res.iterations = m.iterations;
  res.converged = true;
  return res;
}

inline BoundResult run_method(const std::string& method, const PotentialShape& f,
                              const PotentialShape& h, const PowerLawSpectrum& base, double v,
                              const QuantumNumbers& qn, const BoundOptions& opt) {
  if (method == "tangent") return envelope_bound_tangent(f, h, base, v, qn, opt);
  if (method == "kinetic") return envelope_bound_kinetic(f, h, base, v, qn, opt);
  if (method == "local") return local_energy_bound(f, h, base, v, qn, opt);
  return semiclassical_bound(f, h, base, v, qn, opt);
}

struct BoundRow {
  double v = 0.0;
  std::string base;
  std::string method;
  BoundResult res;
};

}  // namespace detail

inline int cmd_bound(const RunConfig& cfg, std::ostream& os) {
  const QuantumNumbers qn = make_qn(cfg);
  const PotentialShape f = parse_shape(cfg.potential, domain_of(cfg));
  if (cfg.bases.empty() || cfg.bases.size() > 2)
    throw ConfigError("bound needs one or two --base specs");
  BoundOptions opt;
  opt.tol = resolve_tolerance(cfg);
  const auto grid = parse_grid(cfg.v_spec);

  std::vector<std::string> methods;
  if (cfg.method == "all")
    methods = {"tangent", "kinetic", "local"};
  else
    methods = {cfg.method};

  std::vector<detail::BoundRow> rows;
  for (const auto& bstr : cfg.bases) {
    const PotentialShape h = parse_shape(bstr, domain_of(cfg));
    const auto base = base_spectrum(h, qn, cfg);
    // method/base compatibility up front: local needs a stocked trial family
    if (cfg.method == "local" || cfg.method == "all") {
      try {
        trial_family_for(base.q, qn.mode);
      } catch (const UnsupportedExponent& e) {
        throw ConfigError(std::string(e.what()) + " (base '" + bstr + "')");
      }
    }
    for (double v : grid)
      for (const auto& m : methods)
        rows.push_back({v, bstr, m, detail::run_method(m, f, h, base, v, qn, opt)});
  }

  if (cfg.output == "table") {
    os << "v            base         method         side   value         optimizer     iters\n";
    for (const auto& r : rows) {
      char line[160];
      std::snprintf(line, sizeof line, "%-12s %-12s %-14s %-6s %-13s %-13s %d\n",
                    fmt_g(r.v, 6).c_str(), r.base.c_str(), r.method.c_str(),
                    side_name(r.res.side), fmt_g(r.res.value, 6).c_str(),
                    fmt_g(r.res.optimizer, 6).c_str(), r.res.iterations);
      os << line;
    }
  } else if (cfg.output == "csv") {
    std::vector<SweepRow> csv;
    for (const auto& r : rows) {
      SweepRow row;
      row.v = r.v;
      if (r.res.side == Side::Lower)
        row.lower = r.res.value;
      else
        row.upper = r.res.value;
      csv.push_back(row);
    }
    write_csv_rows(os, csv);
  } else {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json item;
      item["v"] = round_sig12(r.v);
      item["base"] = r.base;
      item["method"] = r.method;
      item["side"] = side_name(r.res.side);
      item["value"] = round_sig12(r.res.value);
      item["optimizer"] = round_sig12(r.res.optimizer);
      item["iterations"] = r.res.iterations;
      item["converged"] = r.res.converged;
      results.push_back(item);
    }
    emit_json(os, "bound", cfg, std::move(results));
  }
  return 0;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& os) {
  const QuantumNumbers qn = make_qn(cfg);
  const PotentialShape f = parse_shape(cfg.potential, domain_of(cfg));
  if (cfg.bases.empty() || cfg.bases.size() > 2)
    throw ConfigError("sweep needs one or two --base specs");
  BoundOptions opt;
  opt.tol = resolve_tolerance(cfg);
  const auto grid = parse_grid(cfg.v_spec);

  struct BaseCtx {
    PotentialShape h;
    PowerLawSpectrum base;
    bool has_trials;
  };
  std::vector<BaseCtx> bases;
  for (const auto& bstr : cfg.bases) {
    const PotentialShape h = parse_shape(bstr, domain_of(cfg));
    const auto base = base_spectrum(h, qn, cfg);
    bool trials = true;
    try {
      trial_family_for(base.q, qn.mode);
    } catch (const UnsupportedExponent&) {
      trials = false;
    }
    bases.push_back({h, base, trials});
  }

  std::vector<SweepRow> rows;
  for (double v : grid) {
    SweepRow row;
    row.v = v;
    auto note = [&row](const std::string& msg) {
      if (!row.error.empty()) row.error += "; ";
      row.error += msg;
    };
    for (std::size_t i = 0; i < bases.size(); ++i) {
      try {
        const BoundResult tres = envelope_bound_tangent(f, bases[i].h, bases[i].base, v, qn, opt);
        if (tres.side == Side::Lower)
          row.lower = row.lower ? std::max(*row.lower, tres.value) : tres.value;
        else
          row.upper = row.upper ? std::min(*row.upper, tres.value) : tres.value;
        if (bases[i].has_trials) {
          const BoundResult lres = local_energy_bound(f, bases[i].h, bases[i].base, v, qn, opt);
          const double delta = std::abs(tres.value - lres.value);
          row.delta = row.delta ? std::max(*row.delta, delta) : delta;
        }
      } catch (const Error& e) {
        note("base " + cfg.bases[i] + ": " + e.what());
      }
    }
    if (!cfg.no_oracle) {
      try {
        Tolerance otol = resolve_tolerance(cfg);
        if (qn.mode == SpectrumMode::Radial) {
          RadialProblem prob;
          prob.f = f;
          prob.v = v;
          prob.qn = qn;
          prob.r_max = cfg.r_max;
          prob.grid_n = cfg.grid_n;
          row.oracle = solve_radial(prob, otol).energy;
        } else {
          row.oracle = solve_line(f, v, qn.n, cfg.r_max, cfg.grid_n, 1e6, otol).energy;
        }
      } catch (const Error& e) {
        note(std::string("oracle: ") + e.what());
      }
    }
    rows.push_back(row);
  }

  if (cfg.output == "table") {
    os << "v            lower         upper         oracle        delta       error\n";
    for (const auto& r : rows) {
      auto cell = [](const std::optional<double>& x, int sig) {
        return x ? fmt_g(*x, sig) : std::string("-");
      };
      char line[240];
      std::snprintf(line, sizeof line, "%-12s %-13s %-13s %-13s %-11s %s\n",
                    fmt_g(r.v, 6).c_str(), cell(r.lower, 6).c_str(), cell(r.upper, 6).c_str(),
                    cell(r.oracle, 6).c_str(), cell(r.delta, 3).c_str(), r.error.c_str());
      os << line;
    }
  } else if (cfg.output == "csv") {
    write_csv_rows(os, rows);
  } else {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json item;
      item["v"] = round_sig12(r.v);
      item["lower"] = r.lower ? nlohmann::json(round_sig12(*r.lower)) : nlohmann::json();
      item["upper"] = r.upper ? nlohmann::json(round_sig12(*r.upper)) : nlohmann::json();
      item["oracle"] = r.oracle ? nlohmann::json(round_sig12(*r.oracle)) : nlohmann::json();
      item["coincidence_delta"] =
          r.delta ? nlohmann::json(round_sig12(*r.delta)) : nlohmann::json();
      item["error"] = r.error;
      results.push_back(item);
    }
    emit_json(os, "sweep", cfg, std::move(results));
  }
  return 0;
}

inline int cmd_oracle(const RunConfig& cfg, std::ostream& os) {
  const QuantumNumbers qn = make_qn(cfg);
  const PotentialShape f = parse_shape(cfg.potential, domain_of(cfg));
  const auto grid = parse_grid(cfg.v_spec);
  const Tolerance tol = resolve_tolerance(cfg);

  struct OracleRow {
    double v;
    OracleResult res;
  };
  std::vector<OracleRow> rows;
  for (double v : grid) {
    OracleResult res;
    if (qn.mode == SpectrumMode::Radial) {
      RadialProblem prob;
      prob.f = f;
      prob.v = v;
      prob.qn = qn;
      prob.r_max = cfg.r_max;
      prob.grid_n = cfg.grid_n;
      res = solve_radial(prob, tol);
    } else {
      res = solve_line(f, v, qn.n, cfg.r_max, cfg.grid_n, 1e6, tol);
    }
    rows.push_back({v, res});
  }

  if (cfg.output == "table") {
    os << "v            energy        nodes  bracket     residual    r_max     grid\n";
    for (const auto& r : rows) {
      char line[200];
      std::snprintf(line, sizeof line, "%-12s %-13s %-6d %-11s %-11s %-9s %d\n",
                    fmt_g(r.v, 6).c_str(), fmt_g(r.res.energy, 6).c_str(), r.res.nodes_found,
                    fmt_g(r.res.bracket_width, 3).c_str(), fmt_g(r.res.residual, 3).c_str(),
                    fmt_g(r.res.r_max_used, 6).c_str(), r.res.grid_used);
      os << line;
    }
  } else if (cfg.output == "csv") {
    std::vector<SweepRow> csv;
    for (const auto& r : rows) {
      SweepRow row;
      row.v = r.v;
      row.oracle = r.res.energy;
      csv.push_back(row);
    }
    write_csv_rows(os, csv);
  } else {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json item;
      item["v"] = round_sig12(r.v);
      item["energy"] = round_sig12(r.res.energy);
      item["nodes_found"] = r.res.nodes_found;
      item["residual"] = round_sig12(r.res.residual);
      item["bracket_width"] = round_sig12(r.res.bracket_width);
      item["r_max_used"] = round_sig12(r.res.r_max_used);
      item["grid_used"] = r.res.grid_used;
      results.push_back(item);
    }
    emit_json(os, "oracle", cfg, std::move(results));
  }
  return 0;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& os) {
  const auto checks = run_suite(cfg.suite);
  int failures = 0;
  if (cfg.output == "json") {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& c : checks) {
      if (!c.pass) ++failures;
      results.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    emit_json(os, "verify", cfg, std::move(results));
  } else {
    for (const auto& c : checks) {
      if (!c.pass) ++failures;
      os << (c.pass ? "ok   - " : "FAIL - ") << c.name << ": " << c.detail << "\n";
    }
    os << (failures == 0 ? "all passed" : "FAILURES") << " (" << (checks.size() - failures)
       << "/" << checks.size() << ")\n";
  }
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Spectral bounds for -Delta + v f(r): envelope and local-energy methods "
               "with a shooting-method oracle"};
  app.require_subcommand(1);

  auto add_common = [&cfg](CLI::App* sub, bool needs_potential) {
    sub->add_option("--mode", cfg.mode, "line or radial")
        ->check(CLI::IsMember({"line", "radial"}))
        ->capture_default_str();
    auto* pot = sub->add_option("--potential", cfg.potential,
                                "potential shape, comma list of coeff:exponent");
    if (needs_potential) pot->required();
    sub->add_option("--d,-d", cfg.d, "dimension (radial mode)")->capture_default_str();
    sub->add_option("--l,-l", cfg.l, "angular momentum (radial mode)")->capture_default_str();
    sub->add_option("--n,-n", cfg.n, "node count / radial quantum number")
        ->capture_default_str();
    sub->add_option("--v,-v", cfg.v_spec, "coupling, a number or lo:hi:count geometric grid")
        ->capture_default_str();
    sub->add_option("--tol", cfg.tol, "optimizer/bisection tolerance override");
    sub->add_option("--output", cfg.output, "table, csv, or json")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->capture_default_str();
    sub->add_option("--out", cfg.out_path, "write output to a file instead of stdout");
  };
  auto add_bases = [&cfg](CLI::App* sub) {
    sub->add_option("--base", cfg.bases, "solvable base c:q (repeat for a second base)")
        ->required();
    auto* e1_opt = sub->add_option("--e1", cfg.e1,
                                   "ground energy of the unit-coupling base (general exponents)");
    e1_opt->each([&cfg](const std::string&) { cfg.has_e1 = true; });
  };

  CLI::App* bound = app.add_subcommand("bound", "compute envelope / local-energy bounds");
  add_common(bound, true);
  add_bases(bound);
  bound->add_option("--method", cfg.method, "tangent, kinetic, local, semiclassical, or all")
      ->check(CLI::IsMember({"tangent", "kinetic", "local", "semiclassical", "all"}))
      ->capture_default_str();

  CLI::App* sweep = app.add_subcommand("sweep", "lower/upper/oracle table over a coupling grid");
  add_common(sweep, true);
  add_bases(sweep);
  sweep->add_flag("--no-oracle", cfg.no_oracle, "skip the shooting oracle column");
  sweep->add_option("--r-max", cfg.r_max, "oracle domain truncation (0 = automatic)");
  sweep->add_option("--grid-n", cfg.grid_n, "oracle grid points")->capture_default_str();

  CLI::App* oracle = app.add_subcommand("oracle", "shooting-method eigenvalues");
  add_common(oracle, true);
  oracle->add_option("--r-max", cfg.r_max, "domain truncation (0 = automatic)");
  oracle->add_option("--grid-n", cfg.grid_n, "grid points")->capture_default_str();

  CLI::App* verify = app.add_subcommand("verify", "cross-module invariant suites");
  verify->add_option("--suite", cfg.suite,
                     "coincidence, roundtrip, sandwich, scaling, invariance, residual, all")
      ->capture_default_str();
  verify->add_option("--output", cfg.output, "table or json")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();
  verify->add_option("--out", cfg.out_path, "write output to a file instead of stdout");

  std::vector<std::string> argv_store = args;
  argv_store.insert(argv_store.begin(), "spenv");
  std::vector<const char*> argv;
  argv.reserve(argv_store.size());
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  std::ofstream file;
  std::ostream* os = &out;
  if (!cfg.out_path.empty()) {
    file.open(cfg.out_path);
    if (!file) {
      err << "error: cannot open output file '" << cfg.out_path << "'\n";
      return 2;
    }
    os = &file;
  }

  try {
    if (app.got_subcommand(bound)) return cmd_bound(cfg, *os);
    if (app.got_subcommand(sweep)) return cmd_sweep(cfg, *os);
    if (app.got_subcommand(oracle)) return cmd_oracle(cfg, *os);
    return cmd_verify(cfg, *os);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace spenv::cli
