// Command-line front end: field selectors, subcommand dispatch, JSON/CSV/OBJ
// reports.  Every subcommand is deterministic for a fixed configuration --
// fixed seeds, fixed reduction orders, no timestamps, and output paths kept
// out of the report bytes -- so reruns are byte-identical.  Exit status is 0
// exactly when every contract checked by the invoked suite passed.
#pragma once

#include <heis/cantor.hpp>
#include <heis/cone.hpp>
#include <heis/core.hpp>
#include <heis/field.hpp>
#include <heis/lagrangian.hpp>
#include <heis/mesh.hpp>
#include <heis/numerics.hpp>
#include <heis/profile.hpp>
#include <heis/strips.hpp>
#include <heis/variation.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace heis::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

/// Everything a run needs, collected from the config file and flag overrides.
struct RunConfig {
  std::string command{};
  std::string field{"plane:0,0"};
  std::string region{"-2,2,-1,2"};
  std::string eps{};         ///< ladder override for cone-suite, e.g. "0.1,0.01"
  int n{0};                  ///< count knob (tau samples, staircase depth); 0 = default
  double tol{0.0};           ///< pass-threshold override; 0 = per-command default
  std::string out{"."};
  std::uint64_t seed{2026};
  double tau{1.0};           ///< flow launch height
  double to{1.0};            ///< flow target s
  int steps{0};              ///< ODE / map resolution; 0 = per-command default
  double A{1.0};             ///< quadratic-profile second-variation coefficients
  double B{0.0};
  double R{50.0};            ///< rayleigh half-width
  int N{4000};               ///< rayleigh grid size
  std::string bump{};        ///< single-bump override "cy,ct,ry,rt,amplitude"
  std::string grid{"100,100"};  ///< mesh vertex counts "ns,ntau"
};

/// One row of a report's check table.
struct Check {
  std::string name;
  std::string anchor;  ///< plain statement of the claim being verified
  double measured{0.0};
  double threshold{0.0};
  bool pass{true};
};

/// A subcommand's outcome: free-form summary fields plus the check table.
struct Report {
  std::string command;
  ordered_json config;
  ordered_json extra = ordered_json::object();
  std::vector<Check> checks;

  [[nodiscard]] bool pass() const {
    for (const Check& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }

  void add(const std::string& name, const std::string& anchor, double measured,
           double threshold, bool ok) {
    checks.push_back(Check{name, anchor, measured, threshold, ok});
  }

  [[nodiscard]] ordered_json to_json() const {
    ordered_json j;
    j["command"] = command;
    j["config"] = config;
    for (auto it = extra.begin(); it != extra.end(); ++it) {
      j[it.key()] = it.value();
    }
    ordered_json arr = ordered_json::array();
    for (const Check& c : checks) {
      ordered_json e;
      e["name"] = c.name;
      e["anchor"] = c.anchor;
      e["measured"] = c.measured;
      e["threshold"] = c.threshold;
      e["pass"] = c.pass;
      arr.push_back(e);
    }
    j["checks"] = arr;
    j["pass"] = pass();
    return j;
  }
};

namespace detail_cli {

[[nodiscard]] inline std::vector<double> parse_doubles(const std::string& text,
                                                       std::size_t expected,
                                                       const char* what) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": bad number '" + item +
                                  "'");
    }
  }
  if (expected != 0 && vals.size() != expected) {
    throw std::invalid_argument(std::string(what) + ": expected " +
                                std::to_string(expected) + " comma-separated "
                                "values, got " + std::to_string(vals.size()));
  }
  return vals;
}

[[nodiscard]] inline Rect parse_region(const std::string& text) {
  std::vector<double> v = parse_doubles(text, 4, "--region");
  Rect r{v[0], v[1], v[2], v[3]};
  if (!(r.y0 < r.y1) || !(r.t0 < r.t1)) {
    throw std::invalid_argument("--region: empty region (need y0<y1, t0<t1)");
  }
  return r;
}

[[nodiscard]] inline TestBump parse_bump(const std::string& text) {
  std::vector<double> v = parse_doubles(text, 5, "--bump");
  if (!(v[2] > 0.0) || !(v[3] > 0.0)) {
    throw std::invalid_argument("--bump: radii must be positive");
  }
  return TestBump{v[0], v[1], v[2], v[3], v[4]};
}

}  // namespace detail_cli

/// A parsed field selector: the field itself plus its ruled-strip profile
/// when it has one (profile-based commands need it).
struct SelectedField {
  ScalarField field;
  bool is_strip{false};
  StripProfile profile{};
};

/// Grammar: plane:a,b | cone | cone_eps:eps | cantor:n | cantor_limit |
/// strip:profile.csv (rows "tau,a", piecewise-linear) | t | t2.
[[nodiscard]] inline SelectedField parse_field(const std::string& sel,
                                               const Rect& region) {
  std::string name = sel;
  std::string arg;
  if (auto pos = sel.find(':'); pos != std::string::npos) {
    name = sel.substr(0, pos);
    arg = sel.substr(pos + 1);
  }
  SelectedField out;
  if (name == "plane") {
    std::vector<double> ab =
        detail_cli::parse_doubles(arg.empty() ? "0,0" : arg, 2, "plane");
    out.field = plane_field(ab[0], ab[1], region);
  } else if (name == "cone") {
    out.field = cone_field();
    out.field.domain = region;
  } else if (name == "cone_eps") {
    double e = arg.empty()
                   ? 0.1
                   : detail_cli::parse_doubles(arg, 1, "cone_eps")[0];
    auto [f, prof] = cone_eps(e);
    out.field = std::move(f);
    out.field.domain = region;
    out.is_strip = true;
    out.profile = prof;
  } else if (name == "cantor") {
    int n = arg.empty() ? 4 : std::stoi(arg);
    out.profile = StripProfile::cantorN(n);
    out.field = strip_field(out.profile, region);
    out.is_strip = true;
  } else if (name == "cantor_limit") {
    out.profile = StripProfile::cantorLimit();
    out.field = strip_field(out.profile, region);
    out.is_strip = true;
  } else if (name == "strip") {
    if (arg.empty()) {
      throw std::invalid_argument("field 'strip' needs a profile table path");
    }
    std::ifstream in(arg);
    if (!in.good()) {
      throw std::invalid_argument("strip profile table not readable: " + arg);
    }
    auto taus = std::make_shared<std::vector<double>>();
    auto as = std::make_shared<std::vector<double>>();
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("tau", 0) == 0) {
        continue;
      }
      std::vector<double> row =
          detail_cli::parse_doubles(line, 2, "strip profile row");
      if (!taus->empty() && row[0] <= taus->back()) {
        throw std::invalid_argument(
            "strip profile table: tau must be strictly increasing");
      }
      taus->push_back(row[0]);
      as->push_back(row[1]);
    }
    if (taus->size() < 2) {
      throw std::invalid_argument("strip profile table needs >= 2 rows");
    }
    auto eval = [taus, as](double tau) {
      if (tau <= taus->front()) return as->front();
      if (tau >= taus->back()) return as->back();
      auto it = std::upper_bound(taus->begin(), taus->end(), tau);
      std::size_t k = static_cast<std::size_t>(it - taus->begin());
      double w = (tau - (*taus)[k - 1]) / ((*taus)[k] - (*taus)[k - 1]);
      return (1.0 - w) * (*as)[k - 1] + w * (*as)[k];
    };
    auto slope = [taus, as](double tau) {
      if (tau <= taus->front() || tau >= taus->back()) return 0.0;
      auto it = std::upper_bound(taus->begin(), taus->end(), tau);
      std::size_t k = static_cast<std::size_t>(it - taus->begin());
      return ((*as)[k] - (*as)[k - 1]) / ((*taus)[k] - (*taus)[k - 1]);
    };
    double amin = *std::min_element(as->begin(), as->end());
    double amax = *std::max_element(as->begin(), as->end());
    out.profile = StripProfile::custom(eval, slope, amin, amax);
    out.field = strip_field(out.profile, region);
    out.is_strip = true;
  } else if (name == "t") {
    out.field.kind = FieldKind::custom;
    out.field.domain = region;
    out.field.f = [](double, double t) { return t; };
  } else if (name == "t2") {
    out.field.kind = FieldKind::custom;
    out.field.domain = region;
    out.field.f = [](double, double t) { return t * t; };
  } else {
    throw std::invalid_argument("unknown field selector: " + sel);
  }
  return out;
}

namespace detail_cli {

/// Config echo embedded in every report; excludes output paths so that runs
/// into different directories still produce identical bytes.
[[nodiscard]] inline ordered_json config_echo(const RunConfig& cfg) {
  ordered_json j;
  j["field"] = cfg.field;
  j["region"] = cfg.region;
  j["eps"] = cfg.eps;
  j["n"] = cfg.n;
  j["tol"] = cfg.tol;
  j["seed"] = cfg.seed;
  j["tau"] = cfg.tau;
  j["to"] = cfg.to;
  j["steps"] = cfg.steps;
  j["A"] = cfg.A;
  j["B"] = cfg.B;
  j["R"] = cfg.R;
  j["N"] = cfg.N;
  j["bump"] = cfg.bump;
  j["grid"] = cfg.grid;
  return j;
}

[[nodiscard]] inline std::vector<TestBump> bumps_for(const RunConfig& cfg,
                                                     const Rect& region) {
  if (!cfg.bump.empty()) return {parse_bump(cfg.bump)};
  return bump_family(region);
}

[[nodiscard]] inline std::vector<double> eps_ladder(const RunConfig& cfg) {
  if (cfg.eps.empty()) return {0.1, 0.01, 0.001};
  std::vector<double> lad = parse_doubles(cfg.eps, 0, "--eps");
  for (double e : lad) {
    if (!(e > 0.0)) throw std::invalid_argument("--eps: entries must be > 0");
  }
  return lad;
}

}  // namespace detail_cli

// ------------------------------------------------------------- subcommands

[[nodiscard]] inline Report cmd_area(const RunConfig& cfg) {
  Report rep;
  const Rect region = detail_cli::parse_region(cfg.region);
  SelectedField sf = parse_field(cfg.field, region);
  QuadratureSpec spec;
  spec.abs_tol = 1e-10;
  spec.rel_tol = 1e-10;
  const double area = graph_area(sf.field, region, spec);
  rep.extra["area"] = area;
  rep.add("area-quadrature", "finite graph area over the region", area,
          std::numeric_limits<double>::max(), std::isfinite(area));
  return rep;
}

[[nodiscard]] inline Report cmd_first_variation(const RunConfig& cfg) {
  Report rep;
  const Rect region = detail_cli::parse_region(cfg.region);
  SelectedField sf = parse_field(cfg.field, region);
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-6;
  QuadratureSpec spec;
  spec.abs_tol = 1e-8;
  double worst = 0.0;
  for (const TestBump& phi : detail_cli::bumps_for(cfg, region)) {
    worst = std::max(worst, std::abs(first_variation(sf.field, phi, spec)));
  }
  rep.extra["max_abs_first_variation"] = worst;
  rep.add("stationarity",
          "first variation of the graph area vanishes at a stationary field",
          worst, tol, worst <= tol);
  return rep;
}

[[nodiscard]] inline Report cmd_second_variation(const RunConfig& cfg) {
  Report rep;
  const Rect region = detail_cli::parse_region(cfg.region);
  SelectedField sf = parse_field(cfg.field, region);
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-6;
  double min_ii = std::numeric_limits<double>::infinity();
  for (const TestBump& phi : detail_cli::bumps_for(cfg, region)) {
    const double ii =
        sf.is_strip ? strip_second_variation_pullback(sf.profile, phi)
                    : second_variation(sf.field, phi);
    min_ii = std::min(min_ii, ii);
  }
  rep.extra["min_second_variation"] = min_ii;
  rep.add("stability",
          "second variation of the graph area is nonnegative up to "
          "quadrature tolerance",
          min_ii, -tol, min_ii >= -tol);
  return rep;
}

[[nodiscard]] inline Report cmd_flow(const RunConfig& cfg) {
  Report rep;
  const Rect region = detail_cli::parse_region(cfg.region);
  SelectedField sf = parse_field(cfg.field, region);
  const int steps = cfg.steps > 0 ? cfg.steps : 4000;
  if (cfg.to == 0.0) {
    throw std::invalid_argument("flow: --to must be nonzero");
  }
  Curve1D main = ode_flow(sf.field, 0.0, cfg.tau, cfg.to, steps);
  // probe twice as far with the same step so a blow-up just beyond the
  // requested horizon is reported rather than silently missed
  Curve1D probe = ode_flow(sf.field, 0.0, cfg.tau, 2.0 * cfg.to, 2 * steps);
  rep.extra["gamma_end"] =
      main.blowup ? std::numeric_limits<double>::quiet_NaN()
                  : main.gamma.back();
  rep.extra["err_est"] = main.err_est;
  rep.extra["blowup_ahead"] = probe.blowup;
  if (probe.blowup) {
    rep.extra["blowup_s"] = probe.s.back();
  } else {
    rep.extra["blowup_s"] = nullptr;
  }
  rep.add("flow-completed",
          "the characteristic stays bounded up to the requested endpoint",
          main.blowup ? 1.0 : 0.0, 0.0, !main.blowup);
  const double etol = cfg.tol > 0.0 ? cfg.tol : 1e-6;
  rep.add("step-doubling-error",
          "fixed-step RK4 agrees with its half-resolution run", main.err_est,
          etol, main.err_est <= etol);
  return rep;
}

namespace detail_cli {

/// Shared by fit-quadratic and verdict: build the map over the region
/// interpreted as [s0,s1] x [tau0,tau1], fit, and append the fit contracts.
[[nodiscard]] inline QuadraticProfile fit_pipeline(const RunConfig& cfg,
                                                   Report& rep) {
  const Rect region = parse_region(cfg.region);
  SelectedField sf = parse_field(cfg.field, region);
  const int nt = cfg.n > 0 ? cfg.n : 200;
  if (nt < 2) throw std::invalid_argument("fit: need at least 2 tau samples");
  const int steps = cfg.steps > 0 ? cfg.steps : 400;
  std::vector<double> taus(static_cast<std::size_t>(nt));
  for (int j = 0; j < nt; ++j) {
    taus[static_cast<std::size_t>(j)] =
        region.t0 + (region.t1 - region.t0) * j / (nt - 1);
  }
  LagrangianMap map =
      build_parametrization(sf.field, region.y0, region.y1, taus, steps);
  AxiomReport ax = check_axioms(map);
  QuadraticProfile prof = fit_quadratic(map, 0.0);
  ProfileConstraintsReport pc = profile_constraints_check(prof);

  double amax_abs = 0.0;
  for (double a : prof.a) amax_abs = std::max(amax_abs, std::abs(a));
  const double rtol = cfg.tol > 0.0 ? cfg.tol : 1e-6 * (1.0 + amax_abs);

  rep.extra["max_residual"] = prof.max_residual;
  rep.extra["flow_residual"] = ax.l3_residual;
  rep.extra["coverage"] = ax.coverage;
  rep.add("fit-residual",
          "each characteristic is quadratic in s to within the fit tolerance",
          prof.max_residual, rtol, prof.max_residual <= rtol);
  rep.add("fiber-monotonicity",
          "characteristics through distinct heights never cross",
          static_cast<double>(ax.monotone_violations), 0.0, ax.monotone);
  rep.add("profile-constraints",
          "fitted (a,b) satisfy 2(a1-a2)(tau1-tau2) > (b1-b2)^2 pairwise",
          static_cast<double>(pc.part1_violations + pc.part2_flags), 0.0,
          pc.pass);
  return prof;
}

}  // namespace detail_cli

[[nodiscard]] inline Report cmd_fit_quadratic(const RunConfig& cfg,
                                              const fs::path& out_dir) {
  Report rep;
  QuadraticProfile prof = detail_cli::fit_pipeline(cfg, rep);
  std::ofstream csv(out_dir / "profile.csv", std::ios::binary);
  write_profile_csv(prof, csv);
  return rep;
}

[[nodiscard]] inline Report cmd_verdict(const RunConfig& cfg,
                                        const fs::path& out_dir) {
  Report rep;
  QuadraticProfile prof = detail_cli::fit_pipeline(cfg, rep);
  const double vtol = 1e-4;  // coefficient-spread tolerance for planarity
  BernsteinVerdict v = bernstein_verdict(prof, vtol);
  rep.extra["verdict"] = v.verdict == Verdict::Plane ? "Plane" : "NotPlane";
  rep.extra["a_range"] = v.a_range;
  rep.extra["b_range"] = v.b_range;
  std::ofstream csv(out_dir / "profile.csv", std::ios::binary);
  write_profile_csv(prof, csv);
  return rep;
}

[[nodiscard]] inline Report cmd_calibration(const RunConfig& cfg) {
  Report rep;
  const Rect region = detail_cli::parse_region(cfg.region);
  SelectedField sf = parse_field(cfg.field, region);
  if (!sf.is_strip) {
    throw std::invalid_argument(
        "calibration: the check runs on ruled strips (cantor:n, cone_eps, "
        "strip:table)");
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> us(0.1, 2.0);
  std::uniform_real_distribution<double> utau(0.0, 1.0);
  std::uniform_int_distribution<int> usign(0, 1);
  std::vector<std::pair<double, double>> samples;
  samples.reserve(100);
  for (int k = 0; k < 100; ++k) {
    const double s = (usign(rng) ? 1.0 : -1.0) * us(rng);
    samples.emplace_back(s, utau(rng));  // |s| >= 0.1 keeps x^2+y^2 > 0.01
  }
  CalibrationReport cal = calibration_check(sf.profile, samples);
  rep.extra["max_abs_divergence"] = cal.max_abs_divergence;
  rep.extra["max_normal_deviation"] = cal.max_normal_deviation;
  rep.extra["orientation_flips"] = cal.orientation_flips;
  rep.extra["samples"] = cal.samples_checked;
  const double dtol = cfg.tol > 0.0 ? cfg.tol : 1e-6;
  rep.add("divergence-free",
          "the calibration field has vanishing divergence away from the axis",
          cal.max_abs_divergence, dtol, cal.max_abs_divergence <= dtol);
  rep.add("normal-match",
          "the calibration equals the graph normal (-1,a)/sqrt(1+a^2) on "
          "s > 0 rulings",
          cal.max_normal_deviation, 1e-8, cal.max_normal_deviation <= 1e-8);
  return rep;
}

[[nodiscard]] inline Report cmd_rayleigh(const RunConfig& cfg) {
  Report rep;
  RayleighProblem prob;
  prob.A = cfg.A;
  prob.B = cfg.B;
  prob.R = cfg.R;
  prob.N = cfg.N;
  const double lam = rayleigh_min(prob);
  rep.extra["lambda_min"] = lam;
  rep.add("eigenvalue-finite",
          "the discretized quadratic-form minimizer exists", lam,
          std::numeric_limits<double>::max(), std::isfinite(lam));
  if (std::abs(prob.B * prob.B - 2.0 * prob.A) <= 1e-12) {
    rep.add("borderline-nonnegative",
            "at B^2 = 2A the quadratic form is nonnegative", lam, -1e-10,
            lam >= -1e-10);
  }
  return rep;
}

[[nodiscard]] inline Report cmd_cantor_suite(const RunConfig& cfg) {
  Report rep;
  const int n = cfg.n > 0 ? cfg.n : 8;
  if (n > 40) throw std::invalid_argument("cantor-suite: --n at most 40");
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (int k = 1; k <= n; ++k) {
    const double ti = cantor_sv_quantities(k, 1.0).tau_integral;
    rep.add("tau-integral-n" + std::to_string(k),
            "int over the level set of a'/(1+a^2)^{3/2} dtau = 1/sqrt(2)",
            ti, 1e-12, std::abs(ti - inv_sqrt2) <= 1e-12);
  }
  for (int k = 1; k <= std::min(n, 6); ++k) {
    const L2Report l2 = cantor_l2_distance(k, 1.0);
    rep.add("l2-distance-n" + std::to_string(k),
            "||dt f_n - dt f||_{L2} = 2 sqrt(2) q^{n/2} "
            "arctan(q^{-n/2}/sqrt(2)), q = 2/3",
            l2.rel_err, 1e-4, l2.rel_err <= 1e-4);
  }
  {
    const double y = 1.3;
    const double t = 0.5 * y * y + 1.0;  // the tau = 1 ruling
    const double d = cantor_dt_limit(y, t);
    rep.add("dt-limit-sample",
            "the limit profile's fiber derivative equals 2/y on the fiber",
            d, 1e-12, std::abs(d - 2.0 / y) <= 1e-12);
  }
  {
    const int k = std::min(n, 6);
    const double bound = cantor_sv_quantities(k, 1.0).bound;
    const double expect =
        std::numbers::pi * std::pow(2.0 / 3.0, 0.5 * k);
    rep.add("negative-part-bound-n" + std::to_string(k),
            "the negative second-variation term is at most M pi q^{n/2}",
            bound, 1e-12, std::abs(bound - expect) <= 1e-12);
  }
  return rep;
}

[[nodiscard]] inline Report cmd_cone_suite(const RunConfig& cfg) {
  Report rep;
  const Rect region = detail_cli::parse_region(cfg.region);
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-6;

  {  // stationarity of the unsmoothed cone over the bump family
    ScalarField f = cone_field();
    f.domain = region;
    QuadratureSpec spec;
    spec.abs_tol = 1e-8;
    double worst = 0.0;
    for (const TestBump& phi : detail_cli::bumps_for(cfg, region)) {
      worst = std::max(worst, std::abs(first_variation(f, phi, spec)));
    }
    rep.extra["max_abs_first_variation"] = worst;
    rep.add("cone-stationarity",
            "first variation of the cone's graph area vanishes for every "
            "test bump",
            worst, tol, worst <= tol);
  }

  const std::vector<double> ladder = detail_cli::eps_ladder(cfg);
  double prev_ratio = std::numeric_limits<double>::infinity();
  bool ratios_ok = true;
  double min_ii = std::numeric_limits<double>::infinity();
  for (double e : ladder) {
    StabilityBound sb = cone_stability_bound(e, 1.0);
    char etag[32];
    std::snprintf(etag, sizeof etag, "%g", e);
    rep.add(std::string("stability-negative-term-eps") + etag,
            "the negative second-variation term is at most M pi sqrt(eps)",
            sb.neg_term, sb.bound, sb.neg_term <= sb.bound);
    const double ratio = sb.bound > 0.0 ? sb.neg_term / sb.bound : 0.0;
    if (ratio > prev_ratio + 1e-12) ratios_ok = false;
    prev_ratio = ratio;

    auto [f, prof] = cone_eps(e);
    (void)f;
    const double ii =
        strip_second_variation_pullback(prof, cone_stability_bump(1.0));
    min_ii = std::min(min_ii, ii);
  }
  rep.extra["min_second_variation"] = min_ii;
  rep.add("stability-ratio-monotone",
          "the negative-term/bound ratio does not increase as eps decreases",
          ratios_ok ? 0.0 : 1.0, 0.0, ratios_ok);
  rep.add("smoothed-cone-stability",
          "the smoothed cone's second variation stays above -tol for the "
          "canonical bump",
          min_ii, -tol, min_ii >= -tol);

  {  // L^p convergence of the smoothing and the eps-free domination envelope
    ConvergenceReport conv = cone_convergence(ladder, 2.0, region);
    rep.extra["lp_norms"] = conv.f_norm;
    rep.add("lp-convergence",
            "the smoothed fields converge to the cone in L^p on the region",
            conv.f_norm.empty() ? 0.0 : conv.f_norm.back(), 1e308,
            conv.monotone && conv.converged);
    rep.add("domination-envelope",
            "|dt f_eps| is dominated by an eps-free L^p_loc envelope, p < 3",
            static_cast<double>(conv.domination_samples), 1000.0,
            conv.domination_ok && conv.domination_samples >= 1000);
  }
  return rep;
}

[[nodiscard]] inline Report cmd_mesh(const RunConfig& cfg,
                                     const fs::path& out_dir,
                                     const std::string& provenance) {
  Report rep;
  const Rect region = detail_cli::parse_region(cfg.region);
  SelectedField sf = parse_field(cfg.field, region);
  std::vector<double> g = detail_cli::parse_doubles(cfg.grid, 2, "--grid");
  const int ni = static_cast<int>(g[0]);
  const int nj = static_cast<int>(g[1]);
  Mesh m = sf.is_strip
               ? mesh_strip(sf.profile, region.y0, region.y1, region.t0,
                            region.t1, ni, nj)
               : mesh_graph(sf.field, region, ni, nj);
  m.provenance = provenance;
  std::ofstream obj(out_dir / "mesh.obj", std::ios::binary);
  write_obj(m, obj);
  if (!obj.good()) throw std::runtime_error("mesh: failed to write mesh.obj");
  rep.extra["vertices"] = m.vertices.size();
  rep.extra["triangles"] = m.triangles.size();
  rep.add("mesh-size", "vertex and triangle counts match the requested grid",
          static_cast<double>(m.vertices.size()),
          static_cast<double>(ni) * nj,
          m.vertices.size() == static_cast<std::size_t>(ni) * nj &&
              m.triangles.size() ==
                  static_cast<std::size_t>(2) * (ni - 1) * (nj - 1));
  return rep;
}

// --------------------------------------------------------------- dispatch

/// Parse flags, run the requested subcommand, write report files, and return
/// the process exit code: 0 when every checked contract passed, 1 when a
/// check failed, 2 on usage or runtime errors.
inline int run(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{
      "Numerical toolkit for intrinsic graphs: variation suites, "
      "characteristic flows, quadratic-profile fits, and mesh export"};
  app.set_config("--config");
  app.add_option("command", cfg.command,
                 "area | first-variation | second-variation | flow | "
                 "fit-quadratic | verdict | calibration | cone-suite | "
                 "cantor-suite | rayleigh | mesh")
      ->required();
  // join(',') keeps comma-separated values intact when they come from a
  // config file, where the INI reader would otherwise split them
  app.add_option("--field", cfg.field,
                 "plane:a,b | cone | cone_eps:eps | cantor:n | cantor_limit "
                 "| strip:profile.csv | t | t2")
      ->join(',');
  app.add_option("--region", cfg.region,
                 "y0,y1,t0,t1 (s/tau box for strip meshes and fits)")
      ->join(',');
  app.add_option("--eps", cfg.eps, "suite ladder, e.g. 0.1,0.01,0.001")
      ->join(',');
  app.add_option("--n", cfg.n, "tau-sample count / staircase depth");
  app.add_option("--tol", cfg.tol, "pass-threshold override");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--seed", cfg.seed, "seed for sampled checks");
  app.add_option("--tau", cfg.tau, "flow launch height");
  app.add_option("--to", cfg.to, "flow target s");
  app.add_option("--steps", cfg.steps, "ODE / map step count");
  app.add_option("--A", cfg.A, "profile second-variation coefficient A");
  app.add_option("--B", cfg.B, "profile second-variation coefficient B");
  app.add_option("--R", cfg.R, "rayleigh half-width");
  app.add_option("--N", cfg.N, "rayleigh grid size");
  app.add_option("--bump", cfg.bump, "single bump cy,ct,ry,rt,amplitude")
      ->join(',');
  app.add_option("--grid", cfg.grid, "mesh vertex counts ns,ntau")
      ->join(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const fs::path out_dir(cfg.out);
    fs::create_directories(out_dir);

    Report rep;
    rep.command = cfg.command;
    rep.config = detail_cli::config_echo(cfg);
    ordered_json prov_src;
    prov_src["command"] = cfg.command;
    prov_src["config"] = rep.config;
    const std::string provenance = detail::fnv1a_hex(prov_src.dump());

    Report body;
    if (cfg.command == "area") {
      body = cmd_area(cfg);
    } else if (cfg.command == "first-variation") {
      body = cmd_first_variation(cfg);
    } else if (cfg.command == "second-variation") {
      body = cmd_second_variation(cfg);
    } else if (cfg.command == "flow") {
      body = cmd_flow(cfg);
    } else if (cfg.command == "fit-quadratic") {
      body = cmd_fit_quadratic(cfg, out_dir);
    } else if (cfg.command == "verdict") {
      body = cmd_verdict(cfg, out_dir);
    } else if (cfg.command == "calibration") {
      body = cmd_calibration(cfg);
    } else if (cfg.command == "cone-suite") {
      body = cmd_cone_suite(cfg);
    } else if (cfg.command == "cantor-suite") {
      body = cmd_cantor_suite(cfg);
    } else if (cfg.command == "rayleigh") {
      body = cmd_rayleigh(cfg);
    } else if (cfg.command == "mesh") {
      body = cmd_mesh(cfg, out_dir, provenance);
    } else {
      throw std::invalid_argument("unknown command: " + cfg.command);
    }
    rep.extra = std::move(body.extra);
    rep.checks = std::move(body.checks);
    rep.extra["provenance"] = provenance;

    std::ofstream out(out_dir / "report.json", std::ios::binary);
    out << rep.to_json().dump(2) << "\n";
    if (!out.good()) {
      throw std::runtime_error("failed to write report.json");
    }
    return rep.pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace heis::cli
