// Acceptance gate: ten fixed contracts with pinned tolerances and runtime
// budgets, one PASS/FAIL line each.  The binary exits nonzero when any
// contract fails, so it doubles as the release check in CI.
#include <heis/cantor.hpp>
#include <heis/cone.hpp>
#include <heis/lagrangian.hpp>
#include <heis/numerics.hpp>
#include <heis/strips.hpp>
#include <heis/variation.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace heis;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void line(int idx, bool ok, const std::string& text) {
  if (!ok) ++g_failures;
  std::printf("[%2d] %s  %s\n", idx, ok ? "PASS" : "FAIL", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

fs::path scratch_root() {
  fs::path p = fs::temp_directory_path() / "heis_acceptance";
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::string cmd = std::string(HEIS_CLI_PATH) + " " + args + " --out " +
                    out_dir.string() + " > " + (out_dir / "stdout.log").string() +
                    " 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  }
  return v;
}

ScalarField custom_field(std::function<double(double, double)> f,
                         std::function<double(double, double)> ft) {
  ScalarField F;
  F.kind = FieldKind::custom;
  F.domain = Rect{-10.0, 10.0, -1e9, 1e9};
  F.f = std::move(f);
  F.ft = std::move(ft);
  F.fy = [](double, double) { return 0.0; };
  return F;
}

// --------------------------------------------------------------- criteria

// 1: the invariant integral int_0^1 a_n'/(1+a_n^2)^{3/2} dtau equals
//    1/sqrt(2) to 1e-12 for every staircase level n = 1..8, via the CLI
//    suite, in under a second.
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const fs::path d = scratch_root() / "c1";
    const int rc = run_cli("cantor-suite --n 8", d);
    const double dt = seconds_since(t0);
    if (rc != 0) {
      line(1, false, fmt("staircase suite exited %d", rc));
      return;
    }
    const json rep = json::parse(slurp(d / "report.json"));
    double worst = 0.0;
    int found = 0;
    for (const auto& c : rep.at("checks")) {
      const std::string name = c.at("name").get<std::string>();
      if (name.rfind("tau-integral-n", 0) != 0) continue;
      ++found;
      worst = std::max(worst,
                       std::abs(c.at("measured").get<double>() -
                                1.0 / std::numbers::sqrt2));
      if (!c.at("pass").get<bool>()) worst = std::max(worst, 1.0);
    }
    const bool ok = found == 8 && worst <= 1e-12 && dt < 1.0;
    line(1, ok,
         fmt("invariant tau integral = 1/sqrt(2): worst |err| %.3g "
             "(tol 1e-12, n = 1..8) in %.2fs (< 1s)",
             worst, dt));
  } catch (const std::exception& e) {
    line(1, false, std::string("invariant tau integral: ") + e.what());
  }
}

// 2: the fiber-derivative L2 distance between staircase level n and its
//    limit matches 2 sqrt(2) q^{n/2} arctan(q^{-n/2}/sqrt(2)) within 1e-4
//    relative for n <= 6, in under ten seconds.
void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n) {
      worst = std::max(worst, cantor_l2_distance(n, 1.0).rel_err);
    }
    const double pin = cantor_l2_distance(1, 1.0).closed;
    const double dt = seconds_since(t0);
    const bool ok = worst <= 1e-4 && std::abs(pin - 1.6483) <= 1e-3 &&
                    dt < 10.0;
    line(2, ok,
         fmt("L2 distance closed form: worst rel err %.3g (tol 1e-4, "
             "n = 1..6), n=1 value %.5f ~ 1.6483, in %.2fs (< 10s)",
             worst, pin, dt));
  } catch (const std::exception& e) {
    line(2, false, std::string("L2 distance closed form: ") + e.what());
  }
}

// 3: the cone field is stationary: max |first variation| over the canonical
//    20-bump family on [-2,2]x[-1,2] is at most 1e-6 with seam-aware
//    quadrature at abs_tol 1e-8, in under a minute.
void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ScalarField f = cone_field();
    f.domain = Rect{-2.0, 2.0, -1.0, 2.0};
    QuadratureSpec spec;
    spec.abs_tol = 1e-8;
    double worst = 0.0;
    const std::vector<TestBump> fam = bump_family(f.domain);
    for (const TestBump& phi : fam) {
      worst = std::max(worst, std::abs(first_variation(f, phi, spec)));
    }
    const double dt = seconds_since(t0);
    const bool ok = fam.size() == 20 && worst <= 1e-6 && dt < 60.0;
    line(3, ok,
         fmt("cone stationarity: max |first variation| %.3g over %zu bumps "
             "(tol 1e-6) in %.2fs (< 60s)",
             worst, fam.size(), dt));
  } catch (const std::exception& e) {
    line(3, false, std::string("cone stationarity: ") + e.what());
  }
}

// 4: the smoothed cones are uniformly stable along eps = 0.1, 0.01, 0.001:
//    every bump's second variation stays above -1e-6, the measured negative
//    term obeys M pi sqrt(eps), and the term/bound ratio never increases,
//    all within two minutes.
void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const std::vector<double> ladder{0.1, 0.01, 0.001};
    const std::vector<TestBump> fam =
        bump_family(Rect{-2.0, 2.0, -1.0, 2.0});
    double min_ii = std::numeric_limits<double>::infinity();
    double prev_ratio = std::numeric_limits<double>::infinity();
    bool bounds_ok = true, ratios_ok = true;
    for (double e : ladder) {
      StripProfile prof = StripProfile::coneEps(e);
      for (const TestBump& phi : fam) {
        min_ii = std::min(min_ii, strip_second_variation_pullback(prof, phi));
      }
      const StabilityBound sb = cone_stability_bound(e, 1.0);
      if (!(sb.neg_term <= sb.bound) || !sb.converged) bounds_ok = false;
      const double ratio = sb.neg_term / sb.bound;
      if (ratio > prev_ratio + 1e-12) ratios_ok = false;
      prev_ratio = ratio;
    }
    const double dt = seconds_since(t0);
    const bool ok =
        min_ii >= -1e-6 && bounds_ok && ratios_ok && dt < 120.0;
    line(4, ok,
         fmt("smoothed-cone stability: min second variation %.3g >= -1e-6, "
             "negative term within M pi sqrt(eps) %s, ratio monotone %s, "
             "in %.2fs (< 120s)",
             min_ii, bounds_ok ? "yes" : "NO", ratios_ok ? "yes" : "NO", dt));
  } catch (const std::exception& e) {
    line(4, false, std::string("smoothed-cone stability: ") + e.what());
  }
}

// 5: the fit pipeline recovers the quadratic structure: on the eps = 0.1
//    smoothed cone the fitted a(tau) is the ramp and b = 0 to 1e-6 with
//    residual <= 1e-6 and verdict NotPlane; an affine field comes back
//    Plane with zero residual; all through the CLI in under 30 seconds.
void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const fs::path d1 = scratch_root() / "c5_fit";
    const fs::path d2 = scratch_root() / "c5_verdict";
    const fs::path d3 = scratch_root() / "c5_plane";
    int rc1 = run_cli(
        "fit-quadratic --field cone_eps:0.1 --region -2,2,-0.5,1.5 --n 200",
        d1);
    int rc2 = run_cli(
        "verdict --field cone_eps:0.1 --region -2,2,-0.5,1.5 --n 200", d2);
    int rc3 = run_cli(
        "verdict --field plane:0.3,0.1 --region -2,2,-0.5,1.5 --n 100", d3);
    if (rc1 != 0 || rc2 != 0 || rc3 != 0) {
      line(5, false,
           fmt("quadratic recovery: CLI exits %d/%d/%d", rc1, rc2, rc3));
      return;
    }
    const json rep1 = json::parse(slurp(d1 / "report.json"));
    const double resid = rep1.at("max_residual").get<double>();

    // per-fiber coefficient recovery from the emitted table
    std::ifstream csv(d1 / "profile.csv");
    std::string row;
    std::getline(csv, row);  // header
    double worst_a = 0.0, worst_b = 0.0;
    int rows = 0;
    while (std::getline(csv, row)) {
      double tau, a, b, c, r;
      if (std::sscanf(row.c_str(), "%lf,%lf,%lf,%lf,%lf", &tau, &a, &b, &c,
                      &r) != 5) {
        continue;
      }
      ++rows;
      const double ramp = std::clamp(tau / 0.1, 0.0, 1.0);
      worst_a = std::max(worst_a, std::abs(a - ramp));
      worst_b = std::max(worst_b, std::abs(b));
    }
    const json rep2 = json::parse(slurp(d2 / "report.json"));
    const json rep3 = json::parse(slurp(d3 / "report.json"));
    const std::string v1 = rep2.at("verdict").get<std::string>();
    const std::string v2 = rep3.at("verdict").get<std::string>();
    const double plane_resid = rep3.at("max_residual").get<double>();
    const double dt = seconds_since(t0);
    const bool ok = resid <= 1e-6 && rows == 200 && worst_a <= 1e-6 &&
                    worst_b <= 1e-6 && v1 == "NotPlane" && v2 == "Plane" &&
                    plane_resid <= 1e-12 && dt < 30.0;
    line(5, ok,
         fmt("quadratic recovery: residual %.3g, |a - ramp| %.3g, |b| %.3g "
             "(tol 1e-6), verdicts %s/%s, plane residual %.3g, in %.2fs "
             "(< 30s)",
             resid, worst_a, worst_b, v1.c_str(), v2.c_str(), plane_resid,
             dt));
  } catch (const std::exception& e) {
    line(5, false, std::string("quadratic recovery: ") + e.what());
  }
}

// 6: the area formula and the change-of-variables identities hold on an
//    affine field and on the eps = 0.1 smoothed cone: |lhs - rhs| <= 1e-5
//    and all three pullback residuals <= 1e-4 at grid spacing ~1e-3.
void criterion_6() {
  try {
    QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    spec.rel_tol = 1e-12;

    ScalarField plane = plane_field(0.5, 0.1, Rect{-5, 5, -5, 5});
    LagrangianMap mp = build_parametrization(plane, -1.0, 1.0,
                                             linspace(-0.7, 1.1, 1801), 2000);
    const AreaFormulaCheck ap =
        area_formula_check(mp, TestBump{0.0, 0.3, 0.8, 0.6, 1.0}, spec);
    const CovResiduals cp =
        change_of_variables_check(mp, TestBump{0.0, 0.25, 0.9, 0.8, 1.0});

    auto [fc, prof] = cone_eps(0.1);
    (void)prof;
    LagrangianMap ma = build_parametrization(fc, -0.1, 2.0,
                                             linspace(-1.8, 1.0, 2801), 2100);
    const AreaFormulaCheck ac =
        area_formula_check(ma, TestBump{1.5, 0.5, 0.4, 0.4, 1.0}, spec);
    LagrangianMap mc = build_parametrization(fc, -0.1, 2.1,
                                             linspace(0.1, 4.3, 4201), 2200);
    const CovResiduals cc =
        change_of_variables_check(mc, TestBump{1.0, 3.2, 1.0, 1.0, 0.8});

    const double area_worst =
        std::max(std::abs(ap.lhs - ap.rhs), std::abs(ac.lhs - ac.rhs));
    const double cov_worst =
        std::max({cp.r_dt, cp.r_dy, cp.r_grad, cc.r_dt, cc.r_dy, cc.r_grad});
    const bool ok = area_worst <= 1e-5 && cov_worst <= 1e-4 &&
                    ap.rhs_converged && ac.rhs_converged;
    line(6, ok,
         fmt("area formula + change of variables: worst |lhs - rhs| %.3g "
             "(tol 1e-5), worst pullback residual %.3g (tol 1e-4)",
             area_worst, cov_worst));
  } catch (const std::exception& e) {
    line(6, false, std::string("area formula: ") + e.what());
  }
}

// 7: the calibration field is divergence-free off the vertical axis
//    (|div| <= 1e-6 at 100 random points with x^2 + y^2 > 0.01) and equals
//    the ruled-strip normal (-1, a)/sqrt(1+a^2) to 1e-8 on s > 0 rulings of
//    the limit staircase.
void criterion_7() {
  try {
    std::mt19937_64 rng(20260822);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst_div = 0.0;
    int checked = 0;
    while (checked < 100) {
      HPoint p{u(rng), u(rng), u(rng)};
      if (p.x * p.x + p.y * p.y <= 0.01) continue;
      ++checked;
      worst_div = std::max(worst_div, std::abs(calibration_divergence(p)));
    }
    std::vector<std::pair<double, double>> samples;
    std::uniform_real_distribution<double> us(0.1, 2.0), ut(0.0, 1.0);
    for (int i = 0; i < 100; ++i) samples.emplace_back(us(rng), ut(rng));
    const CalibrationReport rep =
        calibration_check(StripProfile::cantorLimit(), samples);
    const bool ok = worst_div <= 1e-6 && rep.max_normal_deviation <= 1e-8 &&
                    rep.samples_checked == 100;
    line(7, ok,
         fmt("calibration: max |divergence| %.3g (tol 1e-6, 100 points), "
             "max normal deviation %.3g (tol 1e-8, 100 rulings)",
             worst_div, rep.max_normal_deviation));
  } catch (const std::exception& e) {
    line(7, false, std::string("calibration: ") + e.what());
  }
}

// 8: the quadratic-form minimum detects instability and its absence: for
//    h = t^2/2 + 1 the discretized minimum sits below 2 at R = 50,
//    N = 4000, while a borderline weight (B^2 = 2A) never dips below
//    -1e-10.
void criterion_8() {
  try {
    const double lam = rayleigh_min(RayleighProblem{1.0, 0.0, 50.0, 4000});
    // B^2 = 2A makes the weight a perfect square vanishing at t = -B/A,
    // so the window must stop short of that point
    const double lam_b =
        rayleigh_min(RayleighProblem{0.5, 1.0, 1.9, 2000});
    const bool ok = lam < 2.0 && lam_b >= -1e-10;
    line(8, ok,
         fmt("quadratic-form minimum: lambda %.6f < 2 at (A,B) = (1,0), "
             "borderline lambda %.3g >= -1e-10 at B^2 = 2A",
             lam, lam_b));
  } catch (const std::exception& e) {
    line(8, false, std::string("quadratic-form minimum: ") + e.what());
  }
}

// 9: the characteristic-flow integrator: gamma' = gamma reproduces e to
//    1e-8; the f = t^2 field gives gamma(0.5) = 2 to 1e-6 and flags its
//    blow-up before s = 1; the Gronwall separation bound holds on 100
//    random Lipschitz fields.
void criterion_9() {
  try {
    auto lin = custom_field([](double, double t) { return t; },
                            [](double, double) { return 1.0; });
    const Curve1D ce = ode_flow(lin, 0.0, 1.0, 1.0, 4000);
    const double err_e = std::abs(ce.gamma.back() - std::numbers::e);

    auto quad = custom_field([](double, double t) { return t * t; },
                             [](double, double t) { return 2.0 * t; });
    const Curve1D ch = ode_flow(quad, 0.0, 1.0, 0.5, 4000);
    const double err_two = std::abs(ch.gamma.back() - 2.0);
    const Curve1D probe = ode_flow(quad, 0.0, 1.0, 1.0, 8000);
    const bool blow_ok = probe.blowup && probe.s.back() < 1.0;

    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    bool gronwall_ok = true;
    for (int i = 0; i < 100; ++i) {
      const double c0 = u(rng), c1 = 0.5 * u(rng), c2 = u(rng);
      auto f = custom_field(
          [c0, c1, c2](double y, double t) {
            return c0 + c1 * std::sin(y + c2 * t);
          },
          [c1, c2](double y, double t) {
            return c1 * c2 * std::cos(y + c2 * t);
          });
      const double ta = u(rng), tb = u(rng);
      const SeparationCheck r =
          flow_separation_check(f, std::abs(c1 * c2), ta, tb, 0.0, 1.0, 128);
      if (!r.ok) gronwall_ok = false;
    }
    const bool ok = err_e <= 1e-8 && !ce.blowup && err_two <= 1e-6 &&
                    !ch.blowup && blow_ok && gronwall_ok;
    line(9, ok,
         fmt("characteristic flows: |gamma(1) - e| %.3g (tol 1e-8), "
             "|gamma(0.5) - 2| %.3g (tol 1e-6), blow-up before s = 1 %s, "
             "separation bound on 100 random fields %s",
             err_e, err_two, blow_ok ? "flagged" : "MISSED",
             gronwall_ok ? "held" : "VIOLATED"));
  } catch (const std::exception& e) {
    line(9, false, std::string("characteristic flows: ") + e.what());
  }
}

// 10: determinism: every suite rerun with the same configuration produces
//     byte-identical reports, tables, and meshes.
void criterion_10() {
  try {
    struct Job {
      std::string tag;
      std::string args;
      std::vector<std::string> files;
    };
    const std::vector<Job> jobs{
        {"cantor", "cantor-suite --n 6", {"report.json"}},
        {"cone", "cone-suite", {"report.json"}},
        {"fit",
         "fit-quadratic --field cone_eps:0.1 --region -1,1,-0.3,0.5 --n 50",
         {"report.json", "profile.csv"}},
        {"verdict", "verdict --field plane:0.3,0.1 --region -1,1,-0.3,0.5 "
                    "--n 40",
         {"report.json", "profile.csv"}},
        {"mesh", "mesh --field cantor:4 --region -2,2,-0.5,1.5 --grid 60,60",
         {"report.json", "mesh.obj"}},
        {"flow", "flow --field t2 --tau 1 --to 0.5", {"report.json"}},
        {"calib", "calibration --field cantor:4 --seed 7", {"report.json"}},
        {"ray", "rayleigh --A 1 --B 0 --R 10 --N 500", {"report.json"}},
        {"area", "area --field plane:0.2,0.1 --region 0,1,0,1",
         {"report.json"}},
        {"fv", "first-variation --field plane:0.4,-0.1 --region -2,2,-1,2",
         {"report.json"}},
        {"sv", "second-variation --field cone_eps:0.1 --region -2,2,-1,2 "
               "--bump 0,0.5,2,0.4,7.3890560989306495",
         {"report.json"}},
    };
    std::string bad;
    for (const Job& j : jobs) {
      const fs::path a = scratch_root() / ("c10_" + j.tag + "_a");
      const fs::path b = scratch_root() / ("c10_" + j.tag + "_b");
      const int ra = run_cli(j.args, a);
      const int rb = run_cli(j.args, b);
      if (ra != rb) {
        bad = j.tag + " (exit codes differ)";
        break;
      }
      for (const std::string& f : j.files) {
        const std::string ca = slurp(a / f);
        if (ca.empty() || ca != slurp(b / f)) {
          bad = j.tag + "/" + f;
          break;
        }
      }
      if (!bad.empty()) break;
    }
    line(10, bad.empty(),
         bad.empty()
             ? fmt("determinism: %zu suite reruns byte-identical "
                   "(reports, tables, meshes)",
                   jobs.size())
             : "determinism: mismatch at " + bad);
  } catch (const std::exception& e) {
    line(10, false, std::string("determinism: ") + e.what());
  }
}

}  // namespace

int main() {
  std::error_code ec;
  fs::remove_all(scratch_root(), ec);  // stale outputs must not mask changes
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (g_failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  return 1;
}
