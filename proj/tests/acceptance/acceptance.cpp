// Acceptance run: one PASS/FAIL line per criterion. Optional arguments select
// criteria by number, e.g. `acceptance 1 7`.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/hermite.hpp>

#include "magwell/config.hpp"
#include "magwell/csv.hpp"
#include "magwell/discrete_operator.hpp"
#include "magwell/eigensolver.hpp"
#include "magwell/fit.hpp"
#include "magwell/gaps.hpp"
#include "magwell/geometry.hpp"
#include "magwell/model_spectra.hpp"
#include "magwell/oscillator.hpp"
#include "magwell/sweep.hpp"

using namespace magwell;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<cdouble> unscaled(const DiscreteOperator& op, const Eigen::VectorXcd& v) {
  return op.from_scaled(std::vector<cdouble>(v.data(), v.data() + v.size()));
}

ExperimentConfig groundstate_config() {
  ExperimentConfig c;
  c.field.name = "parabolic";
  c.field.b0 = 1.0;
  c.field.beta2 = 2.0;
  c.metric.name = "flat";
  c.metric.s_min = -4.0;
  c.metric.s_max = 4.0;
  c.metric.t_halfwidth = 2.5;
  c.sweep.h = {0.12, 0.1, 0.07, 0.05, 0.03, 0.02};
  c.sweep.m = 1;
  c.sweep.quasimode = true;
  return c;
}

// Criteria 2 and 4 share one sweep.
const SweepOutcome& groundstate_sweep() {
  static const SweepOutcome outcome = [] {
    SweepRunOptions o;
    o.on_record = [](const SweepRecord& r) {
      if (r.ok())
        std::printf("  h=%-5g lambda0=%.10g residual=%.4e (%.1f s)\n", r.h, r.eigenvalues[0],
                    r.residual.value_or(NAN), r.seconds);
      else
        std::printf("  h=%-5g error: %s\n", r.h, r.error.c_str());
    };
    return run_sweep(groundstate_config(), o);
  }();
  return outcome;
}

Verdict flat_landau() {
  const auto axis = SAxis::interval(-4.0, 4.0);
  const auto metric = BandMetric::flat(axis, 4.0);
  const auto grid = GridSpec::box(-4.0, 4.0, -4.0, 4.0, 256, 256);
  const double h = 0.1;
  const auto t0 = std::chrono::steady_clock::now();
  const auto op = assemble(h, FieldProfile::uniform(1.0, axis, 4.0), metric, grid);
  SolverOptions o;
  o.shift = 0.95 * h;
  const auto low = lowest_eigenpairs(op, o);
  // The lowest level is highly degenerate in the box; the next level is the
  // center of the eigenvalue cluster near 3h.
  const double E = cluster_median(op.matrix, 2 * h, 4 * h, 1e-6);
  const auto next = eigenpairs_near(op.matrix, E, 1, o);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double l0 = low.values[0], gap = next.values[0] - l0;
  const bool pass = std::abs(l0 - 0.1) <= 0.01 * 0.1 && std::abs(gap - 0.2) <= 0.02 * 0.2;
  return {pass, fmt("lambda0=%.6f (target 0.1, 1%%) gap=%.6f (target 0.2, 2%%) %.1f s", l0, gap, seconds)};
}

Verdict two_term_groundstate() {
  const auto& out = groundstate_sweep();
  std::vector<Sample> d;
  for (const auto& r : out.records)
    if (r.ok()) d.push_back({r.h, r.eigenvalues[0]});
  if (d.size() < 6) return {false, fmt("only %zu of 6 h values solved", d.size())};
  const std::vector<double> p = {1, 2};
  const auto f = fit_powers(d, p);
  const double c1 = f.coefficients[0], c2 = f.coefficients[1];
  return {std::abs(c1 - 1) <= 0.02 && std::abs(c2 - 0.5) <= 0.1,
          fmt("c1=%.5f (|c1-1|<=0.02) c2=%.5f (|c2-0.5|<=0.1)", c1, c2)};
}

Verdict miniwell_ladder() {
  ExperimentConfig c;
  c.field.name = "miniwell";
  c.field.b0 = 1.0;
  c.field.mu0 = 2.0;
  c.field.mu2 = 2.0;
  c.metric.t_halfwidth = 2.5;
  c.sweep.h = {0.12, 0.1, 0.07, 0.05, 0.03};
  c.sweep.m = 2;
  SweepRunOptions o;
  o.on_record = [](const SweepRecord& r) {
    if (r.ok())
      std::printf("  h=%-5g gap=%.6e (%.1f s)\n", r.h, r.eigenvalues[1] - r.eigenvalues[0], r.seconds);
    else
      std::printf("  h=%-5g error: %s\n", r.h, r.error.c_str());
  };
  const auto out = run_sweep(c, o);
  std::vector<Sample> d;
  for (const auto& r : out.records)
    if (r.ok()) d.push_back({r.h, r.eigenvalues[1] - r.eigenvalues[0]});
  if (d.size() < 3) return {false, "fewer than 3 h values solved"};
  const auto f = exponent_fit(d);
  // Leading coefficient of gap ~ C h^{5/2}.
  const std::vector<double> p = {2.5};
  const double C = fit_powers(d, p).coefficients[0];
  const bool pass = f.slope >= 2.35 && f.slope <= 2.65 && std::abs(C - 1.0) <= 0.2;
  return {pass, fmt("slope=%.4f (in [2.35, 2.65]) prefactor=%.4f (within 20%% of 1; log-log intercept %.3f)", f.slope,
                    C, f.prefactor())};
}

Verdict quasimode_residual() {
  const auto& out = groundstate_sweep();
  std::vector<Sample> d;
  bool bound = true;
  std::string worst;
  for (const auto& r : out.records) {
    if (!r.ok() || !r.residual || !r.lambda_qm) return {false, fmt("h=%g has no quasimode measurement", r.h)};
    if (r.eigenvalues[0] > *r.lambda_qm + *r.residual) {
      bound = false;
      worst = fmt(" violated at h=%g", r.h);
    }
    if (r.h <= 0.1) d.push_back({r.h, *r.residual});
  }
  const auto f = exponent_fit(d);
  const bool pass = bound && f.slope >= 1.9 && f.slope <= 2.4;
  return {pass, fmt("slope=%.4f +- %.3f over %d h (in [1.9, 2.4]); lambda0 <= lambda(h) + residual %s%s", f.slope,
                    f.stderr_slope, f.samples, bound ? "at every h" : "fails", worst.c_str())};
}

std::vector<double> model_levels(int n, int order) {
  const auto axis = SAxis::interval(-8.0, 8.0);
  const auto grid = GridSpec::box(-8.0, 8.0, -8.0, 8.0, n, n);
  AssemblyOptions ao;
  ao.potential = [](double s, double t) { return s * s + t * t; };
  ao.stencil_order = order;
  const auto op = assemble(1.0, FieldProfile::uniform(1.0, axis, 8.0), BandMetric::flat(axis, 8.0), grid, ao);
  SolverOptions o;
  o.m = 4;
  o.shift = 2.0;
  return lowest_eigenpairs(op, o).values;
}

Verdict model_operator() {
  const auto fine = model_levels(256, 4);
  // Diagnostic: the nearest-neighbour stencil on the same grid.
  const auto second = model_levels(256, 2);
  const auto z = quadratic_zeeman_spectrum(1.0, 1.0, 0.0, 1.0, 4, 4);
  double err = 0.0, err2 = 0.0;
  std::string list;
  for (int i = 0; i < 4; ++i) {
    err = std::max(err, std::abs(fine[i] - z.levels[i].value));
    err2 = std::max(err2, std::abs(second[i] - z.levels[i].value));
    list += fmt("%s%.5f/%.5f", i ? " " : "", fine[i], z.levels[i].value);
  }
  bool model_ok = true;
  double worst_ratio = 0.0;
  for (double h : {1e-2, 1e-3}) {
    const double b0 = 1.0, mu0 = 2.0;
    const auto g = model_p0_groundstate(h, b0, mu0);
    const double bound = 2 * h * h * (mu0 / (8 * b0)) * mu0 / (2 * b0 * b0);
    worst_ratio = std::max(worst_ratio, std::abs(g.exact - g.leading) / bound);
    model_ok = model_ok && std::abs(g.exact - g.leading) <= bound;
  }
  return {err <= 1e-3 && model_ok,
          fmt("numeric/analytic %s, max error %.2e (<= 1e-3; second-order stencil %.1e); model p0 remainder/bound "
              "max %.3f",
              list.c_str(), err, err2, worst_ratio)};
}

Verdict montgomery() {
  const double h = 0.1;
  // Calibration on the flat Landau problem.
  const auto flat_axis = SAxis::interval(-3.0, 3.0);
  const auto flat_grid = GridSpec::with_max_spacing(-3.0, 3.0, -3.0, 3.0, GridSpec::max_spacing(h, 1.0));
  const auto flat = assemble(h, FieldProfile::uniform(1.0, flat_axis, 3.0), BandMetric::flat(flat_axis, 3.0), flat_grid);
  SolverOptions so;
  so.shift = 0.9 * h;
  const auto ground = unscaled(flat, lowest_eigenpairs(flat, so).vectors[0]);
  const auto qf = quadratic_form(flat, ground);
  const double saturation = std::abs(qf.q_magnetic / qf.mass_b - 1.0);
  const double eps = 2.0 * montgomery_deficit(flat, ground);

  auto trials = random_bump_states(flat_grid, h, 100, 0x4d6f6e74ULL);
  trials.push_back(ground);
  auto report = montgomery_check(flat, trials, eps);
  bool pass = report.passes && saturation <= 5e-3;
  double margin = report.min_margin;

  // The same trial family on a curved band with a nonuniform field.
  const auto axis = SAxis::interval(-3.0, 3.0);
  const auto grid = GridSpec::with_max_spacing(-3.0, 3.0, -1.5, 1.5, GridSpec::max_spacing(h, 1.0));
  const auto curved = assemble(h, FieldProfile::parabolic(1.0, 2.0, axis, 1.5), BandMetric::circle(2.0, axis, 1.5), grid);
  const auto curved_report = montgomery_check(curved, random_bump_states(grid, h, 100, 0x43757276ULL), eps);
  pass = pass && curved_report.passes;
  margin = std::min(margin, curved_report.min_margin);
  return {pass, fmt("eps_disc=%.2e, min margin %.3e over %d states, ground state |q/mass_b - 1|=%.2e (<= 5e-3)",
                    eps, margin, report.checked + curved_report.checked, saturation)};
}

Verdict lambda2_verification() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> b0d(0.5, 2.0), beta2d(0.3, 3.0), ad(-1.0, 1.0);
  std::uniform_int_distribution<int> kd(0, 4);
  double worst_kernel = 0.0, worst_lambda = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double b0 = b0d(rng), beta2 = beta2d(rng), a1 = ad(rng), a2 = ad(rng);
    const int k = kd(rng);
    const auto q = build_order2_quasimode(k, b0, a1, a2, beta2);
    worst_kernel = std::max({worst_kernel, q.kernel_residual_1, q.kernel_residual_2});
    const double kk = k * k + k;
    const double want = beta2 * (2 * kk + 1) / (4 * b0) - kk * (a2 - a1 * a1 / 4);
    worst_lambda = std::max(worst_lambda, std::abs(q.lambda2 - want) / std::max(1.0, std::abs(want)));
  }
  return {worst_kernel <= 1e-12 && worst_lambda <= 1e-12,
          fmt("20 tuples: max kernel component %.2e, max lambda2 deviation %.2e (<= 1e-12)", worst_kernel, worst_lambda)};
}

double psi_closed(int m, double b0, double t) {
  const double x = std::sqrt(b0) * t;
  if (std::abs(x) > 40.0) return 0.0;
  const double norm = std::pow(2.0, m) * boost::math::factorial<double>(static_cast<unsigned>(m)) * std::sqrt(M_PI);
  return std::pow(b0, 0.25) * boost::math::hermite(static_cast<unsigned>(m), x) * std::exp(-0.5 * x * x) / std::sqrt(norm);
}

Verdict property_suites() {
  std::vector<std::string> failed;

  const auto axis = SAxis::interval(-2.0, 2.0);
  double geo = 0.0;
  for (const auto& m : {BandMetric::flat(axis, 1.0), BandMetric::circle(2.0, axis, 1.0), BandMetric::sphere_equator(axis, 1.0),
                        BandMetric::hyperbolic_horocycle(axis, 1.0)}) {
    const auto g = curve_coefficients(m);
    for (double s : {-1.5, 0.0, 0.7}) {
      const double R = gauss_curvature(m, s, 0.0);
      geo = std::max(geo, std::abs(g.a2(s) + R / 2 - g.kappa(s) * g.kappa(s)));
    }
  }
  if (geo >= 1e-6) failed.push_back("geometry");

  boost::math::quadrature::sinh_sinh<double> integrator;
  double mom = 0.0;
  for (double b0 : {0.7, 1.3})
    for (int k = 0; k <= 3; ++k)
      for (int p = 0; p <= 4; ++p)
        for (int q = -std::min(p, k); q <= p; ++q) {
          const double quad = integrator.integrate([&](double t) {
            const double w = psi_closed(k + q, b0, t) * psi_closed(k, b0, t);
            return w == 0.0 ? 0.0 : std::pow(t, p) * w;
          });
          mom = std::max(mom, std::abs(moment_table(k, b0, p, q) - quad));
        }
  if (mom > 1e-10) failed.push_back("moments");

  double landau = 0.0;
  const auto fl = landau_flat(0.1, 1.3, 3);
  const auto sp = landau_spherical(5.0, 3);
  const auto hy = landau_hyperbolic(0.05, 200.0);
  for (int k = 0; k <= 3; ++k) {
    landau = std::max(landau, std::abs(fl.levels[k].value - unified_landau_level(k, fl.h, fl.b0, fl.R)));
    landau = std::max(landau, std::abs(sp.rescaled[k] - unified_landau_level(k, sp.h, sp.b0, sp.R)));
    landau = std::max(landau, std::abs(hy.levels[k].value - unified_landau_level(k, hy.h, hy.b0, hy.R)));
  }
  if (landau > 1e-12) failed.push_back("landau");

  const double h = 0.1;
  const auto gaxis = SAxis::interval(-3.0, 3.0);
  const auto grid = GridSpec::with_max_spacing(-3.0, 3.0, -1.5, 1.5, GridSpec::max_spacing(h, 1.0));
  const GaugePotential A(FieldProfile::parabolic(1.0, 2.0, gaxis, 1.5), BandMetric::circle(2.0, gaxis, 1.5));
  const auto A2 = A.with_gradient([](double s) { return std::sin(2 * s) + 0.3 * s * s; },
                                  [](double s) { return 2 * std::cos(2 * s) + 0.6 * s; });
  SolverOptions so;
  so.m = 3;
  so.shift = 0.9 * h;
  const auto r0 = lowest_eigenpairs(assemble(h, A, grid), so);
  const auto r1 = lowest_eigenpairs(assemble(h, A2, grid), so);
  double gauge = 0.0;
  for (int i = 0; i < 3; ++i) gauge = std::max(gauge, std::abs(r1.values[i] - r0.values[i]) / r0.values[i]);
  if (gauge > 1e-10) failed.push_back("gauge");

  CsvTable t;
  t.metadata = {{"k", "v"}};
  t.columns = {"h", "lambda0", "residual"};
  t.rows = {{0.1, 0.1046128695123, 1.0 / 3.0}, {0.02, 2.0e-2 + 1e-17, 5e-300}};
  std::stringstream buf;
  write_csv(buf, t);
  const auto back = read_csv(buf);
  const bool csv = back.columns == t.columns && back.rows == t.rows && back.metadata == t.metadata;
  if (!csv) failed.push_back("csv");

  const std::vector<double> ev = {1, 2, 2.1, 3}, one = {1.5}, straddle = {0.5, 1.5};
  const auto g = count_gaps(ev, 0, 4, 0.5);
  const bool gaps = g.count == 2 && g.gaps[0] == std::make_pair(1.0, 2.0) && g.gaps[1] == std::make_pair(2.1, 3.0) &&
                    count_gaps(one, 0, 4, 0.1).count == 0 && count_gaps(straddle, 1, 2, 0.1).count == 0;
  if (!gaps) failed.push_back("gaps");

  std::string which;
  for (const auto& f : failed) which += " " + f;
  return {failed.empty(), fmt("geometry %.1e, moments %.1e, landau %.1e, gauge %.1e, csv %s, gaps %s%s%s", geo, mom,
                              landau, gauge, csv ? "ok" : "bad", gaps ? "ok" : "bad",
                              failed.empty() ? "" : "; failed:", which.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"flat Landau levels", flat_landau},
      {"two-term groundstate fit", two_term_groundstate},
      {"miniwell ladder", miniwell_ladder},
      {"quasimode residual exponent", quasimode_residual},
      {"model operator oracle", model_operator},
      {"Montgomery inequality", montgomery},
      {"lambda2 solvability", lambda2_verification},
      {"property suites", property_suites},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(n)) continue;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", n, criteria[i].first.c_str(),
                v.detail.c_str(), s);
    failures += v.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
