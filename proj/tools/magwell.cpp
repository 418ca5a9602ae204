#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "magwell/config.hpp"
#include "magwell/csv.hpp"
#include "magwell/discrete_operator.hpp"
#include "magwell/error.hpp"
#include "magwell/field.hpp"
#include "magwell/fit.hpp"
#include "magwell/gaps.hpp"
#include "magwell/model_spectra.hpp"
#include "magwell/oscillator.hpp"
#include "magwell/sweep.hpp"
#include "magwell/trial_state.hpp"

using json = nlohmann::ordered_json;
using namespace magwell;

namespace {

json to_json(const AsymptoticEigenvalue& a) {
  json terms = json::object();
  for (const auto& [p, c] : a.terms) terms[format_double(p)] = c;
  return {{"h", a.h}, {"value", a.value}, {"terms", terms}};
}

json to_json(const FitReport& f) {
  return {{"powers", f.powers}, {"coefficients", f.coefficients}, {"rss", f.rss},
          {"samples", f.samples}, {"condition", f.condition}};
}

std::pair<double, double> parse_pair(const std::string& text, const std::string& what) {
  const auto v = parse_number_list(text);
  if (v.size() != 2) throw ConfigError(what + " expects two comma-separated numbers, got '" + text + "'");
  return {v[0], v[1]};
}

struct WellPoint {
  double b0, beta2, R, a1, a2, x;
  BandWell band;
};

WellPoint well_point(const ExperimentConfig& cfg, int k) {
  const FieldProfile field = make_field(cfg);
  const BandMetric metric = make_metric(cfg);
  const CurveGeometry geo = curve_coefficients(metric);
  const int ks[] = {k};
  const WellData well = extract_well(field, geo, ks);
  const BandWell& band = well.band(k);
  const double x = cfg.envelope.x ? *cfg.envelope.x
                   : band.tie     ? 0.5 * (cfg.metric.s_min + cfg.metric.s_max)
                                  : band.x0;
  return {field.b0, well.beta2(x), geo.R(x), geo.a1(x), geo.a2(x), x, band};
}

// Values of one sweep-CSV quantity: a named column, or lambda_j - lambda_i.
std::vector<Sample> samples_from_csv(const CsvTable& t, const std::string& column, const std::string& gap) {
  const auto h = t.column("h");
  std::vector<double> v;
  if (!gap.empty()) {
    const auto [i, j] = parse_pair(gap, "--gap");
    const auto a = t.column("lambda" + std::to_string(static_cast<int>(i)));
    const auto b = t.column("lambda" + std::to_string(static_cast<int>(j)));
    for (std::size_t r = 0; r < a.size(); ++r) v.push_back(b[r] - a[r]);
  } else {
    v = t.column(column);
  }
  std::vector<Sample> out;
  for (std::size_t r = 0; r < h.size(); ++r)
    if (std::isfinite(v[r])) out.push_back({h[r], v[r]});
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Semiclassical eigenvalue asymptotics for magnetic wells along curves"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(0, 1);
  bool print_defaults = false;
  app.add_flag("--print-config", print_defaults, "Print the default configuration and exit");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run an h-sweep of eigenvalue solves");
  std::string sweep_cfg, sweep_out;
  bool no_resume = false;
  int sweep_workers = 0;
  sweep->add_option("config", sweep_cfg, "INI configuration")->required()->check(CLI::ExistingFile);
  sweep->add_option("--output,-o", sweep_out, "CSV output (default: sweep.output)");
  sweep->add_flag("--no-resume", no_resume, "Ignore completed rows of an existing output file");
  sweep->add_option("--workers", sweep_workers, "Concurrent h values (MAGWELL_WORKERS overrides)");

  // asymptote
  auto* asym = app.add_subcommand("asymptote", "Evaluate an asymptotic eigenvalue formula");
  std::string kind = "band", asym_cfg, h_list = "0.1";
  int ak = 0, aj = 0;
  double ab0 = 1.0, abeta2 = 2.0, aR = 0.0, amu0 = 2.0, amu2 = 2.0;
  std::optional<double> aV, adelta;
  asym->add_option("--kind", kind, "band | groundstate | miniwell | model-p0")
      ->check(CLI::IsMember({"band", "groundstate", "miniwell", "model-p0"}));
  asym->add_option("--config", asym_cfg, "Take b0, beta2, R, V_k, delta_k from the well of this config");
  asym->add_option("--h", h_list, "Comma-separated h values");
  asym->add_option("--k", ak, "Landau band index");
  asym->add_option("--j", aj, "Miniwell level index");
  asym->add_option("--b0", ab0, "Minimum field");
  asym->add_option("--beta2", abeta2, "beta2 at the well point");
  asym->add_option("--R", aR, "Scalar curvature at the well point");
  asym->add_option("--mu0", amu0, "inf beta2");
  asym->add_option("--mu2", amu2, "beta2'' at the miniwell");
  asym->add_option("--V", aV, "V_k(x0) (default from mu0 at k = 0)");
  asym->add_option("--delta", adelta, "V_k''(x0) (default mu2 / (4 b0) at k = 0)");

  // quasimode
  auto* qm = app.add_subcommand("quasimode", "Build the order-2 quasimode and measure its residual");
  std::string qm_cfg, qm_dump;
  std::optional<double> qm_h;
  qm->add_option("config", qm_cfg, "INI configuration")->required()->check(CLI::ExistingFile);
  qm->add_option("--h", qm_h, "Single h instead of the sweep list");
  qm->add_option("--dump", qm_dump, "Write |Phi| on the grid (columns s, t, abs) for the first h");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a sweep CSV column against powers of h");
  std::string fit_csv, fit_powers_text = "1,2", fit_column = "lambda0", fit_gap;
  bool fit_exponent = false;
  fit->add_option("csv", fit_csv, "Sweep CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--powers", fit_powers_text, "Comma-separated powers, e.g. 1,2,2.5");
  fit->add_option("--column", fit_column, "Column to fit");
  fit->add_option("--gap", fit_gap, "Fit lambda_j - lambda_i for i,j instead of a column");
  fit->add_flag("--exponent", fit_exponent, "Also report the log-log slope");

  // gaps
  auto* gaps = app.add_subcommand("gaps", "Count spectral gaps in an interval");
  std::string gaps_csv, interval;
  std::optional<double> min_gap;
  double gap_tol = 1e-8;
  gaps->add_option("csv", gaps_csv, "CSV with a lambda column or sweep rows lambda0..")
      ->required()
      ->check(CLI::ExistingFile);
  gaps->add_option("--interval", interval, "a,b")->required();
  gaps->add_option("--min-gap", min_gap, "Smallest gap counted (default 3 tol max|lambda|)");
  gaps->add_option("--tol", gap_tol, "Solver tolerance behind the default min gap");

  // landau-check
  auto* landau = app.add_subcommand("landau-check", "Check the unified Landau identity in three geometries");
  int kmax = 3;
  double lh = 0.1, lb = 10.0, ln = 4.0;
  landau->add_option("--kmax", kmax, "Highest level index");
  landau->add_option("--h", lh, "h for the flat and hyperbolic cases");
  landau->add_option("--b", lb, "Field for the flat and hyperbolic cases");
  landau->add_option("--n", ln, "Sphere flux 2s");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (print_defaults) {
    std::cout << print_config(ExperimentConfig{});
    return 0;
  }

  if (*sweep) {
    const ExperimentConfig cfg = load_config(sweep_cfg);
    SweepRunOptions o;
    o.output = sweep_out.empty() ? cfg.sweep.output : sweep_out;
    o.resume = !no_resume;
    o.workers = sweep_workers;
    o.on_record = [](const SweepRecord& r) {
      std::cerr << "h = " << format_double(r.h);
      if (r.ok()) std::cerr << "  lambda0 = " << format_double(r.eigenvalues.front()) << "  (" << r.seconds << " s)\n";
      else std::cerr << "  failed: " << r.error << "\n";
    };
    const SweepOutcome out = run_sweep(cfg, o);
    json j = {{"output", o.output}, {"solved", out.solved}, {"resumed", out.resumed},
              {"failed", out.failed}, {"checks_pass", out.checks_pass}, {"failures", out.check_failures}};
    std::cout << j.dump(2) << "\n";
    return out.checks_pass ? 0 : 1;
  }

  if (*asym) {
    json results = json::array();
    std::optional<WellPoint> wp;
    if (!asym_cfg.empty()) {
      wp = well_point(load_config(asym_cfg), ak);
      ab0 = wp->b0;
      abeta2 = wp->beta2;
      aR = wp->R;
      aV = wp->band.V_min;
      adelta = wp->band.delta;
      amu0 = wp->beta2;
    }
    for (double h : parse_number_list(h_list)) {
      if (kind == "band") {
        results.push_back(to_json(lambda_band(h, ak, ab0, abeta2, aR)));
      } else if (kind == "groundstate") {
        results.push_back(to_json(groundstate_two_term(h, ab0, amu0)));
      } else if (kind == "miniwell") {
        const double V = aV.value_or(amu0 / (4 * ab0));
        const double d = adelta.value_or(amu2 / (4 * ab0));
        results.push_back(to_json(miniwell_eigenvalue(h, aj, ak, ab0, abeta2, V, d)));
      } else {
        const auto m = model_p0_groundstate(h, ab0, amu0);
        results.push_back({{"h", h}, {"exact", m.exact}, {"leading", m.leading}});
      }
    }
    std::cout << json{{"kind", kind}, {"results", results}}.dump(2) << "\n";
    return 0;
  }

  if (*qm) {
    const ExperimentConfig cfg = load_config(qm_cfg);
    const FieldProfile field = make_field(cfg);
    const BandMetric metric = make_metric(cfg);
    const WellPoint wp = well_point(cfg, cfg.sweep.k);
    const Order2Quasimode q = build_order2_quasimode(cfg.sweep.k, wp.b0, wp.a1, wp.a2, wp.beta2);
    json out = json::array();
    const std::vector<double> hs = qm_h ? std::vector<double>{*qm_h} : cfg.sweep.h;
    for (double h : hs) {
      const GridSpec grid = make_grid(cfg, h, field.b0);
      const DiscreteOperator op = assemble(h, field, metric, grid, make_assembly_options(cfg));
      QuasimodeBundle b = assemble_trial_state(q, h, wp.x, grid, metric, make_trial_options(cfg));
      const double r = residual_norm(op, b);
      out.push_back({{"h", h}, {"k", b.k}, {"beta", b.beta}, {"x", b.x}, {"width", b.width},
                     {"lambda0", b.lambda0}, {"lambda2", b.lambda2}, {"lambda", b.lambda},
                     {"mass_loss", b.mass_loss}, {"residual", r}, {"kernel_residual", q.kernel_residual_2},
                     {"Ns", grid.Ns}, {"Nt", grid.Nt}});
      if (!qm_dump.empty() && h == hs.front()) {
        CsvTable t;
        t.columns = {"s", "t", "abs"};
        for (int i = 0; i < grid.Ns; ++i)
          for (int jj = 0; jj < grid.Nt; ++jj)
            t.rows.push_back({grid.s(i), grid.t(jj), std::abs(b.samples[static_cast<std::size_t>(grid.index(i, jj))])});
        write_csv(std::filesystem::path(qm_dump), t);
      }
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (*fit) {
    const CsvTable t = read_csv(std::filesystem::path(fit_csv));
    const auto data = samples_from_csv(t, fit_column, fit_gap);
    const auto powers = parse_powers(fit_powers_text);
    json j = {{"source", fit_csv}, {"quantity", fit_gap.empty() ? fit_column : "gap " + fit_gap}};
    j["fit"] = to_json(fit_powers(data, powers));
    if (fit_exponent) {
      const auto e = exponent_fit(data);
      j["exponent"] = {{"slope", e.slope}, {"stderr", e.stderr_slope}, {"prefactor", e.prefactor()}};
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (*gaps) {
    const auto [lo, hi] = parse_pair(interval, "--interval");
    const CsvTable t = read_csv(std::filesystem::path(gaps_csv));
    std::vector<std::pair<std::optional<double>, std::vector<double>>> spectra;
    if (t.has_column("lambda")) {
      spectra.push_back({std::nullopt, t.column("lambda")});
    } else {
      for (const auto& r : records_from_table(t))
        if (r.ok()) spectra.push_back({r.h, r.eigenvalues});
    }
    json out = json::array();
    for (auto& [h, ev] : spectra) {
      std::sort(ev.begin(), ev.end());
      const double d = min_gap.value_or(default_min_gap(ev, gap_tol));
      const GapReport g = count_gaps(ev, lo, hi, d);
      json list = json::array();
      for (const auto& [a, b] : g.gaps) list.push_back({a, b});
      json e = {{"count", g.count}, {"min_gap", g.min_gap}, {"gaps", list}};
      if (h) e["h"] = *h;
      out.push_back(e);
    }
    std::cout << json{{"interval", {lo, hi}}, {"spectra", out}}.dump(2) << "\n";
    return 0;
  }

  if (*landau) {
    bool ok = true;
    json out = json::array();
    const auto check = [&](const LandauSpectrum& s) {
      json levels = json::array();
      for (std::size_t i = 0; i < s.levels.size(); ++i) {
        const auto& L = s.levels[i];
        const double value = s.geometry == LandauGeometry::kSpherical ? s.rescaled[i] : L.value;
        const double unified = unified_landau_level(L.k, s.h, s.b0, s.R);
        const bool match = std::abs(value - unified) <= 1e-12 * std::max(1.0, std::abs(unified));
        ok = ok && match;
        levels.push_back({{"k", L.k}, {"level", value}, {"unified", unified}, {"multiplicity", L.multiplicity},
                          {"match", match}});
      }
      json e = {{"geometry", to_string(s.geometry)}, {"h", s.h}, {"b0", s.b0}, {"R", s.R}, {"levels", levels}};
      if (s.ac_threshold) e["ac_threshold"] = *s.ac_threshold;
      out.push_back(e);
    };
    check(landau_flat(lh, lb, kmax));
    check(landau_hyperbolic(lh, lb));
    check(landau_spherical(ln, kmax));
    std::cout << json{{"identity_holds", ok}, {"geometries", out}}.dump(2) << "\n";
    return ok ? 0 : 1;
  }

  std::cout << app.help();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const magwell::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
