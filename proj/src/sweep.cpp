#include "magwell/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "magwell/discrete_operator.hpp"
#include "magwell/eigensolver.hpp"
#include "magwell/error.hpp"
#include "magwell/oscillator.hpp"
#include "magwell/trial_state.hpp"

namespace magwell {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string hash_text(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> table_row(const SweepRecord& r, int m) {
  std::vector<double> row{r.h};
  for (int i = 0; i < m; ++i)
    row.push_back(r.ok() && i < static_cast<int>(r.eigenvalues.size()) ? r.eigenvalues[static_cast<std::size_t>(i)]
                                                                        : kNaN);
  row.push_back(r.residual.value_or(kNaN));
  row.push_back(r.ok() ? r.iterations : -1);
  row.push_back(r.seconds);
  row.push_back(r.lambda_qm.value_or(kNaN));
  double worst = r.ok() ? 0.0 : kNaN;
  for (double v : r.solver_residuals) worst = std::max(worst, v);
  row.push_back(worst);
  return row;
}

}  // namespace

int resolve_workers(int fallback) {
  if (const char* env = std::getenv("MAGWELL_WORKERS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096)
      throw ConfigError(std::string("MAGWELL_WORKERS must be a positive integer, got '") + env + "'");
    return static_cast<int>(v);
  }
  return std::max(fallback, 1);
}

SweepRecord solve_one(const ExperimentConfig& cfg, double h) {
  SweepRecord rec;
  rec.h = h;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const FieldProfile field = make_field(cfg);
    const BandMetric metric = make_metric(cfg);
    const GridSpec grid = make_grid(cfg, h, field.b0);
    const DiscreteOperator op = assemble(h, field, metric, grid, make_assembly_options(cfg));
    const EigenResult er = lowest_eigenpairs(op, make_solver_options(cfg, h, field.b0));
    rec.eigenvalues = er.values;
    rec.solver_residuals = er.residuals;
    rec.iterations = er.iterations;
    if (cfg.sweep.quasimode) {
      const CurveGeometry geo = curve_coefficients(metric);
      const int ks[] = {cfg.sweep.k};
      const WellData well = extract_well(field, geo, ks);
      const BandWell& band = well.band(cfg.sweep.k);
      const double x = cfg.envelope.x ? *cfg.envelope.x
                       : band.tie     ? 0.5 * (cfg.metric.s_min + cfg.metric.s_max)
                                      : band.x0;
      const Order2Quasimode q = build_order2_quasimode(cfg.sweep.k, field.b0, geo.a1(x), geo.a2(x), well.beta2(x));
      QuasimodeBundle bundle = assemble_trial_state(q, h, x, grid, metric, make_trial_options(cfg));
      rec.residual = residual_norm(op, bundle);
      rec.lambda_qm = bundle.lambda;
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.eigenvalues.clear();
    rec.solver_residuals.clear();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

CsvTable sweep_table(const ExperimentConfig& cfg, const std::vector<SweepRecord>& records) {
  CsvTable t;
  t.metadata = {{"config_hash", hash_text(config_hash(cfg))},
                {"scenario", cfg.sweep.scenario},
                {"k", std::to_string(cfg.sweep.k)}};
  t.columns.push_back("h");
  for (int i = 0; i < cfg.sweep.m; ++i) t.columns.push_back("lambda" + std::to_string(i));
  for (const char* c : {"residual", "iters", "seconds", "lambda_qm", "solver_residual"}) t.columns.emplace_back(c);
  for (const auto& r : records) t.rows.push_back(table_row(r, cfg.sweep.m));
  return t;
}

std::vector<SweepRecord> records_from_table(const CsvTable& t) {
  std::vector<std::size_t> lam;
  for (int i = 0; t.has_column("lambda" + std::to_string(i)); ++i)
    lam.push_back(t.column_index("lambda" + std::to_string(i)));
  const auto ih = t.column_index("h");
  std::vector<SweepRecord> out;
  for (const auto& row : t.rows) {
    SweepRecord r;
    r.h = row.at(ih);
    for (auto c : lam) r.eigenvalues.push_back(row.at(c));
    const auto opt = [&](const char* name) -> std::optional<double> {
      if (!t.has_column(name)) return std::nullopt;
      const double v = row.at(t.column_index(name));
      return std::isnan(v) ? std::nullopt : std::optional<double>(v);
    };
    r.residual = opt("residual");
    r.lambda_qm = opt("lambda_qm");
    if (auto v = opt("iters")) r.iterations = static_cast<int>(*v);
    if (auto v = opt("seconds")) r.seconds = *v;
    if (auto v = opt("solver_residual")) r.solver_residuals.assign(r.eigenvalues.size(), *v);
    if (r.eigenvalues.empty() || std::isnan(r.eigenvalues.front())) {
      r.error = "failed in a previous run";
      r.eigenvalues.clear();
    }
    out.push_back(std::move(r));
  }
  return out;
}

SweepOutcome run_sweep(const ExperimentConfig& cfg, const SweepRunOptions& opt) {
  cfg.validate();
  SweepOutcome out;
  const auto& hs = cfg.sweep.h;
  std::vector<std::optional<SweepRecord>> slots(hs.size());

  std::vector<SweepRecord> previous;
  if (!opt.output.empty() && opt.resume && std::filesystem::exists(opt.output)) {
    try {
      const CsvTable old = read_csv(std::filesystem::path(opt.output));
      const std::string* hash = old.meta("config_hash");
      if (hash && *hash == hash_text(config_hash(cfg))) previous = records_from_table(old);
    } catch (const Error&) {
      previous.clear();  // unreadable file: start over
    }
  }
  for (const auto& r : previous) {
    if (!r.ok()) continue;
    for (std::size_t i = 0; i < hs.size(); ++i)
      if (hs[i] == r.h && !slots[i]) {
        slots[i] = r;
        ++out.resumed;
      }
  }

  std::ofstream file;
  if (!opt.output.empty()) {
    file.open(opt.output, std::ios::trunc);
    if (!file) throw IoError("cannot write " + opt.output);
    std::vector<SweepRecord> kept;
    for (const auto& s : slots)
      if (s) kept.push_back(*s);
    write_csv(file, sweep_table(cfg, kept));
    file.flush();
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < hs.size(); ++i)
    if (!slots[i]) pending.push_back(i);

  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  const int workers = std::min<int>(resolve_workers(opt.workers > 0 ? opt.workers : cfg.sweep.workers),
                                    std::max<int>(1, static_cast<int>(pending.size())));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers && !pending.empty(); ++w)
      pool.emplace_back([&] {
        for (std::size_t p; (p = next.fetch_add(1)) < pending.size();) {
          SweepRecord r = solve_one(cfg, hs[pending[p]]);
          {
            std::lock_guard lock(mu);
            slots[pending[p]] = std::move(r);
          }
          cv.notify_all();
        }
      });
    // Aggregator: emits rows in configuration order as they complete.
    for (std::size_t idx : pending) {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return slots[idx].has_value(); });
      const SweepRecord rec = *slots[idx];
      lock.unlock();
      ++out.solved;
      if (file.is_open()) {
        if (rec.ok()) write_csv_row(file, table_row(rec, cfg.sweep.m));
        else file << "# error h=" << format_double(rec.h) << ": " << rec.error << "\n";
        file.flush();
      }
      if (opt.on_record) opt.on_record(rec);
    }
  }

  for (auto& s : slots) out.records.push_back(std::move(*s));
  for (const auto& r : out.records) {
    const std::string at = " at h = " + format_double(r.h);
    if (!r.ok()) {
      ++out.failed;
      out.check_failures.push_back("solve failed" + at + ": " + r.error);
      continue;
    }
    for (double res : r.solver_residuals)
      if (!(res <= cfg.solver.tol)) out.check_failures.push_back("solver residual above tolerance" + at);
    if (cfg.sweep.k == 0 && r.residual && r.lambda_qm && !r.eigenvalues.empty() &&
        !(r.eigenvalues.front() <= *r.lambda_qm + *r.residual))
      out.check_failures.push_back("lambda0 exceeds the quasimode bound" + at);
  }
  out.checks_pass = out.check_failures.empty();
  return out;
}

}  // namespace magwell
