#include "magwell/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "magwell/csv.hpp"
#include "magwell/error.hpp"
#include "magwell/expression.hpp"

namespace magwell {

namespace {

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const ParseError&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != static_cast<int>(d)) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

struct Entry {
  const char* section;
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define NUM(sec, key, member)                                                        \
  Entry{sec, #key, [](const ExperimentConfig& c) { return format_double(c.member); }, \
        [](ExperimentConfig& c, const std::string& v) { c.member = to_double(sec "." #key, v); }}
#define INT(sec, key, member)                                                          \
  Entry{sec, #key, [](const ExperimentConfig& c) { return std::to_string(c.member); }, \
        [](ExperimentConfig& c, const std::string& v) { c.member = to_int(sec "." #key, v); }}
#define STR(sec, key, member)                                                \
  Entry{sec, #key, [](const ExperimentConfig& c) { return c.member; },       \
        [](ExperimentConfig& c, const std::string& v) { c.member = v; }}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      STR("field", name, field.name),
      NUM("field", b0, field.b0),
      NUM("field", beta2, field.beta2),
      NUM("field", mu0, field.mu0),
      NUM("field", mu2, field.mu2),
      STR("field", expression, field.expression),
      STR("field", path, field.path),
      STR("metric", name, metric.name),
      NUM("metric", rho, metric.rho),
      STR("metric", path, metric.path),
      NUM("metric", s_min, metric.s_min),
      NUM("metric", s_max, metric.s_max),
      NUM("metric", t_halfwidth, metric.t_halfwidth),
      INT("grid", ns, grid.Ns),
      INT("grid", nt, grid.Nt),
      NUM("grid", spacing_factor, grid.spacing_factor),
      INT("grid", stencil_order, grid.stencil_order),
      STR("sweep", scenario, sweep.scenario),
      Entry{"sweep", "h", [](const ExperimentConfig& c) { return join(c.sweep.h); },
            [](ExperimentConfig& c, const std::string& v) {
              try {
                c.sweep.h = v.empty() ? std::vector<double>{} : parse_number_list(v);
              } catch (const ParseError& e) {
                throw ConfigError(std::string("sweep.h: ") + e.what());
              }
            }},
      INT("sweep", k, sweep.k),
      INT("sweep", j, sweep.j),
      INT("sweep", m, sweep.m),
      Entry{"sweep", "quasimode",
            [](const ExperimentConfig& c) { return std::string(c.sweep.quasimode ? "true" : "false"); },
            [](ExperimentConfig& c, const std::string& v) { c.sweep.quasimode = to_bool("sweep.quasimode", v); }},
      STR("sweep", output, sweep.output),
      INT("sweep", workers, sweep.workers),
      NUM("solver", tol, solver.tol),
      NUM("solver", shift_factor, solver.shift_factor),
      Entry{"solver", "inner", [](const ExperimentConfig& c) { return to_string(c.solver.inner); },
            [](ExperimentConfig& c, const std::string& v) {
              try {
                c.solver.inner = parse_inner_solver(v);
              } catch (const Error& e) {
                throw ConfigError(std::string("solver.inner: ") + e.what());
              }
            }},
      INT("solver", max_basis, solver.max_basis),
      INT("solver", max_restarts, solver.max_restarts),
      Entry{"solver", "seed", [](const ExperimentConfig& c) { return std::to_string(c.solver.seed); },
            [](ExperimentConfig& c, const std::string& v) {
              try {
                std::size_t used = 0;
                c.solver.seed = std::stoull(v, &used, 0);
                if (used != v.size()) throw std::invalid_argument(v);
              } catch (const std::exception&) {
                throw ConfigError("solver.seed: expected an unsigned integer, got '" + v + "'");
              }
            }},
      NUM("envelope", beta, envelope.beta),
      INT("envelope", order, envelope.order),
      Entry{"envelope", "x",
            [](const ExperimentConfig& c) { return c.envelope.x ? format_double(*c.envelope.x) : std::string("auto"); },
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "auto" || v.empty()) c.envelope.x.reset();
              else c.envelope.x = to_double("envelope.x", v);
            }},
      NUM("envelope", cutoff_flat_fraction, envelope.cutoff_flat_fraction),
      NUM("envelope", transverse_support, envelope.transverse_support),
      NUM("envelope", max_mass_loss, envelope.max_mass_loss),
  };
  return entries;
}

#undef NUM
#undef INT
#undef STR

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(parse_double(item.substr(b, item.find_last_not_of(" \t") - b + 1)));
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (!(field.b0 > 0.0)) throw ConfigError("field.b0 must be positive");
  if (!(metric.s_max > metric.s_min)) throw ConfigError("metric needs s_min < s_max");
  if (!(metric.t_halfwidth > 0.0)) throw ConfigError("metric.t_halfwidth must be positive");
  for (double h : sweep.h)
    if (!(h > 0.0)) throw ConfigError("sweep.h values must be positive");
  if (!std::is_sorted(sweep.h.begin(), sweep.h.end(), std::greater<>()))
    throw ConfigError("sweep.h must be sorted descending");
  if (std::adjacent_find(sweep.h.begin(), sweep.h.end()) != sweep.h.end())
    throw ConfigError("sweep.h contains duplicates");
  if (sweep.k < 0 || sweep.j < 0) throw ConfigError("sweep.k and sweep.j must be >= 0");
  if (sweep.m < 1) throw ConfigError("sweep.m must be >= 1");
  if (sweep.workers < 1) throw ConfigError("sweep.workers must be >= 1");
  if (!(solver.tol > 0.0)) throw ConfigError("solver.tol must be positive");
  if (!(grid.spacing_factor > 0.0 && grid.spacing_factor <= 1.0))
    throw ConfigError("grid.spacing_factor must lie in (0, 1]");
  if (grid.stencil_order != 2 && grid.stencil_order != 4) throw ConfigError("grid.stencil_order must be 2 or 4");
  if ((grid.Ns > 0) != (grid.Nt > 0)) throw ConfigError("grid.ns and grid.nt must both be set or both be 0");
  if (!(envelope.beta > 0.0 && envelope.beta < 0.5)) throw ConfigError("envelope.beta must lie in (0, 1/2)");
  if (envelope.order < 0 || envelope.order > 2) throw ConfigError("envelope.order must be 0, 1 or 2");
  if (grid.Ns > 0) {
    const double b0 = make_field(*this).b0;
    for (double h : sweep.h) {
      try {
        make_grid(*this, h, b0).check_resolution(h, b0);
      } catch (const GridResolutionError& e) {
        throw ConfigError(e.what());
      }
    }
  }
}

ExperimentConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed INI: ") + e.what());
  }
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body) {
      const auto& reg = registry();
      const auto it = std::find_if(reg.begin(), reg.end(), [&](const Entry& e) {
        return section == e.section && key == e.key;
      });
      if (it == reg.end()) throw ConfigError("unknown setting [" + section + "] " + key);
      it->set(c, value.data());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config " + path.string());
  return parse_config(f);
}

std::string print_config(const ExperimentConfig& c) {
  std::ostringstream out;
  std::string section;
  for (const auto& e : registry()) {
    if (section != e.section) {
      if (!section.empty()) out << "\n";
      section = e.section;
      out << "[" << section << "]\n";
    }
    out << e.key << " = " << e.get(c) << "\n";
  }
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : print_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SAxis make_axis(const ExperimentConfig& c) { return SAxis::interval(c.metric.s_min, c.metric.s_max); }

FieldProfile make_field(const ExperimentConfig& c) {
  const SAxis axis = make_axis(c);
  const double T = c.metric.t_halfwidth;
  const auto& f = c.field;
  if (f.name == "uniform") return FieldProfile::uniform(f.b0, axis, T);
  if (f.name == "parabolic") return FieldProfile::parabolic(f.b0, f.beta2, axis, T);
  if (f.name == "miniwell") return FieldProfile::miniwell(f.b0, f.mu0, f.mu2, axis, T);
  if (f.name == "expression") {
    if (f.expression.empty()) throw ConfigError("field.expression is empty");
    auto e = std::make_shared<const Expression>(Expression::parse(f.expression));
    return FieldProfile::make("expression(" + f.expression + ")", [e](double s, double t) { return (*e)(s, t); },
                              axis, T);
  }
  if (f.name == "csv") {
    if (f.path.empty()) throw ConfigError("field.path is empty");
    auto g = std::make_shared<const SampledGrid>(SampledGrid::from_csv(f.path, "b"));
    return FieldProfile::make("csv:" + f.path, [g](double s, double t) { return (*g)(s, t); }, axis, T);
  }
  throw ConfigError("unknown field '" + f.name + "'");
}

BandMetric make_metric(const ExperimentConfig& c) {
  const SAxis axis = make_axis(c);
  const double T = c.metric.t_halfwidth;
  const auto& m = c.metric;
  if (m.name == "flat") return BandMetric::flat(axis, T);
  if (m.name == "circle") return BandMetric::circle(m.rho, axis, T);
  if (m.name == "sphere-equator") return BandMetric::sphere_equator(axis, T);
  if (m.name == "hyperbolic-horocycle") return BandMetric::hyperbolic_horocycle(axis, T);
  if (m.name == "csv") {
    if (m.path.empty()) throw ConfigError("metric.path is empty");
    return BandMetric::sampled(m.path, axis, T);
  }
  throw ConfigError("unknown metric '" + m.name + "'");
}

GridSpec make_grid(const ExperimentConfig& c, double h, double b0) {
  const double T = c.metric.t_halfwidth;
  if (c.grid.Ns > 0) return GridSpec::box(c.metric.s_min, c.metric.s_max, -T, T, c.grid.Ns, c.grid.Nt);
  return GridSpec::with_max_spacing(c.metric.s_min, c.metric.s_max, -T, T,
                                    c.grid.spacing_factor * GridSpec::max_spacing(h, b0));
}

AssemblyOptions make_assembly_options(const ExperimentConfig& c) {
  AssemblyOptions o;
  o.stencil_order = c.grid.stencil_order;
  return o;
}

SolverOptions make_solver_options(const ExperimentConfig& c, double h, double b0) {
  SolverOptions o;
  o.m = c.sweep.m;
  o.tol = c.solver.tol;
  o.shift = c.solver.shift_factor * h * b0;
  o.inner = c.solver.inner;
  o.max_basis = c.solver.max_basis;
  o.max_restarts = c.solver.max_restarts;
  o.seed = c.solver.seed;
  return o;
}

TrialOptions make_trial_options(const ExperimentConfig& c) {
  TrialOptions t;
  t.order = c.envelope.order;
  t.beta = c.envelope.beta;
  t.cutoff_flat_fraction = c.envelope.cutoff_flat_fraction;
  t.transverse_support = c.envelope.transverse_support;
  t.max_mass_loss = c.envelope.max_mass_loss;
  return t;
}

}  // namespace magwell
