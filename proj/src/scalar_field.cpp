#include "magwell/scalar_field.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "magwell/csv.hpp"
#include "magwell/error.hpp"

namespace magwell {

namespace {

void check_regular(const std::vector<double>& nodes, const char* axis) {
  if (nodes.size() < 4) throw ParseError(std::string("sampled grid needs >= 4 nodes along ") + axis);
  const double d = nodes[1] - nodes[0];
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double di = nodes[i] - nodes[i - 1];
    if (!(di > 0) || std::abs(di - d) > 1e-9 * std::max(1.0, std::abs(d)))
      throw ParseError(std::string("sampled grid is not regular along ") + axis);
  }
}

// Catmull-Rom weights for fractional offset u in [0,1).
inline void cubic_weights(double u, double w[4]) {
  const double u2 = u * u, u3 = u2 * u;
  w[0] = -0.5 * u3 + u2 - 0.5 * u;
  w[1] = 1.5 * u3 - 2.5 * u2 + 1.0;
  w[2] = -1.5 * u3 + 2.0 * u2 + 0.5 * u;
  w[3] = 0.5 * u3 - 0.5 * u2;
}

}  // namespace

SampledGrid::SampledGrid(std::vector<double> s_nodes, std::vector<double> t_nodes,
                         std::vector<double> values)
    : s_(std::move(s_nodes)), t_(std::move(t_nodes)), v_(std::move(values)) {
  check_regular(s_, "s");
  check_regular(t_, "t");
  if (v_.size() != s_.size() * t_.size()) throw ParseError("sampled grid has wrong number of values");
  ds_ = s_[1] - s_[0];
  dt_ = t_[1] - t_[0];
}

SampledGrid SampledGrid::from_csv(const std::filesystem::path& path,
                                  const std::string& value_column) {
  const CsvTable table = read_csv(path);
  const auto is = table.column_index("s");
  const auto it = table.column_index("t");
  const auto iv = table.column_index(value_column);
  std::map<double, std::map<double, double>> by_s;
  for (const auto& row : table.rows) by_s[row[is]][row[it]] = row[iv];
  std::vector<double> s_nodes, t_nodes, values;
  for (const auto& [s, col] : by_s) {
    s_nodes.push_back(s);
    if (t_nodes.empty()) {
      for (const auto& [t, v] : col) t_nodes.push_back(t);
    } else if (col.size() != t_nodes.size()) {
      throw ParseError(path.string() + ": incomplete grid at s=" + std::to_string(s));
    }
    for (const auto& [t, v] : col) values.push_back(v);
  }
  return SampledGrid(std::move(s_nodes), std::move(t_nodes), std::move(values));
}

double SampledGrid::node(long is, long it) const {
  const long ns = static_cast<long>(s_.size()), nt = static_cast<long>(t_.size());
  // Linear extrapolation for the ghost ring keeps the stencil valid at the edges.
  if (is < 0) return 2.0 * node(0, it) - node(1, it);
  if (is >= ns) return 2.0 * node(ns - 1, it) - node(ns - 2, it);
  if (it < 0) return 2.0 * node(is, 0) - node(is, 1);
  if (it >= nt) return 2.0 * node(is, nt - 1) - node(is, nt - 2);
  return v_[static_cast<std::size_t>(is * nt + it)];
}

double SampledGrid::operator()(double s, double t) const {
  const double xs = std::clamp((s - s_.front()) / ds_, 0.0, static_cast<double>(s_.size() - 1));
  const double xt = std::clamp((t - t_.front()) / dt_, 0.0, static_cast<double>(t_.size() - 1));
  const long is = std::min(static_cast<long>(xs), static_cast<long>(s_.size()) - 2);
  const long it = std::min(static_cast<long>(xt), static_cast<long>(t_.size()) - 2);
  double ws[4], wt[4];
  cubic_weights(xs - static_cast<double>(is), ws);
  cubic_weights(xt - static_cast<double>(it), wt);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double row = 0.0;
    for (int b = 0; b < 4; ++b) row += wt[b] * node(is - 1 + a, it - 1 + b);
    acc += ws[a] * row;
  }
  return acc;
}

}  // namespace magwell
