#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace magwell {

/// A real field on band coordinates (s, t).
using ScalarField = std::function<double(double s, double t)>;

/// Samples on a regular tensor grid, interpolated by cubic convolution
/// (Catmull-Rom) in each direction. Exact for quadratics, C1 across cells.
class SampledGrid {
 public:
  /// `values` is row-major with s as the slow index: values[is * nt + it].
  SampledGrid(std::vector<double> s_nodes, std::vector<double> t_nodes,
              std::vector<double> values);

  /// Reads columns (s, t, <value_column>). Rows may come in any order but must
  /// fill a complete regular grid.
  static SampledGrid from_csv(const std::filesystem::path& path,
                              const std::string& value_column);

  double operator()(double s, double t) const;

  double s_min() const { return s_.front(); }
  double s_max() const { return s_.back(); }
  double t_min() const { return t_.front(); }
  double t_max() const { return t_.back(); }

 private:
  double node(long is, long it) const;

  std::vector<double> s_, t_, v_;
  double ds_, dt_;
};

}  // namespace magwell
