#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

namespace magwell {

using cdouble = std::complex<double>;

/// Square complex matrix in compressed row layout, full (both triangles)
/// storage, column indices ascending within each row.
struct HermitianCsr {
  std::int64_t n = 0;
  std::vector<std::int64_t> row_ptr;  // size n + 1
  std::vector<std::int64_t> col;
  std::vector<cdouble> val;

  std::int64_t nnz() const { return static_cast<std::int64_t>(val.size()); }

  /// y = A x. Rows are split across `workers` threads when the matrix is large.
  void matvec(std::span<const cdouble> x, std::span<cdouble> y, int workers = 1) const;

  /// Entrywise A == A^H, compared bit for bit.
  bool is_exactly_hermitian() const;

  Eigen::SparseMatrix<cdouble> to_eigen() const;
  static HermitianCsr from_triplets(std::int64_t n, std::vector<Eigen::Triplet<cdouble>> entries);
  static HermitianCsr diagonal(std::span<const double> d);
};

}  // namespace magwell
