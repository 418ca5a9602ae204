#include "magwell/sparse.hpp"

#include <algorithm>
#include <thread>

#include "magwell/error.hpp"

namespace magwell {

void HermitianCsr::matvec(std::span<const cdouble> x, std::span<cdouble> y, int workers) const {
  if (static_cast<std::int64_t>(x.size()) != n || static_cast<std::int64_t>(y.size()) != n)
    throw ShapeError("matvec size mismatch");
  const auto rows = [&](std::int64_t r0, std::int64_t r1) {
    for (std::int64_t r = r0; r < r1; ++r) {
      cdouble acc = 0.0;
      for (std::int64_t p = row_ptr[static_cast<std::size_t>(r)];
           p < row_ptr[static_cast<std::size_t>(r) + 1]; ++p)
        acc += val[static_cast<std::size_t>(p)] * x[static_cast<std::size_t>(col[static_cast<std::size_t>(p)])];
      y[static_cast<std::size_t>(r)] = acc;
    }
  };
  if (workers <= 1 || n < 200000) {
    rows(0, n);
    return;
  }
  std::vector<std::jthread> pool;
  const std::int64_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t r0 = w * chunk, r1 = std::min(n, r0 + chunk);
    if (r0 < r1) pool.emplace_back(rows, r0, r1);
  }
}

bool HermitianCsr::is_exactly_hermitian() const {
  for (std::int64_t r = 0; r < n; ++r) {
    for (std::int64_t p = row_ptr[static_cast<std::size_t>(r)]; p < row_ptr[static_cast<std::size_t>(r) + 1]; ++p) {
      const std::int64_t c = col[static_cast<std::size_t>(p)];
      const cdouble v = val[static_cast<std::size_t>(p)];
      const auto b = col.begin() + row_ptr[static_cast<std::size_t>(c)];
      const auto e = col.begin() + row_ptr[static_cast<std::size_t>(c) + 1];
      const auto it = std::lower_bound(b, e, r);
      if (it == e || *it != r) return false;
      const cdouble w = val[static_cast<std::size_t>(it - col.begin())];
      if (w.real() != v.real() || w.imag() != -v.imag()) return false;
    }
  }
  return true;
}

Eigen::SparseMatrix<cdouble> HermitianCsr::to_eigen() const {
  std::vector<Eigen::Triplet<cdouble>> t;
  t.reserve(val.size());
  for (std::int64_t r = 0; r < n; ++r)
    for (std::int64_t p = row_ptr[static_cast<std::size_t>(r)]; p < row_ptr[static_cast<std::size_t>(r) + 1]; ++p)
      t.emplace_back(static_cast<int>(r), static_cast<int>(col[static_cast<std::size_t>(p)]),
                     val[static_cast<std::size_t>(p)]);
  Eigen::SparseMatrix<cdouble> m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

HermitianCsr HermitianCsr::from_triplets(std::int64_t n, std::vector<Eigen::Triplet<cdouble>> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
  });
  HermitianCsr m;
  m.n = n;
  m.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.row() < 0 || e.row() >= n || e.col() < 0 || e.col() >= n)
      throw ShapeError("triplet index out of range");
    if (!m.col.empty() && i > 0 && entries[i - 1].row() == e.row() && entries[i - 1].col() == e.col()) {
      m.val.back() += e.value();
      continue;
    }
    m.col.push_back(e.col());
    m.val.push_back(e.value());
    ++m.row_ptr[static_cast<std::size_t>(e.row()) + 1];
  }
  for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return m;
}

HermitianCsr HermitianCsr::diagonal(std::span<const double> d) {
  std::vector<Eigen::Triplet<cdouble>> t;
  for (std::size_t i = 0; i < d.size(); ++i)
    t.emplace_back(static_cast<int>(i), static_cast<int>(i), cdouble(d[i], 0.0));
  return from_triplets(static_cast<std::int64_t>(d.size()), std::move(t));
}

}  // namespace magwell
