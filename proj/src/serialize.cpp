#include "magwell/serialize.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <boost/endian/conversion.hpp>

#include "magwell/error.hpp"

namespace magwell {

namespace {

constexpr std::array<char, 4> kMagic = {'M', 'G', 'W', '1'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <class T>
  void put(T v) {
    if constexpr (std::is_same_v<T, double>) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      put(bits);
    } else {
      boost::endian::native_to_little_inplace(v);
      out_.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
  void put(cdouble v) {
    put(v.real());
    put(v.imag());
  }
  void put(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  template <class T>
  void put_array(const std::vector<T>& v) {
    put(static_cast<std::uint64_t>(v.size()));
    for (const auto& x : v) put(x);
  }
  void check() {
    if (!out_) throw IoError("write failed");
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <class T>
  T get() {
    if constexpr (std::is_same_v<T, double>) {
      const auto bits = get<std::uint64_t>();
      double v;
      std::memcpy(&v, &bits, sizeof v);
      return v;
    } else if constexpr (std::is_same_v<T, cdouble>) {
      const double re = get<double>();
      return {re, get<double>()};
    } else if constexpr (std::is_same_v<T, std::string>) {
      const auto n = get<std::uint32_t>();
      if (n > (1u << 20)) throw ParseError("MGW1: string length " + std::to_string(n) + " is implausible");
      std::string s(n, '\0');
      raw(s.data(), n);
      return s;
    } else {
      T v;
      raw(reinterpret_cast<char*>(&v), sizeof v);
      return boost::endian::little_to_native(v);
    }
  }
  template <class T>
  std::vector<T> get_array(std::uint64_t expected) {
    const auto n = get<std::uint64_t>();
    if (n != expected)
      throw ParseError("MGW1: array of length " + std::to_string(n) + ", expected " + std::to_string(expected));
    std::vector<T> v;
    v.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) v.push_back(get<T>());
    return v;
  }
  template <class T>
  std::vector<T> get_array() {
    const auto n = get<std::uint64_t>();
    if (n > (1ull << 34)) throw ParseError("MGW1: implausible array length");
    std::vector<T> v;
    for (std::uint64_t i = 0; i < n; ++i) v.push_back(get<T>());
    return v;
  }

 private:
  void raw(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw ParseError("MGW1: unexpected end of data");
  }
  std::istream& in_;
};

void put_header(Writer& w, std::ostream& out, RecordKind kind) {
  out.write(kMagic.data(), kMagic.size());
  w.put(kVersion);
  w.put(static_cast<std::uint32_t>(kind));
}

void get_header(Reader& r, std::istream& in, RecordKind kind) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4 || magic != kMagic) throw ParseError("not an MGW1 container (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) throw ParseError("unsupported MGW1 version " + std::to_string(version));
  const auto k = r.get<std::uint32_t>();
  if (k != static_cast<std::uint32_t>(kind))
    throw ParseError("MGW1 record kind " + std::to_string(k) + ", expected " +
                     std::to_string(static_cast<std::uint32_t>(kind)));
}

}  // namespace

void write_operator(std::ostream& out, const DiscreteOperator& op) {
  Writer w(out);
  put_header(w, out, RecordKind::kOperator);
  w.put(op.h);
  const auto& g = op.grid;
  w.put(g.s_min);
  w.put(g.s_max);
  w.put(g.t_min);
  w.put(g.t_max);
  w.put(static_cast<std::int32_t>(g.Ns));
  w.put(static_cast<std::int32_t>(g.Nt));
  w.put(op.field_name);
  w.put(op.metric_name);
  w.put(static_cast<std::int32_t>(op.stencil_order));
  w.put(static_cast<std::int64_t>(op.matrix.n));
  w.put_array(op.matrix.row_ptr);
  w.put_array(op.matrix.col);
  w.put_array(op.matrix.val);
  w.put_array(op.mass);
  w.put_array(op.b);
  w.put_array(op.potential);
  w.check();
}

DiscreteOperator read_operator(std::istream& in) {
  Reader r(in);
  get_header(r, in, RecordKind::kOperator);
  DiscreteOperator op;
  op.h = r.get<double>();
  auto& g = op.grid;
  g.s_min = r.get<double>();
  g.s_max = r.get<double>();
  g.t_min = r.get<double>();
  g.t_max = r.get<double>();
  g.Ns = r.get<std::int32_t>();
  g.Nt = r.get<std::int32_t>();
  op.field_name = r.get<std::string>();
  op.metric_name = r.get<std::string>();
  op.stencil_order = r.get<std::int32_t>();
  const auto n = r.get<std::int64_t>();
  if (n != g.size()) throw ParseError("MGW1: matrix dimension does not match the grid");
  op.matrix.n = n;
  op.matrix.row_ptr = r.get_array<std::int64_t>(static_cast<std::uint64_t>(n + 1));
  const auto nnz = static_cast<std::uint64_t>(op.matrix.row_ptr.back());
  op.matrix.col = r.get_array<std::int64_t>(nnz);
  op.matrix.val = r.get_array<cdouble>(nnz);
  op.mass = r.get_array<double>(static_cast<std::uint64_t>(n));
  op.b = r.get_array<double>(static_cast<std::uint64_t>(n));
  op.potential = r.get_array<double>();
  return op;
}

void write_eigen_result(std::ostream& out, const EigenResult& e) {
  Writer w(out);
  put_header(w, out, RecordKind::kEigenResult);
  w.put(e.h);
  w.put(e.shift);
  w.put(static_cast<std::uint64_t>(e.seed));
  w.put(static_cast<std::int32_t>(e.iterations));
  w.put(static_cast<std::int32_t>(e.restarts));
  w.put(static_cast<std::int64_t>(e.inner_iterations));
  w.put(e.seconds);
  w.put_array(e.values);
  w.put_array(e.residuals);
  const std::uint64_t dim = e.vectors.empty() ? 0 : static_cast<std::uint64_t>(e.vectors.front().size());
  w.put(static_cast<std::uint64_t>(e.vectors.size()));
  w.put(dim);
  for (const auto& v : e.vectors)
    for (Eigen::Index i = 0; i < v.size(); ++i) w.put(v(i));
  w.check();
}

EigenResult read_eigen_result(std::istream& in) {
  Reader r(in);
  get_header(r, in, RecordKind::kEigenResult);
  EigenResult e;
  e.h = r.get<double>();
  e.shift = r.get<double>();
  e.seed = r.get<std::uint64_t>();
  e.iterations = r.get<std::int32_t>();
  e.restarts = r.get<std::int32_t>();
  e.inner_iterations = r.get<std::int64_t>();
  e.seconds = r.get<double>();
  e.values = r.get_array<double>();
  e.residuals = r.get_array<double>(e.values.size());
  const auto count = r.get<std::uint64_t>();
  const auto dim = r.get<std::uint64_t>();
  if (count != 0 && count != e.values.size()) throw ParseError("MGW1: eigenvector count mismatch");
  for (std::uint64_t k = 0; k < count; ++k) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
    for (std::uint64_t i = 0; i < dim; ++i) v(static_cast<Eigen::Index>(i)) = r.get<cdouble>();
    e.vectors.push_back(std::move(v));
  }
  return e;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write " + p.string());
  return f;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot read " + p.string());
  return f;
}

}  // namespace

void save(const std::filesystem::path& path, const DiscreteOperator& op) {
  auto f = open_out(path);
  write_operator(f, op);
}

void save(const std::filesystem::path& path, const EigenResult& r) {
  auto f = open_out(path);
  write_eigen_result(f, r);
}

DiscreteOperator load_operator(const std::filesystem::path& path) {
  auto f = open_in(path);
  return read_operator(f);
}

EigenResult load_eigen_result(const std::filesystem::path& path) {
  auto f = open_in(path);
  return read_eigen_result(f);
}

CsvTable eigen_result_summary(const EigenResult& r) {
  CsvTable t;
  t.metadata = {{"h", format_double(r.h)},
                {"shift", format_double(r.shift)},
                {"seed", std::to_string(r.seed)},
                {"iterations", std::to_string(r.iterations)},
                {"restarts", std::to_string(r.restarts)},
                {"seconds", format_double(r.seconds)}};
  t.columns = {"index", "lambda", "residual"};
  for (std::size_t i = 0; i < r.values.size(); ++i)
    t.rows.push_back({static_cast<double>(i), r.values[i], r.residuals[i]});
  return t;
}

CsvTable operator_summary(const DiscreteOperator& op) {
  CsvTable t;
  t.metadata = {{"h", format_double(op.h)},
                {"field", op.field_name},
                {"metric", op.metric_name},
                {"Ns", std::to_string(op.grid.Ns)},
                {"Nt", std::to_string(op.grid.Nt)},
                {"nnz", std::to_string(op.matrix.nnz())}};
  t.columns = {"s", "t", "mass", "b", "diagonal"};
  for (int i = 0; i < op.grid.Ns; ++i)
    for (int j = 0; j < op.grid.Nt; ++j) {
      const auto n = op.grid.index(i, j);
      double diag = 0.0;
      for (auto p = op.matrix.row_ptr[static_cast<std::size_t>(n)];
           p < op.matrix.row_ptr[static_cast<std::size_t>(n + 1)]; ++p)
        if (op.matrix.col[static_cast<std::size_t>(p)] == n) diag = op.matrix.val[static_cast<std::size_t>(p)].real();
      t.rows.push_back({op.grid.s(i), op.grid.t(j), op.mass[static_cast<std::size_t>(n)],
                        op.b[static_cast<std::size_t>(n)], diag});
    }
  return t;
}

}  // namespace magwell
