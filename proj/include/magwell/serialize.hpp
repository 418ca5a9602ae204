#pragma once

#include <filesystem>
#include <iosfwd>

#include "magwell/csv.hpp"
#include "magwell/discrete_operator.hpp"
#include "magwell/eigensolver.hpp"

namespace magwell {

/// MGW1 container: the magic bytes "MGW1", a u32 format version, a u32 record
/// kind, then the record. All integers and doubles are little-endian; sparse
/// matrices are stored as CSR arrays (i64 row_ptr, i64 col, f64 re/im pairs).
enum class RecordKind : std::uint32_t { kOperator = 1, kEigenResult = 2 };

void write_operator(std::ostream& out, const DiscreteOperator& op);
DiscreteOperator read_operator(std::istream& in);
void write_eigen_result(std::ostream& out, const EigenResult& r);
EigenResult read_eigen_result(std::istream& in);

void save(const std::filesystem::path& path, const DiscreteOperator& op);
void save(const std::filesystem::path& path, const EigenResult& r);
DiscreteOperator load_operator(const std::filesystem::path& path);
EigenResult load_eigen_result(const std::filesystem::path& path);

/// One row per eigenpair: index, lambda, residual; solver data as metadata.
CsvTable eigen_result_summary(const EigenResult& r);
/// One row per grid node: s, t, mass, b, diagonal entry; grid data as metadata.
CsvTable operator_summary(const DiscreteOperator& op);

}  // namespace magwell
