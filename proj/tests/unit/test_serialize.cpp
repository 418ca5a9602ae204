#include <sstream>

#include <gtest/gtest.h>

#include "magwell/eigensolver.hpp"
#include "magwell/error.hpp"
#include "magwell/serialize.hpp"

using namespace magwell;

namespace {

DiscreteOperator small_operator() {
  const auto axis = SAxis::interval(-1.0, 1.0);
  const auto grid = GridSpec::with_max_spacing(-1.0, 1.0, -1.0, 1.0, GridSpec::max_spacing(0.5, 1.0));
  return assemble(0.5, FieldProfile::parabolic(1.0, 2.0, axis, 1.0), BandMetric::circle(2.0, axis, 1.0), grid);
}

}  // namespace

TEST(Serialize, OperatorRoundTrip) {
  const auto op = small_operator();
  std::stringstream buf;
  write_operator(buf, op);
  EXPECT_EQ(buf.str().substr(0, 4), "MGW1");
  const auto back = read_operator(buf);
  EXPECT_EQ(back.h, op.h);
  EXPECT_EQ(back.grid, op.grid);
  EXPECT_EQ(back.matrix.row_ptr, op.matrix.row_ptr);
  EXPECT_EQ(back.matrix.col, op.matrix.col);
  EXPECT_EQ(back.matrix.val, op.matrix.val);
  EXPECT_EQ(back.mass, op.mass);
  EXPECT_EQ(back.b, op.b);
  EXPECT_EQ(back.field_name, op.field_name);
  EXPECT_EQ(back.metric_name, op.metric_name);
  EXPECT_EQ(back.stencil_order, op.stencil_order);
}

TEST(Serialize, EigenResultRoundTrip) {
  const auto op = small_operator();
  SolverOptions o;
  o.m = 2;
  o.shift = 0.4;
  const auto r = lowest_eigenpairs(op, o);
  std::stringstream buf;
  write_eigen_result(buf, r);
  const auto back = read_eigen_result(buf);
  EXPECT_EQ(back.values, r.values);
  EXPECT_EQ(back.residuals, r.residuals);
  EXPECT_EQ(back.seed, r.seed);
  ASSERT_EQ(back.vectors.size(), r.vectors.size());
  for (std::size_t i = 0; i < r.vectors.size(); ++i) EXPECT_EQ(back.vectors[i], r.vectors[i]);
  EXPECT_EQ(eigen_result_summary(back).rows.size(), 2u);
}

TEST(Serialize, RejectsBadInput) {
  std::stringstream bad("MGW2 and more bytes here");
  EXPECT_THROW(read_operator(bad), ParseError);

  const auto op = small_operator();
  std::stringstream buf;
  write_operator(buf, op);
  std::stringstream wrong_kind(buf.str());
  EXPECT_THROW(read_eigen_result(wrong_kind), ParseError);

  std::stringstream truncated(buf.str().substr(0, buf.str().size() / 2));
  EXPECT_THROW(read_operator(truncated), ParseError);
}
