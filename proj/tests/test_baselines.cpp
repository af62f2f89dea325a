#include <gtest/gtest.h>

#include <cmath>

#include "caqr/baselines.hpp"
#include "caqr/generate.hpp"
#include "caqr/tsqr.hpp"
#include "oracles.hpp"

using namespace caqr;

namespace {

using Method = ThinQR (*)(const DenseMatrix&, CommCounters&);

const std::pair<const char*, Method> kMethods[] = {
    {"cholqr", cholesky_qr}, {"cgs", cgs}, {"mgs", mgs_right_looking}, {"hh", householder_reference}};

double tsqr_ortho(const DenseMatrix& a) {
  TreeQRFactor f = tsqr_factor(a, 4, build_tree(4, TreeShape::binary));
  return orthogonality_error(tsqr_explicit_q(f));
}

}  // namespace

TEST(Baselines, OrthonormalInputIsFixedPoint) {
  DenseMatrix q0 = explicit_q(qr_unblocked(generate(MatrixKind::uniform, 40, 6, 3)));
  for (auto [name, fn] : kMethods) {
    if (std::string(name) == "hh") continue;
    CommCounters c;
    ThinQR t = fn(q0, c);
    ASSERT_EQ(t.status, QrStatus::ok) << name;
    EXPECT_LE(oracle::max_diff(t.r, DenseMatrix::identity(6)), 6 * 1e-15 * 10) << name;
    EXPECT_LE(oracle::max_diff(t.q, q0), 1e-14) << name;
  }
}

TEST(Baselines, WellConditionedMatchesReferenceR) {
  DenseMatrix a = generate(MatrixKind::uniform, 64, 8, 12);
  DenseMatrix ref = oracle::givens_r(a);
  for (auto [name, fn] : kMethods) {
    CommCounters c;
    ThinQR t = fn(a, c);
    ASSERT_EQ(t.status, QrStatus::ok) << name;
    EXPECT_LE(oracle::max_diff(t.r, ref), 1e-10 * fro_norm(a)) << name;
    EXPECT_LE(residual(a, t.q, t.r), 10.0 * 64 * 8 * machine_epsilon * fro_norm(a)) << name;
    EXPECT_TRUE(is_upper_triangular(t.r)) << name;
  }
}

TEST(Baselines, HouseholderReference) {
  ThinQR id = householder_reference(DenseMatrix::identity(5));
  EXPECT_LE(oracle::max_diff(id.r, DenseMatrix::identity(5)), 1e-15);
  DenseMatrix a = generate(MatrixKind::uniform, 128, 32, 4);
  ThinQR t = householder_reference(a);
  EXPECT_LE(residual(a, t.q, t.r), 10.0 * 128 * 32 * machine_epsilon * fro_norm(a));
  EXPECT_LE(orthogonality_error(t.q), 10.0 * 128 * 32 * machine_epsilon);
  EXPECT_THROW(householder_reference(DenseMatrix(3, 4)), std::invalid_argument);
}

TEST(Baselines, CholeskyFlopsNearModel) {
  // 2*500*2500 + 125000/3
  CommCounters c;
  cholesky_qr(generate(MatrixKind::uniform, 500, 50, 1), c);
  double model = 2.0 * 500 * 2500 + 125000.0 / 3;
  EXPECT_NEAR(static_cast<double>(c.totals().flops), model, 0.15 * model);
}

TEST(Baselines, GramSchmidtFlopsNearModel) {
  for (Method fn : {Method{cgs}, Method{mgs_right_looking}}) {
    CommCounters c;
    fn(generate(MatrixKind::uniform, 500, 50, 1), c);
    EXPECT_NEAR(static_cast<double>(c.totals().flops), 2.0 * 500 * 2500, 0.05 * 2.0 * 500 * 2500);
  }
}

TEST(Baselines, CostOrdering) {
  DenseMatrix a = generate(MatrixKind::uniform, 2048, 32, 9);
  CommCounters ct(1), cc, ch;
  tsqr_factor(a, 1, build_tree(1, TreeShape::binary), ct);
  cholesky_qr(a, cc);
  householder_reference(a, ch);
  double tsqr = static_cast<double>(ct.totals().flops);
  EXPECT_LE(tsqr, static_cast<double>(cc.totals().flops));
  EXPECT_LE(tsqr, 1.05 * static_cast<double>(ch.totals().flops));
}

TEST(Baselines, BreakdownIsReported) {
  DenseMatrix a = generate(MatrixKind::uniform, 20, 4, 2);
  for (std::size_t i = 0; i < 20; ++i) a(i, 2) = 0;
  for (auto [name, fn] : kMethods) {
    if (std::string(name) == "hh") continue;
    CommCounters c;
    ThinQR t = fn(a, c);
    EXPECT_EQ(t.status, QrStatus::breakdown) << name;
    EXPECT_EQ(t.failed_column, 2u) << name;
  }
}

TEST(Stability, PerfectlyConditioned) {
  DenseMatrix a = generate_with_condition(500, 50, 1.0, 7);
  for (auto [name, fn] : kMethods) {
    CommCounters c;
    ThinQR t = fn(a, c);
    ASSERT_EQ(t.status, QrStatus::ok) << name;
    EXPECT_LE(orthogonality_error(t.q), 1e-12) << name;
  }
  EXPECT_LE(tsqr_ortho(a), 1e-12);
}

TEST(Stability, IllConditionedSeparation) {
  DenseMatrix a = generate_with_condition(500, 50, 1e8, 7);
  EXPECT_LE(tsqr_ortho(a), 1e-12);
  ThinQR m = mgs_right_looking(a);
  ASSERT_EQ(m.status, QrStatus::ok);
  double mgs = orthogonality_error(m.q);
  EXPECT_GE(mgs, 1e-12);
  EXPECT_LE(mgs, 1e-2);
  ThinQR ch = cholesky_qr(a);
  if (ch.status == QrStatus::ok) {
    double chol = orthogonality_error(ch.q);
    EXPECT_GE(chol, 1e-2);
    EXPECT_LE(mgs, chol);
  }
}
