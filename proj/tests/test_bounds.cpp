#include <gtest/gtest.h>

#include <cmath>

#include "caqr/bounds.hpp"
#include "caqr/generate.hpp"
#include "caqr/householder.hpp"

using namespace caqr;

TEST(MatmulBounds, Sequential) {
  // 64^3 / (2 sqrt2 * 16) - 256 and 64^3 / (2 sqrt2 * 4096) - 1
  CommBound b = lb_seq_matmul(64, 256);
  EXPECT_NEAR(b.words, 5536.618751480197, 1e-9);
  EXPECT_NEAR(b.messages, 21.62741699796952, 1e-12);
  CommBound tiny = lb_seq_matmul(4, 256);
  EXPECT_EQ(tiny.words, 0);
  EXPECT_EQ(tiny.messages, 0);
}

TEST(MatmulBounds, Parallel2d) {
  // 2^20 / (4 sqrt2 * 8); 8 / (4 sqrt2)
  CommBound b = lb_par_matmul_2d(1024, 64, 1);
  EXPECT_NEAR(b.words, 23170.475005920787, 1e-8);
  EXPECT_NEAR(b.messages, std::sqrt(2.0), 1e-12);
  EXPECT_THROW(lb_par_matmul_2d(1024, 16, 1), std::invalid_argument);
}

TEST(MatmulBounds, RectangularReducesToSquare) {
  // m = n = r = 1024 at P = 864: sqrt(n^2) n / sqrt(96 * 864) = 2^20 / 288, equal to the square form with mu = 3
  CommBound r = lb_rect_matmul(1024, 1024, 1024, 864);
  EXPECT_NEAR(r.words, 1048576.0 / 288, 1e-9);
  EXPECT_NEAR(r.words, lb_par_matmul_2d(1024, 864, 3).words, 1e-9);
  EXPECT_NEAR(r.messages, 1.0, 1e-12);
  // argument order does not matter
  CommBound s = lb_rect_matmul(2048, 4096, 1024, 8192);
  CommBound t = lb_rect_matmul(1024, 2048, 4096, 8192);
  EXPECT_DOUBLE_EQ(s.words, t.words);
  EXPECT_THROW(lb_rect_matmul(1024, 1024, 16, 864), std::invalid_argument);
}

TEST(QrBounds, Sequential) {
  // 3*4096*(64 - 4/3) / (16 sqrt 2048) - 256 = 1063.5 - 256
  CommBound b = lb_seq_qr(64, 64, 256);
  EXPECT_NEAR(b.words, 807.5, 0.05);
  EXPECT_NEAR(b.messages, 48128.0 / std::sqrt(8.0 * 256 * 256 * 256) - 1, 1e-12);
  EXPECT_EQ(lb_seq_qr(8, 2, 4096).words, 0);
  EXPECT_EQ(lb_seq_qr(8, 2, 4096).messages, 0);
}

TEST(QrBounds, Parallel) {
  // F = 3*4096^2*(4096 - 4/3)/16, per processor F/16, over sqrt(8*4096) minus W
  CommBound b = lb_par_qr(4096, 4096, 16, 4096);
  EXPECT_NEAR(b.words, 4443187.046448921, 1e-4);
  EXPECT_NEAR(b.messages, 1084.7624625119436, 1e-8);
  // W = mn/P dominates at small sizes
  EXPECT_EQ(lb_par_qr(256, 256, 4, 16384).words, 0);
}

TEST(QrBounds, ParallelSpecialCase) {
  // m = n, P = 2^11: messages sqrt(P / 2^11) = 1, words n^2 / 2^11
  CommBound b = lb_par_qr_special(64, 64, 2048);
  EXPECT_DOUBLE_EQ(b.messages, 1);
  EXPECT_DOUBLE_EQ(b.words, 2);
  EXPECT_THROW(lb_par_qr_special(64, 64, 16), std::invalid_argument);
}

TEST(QrBounds, Multiplications) {
  EXPECT_DOUBLE_EQ(lb_qr_flops_column(100, 1), 99);
  // 64*4096/4 - (4096/8)*33
  EXPECT_DOUBLE_EQ(lb_qr_flops(64, 64), 48640);
  // 1/4 - (1/8)(3/2)
  EXPECT_DOUBLE_EQ(lb_qr_flops(1, 1), 0.0625);
}

TEST(QrBounds, MeasuredMultiplicationsDominate) {
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{8, 3}, {64, 6}, {64, 64}, {128, 32}, {200, 50}}) {
    OpCount ops;
    qr_unblocked(generate(MatrixKind::uniform, m, n, 1), ops);
    EXPECT_GE(static_cast<double>(ops.multiplies), lb_qr_flops(m, n)) << m << "x" << n;
  }
}

TEST(ReductionEdge, Payload) {
  EXPECT_EQ(lb_reduction_edge(1), 1);
  EXPECT_EQ(lb_reduction_edge(8), 36);
}

TEST(GemmViaLu, Identity) {
  GemmViaLu r = gemm_via_lu_check(DenseMatrix::identity(2), DenseMatrix::identity(2));
  EXPECT_EQ(r.product, DenseMatrix::identity(2));
  EXPECT_EQ(r.residual, 0);
}

TEST(GemmViaLu, ZeroFactor) {
  GemmViaLu r = gemm_via_lu_check(DenseMatrix(3, 3), generate(MatrixKind::uniform, 3, 3, 2));
  EXPECT_EQ(max_abs(r.product), 0);
}

TEST(GemmViaLu, SeededProducts) {
  for (std::size_t n : {4, 8}) {
    DenseMatrix a = generate(MatrixKind::uniform, n, n, 10 + n), b = generate(MatrixKind::uniform, n, n, 20 + n);
    GemmViaLu r = gemm_via_lu_check(a, b);
    EXPECT_LE(r.residual, 1e-13 * fro_norm(a) * fro_norm(b));
    EXPECT_LE(fro_norm(subtract(r.product, multiply(a, b))), 1e-13 * fro_norm(a) * fro_norm(b));
  }
  EXPECT_THROW(gemm_via_lu_check(DenseMatrix(2, 3), DenseMatrix(3, 2)), std::invalid_argument);
}
