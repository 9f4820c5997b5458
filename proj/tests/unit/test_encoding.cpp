// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qcnn/encoding.hpp"
#include "qcnn/errors.hpp"
#include "test_util.hpp"

namespace qcnn {
namespace {

TEST(Encoding, NormalizeHasUnitFrobeniusNorm) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = testing::random_matrix(rng, 3, 3, -5.0, 5.0);
    const Matrix n = normalize(m);
    EXPECT_NEAR(n.frobenius_norm(), 1.0, 1e-14);
    for (std::size_t i = 0; i < m.data.size(); ++i) EXPECT_NEAR(n.data[i] * m.frobenius_norm(), m.data[i], 1e-12);
  }
}

TEST(Encoding, NormalizeSmallExample) {
  const Matrix n = normalize(Matrix::from_rows({{3.0, 0.0}, {0.0, 4.0}}));
  EXPECT_DOUBLE_EQ(n(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(n(1, 1), 0.8);
}

TEST(Encoding, ZeroMatrixIsDegenerate) {
  EXPECT_THROW((void)normalize(Matrix(2, 2, 0.0)), DegenerateInputError);
  EXPECT_THROW((void)normalize(ImageTensor(Matrix(4, 4, 0.0))), DegenerateInputError);
}

TEST(Encoding, ImageTensorRejectsOutOfRangePixels) {
  EXPECT_THROW(ImageTensor(Matrix(2, 2, 256.0)), DomainError);
  EXPECT_THROW(ImageTensor(Matrix(2, 3, 1.0)), UsageError);
}

// Frozen with a 50-digit evaluation of floor(acos(0.6) / pi * 2^8).
TEST(Encoding, AngleOfPointSixAtEightBits) {
  const FixedPointAngle a = angle_of(0.6, 8);
  EXPECT_EQ(a.code(), 75u);
  EXPECT_EQ(a.to_string(), "01001011");
  EXPECT_NEAR(a.reconstruct(), 0.92038847273138473783, 1e-15);
  EXPECT_FALSE(a.bit(1));
  EXPECT_TRUE(a.bit(2));
  EXPECT_TRUE(a.bit(8));
}

TEST(Encoding, AngleEndpoints) {
  EXPECT_EQ(angle_of(1.0, 6).code(), 0u);
  EXPECT_EQ(angle_of(-1.0, 6).code(), 63u);  // pi clamps to the top code
  EXPECT_EQ(angle_of(0.0, 4).code(), 8u);    // pi/2
  EXPECT_THROW((void)angle_of(1.0000001, 8), DomainError);
  EXPECT_THROW((void)angle_of(std::nan(""), 8), DomainError);
}

TEST(Encoding, QuantizationErrorIsBounded) {
  for (int L : {4, 8, 12, 16}) {
    for (int k = 0; k <= 400; ++k) {
      const double v = -1.0 + 2.0 * k / 400.0;
      const FixedPointAngle a = angle_of(v, L);
      const double err = std::acos(v) - a.reconstruct();
      EXPECT_GE(err, -1e-15);
      // Truncation error plus, at v = -1, the clamp of pi onto the top code.
      EXPECT_LE(err, std::ldexp(std::numbers::pi, -L) + 1e-15) << "L=" << L << " v=" << v;
    }
  }
}

TEST(Encoding, AngleParseRoundTrip) {
  const FixedPointAngle a = FixedPointAngle::parse("101100");
  EXPECT_EQ(a.code(), 44u);
  EXPECT_EQ(a.bits(), 6);
  EXPECT_EQ(FixedPointAngle::parse(a.to_string()), a);
  EXPECT_THROW((void)FixedPointAngle::parse("10a"), FormatError);
}

TEST(Encoding, QramTableTextRoundTrip) {
  const std::vector<double> values{0.5, -0.25, 1.0, -1.0, 0.0};
  const QramTable t = QramTable::from_values(values, 10);
  std::stringstream io;
  t.write(io);
  const QramTable back = QramTable::read(io);
  ASSERT_EQ(back.size(), t.size());
  EXPECT_EQ(back.angle_bits, 10);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(back.entries[i], t.entries[i]);
  const auto angles = t.angles(8);
  EXPECT_EQ(angles.size(), 8u);
  EXPECT_EQ(angles[7], 0.0);
}

TEST(Encoding, QramTableRejectsMalformedRows) {
  std::istringstream missing_comma("0 0101\n");
  EXPECT_THROW((void)QramTable::read(missing_comma), FormatError);
  std::istringstream out_of_order("1, 0101\n");
  EXPECT_THROW((void)QramTable::read(out_of_order), FormatError);
  std::istringstream width_change("0, 0101\n1, 01\n");
  EXPECT_THROW((void)QramTable::read(width_change), FormatError);
}

TEST(Encoding, OracleWritesCodeIntoScratch) {
  RegisterLayout lay;
  const Register idx = lay.add("idx", 2);
  const Register ang = lay.add("ang", 6);
  const std::vector<double> values{0.9, -0.3, 0.1};
  const QramTable t = QramTable::from_values(values, 6);
  for (BasisIndex m = 0; m < 3; ++m) {
    Circuit c(lay.total_width());
    qram_oracle(c, idx, ang, t, {});
    Statevector s = init_state(lay);
    s.reset_to_basis(idx.place(m));
    c.apply(s);
    EXPECT_NEAR(register_probability(s, ang, t.entries[m].code()), 1.0, 1e-15);
  }
}

// Both loaders, from |m>|0>, give cos(theta_m)|0> + sin(theta_m)|1> with |cos(theta_m) - v_m| <= pi 2^{-L}.
TEST(Encoding, LoadersAgreeAndRespectQuantizationBound) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int L = 8;
  std::vector<double> values(4);
  for (double& v : values) v = u(rng);
  const QramTable t = QramTable::from_values(values, L);

  RegisterLayout lay;
  const Register idx = lay.add("idx", 2);
  const Register ang = lay.add("ang", L);
  const Register data = lay.add("data", 1);
  Circuit co(lay.total_width());
  co.h(idx.qubit(0)).h(idx.qubit(1));
  Circuit cm = co;
  loader_O(co, idx, ang, data.offset, t);
  loader_multiplexed(cm, idx, data.offset, t);
  Statevector so = init_state(lay);
  Statevector sm = init_state(lay);
  co.apply(so);
  cm.apply(sm);
  EXPECT_LT(testing::max_abs_diff(so, sm), 1e-12);
  const std::vector<std::string> scratch{"ang"};
  EXPECT_NEAR(assert_disentangled(so, lay, scratch), 1.0, 1e-12);
  for (BasisIndex m = 0; m < 4; ++m) {
    const double amp0 = sm.amplitudes()[idx.place(m)].real() * 2.0;  // undo the 1/2 of the index superposition
    EXPECT_LE(std::abs(amp0 - values[m]), std::ldexp(std::numbers::pi, -L));
  }
}

TEST(Encoding, LoaderDispatchNeedsScratchForQram) {
  RegisterLayout lay;
  const Register idx = lay.add("idx", 1);
  lay.add("data", 1);
  Circuit c(lay.total_width());
  const std::vector<double> values{0.2, 0.4};
  const QramTable t = QramTable::from_values(values, 4);
  EXPECT_THROW(load_values(c, LoaderImpl::kQram, idx, nullptr, 1, t), UsageError);
  EXPECT_NO_THROW(load_values(c, LoaderImpl::kMultiplexed, idx, nullptr, 1, t));
}

TEST(Encoding, PrepareUniformIsUniformOnItsRange) {
  for (BasisIndex count = 1; count <= 12; ++count) {
    RegisterLayout lay;
    const Register r = lay.add("r", index_width(count));
    Circuit c(lay.total_width());
    prepare_uniform(c, r, count);
    Statevector s = init_state(lay);
    c.apply(s);
    const auto dist = register_distribution(s, r);
    for (BasisIndex v = 0; v < dist.size(); ++v) {
      const double expected = v < count ? 1.0 / static_cast<double>(count) : 0.0;
      EXPECT_NEAR(dist[v], expected, 1e-12) << "count=" << count << " v=" << v;
    }
    // Amplitudes are real and non-negative.
    for (const auto& a : s.amplitudes()) EXPECT_GE(a.real(), -1e-15);
  }
  RegisterLayout lay;
  const Register r = lay.add("r", 2);
  Circuit c(2);
  EXPECT_THROW(prepare_uniform(c, r, 5), UsageError);
}

TEST(Encoding, IndexWidth) {
  EXPECT_EQ(index_width(1), 1);
  EXPECT_EQ(index_width(2), 1);
  EXPECT_EQ(index_width(3), 2);
  EXPECT_EQ(index_width(4), 2);
  EXPECT_EQ(index_width(5), 3);
  EXPECT_THROW((void)index_width(0), UsageError);
}

}  // namespace
}  // namespace qcnn
