// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qcnn/errors.hpp"
#include "qcnn/layers.hpp"
#include "qcnn/reference.hpp"
#include "test_util.hpp"

namespace qcnn {
namespace {

constexpr double kPi = std::numbers::pi;

Matrix random_normalized(std::mt19937_64& rng, int side) {
  return normalize(testing::random_matrix(rng, side, side, -1.0, 1.0));
}

double max_diff(const Matrix& a, const Matrix& b) {
  EXPECT_EQ(a.rows, b.rows);
  EXPECT_EQ(a.cols, b.cols);
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

double loader_bound(int N, int L) { return 2.0 * N * N * kPi * std::ldexp(1.0, -L); }

// Value as stored by an L-bit angle loader: cos of the truncated angle.
double quantized(double v, int L) { return std::cos(angle_of(v, L).reconstruct()); }

TEST(ConvLayer, ExactBackendMatchesReferenceWithinLoaderBound) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 12; ++trial) {
    for (int s : {1, 2}) {
      ConvConfig cfg;
      cfg.s = s;
      const Matrix r = random_normalized(rng, 4);
      const Matrix w = random_normalized(rng, 2);
      LayerDiagnostics diag;
      const FeatureMap out = conv_layer(cfg, r, w, &diag);
      EXPECT_LE(max_diff(out.features, conv2d_ref(r, w, s)), loader_bound(cfg.N, cfg.L));
      EXPECT_GE(diag.min_uncompute_fidelity, 1.0 - 1e-9);
      EXPECT_DOUBLE_EQ(out.scale, 4.0);
      EXPECT_EQ(out.layer, "conv");
    }
  }
}

TEST(ConvLayer, QramLoaderMatchesMultiplexedLoader) {
  std::mt19937_64 rng(21);
  ConvConfig mux;
  mux.L = 6;
  mux.s = 2;
  ConvConfig qram = mux;
  qram.loader = LoaderImpl::kQram;
  const Matrix r = random_normalized(rng, 4);
  const Matrix w = random_normalized(rng, 2);
  LayerDiagnostics diag;
  const FeatureMap a = conv_layer(mux, r, w);
  const FeatureMap b = conv_layer(qram, r, w, &diag);
  EXPECT_LT(max_diff(a.features, b.features), 1e-9);
  EXPECT_GE(diag.min_uncompute_fidelity, 1.0 - 1e-9);
}

TEST(ConvLayer, StrideTwoSubsamplesStrideOne) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 4; ++trial) {
    ConvConfig one;
    one.M = 5;
    one.N = 1;
    one.s = 1;
    ConvConfig two = one;
    two.s = 2;
    const Matrix r = random_normalized(rng, 5);
    const Matrix w = random_normalized(rng, 1);
    const Matrix full = conv_layer(one, r, w).features;
    const Matrix half = conv_layer(two, r, w).features;
    ASSERT_EQ(half.rows, 3);
    for (int x = 0; x < half.rows; ++x) {
      for (int y = 0; y < half.cols; ++y) EXPECT_NEAR(half(x, y), full(2 * x, 2 * y), 1e-12);
    }
  }
}

TEST(ConvLayer, NonDivisibleStrideNamesTheRemainder) {
  ConvConfig cfg;
  cfg.M = 5;
  cfg.N = 2;
  cfg.s = 2;
  try {
    cfg.validate();
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("(5 - 2) = 3 is not divisible by stride 2"), std::string::npos) << e.what();
  }
  cfg.s = 0;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(ConvLayer, BudgetIsEnforcedBeforeSimulation) {
  ConvConfig cfg;
  cfg.qae.qubit_budget = 10;
  std::mt19937_64 rng(23);
  try {
    (void)conv_layer(cfg, random_normalized(rng, 4), random_normalized(rng, 2));
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("convolution layer requires"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("budget of 10"), std::string::npos);
  }
}

TEST(ConvLayer, ShapeMismatchIsAUsageError) {
  std::mt19937_64 rng(24);
  ConvConfig cfg;
  EXPECT_THROW((void)conv_layer(cfg, random_normalized(rng, 3), random_normalized(rng, 2)), UsageError);
  EXPECT_THROW((void)conv_layer(cfg, random_normalized(rng, 4), random_normalized(rng, 3)), UsageError);
}

TEST(ConvLayer, CircuitBackendWithinEstimationBound) {
  std::mt19937_64 rng(25);
  ConvConfig cfg;
  cfg.s = 2;
  cfg.backend = Backend::kCircuit;
  const int t = cfg.t;
  const double n2 = cfg.N * cfg.N;
  const double bound =
      2.0 * n2 * (2.0 * kPi * std::ldexp(1.0, -t) + kPi * kPi * std::ldexp(1.0, -2 * t)) + loader_bound(cfg.N, cfg.L);
  const Matrix r = random_normalized(rng, 4);
  const Matrix w = random_normalized(rng, 2);
  LayerDiagnostics diag;
  const FeatureMap out = conv_layer(cfg, r, w, &diag);
  EXPECT_LE(max_diff(out.features, conv2d_ref(r, w, 2)), bound);
  ASSERT_EQ(diag.qae.size(), 4u);
  for (const QaeResult& q : diag.qae) EXPECT_GE(q.confidence, 8.0 / (kPi * kPi));
  EXPECT_GE(diag.min_uncompute_fidelity, 1.0 - 1e-9);
}

TEST(ConvLayer, CoherentModeMatchesPerFeatureMode) {
  std::mt19937_64 rng(26);
  ConvConfig cfg;
  cfg.M = 2;
  cfg.N = 1;
  cfg.s = 1;
  cfg.t = 5;
  cfg.backend = Backend::kCircuit;
  const Matrix r = random_normalized(rng, 2);
  const Matrix w = Matrix(1, 1, 1.0);
  const FeatureMap coherent = conv_layer_coherent(cfg, r, w);
  const FeatureMap single = conv_layer(cfg, r, w);
  ASSERT_EQ(coherent.side(), 2);
  const double bound = 2.0 * (2.0 * kPi * std::ldexp(1.0, -cfg.t) + kPi * kPi * std::ldexp(1.0, -2 * cfg.t)) +
                       loader_bound(1, cfg.L);
  EXPECT_LE(max_diff(coherent.features, conv2d_ref(r, w, 1)), bound);
  EXPECT_LE(max_diff(single.features, conv2d_ref(r, w, 1)), bound);
  cfg.M = 4;
  EXPECT_THROW((void)conv_layer_coherent(cfg, random_normalized(rng, 4), w), UsageError);
}

TEST(Decode, AffineAndCircuitDecodeAgree) {
  for (int t : {3, 6}) {
    for (BasisIndex y = 0; y <= (BasisIndex{1} << (t - 1)); ++y) {
      const double theta = std::ldexp(static_cast<double>(y), -t);
      const double classical = decode_feature(theta, 2);
      const double circuit = decode_feature_circuit(y, t, 8.0, 4.0);
      EXPECT_LE(classical - circuit, 8.0 * std::ldexp(1.0, -2 * t) + 1e-12);
      EXPECT_GE(classical - circuit, -1e-12);
    }
  }
  EXPECT_DOUBLE_EQ(decode_feature(0.0, 2), -4.0);
  EXPECT_DOUBLE_EQ(decode_feature(0.5, 2), 4.0);
  EXPECT_THROW((void)decode_feature_circuit(8, 3, 1.0, 0.0), UsageError);
}

TEST(PoolLayer, ExactBackendEqualsWindowSums) {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 8; ++trial) {
    for (const auto& [side, stride] : {std::pair{2, 1}, std::pair{3, 1}, std::pair{4, 1}, std::pair{4, 2}}) {
      PoolConfig cfg;
      cfg.M_prime = side;
      cfg.s_prime = stride;
      FeatureMap in;
      in.features = testing::random_matrix(rng, side, side, -1.0, 1.0);
      in.scale = 1.0;
      LayerDiagnostics diag;
      const FeatureMap out = pool_layer(cfg, in, &diag);
      const Matrix sum = pool_ref(in.features, 2, stride, PoolMode::kSum);
      const Matrix avg = pool_ref(in.features, 2, stride, PoolMode::kAverage);
      EXPECT_LE(max_diff(out.features, sum), 4.0 * 2.0 * kPi * std::ldexp(1.0, -cfg.L));
      for (std::size_t i = 0; i < sum.data.size(); ++i) EXPECT_NEAR(sum.data[i], 4.0 * avg.data[i], 1e-12);
      EXPECT_GE(diag.min_uncompute_fidelity, 1.0 - 1e-9);
    }
  }
}

TEST(PoolLayer, RejectsValuesOutsideTheScale) {
  PoolConfig cfg;
  FeatureMap in;
  in.features = Matrix::from_rows({{0.5, 2.0}, {0.0, 0.1}});
  in.scale = 1.0;
  EXPECT_THROW((void)pool_layer(cfg, in), ScalingError);
  cfg.input_scale = 2.0;
  const FeatureMap out = pool_layer(cfg, in);
  EXPECT_NEAR(out.features(0, 0), 2.6, 4.0 * 2.0 * 2.0 * kPi * std::ldexp(1.0, -cfg.L));
}

TEST(FcLayer, ProbabilitiesFollowTheSwapTestFormula) {
  std::mt19937_64 rng(28);
  const int L = 12;
  for (int trial = 0; trial < 20; ++trial) {
    const int side = 1 + static_cast<int>(rng() % 3);
    const int K = 2 + static_cast<int>(rng() % 2);
    FcWeights weights{K, side, {}};
    for (int k = 0; k < K; ++k) weights.weights.push_back(testing::random_matrix(rng, side, side, -1.0, 1.0));
    const Matrix f = testing::random_matrix(rng, side, side, -1.0, 1.0);
    const auto prob = fc_layer(f, weights, FcOptions{L});
    const double m2 = static_cast<double>(side) * side;
    for (int k = 0; k < K; ++k) {
      double q = 0.0;
      for (std::size_t i = 0; i < f.data.size(); ++i) q += quantized(f.data[i], L) * quantized(weights.weights[k].data[i], L);
      EXPECT_NEAR(prob[k], (m2 + q) / (2.0 * K * m2), 1e-9);
    }
    const auto exact = fc_probabilities(f, weights);
    for (int k = 0; k < K; ++k) EXPECT_NEAR(prob[k], exact[k], 2.0 * kPi * std::ldexp(1.0, -L) / (2.0 * K));
  }
}

TEST(FcLayer, ZeroInnerProductGivesOneOverTwoK) {
  for (int K : {2, 3, 4}) {
    FcWeights weights{K, 2, std::vector<Matrix>(K, Matrix(2, 2, 0.0))};
    const auto prob = fc_layer(Matrix::from_rows({{0.3, -0.2}, {0.9, 0.1}}), weights);
    for (double p : prob) EXPECT_NEAR(p, 1.0 / (2.0 * K), 1e-15);
  }
}

TEST(FcLayer, QramLoaderAgreesAndShotsAreSeeded) {
  std::mt19937_64 rng(29);
  FcWeights weights{2, 2, {testing::random_matrix(rng, 2, 2, -1, 1), testing::random_matrix(rng, 2, 2, -1, 1)}};
  const Matrix f = testing::random_matrix(rng, 2, 2, -1.0, 1.0);
  FcOptions mux{8};
  FcOptions qram = mux;
  qram.loader = LoaderImpl::kQram;
  const auto a = fc_layer(f, weights, mux);
  const auto b = fc_layer(f, weights, qram);
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  FcOptions shots = mux;
  shots.shots = 20000;
  shots.seed = 5;
  const auto s1 = fc_layer(f, weights, shots);
  const auto s2 = fc_layer(f, weights, shots);
  EXPECT_EQ(s1, s2);
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(s1[k], a[k], 0.02);
}

TEST(FcLayer, RejectsInputsOutsideUnitRange) {
  FcWeights weights{2, 1, {Matrix(1, 1, 0.5), Matrix(1, 1, -0.5)}};
  EXPECT_THROW((void)fc_layer(Matrix(1, 1, 1.5), weights), ScalingError);
  weights.weights[0](0, 0) = 1.5;
  EXPECT_THROW((void)fc_layer(Matrix(1, 1, 0.5), weights), DomainError);
}

TEST(Classify, ArgmaxWithLowestIndexOnTies) {
  EXPECT_EQ(classify({0.1, 0.3, 0.2}), 1);
  EXPECT_EQ(classify({0.25, 0.25}), 0);
  EXPECT_THROW((void)classify({}), UsageError);
}

TEST(FeatureMap, TextRoundTrip) {
  FeatureMap fm;
  fm.features = Matrix::from_rows({{0.125, -1.5}, {3.0, 1e-7}});
  fm.layer = "pool";
  fm.config = "M'=2 N'=2 s'=1";
  fm.scale = 4.0;
  std::stringstream io;
  fm.write(io);
  const FeatureMap back = FeatureMap::read(io);
  EXPECT_EQ(back.layer, fm.layer);
  EXPECT_EQ(back.config, fm.config);
  EXPECT_DOUBLE_EQ(back.scale, fm.scale);
  EXPECT_EQ(back.features.data, fm.features.data);
  std::istringstream bad("layer conv\n");
  EXPECT_THROW((void)FeatureMap::read(bad), FormatError);
}

}  // namespace
}  // namespace qcnn
