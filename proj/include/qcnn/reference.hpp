// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// Classical CNN reference: strided convolution, pooling, fully connected scoring,
// bilinear downscaling and the small trainers used to produce weights.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qcnn/encoding.hpp"
#include "qcnn/layers.hpp"

namespace qcnn {

/// out(x', y') = sum_{a,b} w(a, b) r(x' s + a, y' s + b).
Matrix conv2d_ref(const Matrix& r, const Matrix& w, int s);

enum class PoolMode { kSum, kAverage };
Matrix pool_ref(const Matrix& map, int window, int stride, PoolMode mode);

/// score_k = sum r-bar * w^k.
std::vector<double> fc_ref(const Matrix& features, const FcWeights& weights);
/// (M-bar^2 + score_k) / (2 K M-bar^2).
std::vector<double> fc_probabilities(const Matrix& features, const FcWeights& weights);
/// Argmax with ties to the lowest index.
int classify_ref(const std::vector<double>& scores);

/// Bilinear resampling of a square image to `out_side`, align-corners-false grid,
/// with source coordinates clamped to the image.
Matrix bilinear_resize(const Matrix& image, int out_side);

struct LabeledFeatures {
  Matrix features;
  int label = 0;
};

struct TrainOptions {
  int epochs = 200;
  double learning_rate = 0.5;
  std::uint64_t seed = 1;
  double clip = 1.0;
};

/// Full-batch gradient descent on softmax cross-entropy over score_k, weights clipped
/// to [-clip, clip] after every step. Deterministic in the seed.
FcWeights train_fc(const std::vector<LabeledFeatures>& data, int K, const TrainOptions& options);

/// Classical architecture hyperparameters shared by the trainers and the pipeline.
struct Architecture {
  int image_side = 4;
  int kernel_side = 2;
  int conv_stride = 1;
  int pool_window = 2;
  int pool_stride = 1;
  int classes = 2;

  [[nodiscard]] int conv_side() const;
  [[nodiscard]] int pool_side() const;
  void validate() const;
};

/// Kernel, FC weights and the architecture they belong to.
struct RefModel {
  Architecture arch;
  Matrix kernel;
  FcWeights fc;
  std::uint64_t seed = 0;
  double clip = 1.0;

  void write(std::ostream& out) const;
  static RefModel read(std::istream& in);
};

/// Classical pipeline on a normalized image: conv -> sum pool -> divide by window area.
Matrix reference_features(const Matrix& r, const Matrix& kernel_normalized, const Architecture& arch);

struct LossCurve {
  std::vector<double> train;
  std::vector<double> validation;
};

struct CnnTraining {
  Matrix kernel;
  Matrix kernel2;  // second convolution (conv -> conv -> fc only)
  std::vector<Matrix> fc;
  LossCurve curve;
};

/// conv -> average pool -> fc, trained jointly by minibatch SGD.
CnnTraining train_cpnn(const std::vector<LabeledFeatures>& train, const std::vector<LabeledFeatures>& validation,
                       const Architecture& arch, const TrainOptions& options);
/// conv -> conv (same window, stride 1) -> fc.
CnnTraining train_ccnn(const std::vector<LabeledFeatures>& train, const std::vector<LabeledFeatures>& validation,
                       const Architecture& arch, const TrainOptions& options);

}  // namespace qcnn
