// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// End-to-end experiments: sample selection, classical training, the per-image
// quantum pipeline, stride sweeps and the CPNN / CCNN loss comparison.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qcnn/layers.hpp"
#include "qcnn/mnist.hpp"
#include "qcnn/reference.hpp"
#include "qcnn/resources.hpp"

namespace qcnn {

struct ExperimentConfig {
  std::string dataset = "data/mnist-desk";
  std::vector<int> digits{6, 9};
  int samples = 128;
  int train_samples = 600;
  std::uint64_t seed = 7;
  int image_side = 4;
  int kernel_side = 2;
  int pool_window = 2;
  int stride_conv = 2;
  int stride_pool = 1;
  int angle_bits = 12;
  int qae_bits = 6;
  Backend backend = Backend::kExact;
  LoaderImpl loader = LoaderImpl::kMultiplexed;
  std::uint64_t shots = 0;
  int epochs = 100;
  double learning_rate = 0.5;
  /// Trained model to load; empty trains one from the training split.
  std::string weights;
  std::string out = "qcnn-out";
  /// Stride pairs (conv, pool) to run; empty runs the single (stride_conv, stride_pool).
  std::vector<std::pair<int, int>> sweep;
  int qubit_budget = kDefaultQubitBudget;

  /// Sets one key from its text form; UsageError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// Reads "key = value" lines; '#' starts a comment.
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::string& path);
  /// Resolved configuration in the same key = value form, one key per line, fixed order.
  [[nodiscard]] std::string echo() const;
  /// Everything checkable without touching the dataset.
  void validate() const;
  [[nodiscard]] Architecture architecture(int s, int s_prime) const;
  [[nodiscard]] std::vector<std::pair<int, int>> stride_pairs() const;
};

struct LabeledImage {
  std::size_t source_index = 0;
  int label = 0;        // original digit
  int class_index = 0;  // position of the digit in ExperimentConfig::digits
  Matrix normalized;    // resized and Frobenius-normalized
};

struct SampleSplit {
  std::vector<LabeledImage> test;
  std::vector<LabeledImage> train;
  /// Images skipped because they are all zero after resizing.
  std::size_t skipped_degenerate = 0;
};

/// Resize to `side` with bilinear sampling, then normalize.
Matrix preprocess(const MnistImage& image, int side);

/// Keeps the configured digits, shuffles with the seed, takes `samples` test images and
/// the next `train_samples` for training. The two sets are disjoint. Images that are all
/// zero after resizing are skipped.
SampleSplit select_samples(const MnistData& data, const ExperimentConfig& config);

/// CPNN kernel (normalized) plus FC weights retrained on the classical features and clipped to [-1, 1].
RefModel train_model(const std::vector<LabeledImage>& train, const Architecture& arch, const ExperimentConfig& config);

struct ImageOutcome {
  std::size_t index = 0;  // position in the test set
  int true_label = 0;
  int classical_prediction = 0;  // digit
  int quantum_prediction = 0;    // digit
  double max_feature_error = 0.0;
  std::vector<double> classical_scores;
  std::vector<double> quantum_probabilities;
};

struct StrideResult {
  int s = 1;
  int s_prime = 1;
  bool rejected = false;
  std::string reason;
  double quantum_accuracy = 0.0;
  double classical_accuracy = 0.0;
  double agreement = 0.0;
  double max_feature_error = 0.0;
  double mean_feature_error = 0.0;
  double seconds = 0.0;
  std::vector<ImageOutcome> images;
  ResourceBudget budget;
  RefModel model;
};

struct PipelineOptions {
  Backend backend = Backend::kExact;
  int angle_bits = 12;
  int qae_bits = 6;
  LoaderImpl loader = LoaderImpl::kMultiplexed;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  int qubit_budget = kDefaultQubitBudget;
};

/// Quantum pipeline for one normalized image: conv -> pool -> average -> fc -> classify.
/// Returns the class probabilities and, through `features`, the averaged pooled map.
std::vector<double> quantum_pipeline(const Matrix& r, const RefModel& model, const PipelineOptions& options,
                                     Matrix* features = nullptr);

/// Runs every image of `test` through both pipelines. Images run in parallel; results are
/// stored in test order. A failing image aborts with its index.
StrideResult evaluate(const std::vector<LabeledImage>& test, const RefModel& model, const PipelineOptions& options,
                      const std::vector<int>& digits);

struct ExperimentReport {
  std::string config_echo;
  std::size_t skipped_degenerate = 0;
  std::vector<StrideResult> rows;

  /// Structured plain-text report. Wall-clock times are excluded so reruns are byte-identical.
  void write(std::ostream& out) const;
  /// index,true_label,classical_prediction,quantum_prediction,max_feature_error
  static void write_table(std::ostream& out, const StrideResult& row);
};

ExperimentReport run_experiment(const ExperimentConfig& config);

/// Writes report.txt, timing.txt, one predictions table and one model file per stride row.
void write_experiment(const ExperimentReport& report, const std::string& directory);

struct LossComparison {
  LossCurve cpnn;
  LossCurve ccnn;
  double cpnn_gap = 0.0;  // |validation - train| at the final epoch
  double ccnn_gap = 0.0;
  [[nodiscard]] bool cpnn_gap_not_larger() const { return cpnn_gap <= ccnn_gap; }
};

LossComparison compare_losses(const ExperimentConfig& config);
/// cpnn_loss.csv, ccnn_loss.csv (epoch,train,validation) and losses.txt.
void write_loss_comparison(const LossComparison& cmp, const ExperimentConfig& config, const std::string& directory);

}  // namespace qcnn
