// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// Quantum convolution, pooling and fully connected layers.
//
// Each feature is estimated from its own state preparation A (per-feature mode):
// the output coordinate is loaded as a classical prefix, A prepares a state whose
// good-subspace probability is an affine function of the feature, and either the
// exact backend reads that probability from the amplitudes or the circuit backend
// runs amplitude estimation on it.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcnn/encoding.hpp"
#include "qcnn/qae.hpp"

namespace qcnn {

enum class Backend { kExact, kCircuit };

std::string to_string(Backend b);
Backend parse_backend(const std::string& s);

struct ConvConfig {
  int M = 4;
  int N = 2;
  int s = 1;
  int L = 12;
  int t = 6;
  Backend backend = Backend::kExact;
  LoaderImpl loader = LoaderImpl::kMultiplexed;
  QaeOptions qae;
  /// Run A^dagger (or the inverse estimation circuit) and check the scratch registers.
  bool verify_uncompute = true;
  /// Circuit mode: decode through the fixed-point lookup circuit instead of classically.
  bool circuit_decode = true;

  [[nodiscard]] int output_side() const;
  /// Throws UsageError / DomainError on an invalid configuration.
  void validate() const;
  [[nodiscard]] std::string describe() const;
};

struct PoolConfig {
  int M_prime = 2;
  int N_prime = 2;
  int s_prime = 1;
  int L = 12;
  int t = 6;
  Backend backend = Backend::kExact;
  LoaderImpl loader = LoaderImpl::kMultiplexed;
  QaeOptions qae;
  bool verify_uncompute = true;
  bool circuit_decode = true;
  /// Input features are divided by this before the rotation (|value| <= 1 required)
  /// and the decoded sum is multiplied back. 0 means "use the map's recorded bound".
  double input_scale = 0.0;

  [[nodiscard]] int output_side() const;
  void validate() const;
  [[nodiscard]] std::string describe() const;
};

/// K class weight matrices of side M-bar, entries in [-1, 1].
struct FcWeights {
  int K = 2;
  int side = 1;
  std::vector<Matrix> weights;

  void validate() const;
};

struct FeatureMap {
  Matrix features;
  /// Producing layer and its resolved configuration.
  std::string layer;
  std::string config;
  /// Bound on |feature| used to scale values into [-1, 1] downstream.
  double scale = 1.0;

  [[nodiscard]] int side() const { return features.rows; }
  void write(std::ostream& out) const;
  static FeatureMap read(std::istream& in);
};

struct LayerDiagnostics {
  int work_qubits = 0;
  int total_qubits = 0;
  /// Smallest disentanglement fidelity seen (1 when unchecked).
  double min_uncompute_fidelity = 1.0;
  std::vector<QaeResult> qae;
  /// Good-subspace probabilities per feature (exact backend, or the estimate's sin^2).
  std::vector<double> good_probabilities;
};

/// Register map of the convolution circuit (A's qubits only; the phase register sits above).
RegisterLayout conv_layout(const ConvConfig& config);

/// State preparation for output position (row x', column y'); r and w are normalized.
AmplitudeProblem build_conv_A(const ConvConfig& config, const Matrix& r, const Matrix& w, int x_prime, int y_prime);

/// Names of the convolution scratch registers that must return to |0>.
std::vector<std::string> conv_scratch_registers(const ConvConfig& config);

/// a * sin^2(pi theta_tilde) - b, the affine decode shared by all layers.
double decode_affine(double theta_tilde, double a, double b);
/// 2 N^2 sin^2(pi theta_tilde) - N^2.
double decode_feature(double theta_tilde, int N);
/// Decode through a fixed-point lookup circuit U_f on a (t-bit outcome, 2t-bit value) register pair:
/// value code = floor(sin^2(pi y / 2^t) 2^{2t}), returned as a * code / 2^{2t} - b.
double decode_feature_circuit(BasisIndex folded_outcome, int t, double a, double b);

FeatureMap conv_layer(const ConvConfig& config, const ImageTensor& image, const KernelWeights& kernel,
                      LayerDiagnostics* diagnostics = nullptr);
/// Same, on already normalized matrices.
FeatureMap conv_layer(const ConvConfig& config, const Matrix& r, const Matrix& w,
                      LayerDiagnostics* diagnostics = nullptr);

/// Coherent variant for 2x2 images: all output positions in superposition through a single
/// amplitude estimation; features are read from the phase distribution conditioned on c1.
FeatureMap conv_layer_coherent(const ConvConfig& config, const Matrix& r, const Matrix& w,
                               LayerDiagnostics* diagnostics = nullptr);

RegisterLayout pool_layout(const PoolConfig& config);
/// State preparation for pooled position (x'', y'') over scaled features v in [-1, 1].
AmplitudeProblem build_pool_A(const PoolConfig& config, const Matrix& v, int x2, int y2);
std::vector<std::string> pool_scratch_registers(const PoolConfig& config);

/// Window sums of the input features.
FeatureMap pool_layer(const PoolConfig& config, const FeatureMap& input, LayerDiagnostics* diagnostics = nullptr);

struct FcOptions {
  int L = 12;
  LoaderImpl loader = LoaderImpl::kMultiplexed;
  /// 0 reads Prob(k, 0) from amplitudes; otherwise estimates it from this many samples.
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  int qubit_budget = kDefaultQubitBudget;
};

RegisterLayout fc_layout(int side, int K, const FcOptions& options);
/// Prob(k, 0) for k = 0..K-1; `features` must lie in [-1, 1].
std::vector<double> fc_layer(const Matrix& features, const FcWeights& weights, const FcOptions& options = {});

/// Argmax; ties go to the lowest index.
int classify(const std::vector<double>& prob);

}  // namespace qcnn
