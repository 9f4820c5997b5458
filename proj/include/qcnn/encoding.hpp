// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// Classical-to-quantum data path: Frobenius normalization, arccos angles,
// fixed-point quantization, QRAM emulation and rotation loaders.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qcnn/circuit.hpp"

namespace qcnn {

/// Dense row-major real matrix. (r, c) is row r, column c.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  [[nodiscard]] bool square() const { return rows == cols; }
  [[nodiscard]] double frobenius_norm() const;
};

/// Raw image of side M with values in [0, 255].
class ImageTensor {
 public:
  explicit ImageTensor(Matrix pixels);
  [[nodiscard]] int side() const { return pixels_.rows; }
  [[nodiscard]] const Matrix& pixels() const { return pixels_; }
  [[nodiscard]] double norm() const { return norm_; }

 private:
  Matrix pixels_;
  double norm_;
};

/// Filter of side N; entries may be negative.
class KernelWeights {
 public:
  explicit KernelWeights(Matrix weights);
  [[nodiscard]] int side() const { return weights_.rows; }
  [[nodiscard]] const Matrix& weights() const { return weights_; }
  [[nodiscard]] double norm() const { return norm_; }

 private:
  Matrix weights_;
  double norm_;
};

/// Divides by the Frobenius norm. Throws DegenerateInputError on an all-zero matrix.
Matrix normalize(const Matrix& m);
Matrix normalize(const ImageTensor& image);
Matrix normalize(const KernelWeights& kernel);

/// L-bit truncation of theta/pi: theta ~ sum_l bit_l 2^{-l} pi, bit 1 most significant.
class FixedPointAngle {
 public:
  FixedPointAngle() = default;
  FixedPointAngle(std::uint64_t code, int bits);

  [[nodiscard]] int bits() const { return bits_; }
  /// Integer value of the bit string (bit 1 is the top bit).
  [[nodiscard]] std::uint64_t code() const { return code_; }
  /// Bit l for l = 1..L.
  [[nodiscard]] bool bit(int l) const;
  [[nodiscard]] double reconstruct() const;
  [[nodiscard]] std::string to_string() const;
  static FixedPointAngle parse(const std::string& bits);

  bool operator==(const FixedPointAngle&) const = default;

 private:
  std::uint64_t code_ = 0;
  int bits_ = 0;
};

/// Quantizes arccos(value). Throws DomainError for |value| > 1.
FixedPointAngle angle_of(double value, int bits);

/// Index-addressed angle table.
struct QramTable {
  int angle_bits = 0;
  std::vector<FixedPointAngle> entries;

  static QramTable from_values(std::span<const double> values, int angle_bits);
  [[nodiscard]] std::size_t size() const { return entries.size(); }
  /// Reconstructed angles padded with zeros to `count` entries.
  [[nodiscard]] std::vector<double> angles(std::size_t count) const;
  /// Rows "index, angle_bits", preceded by a comment line.
  void write(std::ostream& out) const;
  static QramTable read(std::istream& in);
};

/// XORs table[m] into `angle_out` on each branch with index m. The angle bit of weight
/// 2^{-l} lives on qubit angle_out.offset + (L - l), so the register reads as code().
void qram_oracle(Circuit& c, const Register& index, const Register& angle_out, const QramTable& table,
                 Condition control = {});

/// Oracle, L controlled rotations R(2^{-l} pi) onto `data_qubit`, inverse oracle.
void loader_O(Circuit& c, const Register& index, const Register& angle_scratch, int data_qubit,
              const QramTable& table, Condition control = {});

/// Same action as loader_O as a single uniformly controlled rotation; needs no scratch.
void loader_multiplexed(Circuit& c, const Register& index, int data_qubit, const QramTable& table,
                        Condition control = {});

enum class LoaderImpl { kMultiplexed, kQram };

/// Dispatches to one of the two loaders; `scratch` is only read for kQram.
void load_values(Circuit& c, LoaderImpl impl, const Register& index, const Register* scratch, int data_qubit,
                 const QramTable& table, Condition control = {});

/// Prepares the uniform superposition over values [0, count) of `reg` from |0>.
/// Hadamards when count is a power of two, a conditioned rotation tree otherwise.
void prepare_uniform(Circuit& c, const Register& reg, BasisIndex count, Condition control = {});

/// Register width used for an index over `count` values: max(1, ceil(log2 count)).
int index_width(BasisIndex count);

}  // namespace qcnn
