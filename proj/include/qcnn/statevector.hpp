// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// Dense statevector simulation substrate.
//
// Qubit q corresponds to bit q of the basis index (little-endian). A register
// is a contiguous run of qubits whose value is read with its lowest qubit as
// the least significant bit.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qcnn {

using Amplitude = std::complex<double>;
using BasisIndex = std::uint64_t;

inline constexpr int kDefaultQubitBudget = 26;
inline constexpr double kAmplitudeTolerance = 1e-10;
inline constexpr double kProbabilityTolerance = 1e-9;

/// A set of qubits that must hold fixed bit values: `(index & mask) == value`.
struct Condition {
  BasisIndex mask = 0;
  BasisIndex value = 0;

  [[nodiscard]] bool holds(BasisIndex index) const { return (index & mask) == value; }
  [[nodiscard]] Condition with(int qubit, bool bit) const;
  [[nodiscard]] Condition with(const Condition& other) const;
  [[nodiscard]] bool touches(int qubit) const { return (mask >> qubit) & 1U; }
};

struct Control {
  int qubit;
  bool bit = true;
};

Condition to_condition(std::span<const Control> controls);

class GateMatrix {
 public:
  static GateMatrix from_2x2(Amplitude a00, Amplitude a01, Amplitude a10, Amplitude a11);
  static GateMatrix from_4x4(const std::array<Amplitude, 16>& row_major);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] Amplitude operator()(int row, int col) const { return entries_[row * dim_ + col]; }
  [[nodiscard]] GateMatrix adjoint() const;
  [[nodiscard]] bool is_unitary(double tolerance = 1e-12) const;
  [[nodiscard]] bool is_pauli_x() const;

 private:
  GateMatrix() = default;
  int dim_ = 2;
  std::array<Amplitude, 16> entries_{};
};

namespace gates {
GateMatrix hadamard();
GateMatrix pauli_x();
GateMatrix pauli_z();
/// Real rotation [[cos t, -sin t], [sin t, cos t]]; maps |0> to cos t |0> + sin t |1>.
GateMatrix rotation(double theta);
/// diag(1, e^{i phi}).
GateMatrix phase(double phi);
GateMatrix swap();
}  // namespace gates

struct Register {
  std::string name;
  int offset = 0;
  int width = 0;

  [[nodiscard]] int qubit(int bit) const { return offset + bit; }
  [[nodiscard]] BasisIndex mask() const;
  [[nodiscard]] BasisIndex value_of(BasisIndex index) const { return (index >> offset) & ((BasisIndex{1} << width) - 1); }
  [[nodiscard]] BasisIndex place(BasisIndex value) const { return value << offset; }
  /// Condition "this register holds `value`".
  [[nodiscard]] Condition equals(BasisIndex value) const;
  [[nodiscard]] std::vector<int> qubits() const;
};

class RegisterLayout {
 public:
  RegisterLayout() = default;

  /// Appends a register at the next free qubit and returns a copy of it.
  Register add(std::string name, int width);
  [[nodiscard]] const Register& operator[](std::string_view name) const;
  [[nodiscard]] bool contains(std::string_view name) const;
  [[nodiscard]] int total_width() const { return next_offset_; }
  [[nodiscard]] const std::vector<Register>& registers() const { return registers_; }
  /// Union mask of the named registers.
  [[nodiscard]] BasisIndex mask_of(std::span<const std::string> names) const;

 private:
  std::vector<Register> registers_;
  int next_offset_ = 0;
};

class Statevector {
 public:
  explicit Statevector(int num_qubits);

  [[nodiscard]] int num_qubits() const { return num_qubits_; }
  [[nodiscard]] std::size_t size() const { return amplitudes_.size(); }
  [[nodiscard]] std::span<Amplitude> amplitudes() { return amplitudes_; }
  [[nodiscard]] std::span<const Amplitude> amplitudes() const { return amplitudes_; }
  /// Scratch buffer of the same size, allocated on first use (permutation kernels write into it).
  [[nodiscard]] std::span<Amplitude> scratch();
  [[nodiscard]] double norm_squared() const;
  void reset_to_basis(BasisIndex index);

 private:
  int num_qubits_;
  std::vector<Amplitude> amplitudes_;
  std::vector<Amplitude> scratch_;
};

/// |0...0> over the layout's qubits. Throws ResourceError naming `requester` past the budget.
Statevector init_state(const RegisterLayout& layout, int qubit_budget = kDefaultQubitBudget,
                       std::string_view requester = "statevector");
Statevector init_state(int num_qubits, int qubit_budget = kDefaultQubitBudget,
                       std::string_view requester = "statevector");

/// Applies a 2x2 gate to `target` on the subspace where every control holds its required bit.
void apply_gate(Statevector& state, const GateMatrix& gate, int target, std::span<const Control> controls = {});
/// Two-qubit variant for 4x4 gates; `q0` is the low bit of the 4x4 index.
void apply_gate(Statevector& state, const GateMatrix& gate, int q0, int q1, std::span<const Control> controls);

double register_probability(const Statevector& state, const Register& reg, BasisIndex value);
double register_probability(const Statevector& state, const RegisterLayout& layout, std::string_view name,
                            BasisIndex value);
/// Full marginal distribution of one register (length 2^width).
std::vector<double> register_distribution(const Statevector& state, const Register& reg);
double condition_probability(const Statevector& state, const Condition& condition);

using Histogram = std::map<BasisIndex, std::uint64_t>;

/// Multinomial draw of `shots` outcomes from the register marginal; deterministic in `seed`.
Histogram sample(const Statevector& state, const RegisterLayout& layout, std::string_view name, std::uint64_t shots,
                 std::uint64_t seed);

/// Probability mass on "the listed registers, concatenated in list order (first = least significant),
/// equal `expected_value`". Callers compare against 1 - 1e-9.
double assert_disentangled(const Statevector& state, const RegisterLayout& layout,
                           std::span<const std::string> registers, BasisIndex expected_value = 0);

/// |<a|b>|^2.
double fidelity(const Statevector& a, const Statevector& b);

}  // namespace qcnn
