// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// Gate-list circuits over a fixed qubit count, with inversion, control and a
// compiled form that fuses runs of classical reversible gates into one
// permutation pass.

#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "qcnn/kernels.hpp"
#include "qcnn/statevector.hpp"

namespace qcnn {

/// A 2x2 gate on `q0` (q1 < 0) or a 4x4 gate on (q0, q1), applied where `condition` holds.
struct GateOp {
  GateMatrix gate;
  int q0 = 0;
  int q1 = -1;
  Condition condition;
};

/// R(angles[key]) on `target`, with `key` read from `key_qubits` (first = least significant).
struct MuxRotationOp {
  int target = 0;
  std::vector<int> key_qubits;
  std::vector<double> angles;
  Condition condition;
};

/// Multiplies every amplitude satisfying `where` by `factor`.
struct PhaseOp {
  Condition where;
  Amplitude factor = 1.0;
};

using Op = std::variant<GateOp, XorRule, MuxRotationOp, PhaseOp>;

class Circuit {
 public:
  explicit Circuit(int num_qubits);

  [[nodiscard]] int num_qubits() const { return num_qubits_; }
  [[nodiscard]] const std::vector<Op>& ops() const { return ops_; }
  [[nodiscard]] std::size_t size() const { return ops_.size(); }

  Circuit& gate(const GateMatrix& g, int target, Condition condition = {});
  Circuit& gate2(const GateMatrix& g, int q0, int q1, Condition condition = {});
  Circuit& h(int q, Condition condition = {});
  Circuit& x(int q, Condition condition = {});
  Circuit& xor_rule(const XorRule& rule);
  Circuit& swap(int a, int b, Condition condition = {});
  Circuit& rotation(int q, double theta, Condition condition = {});
  Circuit& mux_rotation(int target, std::vector<int> key_qubits, std::vector<double> angles, Condition condition = {});
  Circuit& phase(Condition where, Amplitude factor);
  Circuit& append(const Circuit& other);

  [[nodiscard]] Circuit inverse() const;
  /// Every op additionally conditioned on `extra`; the qubit count grows to cover it.
  [[nodiscard]] Circuit controlled(Condition extra) const;

  /// Compiles with the parallel kernels and runs.
  void apply(Statevector& state) const;
  /// Op-by-op through the serial kernels, no fusion.
  void apply_reference(Statevector& state) const;

 private:
  void check_qubit(int q) const;
  void check_condition(Condition c) const;
  int num_qubits_;
  std::vector<Op> ops_;
};

/// Executable form of a Circuit. Runs of consecutive XorRules whose joint support is at
/// most `max_table_support` qubits become a single PermutationTable.
class CompiledCircuit {
 public:
  explicit CompiledCircuit(const Circuit& circuit, int max_table_support = 20);

  [[nodiscard]] int num_qubits() const { return num_qubits_; }
  [[nodiscard]] std::size_t pass_count() const { return steps_.size(); }

  void apply(Statevector& state) const;
  /// Runs on a raw amplitude block of length 2^num_qubits.
  void apply(std::span<Amplitude> amps, std::span<Amplitude> scratch) const;
  /// Treats the state as consecutive blocks of 2^num_qubits amplitudes and runs the circuit
  /// `repeat` times on each block whose (shared) high bits satisfy `block_condition`.
  /// Equivalent to the circuit controlled on `block_condition`, repeated.
  void apply_on_blocks(Statevector& state, Condition block_condition, std::size_t repeat = 1) const;

 private:
  using Step = std::variant<GateOp, XorRule, PermutationTable, MuxRotationOp, PhaseOp>;
  int num_qubits_;
  std::vector<Step> steps_;
};

}  // namespace qcnn
