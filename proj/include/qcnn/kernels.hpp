// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// Amplitude-array kernels. Two implementations share one signature set:
//
//   kernels::serial    straightforward full-index loops; the reference used by tests
//   kernels::parallel  pair-enumerating loops, OpenMP-parallel over disjoint index chunks
//
// Every kernel works on a span of 2^n amplitudes, so callers may hand in a
// sub-block of a larger statevector (see Circuit::apply_on_blocks).

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qcnn/statevector.hpp"

namespace qcnn {

/// A reversible classical map on basis states, restricted to a set of support qubits:
/// index bits outside `support` pass through, the support bits are replaced by `image[sub]`.
struct PermutationTable {
  std::vector<int> support;           // qubit positions, low to high
  std::vector<std::uint32_t> image;   // size 2^support.size()
  /// Optional scatter caches: in_offset[s] = scatter(s), out_offset[s] = scatter(image[s]).
  std::vector<BasisIndex> in_offset;
  std::vector<BasisIndex> out_offset;

  void build_offsets();
};

/// One multi-controlled NOT: if `condition` holds, XOR `flip` into the index.
struct XorRule {
  Condition condition;
  BasisIndex flip = 0;
};

/// Folds a sequence of XorRules into a lookup table over their joint support.
PermutationTable compile_permutation(std::span<const XorRule> rules);

namespace kernels {

#define QCNN_KERNEL_DECLS                                                                                        \
  void apply_1q(std::span<Amplitude> amps, int target, const GateMatrix& gate, Condition condition);             \
  void apply_2q(std::span<Amplitude> amps, int q0, int q1, const GateMatrix& gate, Condition condition);         \
  void apply_phase(std::span<Amplitude> amps, Condition where, Amplitude factor);                                \
  void apply_xor_rule(std::span<Amplitude> amps, const XorRule& rule);                                           \
  void apply_permutation(std::span<Amplitude> amps, std::span<Amplitude> scratch, const PermutationTable& table); \
  void apply_multiplexed_rotation(std::span<Amplitude> amps, int target, std::span<const int> key_qubits,        \
                                  std::span<const double> angles, Condition condition);                          \
  double probability(std::span<const Amplitude> amps, Condition where);                                          \
  void marginal(std::span<const Amplitude> amps, int offset, int width, std::span<double> out);                  \
  double norm_squared(std::span<const Amplitude> amps);

namespace serial {
QCNN_KERNEL_DECLS
}  // namespace serial

namespace parallel {
QCNN_KERNEL_DECLS
}  // namespace parallel

#undef QCNN_KERNEL_DECLS

/// Gathers the bits of `index` at `positions` into a compact integer (positions[0] -> bit 0).
inline BasisIndex gather_bits(BasisIndex index, std::span<const int> positions) {
  BasisIndex out = 0;
  for (std::size_t b = 0; b < positions.size(); ++b) {
    out |= ((index >> positions[b]) & 1U) << b;
  }
  return out;
}

inline BasisIndex scatter_bits(BasisIndex compact, std::span<const int> positions) {
  BasisIndex out = 0;
  for (std::size_t b = 0; b < positions.size(); ++b) {
    out |= ((compact >> b) & 1U) << positions[b];
  }
  return out;
}

}  // namespace kernels
}  // namespace qcnn
