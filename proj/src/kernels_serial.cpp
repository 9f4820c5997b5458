// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// Reference kernels. Each one walks the full index range and tests every
// index explicitly; they are deliberately unoptimized.

#include <algorithm>
#include <cmath>

#include "qcnn/kernels.hpp"

namespace qcnn::kernels::serial {

void apply_1q(std::span<Amplitude> amps, int target, const GateMatrix& gate, Condition condition) {
  const BasisIndex bit = BasisIndex{1} << target;
  for (BasisIndex i = 0; i < amps.size(); ++i) {
    if ((i & bit) != 0 || !condition.holds(i)) continue;
    const Amplitude a0 = amps[i];
    const Amplitude a1 = amps[i | bit];
    amps[i] = gate(0, 0) * a0 + gate(0, 1) * a1;
    amps[i | bit] = gate(1, 0) * a0 + gate(1, 1) * a1;
  }
}

void apply_2q(std::span<Amplitude> amps, int q0, int q1, const GateMatrix& gate, Condition condition) {
  const BasisIndex b0 = BasisIndex{1} << q0;
  const BasisIndex b1 = BasisIndex{1} << q1;
  for (BasisIndex i = 0; i < amps.size(); ++i) {
    if ((i & (b0 | b1)) != 0 || !condition.holds(i)) continue;
    const BasisIndex idx[4] = {i, i | b0, i | b1, i | b0 | b1};
    Amplitude in[4];
    for (int k = 0; k < 4; ++k) in[k] = amps[idx[k]];
    for (int r = 0; r < 4; ++r) {
      Amplitude acc = 0;
      for (int c = 0; c < 4; ++c) acc += gate(r, c) * in[c];
      amps[idx[r]] = acc;
    }
  }
}

void apply_phase(std::span<Amplitude> amps, Condition where, Amplitude factor) {
  for (BasisIndex i = 0; i < amps.size(); ++i) {
    if (where.holds(i)) amps[i] *= factor;
  }
}

void apply_xor_rule(std::span<Amplitude> amps, const XorRule& rule) {
  for (BasisIndex i = 0; i < amps.size(); ++i) {
    const BasisIndex j = i ^ rule.flip;
    if (i < j && rule.condition.holds(i)) std::swap(amps[i], amps[j]);
  }
}

void apply_permutation(std::span<Amplitude> amps, std::span<Amplitude> scratch, const PermutationTable& table) {
  BasisIndex support_mask = 0;
  for (int q : table.support) support_mask |= BasisIndex{1} << q;
  for (BasisIndex i = 0; i < amps.size(); ++i) {
    const BasisIndex sub = gather_bits(i, table.support);
    const BasisIndex j = (i & ~support_mask) | scatter_bits(table.image[sub], table.support);
    scratch[j] = amps[i];
  }
  std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(amps.size()), amps.begin());
}

void apply_multiplexed_rotation(std::span<Amplitude> amps, int target, std::span<const int> key_qubits,
                                std::span<const double> angles, Condition condition) {
  const BasisIndex bit = BasisIndex{1} << target;
  for (BasisIndex i = 0; i < amps.size(); ++i) {
    if ((i & bit) != 0 || !condition.holds(i)) continue;
    const double theta = angles[gather_bits(i, key_qubits)];
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Amplitude a0 = amps[i];
    const Amplitude a1 = amps[i | bit];
    amps[i] = c * a0 - s * a1;
    amps[i | bit] = s * a0 + c * a1;
  }
}

double probability(std::span<const Amplitude> amps, Condition where) {
  double total = 0.0;
  for (BasisIndex i = 0; i < amps.size(); ++i) {
    if (where.holds(i)) total += std::norm(amps[i]);
  }
  return total;
}

void marginal(std::span<const Amplitude> amps, int offset, int width, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const BasisIndex m = (BasisIndex{1} << width) - 1;
  for (BasisIndex i = 0; i < amps.size(); ++i) out[(i >> offset) & m] += std::norm(amps[i]);
}

double norm_squared(std::span<const Amplitude> amps) {
  double total = 0.0;
  for (const auto& a : amps) total += std::norm(a);
  return total;
}

}  // namespace qcnn::kernels::serial
