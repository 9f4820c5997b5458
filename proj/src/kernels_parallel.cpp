// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// Production kernels. Loops enumerate only the index pairs a gate touches
// (insert a zero bit at the target position) and split them across OpenMP
// threads; no two iterations write the same amplitude. Small arrays and
// calls made from inside an enclosing parallel region run single-threaded.

#include <algorithm>
#include <cmath>
#include <vector>

#if defined(QCNN_USE_OPENMP)
#include <omp.h>
#endif

#include "qcnn/kernels.hpp"

namespace qcnn::kernels::parallel {
namespace {

constexpr std::int64_t kParallelThreshold = std::int64_t{1} << 14;

inline BasisIndex insert_zero(BasisIndex k, int position) {
  const BasisIndex low = k & ((BasisIndex{1} << position) - 1);
  return ((k >> position) << (position + 1)) | low;
}

inline bool go_parallel(std::int64_t iterations) {
#if defined(QCNN_USE_OPENMP)
  return iterations >= kParallelThreshold && !omp_in_parallel();
#else
  (void)iterations;
  return false;
#endif
}

}  // namespace

void apply_1q(std::span<Amplitude> amps, int target, const GateMatrix& gate, Condition condition) {
  const BasisIndex bit = BasisIndex{1} << target;
  const auto pairs = static_cast<std::int64_t>(amps.size() / 2);
  const Amplitude g00 = gate(0, 0), g01 = gate(0, 1), g10 = gate(1, 0), g11 = gate(1, 1);
#pragma omp parallel for schedule(static) if (go_parallel(pairs))
  for (std::int64_t k = 0; k < pairs; ++k) {
    const BasisIndex i = insert_zero(static_cast<BasisIndex>(k), target);
    if (!condition.holds(i)) continue;
    const Amplitude a0 = amps[i];
    const Amplitude a1 = amps[i | bit];
    amps[i] = g00 * a0 + g01 * a1;
    amps[i | bit] = g10 * a0 + g11 * a1;
  }
}

void apply_2q(std::span<Amplitude> amps, int q0, int q1, const GateMatrix& gate, Condition condition) {
  const BasisIndex b0 = BasisIndex{1} << q0;
  const BasisIndex b1 = BasisIndex{1} << q1;
  const int lo = std::min(q0, q1);
  const int hi = std::max(q0, q1);
  const auto quads = static_cast<std::int64_t>(amps.size() / 4);
#pragma omp parallel for schedule(static) if (go_parallel(quads))
  for (std::int64_t k = 0; k < quads; ++k) {
    const BasisIndex i = insert_zero(insert_zero(static_cast<BasisIndex>(k), lo), hi);
    if (!condition.holds(i)) continue;
    const BasisIndex idx[4] = {i, i | b0, i | b1, i | b0 | b1};
    Amplitude in[4];
    for (int c = 0; c < 4; ++c) in[c] = amps[idx[c]];
    for (int r = 0; r < 4; ++r) {
      Amplitude acc = 0;
      for (int c = 0; c < 4; ++c) acc += gate(r, c) * in[c];
      amps[idx[r]] = acc;
    }
  }
}

void apply_phase(std::span<Amplitude> amps, Condition where, Amplitude factor) {
  const auto n = static_cast<std::int64_t>(amps.size());
#pragma omp parallel for schedule(static) if (go_parallel(n))
  for (std::int64_t i = 0; i < n; ++i) {
    if (where.holds(static_cast<BasisIndex>(i))) amps[i] *= factor;
  }
}

void apply_xor_rule(std::span<Amplitude> amps, const XorRule& rule) {
  if (rule.flip == 0) return;
  // Pair each index with its partner across the highest flipped bit.
  const int top = 63 - __builtin_clzll(rule.flip);
  const auto pairs = static_cast<std::int64_t>(amps.size() / 2);
#pragma omp parallel for schedule(static) if (go_parallel(pairs))
  for (std::int64_t k = 0; k < pairs; ++k) {
    const BasisIndex i = insert_zero(static_cast<BasisIndex>(k), top);
    if (rule.condition.holds(i)) std::swap(amps[i], amps[i ^ rule.flip]);
  }
}

void apply_permutation(std::span<Amplitude> amps, std::span<Amplitude> scratch, const PermutationTable& table) {
  const std::size_t width = table.support.size();
  const std::size_t inner = std::size_t{1} << width;
  PermutationTable local;
  const PermutationTable* t = &table;
  if (table.in_offset.size() != inner) {
    local = table;
    local.build_offsets();
    t = &local;
  }
  std::vector<int> sorted = table.support;
  std::sort(sorted.begin(), sorted.end());
  const auto outer = static_cast<std::int64_t>(amps.size() >> width);
  const BasisIndex* in_off = t->in_offset.data();
  const BasisIndex* out_off = t->out_offset.data();
#pragma omp parallel for schedule(static) if (go_parallel(static_cast<std::int64_t>(amps.size())))
  for (std::int64_t o = 0; o < outer; ++o) {
    BasisIndex base = static_cast<BasisIndex>(o);
    for (int q : sorted) base = insert_zero(base, q);
    for (std::size_t s = 0; s < inner; ++s) scratch[base | out_off[s]] = amps[base | in_off[s]];
  }
  std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(amps.size()), amps.begin());
}

void apply_multiplexed_rotation(std::span<Amplitude> amps, int target, std::span<const int> key_qubits,
                                std::span<const double> angles, Condition condition) {
  std::vector<double> cosines(angles.size());
  std::vector<double> sines(angles.size());
  for (std::size_t k = 0; k < angles.size(); ++k) {
    cosines[k] = std::cos(angles[k]);
    sines[k] = std::sin(angles[k]);
  }
  const BasisIndex bit = BasisIndex{1} << target;
  const auto pairs = static_cast<std::int64_t>(amps.size() / 2);
#pragma omp parallel for schedule(static) if (go_parallel(pairs))
  for (std::int64_t k = 0; k < pairs; ++k) {
    const BasisIndex i = insert_zero(static_cast<BasisIndex>(k), target);
    if (!condition.holds(i)) continue;
    const BasisIndex key = gather_bits(i, key_qubits);
    const double c = cosines[key];
    const double s = sines[key];
    const Amplitude a0 = amps[i];
    const Amplitude a1 = amps[i | bit];
    amps[i] = c * a0 - s * a1;
    amps[i | bit] = s * a0 + c * a1;
  }
}

double probability(std::span<const Amplitude> amps, Condition where) {
  const auto n = static_cast<std::int64_t>(amps.size());
  double total = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : total) if (go_parallel(n))
  for (std::int64_t i = 0; i < n; ++i) {
    if (where.holds(static_cast<BasisIndex>(i))) total += std::norm(amps[i]);
  }
  return total;
}

void marginal(std::span<const Amplitude> amps, int offset, int width, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const BasisIndex m = (BasisIndex{1} << width) - 1;
  const auto n = static_cast<std::int64_t>(amps.size());
#pragma omp parallel if (go_parallel(n))
  {
    std::vector<double> local(out.size(), 0.0);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) local[(static_cast<BasisIndex>(i) >> offset) & m] += std::norm(amps[i]);
#pragma omp critical
    for (std::size_t v = 0; v < out.size(); ++v) out[v] += local[v];
  }
}

double norm_squared(std::span<const Amplitude> amps) {
  const auto n = static_cast<std::int64_t>(amps.size());
  double total = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : total) if (go_parallel(n))
  for (std::int64_t i = 0; i < n; ++i) total += std::norm(amps[i]);
  return total;
}

}  // namespace qcnn::kernels::parallel
