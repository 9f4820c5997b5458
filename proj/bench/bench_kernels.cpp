// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against the OpenMP kernels on the same inputs.

#include <benchmark/benchmark.h>

#include <random>

#include "qcnn/circuit.hpp"
#include "qcnn/kernels.hpp"

namespace {

using qcnn::Amplitude;
using qcnn::Condition;

std::vector<Amplitude> random_amps(int qubits) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<Amplitude> a(std::size_t{1} << qubits);
  for (auto& x : a) x = {g(rng), g(rng)};
  return a;
}

template <bool Parallel>
void BM_Hadamard(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto amps = random_amps(n);
  const auto h = qcnn::gates::hadamard();
  for (auto _ : state) {
    for (int q = 0; q < n; ++q) {
      if constexpr (Parallel) {
        qcnn::kernels::parallel::apply_1q(amps, q, h, Condition{});
      } else {
        qcnn::kernels::serial::apply_1q(amps, q, h, Condition{});
      }
    }
    benchmark::DoNotOptimize(amps.data());
  }
  state.SetItemsProcessed(state.iterations() * n * static_cast<std::int64_t>(amps.size()));
}

template <bool Parallel>
void BM_MuxRotation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto amps = random_amps(n);
  const std::vector<int> keys{0, 1, 2, 3};
  std::vector<double> angles(16);
  for (std::size_t k = 0; k < angles.size(); ++k) angles[k] = 0.1 * static_cast<double>(k);
  const Condition cond = Condition{}.with(5, true);
  for (auto _ : state) {
    if constexpr (Parallel) {
      qcnn::kernels::parallel::apply_multiplexed_rotation(amps, n - 1, keys, angles, cond);
    } else {
      qcnn::kernels::serial::apply_multiplexed_rotation(amps, n - 1, keys, angles, cond);
    }
    benchmark::DoNotOptimize(amps.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(amps.size()));
}

template <bool Parallel>
void BM_Permutation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto amps = random_amps(n);
  std::vector<Amplitude> scratch(amps.size());
  // Increment of a 6-bit register at qubits 2..7 as a chain of multi-controlled flips.
  std::vector<qcnn::XorRule> rules;
  for (int b = 5; b >= 0; --b) {
    Condition c;
    for (int j = 0; j < b; ++j) c = c.with(2 + j, true);
    rules.push_back({c, qcnn::BasisIndex{1} << (2 + b)});
  }
  const auto table = qcnn::compile_permutation(rules);
  for (auto _ : state) {
    if constexpr (Parallel) {
      qcnn::kernels::parallel::apply_permutation(amps, scratch, table);
    } else {
      qcnn::kernels::serial::apply_permutation(amps, scratch, table);
    }
    benchmark::DoNotOptimize(amps.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(amps.size()));
}

}  // namespace

BENCHMARK(BM_Hadamard<false>)->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(BM_Hadamard<true>)->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(BM_MuxRotation<false>)->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(BM_MuxRotation<true>)->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(BM_Permutation<false>)->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(BM_Permutation<true>)->Arg(12)->Arg(16)->Arg(20);

BENCHMARK_MAIN();
