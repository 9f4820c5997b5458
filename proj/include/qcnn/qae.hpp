// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// Amplitude estimation by phase estimation of the Grover iterate
// Q = -A S1 A^dagger S0, with a t-qubit phase register placed above A's qubits.

#pragma once

#include <cstdint>
#include <vector>

#include "qcnn/circuit.hpp"

namespace qcnn {

/// State preparation A acting on qubits [0, a.num_qubits()) from the basis state
/// `initial_index`. `scope` selects the qubits S1 reflects about; qubits outside it
/// hold a fixed classical prefix that A never changes.
struct AmplitudeProblem {
  Circuit a{0};
  Condition good;
  BasisIndex scope = 0;
  BasisIndex initial_index = 0;
  /// Optional preparation of the prefix qubits (outside `scope`) before A; empty means none.
  Circuit prefix{0};
};

/// How the controlled powers of Q are evaluated. Both give the same state.
///   kControlledPowers  Q^{2^j} applied on every block whose phase qubit j is set (the textbook ladder)
///   kSharedPowers      block y receives Q^y by one more Q on a copy of block y - 1; 2^t - 1 applications
enum class PowerSchedule { kControlledPowers, kSharedPowers };

struct QaeOptions {
  /// 0: read the exact phase-register distribution; otherwise the modal outcome of this many shots.
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  /// Run the whole estimation circuit backwards afterwards and record the return fidelity.
  bool verify_uncompute = false;
  int qubit_budget = kDefaultQubitBudget;
  PowerSchedule schedule = PowerSchedule::kSharedPowers;
};

struct QaeResult {
  int t = 0;
  /// Modal raw outcome y in [0, 2^t) (the lower of the folded pair when both are present).
  BasisIndex raw_outcome = 0;
  /// min(y, 2^t - y): both signs of the eigenphase fold onto [0, 2^{t-1}].
  BasisIndex folded_outcome = 0;
  /// folded_outcome / 2^t, an estimate of theta/pi in [0, 1/2].
  double theta_tilde = 0.0;
  /// Folded probability of the modal outcome.
  double modal_probability = 0.0;
  /// Folded probability within one grid step of the modal outcome.
  double confidence = 0.0;
  /// Exact distribution of the raw phase register (length 2^t).
  std::vector<double> distribution;
  /// Probability of returning to the initial state after uncomputation; negative if not run.
  double uncompute_fidelity = -1.0;
};

/// Grover iterate on A's qubits.
Circuit grover_iterate(const AmplitudeProblem& problem);

/// Quantum Fourier transform on qubits [offset, offset + width), little-endian.
Circuit qft(int num_qubits, int offset, int width);

/// Runs H^t, controlled Q^{2^j} on phase qubit j and the inverse QFT; returns the full
/// state (work qubits low, phase register above).
Statevector run_phase_estimation(const AmplitudeProblem& problem, int t, int qubit_budget = kDefaultQubitBudget,
                                 PowerSchedule schedule = PowerSchedule::kControlledPowers);

/// Phase estimation with controlled Q^{2^j} on phase qubit j and an inverse QFT.
QaeResult qae_estimate(const AmplitudeProblem& problem, int t, const QaeOptions& options = {});

/// Probability of the good subspace after A, read from amplitudes. When `uncompute_fidelity`
/// is non-null, A^dagger is applied afterwards and the return probability stored there.
double good_probability(const AmplitudeProblem& problem, double* uncompute_fidelity = nullptr,
                        int qubit_budget = kDefaultQubitBudget);

/// Folds a raw phase distribution onto outcomes 0..2^{t-1}.
std::vector<double> fold_distribution(const std::vector<double>& raw);

}  // namespace qcnn
