// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qcnn/qae.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcnn/errors.hpp"

namespace qcnn {

Circuit grover_iterate(const AmplitudeProblem& problem) {
  const int w = problem.a.num_qubits();
  Circuit q(w);
  q.phase(problem.good, -1.0);
  q.append(problem.a.inverse());
  q.phase(Condition{problem.scope, problem.initial_index & problem.scope}, -1.0);
  q.append(problem.a);
  q.phase(Condition{}, -1.0);
  return q;
}

Circuit qft(int num_qubits, int offset, int width) {
  Circuit c(num_qubits);
  for (int j = width - 1; j >= 0; --j) {
    c.h(offset + j);
    for (int m = j - 1; m >= 0; --m) {
      const double phi = std::numbers::pi / static_cast<double>(BasisIndex{1} << (j - m));
      c.phase(Condition{}.with(offset + j, true).with(offset + m, true), std::polar(1.0, phi));
    }
  }
  for (int i = 0; i < width / 2; ++i) c.swap(offset + i, offset + width - 1 - i);
  return c;
}

std::vector<double> fold_distribution(const std::vector<double>& raw) {
  const std::size_t n = raw.size();
  std::vector<double> folded(n / 2 + 1, 0.0);
  for (std::size_t y = 0; y < n; ++y) folded[std::min(y, n - y)] += raw[y];
  return folded;
}

namespace {

void check_problem(const AmplitudeProblem& p) {
  const int w = p.a.num_qubits();
  const BasisIndex all = (BasisIndex{1} << w) - 1;
  if ((p.good.mask & ~all) != 0 || (p.scope & ~all) != 0 || (p.initial_index & ~all) != 0) {
    throw UsageError("amplitude problem refers to qubits outside A");
  }
}

}  // namespace

double good_probability(const AmplitudeProblem& problem, double* uncompute_fidelity, int qubit_budget) {
  check_problem(problem);
  Statevector state = init_state(problem.a.num_qubits(), qubit_budget, "state preparation");
  state.reset_to_basis(problem.initial_index);
  if (problem.prefix.size() > 0) problem.prefix.apply(state);
  problem.a.apply(state);
  const double p = condition_probability(state, problem.good);
  if (uncompute_fidelity != nullptr) {
    problem.a.inverse().apply(state);
    if (problem.prefix.size() > 0) problem.prefix.inverse().apply(state);
    *uncompute_fidelity = std::norm(state.amplitudes()[problem.initial_index]);
  }
  return p;
}

Statevector run_phase_estimation(const AmplitudeProblem& problem, int t, int qubit_budget, PowerSchedule schedule) {
  check_problem(problem);
  if (t < 1) throw UsageError("phase register needs at least one qubit");
  const int w = problem.a.num_qubits();
  const int n = w + t;
  Statevector state = init_state(n, qubit_budget, "amplitude estimation");
  state.reset_to_basis(problem.initial_index);

  Register phase{"phase", w, t};
  if (problem.prefix.size() > 0) CompiledCircuit(problem.prefix).apply_on_blocks(state, phase.equals(0));
  CompiledCircuit(problem.a).apply_on_blocks(state, phase.equals(0));
  for (int j = 0; j < t; ++j) apply_gate(state, gates::hadamard(), phase.qubit(j));
  const CompiledCircuit q(grover_iterate(problem));
  if (schedule == PowerSchedule::kControlledPowers) {
    for (int j = 0; j < t; ++j) {
      q.apply_on_blocks(state, Condition{}.with(phase.qubit(j), true), std::size_t{1} << j);
    }
  } else {
    const std::size_t block = std::size_t{1} << w;
    auto amps = state.amplitudes();
    auto scratch = state.scratch();
    for (std::size_t y = 1; y < (std::size_t{1} << t); ++y) {
      auto prev = amps.subspan((y - 1) * block, block);
      auto cur = amps.subspan(y * block, block);
      std::copy(prev.begin(), prev.end(), cur.begin());
      q.apply(cur, scratch.subspan(0, block));
    }
  }
  CompiledCircuit(qft(n, w, t).inverse()).apply(state);
  return state;
}

QaeResult qae_estimate(const AmplitudeProblem& problem, int t, const QaeOptions& options) {
  Statevector state = run_phase_estimation(problem, t, options.qubit_budget, options.schedule);
  const int w = problem.a.num_qubits();
  const int n = w + t;
  RegisterLayout layout;
  layout.add("work", w);
  const Register& phase = layout.add("phase", t);

  QaeResult result;
  result.t = t;
  result.distribution = register_distribution(state, phase);
  auto folded = fold_distribution(result.distribution);
  std::vector<double> pick = folded;
  if (options.shots > 0) {
    const Histogram hist = sample(state, layout, "phase", options.shots, options.seed);
    std::fill(pick.begin(), pick.end(), 0.0);
    const std::size_t size = result.distribution.size();
    for (const auto& [y, count] : hist) pick[std::min<std::size_t>(y, size - y)] += static_cast<double>(count);
  }
  const auto mode = static_cast<std::size_t>(std::max_element(pick.begin(), pick.end()) - pick.begin());
  result.folded_outcome = mode;
  result.raw_outcome = mode;
  result.theta_tilde = std::ldexp(static_cast<double>(mode), -t);
  result.modal_probability = folded[mode];
  double near = folded[mode];
  if (mode > 0) near += folded[mode - 1];
  if (mode + 1 < folded.size()) near += folded[mode + 1];
  result.confidence = near;

  if (options.verify_uncompute) {
    CompiledCircuit(qft(n, w, t)).apply(state);
    const CompiledCircuit q_inv(grover_iterate(problem).inverse());
    for (int j = t - 1; j >= 0; --j) {
      q_inv.apply_on_blocks(state, Condition{}.with(phase.qubit(j), true), std::size_t{1} << j);
    }
    for (int j = 0; j < t; ++j) apply_gate(state, gates::hadamard(), phase.qubit(j));
    CompiledCircuit(problem.a.inverse()).apply_on_blocks(state, phase.equals(0));
    if (problem.prefix.size() > 0) {
      CompiledCircuit(problem.prefix.inverse()).apply_on_blocks(state, phase.equals(0));
    }
    result.uncompute_fidelity = std::norm(state.amplitudes()[problem.initial_index]);
  }
  return result;
}

}  // namespace qcnn
