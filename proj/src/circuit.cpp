// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qcnn/circuit.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "qcnn/errors.hpp"

namespace qcnn {

PermutationTable compile_permutation(std::span<const XorRule> rules) {
  BasisIndex support_mask = 0;
  for (const auto& r : rules) support_mask |= r.condition.mask | r.flip;
  PermutationTable table;
  for (int q = 0; q < 64; ++q) {
    if ((support_mask >> q) & 1U) table.support.push_back(q);
  }
  if (table.support.size() > 31) throw ResourceError("permutation support too wide to tabulate");
  const std::size_t entries = std::size_t{1} << table.support.size();
  table.image.resize(entries);
  for (std::size_t s = 0; s < entries; ++s) {
    BasisIndex index = kernels::scatter_bits(s, table.support);
    for (const auto& r : rules) {
      if (r.condition.holds(index)) index ^= r.flip;
    }
    table.image[s] = static_cast<std::uint32_t>(kernels::gather_bits(index, table.support));
  }
  table.build_offsets();
  return table;
}

void PermutationTable::build_offsets() {
  const std::size_t entries = std::size_t{1} << support.size();
  in_offset.resize(entries);
  out_offset.resize(entries);
  for (std::size_t s = 0; s < entries; ++s) {
    in_offset[s] = kernels::scatter_bits(s, support);
    out_offset[s] = kernels::scatter_bits(image[s], support);
  }
}

Circuit::Circuit(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 0 || num_qubits > 63) throw UsageError("circuit qubit count out of range");
}

void Circuit::check_qubit(int q) const {
  if (q < 0 || q >= num_qubits_) {
    throw UsageError("qubit " + std::to_string(q) + " outside circuit of " + std::to_string(num_qubits_));
  }
}

void Circuit::check_condition(Condition c) const {
  if (num_qubits_ < 64 && (c.mask >> num_qubits_) != 0) throw UsageError("condition outside circuit");
  if ((c.value & ~c.mask) != 0) throw UsageError("condition value outside its mask");
}

Circuit& Circuit::gate(const GateMatrix& g, int target, Condition condition) {
  if (g.dim() != 2) throw UsageError("single-target gate must be 2x2");
  check_qubit(target);
  check_condition(condition);
  if (condition.touches(target)) throw UsageError("target qubit " + std::to_string(target) + " is also a control");
  if (g.is_pauli_x()) return xor_rule(XorRule{condition, BasisIndex{1} << target});
  ops_.emplace_back(GateOp{g, target, -1, condition});
  return *this;
}

Circuit& Circuit::gate2(const GateMatrix& g, int q0, int q1, Condition condition) {
  if (g.dim() != 4) throw UsageError("two-target gate must be 4x4");
  check_qubit(q0);
  check_qubit(q1);
  check_condition(condition);
  if (q0 == q1) throw UsageError("two-qubit gate on one qubit");
  if (condition.touches(q0) || condition.touches(q1)) throw UsageError("target qubit is also a control");
  ops_.emplace_back(GateOp{g, q0, q1, condition});
  return *this;
}

Circuit& Circuit::h(int q, Condition condition) { return gate(gates::hadamard(), q, condition); }

Circuit& Circuit::x(int q, Condition condition) {
  check_qubit(q);
  return xor_rule(XorRule{condition, BasisIndex{1} << q});
}

Circuit& Circuit::xor_rule(const XorRule& rule) {
  check_condition(rule.condition);
  if (num_qubits_ < 64 && (rule.flip >> num_qubits_) != 0) throw UsageError("flip outside circuit");
  if ((rule.flip & rule.condition.mask) != 0) throw UsageError("flipped qubit is also a control");
  if (rule.flip != 0) ops_.emplace_back(rule);
  return *this;
}

Circuit& Circuit::swap(int a, int b, Condition condition) {
  check_qubit(a);
  check_qubit(b);
  if (a == b) return *this;
  x(b, condition.with(a, true));
  x(a, condition.with(b, true));
  return x(b, condition.with(a, true));
}

Circuit& Circuit::rotation(int q, double theta, Condition condition) {
  return gate(gates::rotation(theta), q, condition);
}

Circuit& Circuit::mux_rotation(int target, std::vector<int> key_qubits, std::vector<double> angles,
                               Condition condition) {
  check_qubit(target);
  check_condition(condition);
  if (condition.touches(target)) throw UsageError("rotation target is also a control");
  for (int q : key_qubits) {
    check_qubit(q);
    if (q == target) throw UsageError("rotation target is also a key qubit");
  }
  if (angles.size() != (std::size_t{1} << key_qubits.size())) {
    throw UsageError("multiplexed rotation needs 2^k angles");
  }
  ops_.emplace_back(MuxRotationOp{target, std::move(key_qubits), std::move(angles), condition});
  return *this;
}

Circuit& Circuit::phase(Condition where, Amplitude factor) {
  check_condition(where);
  ops_.emplace_back(PhaseOp{where, factor});
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.num_qubits_ > num_qubits_) throw UsageError("appended circuit is wider than the target");
  ops_.insert(ops_.end(), other.ops_.begin(), other.ops_.end());
  return *this;
}

Circuit Circuit::inverse() const {
  Circuit inv(num_qubits_);
  inv.ops_.reserve(ops_.size());
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, GateOp>) {
            inv.ops_.emplace_back(GateOp{op.gate.adjoint(), op.q0, op.q1, op.condition});
          } else if constexpr (std::is_same_v<T, XorRule>) {
            inv.ops_.emplace_back(op);
          } else if constexpr (std::is_same_v<T, MuxRotationOp>) {
            MuxRotationOp m = op;
            for (double& a : m.angles) a = -a;
            inv.ops_.emplace_back(std::move(m));
          } else {
            inv.ops_.emplace_back(PhaseOp{op.where, std::conj(op.factor)});
          }
        },
        *it);
  }
  return inv;
}

Circuit Circuit::controlled(Condition extra) const {
  const int needed = extra.mask == 0 ? 0 : 64 - std::countl_zero(extra.mask);
  Circuit out(std::max(num_qubits_, needed));
  out.ops_.reserve(ops_.size());
  for (const auto& op : ops_) {
    std::visit(
        [&](const auto& o) {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, GateOp>) {
            if (extra.touches(o.q0) || (o.q1 >= 0 && extra.touches(o.q1))) {
              throw UsageError("control overlaps a gate target");
            }
            out.ops_.emplace_back(GateOp{o.gate, o.q0, o.q1, o.condition.with(extra)});
          } else if constexpr (std::is_same_v<T, XorRule>) {
            if ((extra.mask & o.flip) != 0) throw UsageError("control overlaps a flipped qubit");
            out.ops_.emplace_back(XorRule{o.condition.with(extra), o.flip});
          } else if constexpr (std::is_same_v<T, MuxRotationOp>) {
            if (extra.touches(o.target)) throw UsageError("control overlaps a rotation target");
            MuxRotationOp m = o;
            m.condition = o.condition.with(extra);
            out.ops_.emplace_back(std::move(m));
          } else {
            out.ops_.emplace_back(PhaseOp{o.where.with(extra), o.factor});
          }
        },
        op);
  }
  return out;
}

void Circuit::apply(Statevector& state) const { CompiledCircuit(*this).apply(state); }

void Circuit::apply_reference(Statevector& state) const {
  if (state.num_qubits() < num_qubits_) throw UsageError("statevector narrower than circuit");
  auto amps = state.amplitudes();
  for (const auto& op : ops_) {
    std::visit(
        [&](const auto& o) {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, GateOp>) {
            if (o.q1 < 0) {
              kernels::serial::apply_1q(amps, o.q0, o.gate, o.condition);
            } else {
              kernels::serial::apply_2q(amps, o.q0, o.q1, o.gate, o.condition);
            }
          } else if constexpr (std::is_same_v<T, XorRule>) {
            kernels::serial::apply_xor_rule(amps, o);
          } else if constexpr (std::is_same_v<T, MuxRotationOp>) {
            kernels::serial::apply_multiplexed_rotation(amps, o.target, o.key_qubits, o.angles, o.condition);
          } else {
            kernels::serial::apply_phase(amps, o.where, o.factor);
          }
        },
        op);
  }
}

CompiledCircuit::CompiledCircuit(const Circuit& circuit, int max_table_support) : num_qubits_(circuit.num_qubits()) {
  std::vector<XorRule> run;
  auto flush = [&] {
    if (run.empty()) return;
    if (run.size() == 1) {
      steps_.emplace_back(run.front());
      run.clear();
      return;
    }
    BasisIndex support = 0;
    for (const auto& r : run) support |= r.condition.mask | r.flip;
    if (std::popcount(support) <= max_table_support) {
      steps_.emplace_back(compile_permutation(run));
    } else {
      for (const auto& r : run) steps_.emplace_back(r);
    }
    run.clear();
  };
  for (const auto& op : circuit.ops()) {
    if (const auto* rule = std::get_if<XorRule>(&op)) {
      run.push_back(*rule);
      continue;
    }
    flush();
    std::visit(
        [&](const auto& o) {
          using T = std::decay_t<decltype(o)>;
          if constexpr (!std::is_same_v<T, XorRule>) steps_.emplace_back(o);
        },
        op);
  }
  flush();
}

void CompiledCircuit::apply(Statevector& state) const {
  if (state.num_qubits() < num_qubits_) throw UsageError("statevector narrower than circuit");
  const bool needs_scratch =
      std::any_of(steps_.begin(), steps_.end(), [](const Step& s) { return std::holds_alternative<PermutationTable>(s); });
  apply(state.amplitudes(), needs_scratch ? state.scratch() : std::span<Amplitude>{});
}

void CompiledCircuit::apply(std::span<Amplitude> amps, std::span<Amplitude> scratch) const {
  for (const auto& step : steps_) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, GateOp>) {
            if (s.q1 < 0) {
              kernels::parallel::apply_1q(amps, s.q0, s.gate, s.condition);
            } else {
              kernels::parallel::apply_2q(amps, s.q0, s.q1, s.gate, s.condition);
            }
          } else if constexpr (std::is_same_v<T, XorRule>) {
            kernels::parallel::apply_xor_rule(amps, s);
          } else if constexpr (std::is_same_v<T, PermutationTable>) {
            kernels::parallel::apply_permutation(amps, scratch, s);
          } else if constexpr (std::is_same_v<T, MuxRotationOp>) {
            kernels::parallel::apply_multiplexed_rotation(amps, s.target, s.key_qubits, s.angles, s.condition);
          } else {
            kernels::parallel::apply_phase(amps, s.where, s.factor);
          }
        },
        step);
  }
}

void CompiledCircuit::apply_on_blocks(Statevector& state, Condition block_condition, std::size_t repeat) const {
  if (state.num_qubits() < num_qubits_) throw UsageError("statevector narrower than circuit");
  const BasisIndex low_mask = (BasisIndex{1} << num_qubits_) - 1;
  if ((block_condition.mask & low_mask) != 0) throw UsageError("block condition overlaps the circuit's qubits");
  const std::size_t block = std::size_t{1} << num_qubits_;
  auto amps = state.amplitudes();
  auto scratch = state.scratch();
  for (std::size_t base = 0; base < amps.size(); base += block) {
    if (!block_condition.holds(base)) continue;
    auto a = amps.subspan(base, block);
    auto s = scratch.subspan(base, block);
    for (std::size_t r = 0; r < repeat; ++r) apply(a, s);
  }
}

}  // namespace qcnn
