// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qcnn/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "qcnn/errors.hpp"
#include "qcnn/kernels.hpp"

namespace qcnn {

Condition Condition::with(int qubit, bool bit) const {
  const BasisIndex b = BasisIndex{1} << qubit;
  if ((mask & b) != 0 && (((value & b) != 0) != bit)) {
    throw UsageError("contradictory condition on qubit " + std::to_string(qubit));
  }
  return Condition{mask | b, bit ? (value | b) : (value & ~b)};
}

Condition Condition::with(const Condition& other) const {
  const BasisIndex overlap = mask & other.mask;
  if ((value & overlap) != (other.value & overlap)) throw UsageError("contradictory conditions");
  return Condition{mask | other.mask, value | other.value};
}

Condition to_condition(std::span<const Control> controls) {
  Condition c;
  for (const auto& ctl : controls) c = c.with(ctl.qubit, ctl.bit);
  return c;
}

GateMatrix GateMatrix::from_2x2(Amplitude a00, Amplitude a01, Amplitude a10, Amplitude a11) {
  GateMatrix m;
  m.dim_ = 2;
  m.entries_[0] = a00;
  m.entries_[1] = a01;
  m.entries_[2] = a10;
  m.entries_[3] = a11;
  return m;
}

GateMatrix GateMatrix::from_4x4(const std::array<Amplitude, 16>& row_major) {
  GateMatrix m;
  m.dim_ = 4;
  m.entries_ = row_major;
  return m;
}

GateMatrix GateMatrix::adjoint() const {
  GateMatrix m;
  m.dim_ = dim_;
  for (int r = 0; r < dim_; ++r) {
    for (int c = 0; c < dim_; ++c) m.entries_[r * dim_ + c] = std::conj(entries_[c * dim_ + r]);
  }
  return m;
}

bool GateMatrix::is_unitary(double tolerance) const {
  for (int r = 0; r < dim_; ++r) {
    for (int c = 0; c < dim_; ++c) {
      Amplitude acc = 0;
      for (int k = 0; k < dim_; ++k) acc += std::conj((*this)(k, r)) * (*this)(k, c);
      if (std::abs(acc - Amplitude(r == c ? 1.0 : 0.0)) > tolerance) return false;
    }
  }
  return true;
}

bool GateMatrix::is_pauli_x() const {
  return dim_ == 2 && entries_[0] == Amplitude(0) && entries_[1] == Amplitude(1) && entries_[2] == Amplitude(1) &&
         entries_[3] == Amplitude(0);
}

namespace gates {

GateMatrix hadamard() {
  const double h = std::numbers::sqrt2 / 2.0;
  return GateMatrix::from_2x2(h, h, h, -h);
}

GateMatrix pauli_x() { return GateMatrix::from_2x2(0, 1, 1, 0); }

GateMatrix pauli_z() { return GateMatrix::from_2x2(1, 0, 0, -1); }

GateMatrix rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return GateMatrix::from_2x2(c, -s, s, c);
}

GateMatrix phase(double phi) { return GateMatrix::from_2x2(1, 0, 0, std::polar(1.0, phi)); }

GateMatrix swap() {
  std::array<Amplitude, 16> m{};
  m[0] = m[6] = m[9] = m[15] = 1.0;
  return GateMatrix::from_4x4(m);
}

}  // namespace gates

BasisIndex Register::mask() const { return ((BasisIndex{1} << width) - 1) << offset; }

Condition Register::equals(BasisIndex v) const {
  if (width < 64 && v >> width != 0) {
    throw UsageError("value " + std::to_string(v) + " does not fit register " + name);
  }
  return Condition{mask(), place(v)};
}

std::vector<int> Register::qubits() const {
  std::vector<int> out(static_cast<std::size_t>(width));
  for (int b = 0; b < width; ++b) out[b] = offset + b;
  return out;
}

Register RegisterLayout::add(std::string name, int width) {
  if (width < 0) throw UsageError("negative register width for " + name);
  if (contains(name)) throw UsageError("duplicate register name " + name);
  registers_.push_back(Register{std::move(name), next_offset_, width});
  next_offset_ += width;
  return registers_.back();
}

const Register& RegisterLayout::operator[](std::string_view name) const {
  for (const auto& r : registers_) {
    if (r.name == name) return r;
  }
  throw UsageError("unknown register '" + std::string(name) + "'");
}

bool RegisterLayout::contains(std::string_view name) const {
  return std::any_of(registers_.begin(), registers_.end(), [&](const Register& r) { return r.name == name; });
}

BasisIndex RegisterLayout::mask_of(std::span<const std::string> names) const {
  BasisIndex m = 0;
  for (const auto& n : names) m |= (*this)[n].mask();
  return m;
}

Statevector::Statevector(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 0 || num_qubits > 40) throw UsageError("unsupported qubit count");
  amplitudes_.assign(std::size_t{1} << num_qubits, Amplitude(0.0));
  amplitudes_[0] = 1.0;
}

std::span<Amplitude> Statevector::scratch() {
  if (scratch_.size() != amplitudes_.size()) scratch_.resize(amplitudes_.size());
  return scratch_;
}

double Statevector::norm_squared() const { return kernels::parallel::norm_squared(amplitudes_); }

void Statevector::reset_to_basis(BasisIndex index) {
  std::fill(amplitudes_.begin(), amplitudes_.end(), Amplitude(0.0));
  amplitudes_.at(index) = 1.0;
}

Statevector init_state(int num_qubits, int qubit_budget, std::string_view requester) {
  if (num_qubits > qubit_budget) {
    std::ostringstream msg;
    msg << requester << " requires " << num_qubits << " qubits, exceeding the budget of " << qubit_budget;
    throw ResourceError(msg.str());
  }
  return Statevector(num_qubits);
}

Statevector init_state(const RegisterLayout& layout, int qubit_budget, std::string_view requester) {
  return init_state(layout.total_width(), qubit_budget, requester);
}

namespace {

void check_qubit(const Statevector& state, int q) {
  if (q < 0 || q >= state.num_qubits()) throw UsageError("qubit index " + std::to_string(q) + " out of range");
}

}  // namespace

void apply_gate(Statevector& state, const GateMatrix& gate, int target, std::span<const Control> controls) {
  if (gate.dim() != 2) throw UsageError("apply_gate with one target expects a 2x2 gate");
  check_qubit(state, target);
  for (const auto& c : controls) {
    check_qubit(state, c.qubit);
    if (c.qubit == target) throw UsageError("target qubit " + std::to_string(target) + " is also a control");
  }
  kernels::parallel::apply_1q(state.amplitudes(), target, gate, to_condition(controls));
}

void apply_gate(Statevector& state, const GateMatrix& gate, int q0, int q1, std::span<const Control> controls) {
  if (gate.dim() != 4) throw UsageError("two-target apply_gate expects a 4x4 gate");
  check_qubit(state, q0);
  check_qubit(state, q1);
  if (q0 == q1) throw UsageError("two-qubit gate on a single qubit");
  for (const auto& c : controls) {
    check_qubit(state, c.qubit);
    if (c.qubit == q0 || c.qubit == q1) throw UsageError("target qubit is also a control");
  }
  kernels::parallel::apply_2q(state.amplitudes(), q0, q1, gate, to_condition(controls));
}

double register_probability(const Statevector& state, const Register& reg, BasisIndex value) {
  if (reg.offset + reg.width > state.num_qubits()) throw UsageError("register " + reg.name + " outside statevector");
  if (reg.width < 64 && (value >> reg.width) != 0) {
    throw UsageError("value " + std::to_string(value) + " exceeds register " + reg.name);
  }
  return kernels::parallel::probability(state.amplitudes(), reg.equals(value));
}

double register_probability(const Statevector& state, const RegisterLayout& layout, std::string_view name,
                            BasisIndex value) {
  return register_probability(state, layout[name], value);
}

std::vector<double> register_distribution(const Statevector& state, const Register& reg) {
  std::vector<double> out(std::size_t{1} << reg.width);
  kernels::parallel::marginal(state.amplitudes(), reg.offset, reg.width, out);
  return out;
}

double condition_probability(const Statevector& state, const Condition& condition) {
  return kernels::parallel::probability(state.amplitudes(), condition);
}

Histogram sample(const Statevector& state, const RegisterLayout& layout, std::string_view name, std::uint64_t shots,
                 std::uint64_t seed) {
  if (shots == 0) throw UsageError("sample needs at least one shot");
  const auto dist = register_distribution(state, layout[name]);
  std::vector<double> cdf(dist.size());
  std::partial_sum(dist.begin(), dist.end(), cdf.begin());
  const double total = cdf.back();
  std::mt19937_64 rng(seed);
  Histogram hist;
  for (std::uint64_t s = 0; s < shots; ++s) {
    // 53 random bits -> [0, 1); avoids implementation-defined distribution classes.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    // Skip zero-probability bins that share a cdf value with their predecessor.
    while (dist[static_cast<std::size_t>(it - cdf.begin())] == 0.0 && it != cdf.begin()) --it;
    ++hist[static_cast<BasisIndex>(it - cdf.begin())];
  }
  return hist;
}

double assert_disentangled(const Statevector& state, const RegisterLayout& layout,
                           std::span<const std::string> registers, BasisIndex expected_value) {
  Condition cond;
  int shift = 0;
  for (const auto& name : registers) {
    const Register& r = layout[name];
    const BasisIndex part = (expected_value >> shift) & ((BasisIndex{1} << r.width) - 1);
    cond = cond.with(r.equals(part));
    shift += r.width;
  }
  return kernels::parallel::probability(state.amplitudes(), cond);
}

double fidelity(const Statevector& a, const Statevector& b) {
  if (a.size() != b.size()) throw UsageError("fidelity of statevectors with different sizes");
  Amplitude overlap = 0;
  const auto x = a.amplitudes();
  const auto y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) overlap += std::conj(x[i]) * y[i];
  return std::norm(overlap);
}

}  // namespace qcnn
