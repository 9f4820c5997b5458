// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qcnn/arithmetic.hpp"

#include <algorithm>
#include <string>

#include "qcnn/errors.hpp"

namespace qcnn {
namespace {

BasisIndex width_max(int width) { return width >= 64 ? ~BasisIndex{0} : (BasisIndex{1} << width) - 1; }

Register slice(const Register& r, int from, int width) {
  return Register{r.name + "[" + std::to_string(from) + ":]", r.offset + from, width};
}

void cnot(Circuit& c, int ctl, int target, Condition control) { c.x(target, control.with(ctl, true)); }

void toffoli(Circuit& c, int c0, int c1, int target, Condition control) {
  c.x(target, control.with(c0, true).with(c1, true));
}

void maj(Circuit& c, int x, int y, int z, Condition control) {
  cnot(c, z, y, control);
  cnot(c, z, x, control);
  toffoli(c, x, y, z, control);
}

void uma(Circuit& c, int x, int y, int z, Condition control) {
  toffoli(c, x, y, z, control);
  cnot(c, z, x, control);
  cnot(c, x, y, control);
}

// r <- r + 1 on branches where `control` holds.
void increment(Circuit& c, const Register& r, Condition control) {
  for (int i = r.width - 1; i >= 0; --i) {
    Condition cond = control;
    for (int k = 0; k < i; ++k) cond = cond.with(r.qubit(k), true);
    c.x(r.qubit(i), cond);
  }
}

void check_disjoint(const Register& a, const Register& b) {
  if ((a.mask() & b.mask()) != 0) throw UsageError("registers " + a.name + " and " + b.name + " overlap");
}

}  // namespace

BasisInt::BasisInt(Register r, BasisIndex max) : reg(std::move(r)), max_value(max) {
  if (max_value > width_max(reg.width)) {
    throw UsageError("register " + reg.name + " of width " + std::to_string(reg.width) + " cannot hold " +
                     std::to_string(max_value));
  }
}

BasisInt BasisInt::full(const Register& r) { return BasisInt(r, width_max(r.width)); }

int bit_width_of(BasisIndex v) {
  int w = 1;
  while (w < 64 && (v >> w) != 0) ++w;
  return w;
}

BasisInt add_in_place(Circuit& c, const BasisInt& a, const BasisInt& b, int ancilla, Overflow policy,
                      Condition control) {
  check_disjoint(a.reg, b.reg);
  if (a.reg.mask() & (BasisIndex{1} << ancilla) || b.reg.mask() & (BasisIndex{1} << ancilla)) {
    throw UsageError("adder ancilla overlaps an operand");
  }
  const BasisIndex limit = width_max(b.reg.width);
  BasisIndex result_max = limit;
  if (policy == Overflow::kChecked) {
    if (a.max_value > limit || b.max_value > limit - a.max_value) {
      throw UsageError("sum " + a.reg.name + " + " + b.reg.name + " may overflow " +
                       std::to_string(b.reg.width) + " bits");
    }
    result_max = a.max_value + b.max_value;
  }
  // Only the low b.width bits of a contribute modulo 2^b.width.
  const int n = std::min(a.reg.width, b.reg.width);
  if (n == 0) return BasisInt(b.reg, result_max);

  maj(c, ancilla, b.reg.qubit(0), a.reg.qubit(0), control);
  for (int i = 1; i < n; ++i) maj(c, a.reg.qubit(i - 1), b.reg.qubit(i), a.reg.qubit(i), control);
  // a_{n-1} now holds the carry out of the low n bits.
  if (b.reg.width > n) {
    increment(c, slice(b.reg, n, b.reg.width - n), control.with(a.reg.qubit(n - 1), true));
  }
  for (int i = n - 1; i >= 1; --i) uma(c, a.reg.qubit(i - 1), b.reg.qubit(i), a.reg.qubit(i), control);
  uma(c, ancilla, b.reg.qubit(0), a.reg.qubit(0), control);
  return BasisInt(b.reg, result_max);
}

BasisInt multiply(Circuit& c, const BasisInt& a, const BasisInt& b, const BasisInt& out, int ancilla,
                  Overflow policy, Condition control) {
  check_disjoint(a.reg, b.reg);
  check_disjoint(a.reg, out.reg);
  check_disjoint(b.reg, out.reg);
  const BasisIndex limit = width_max(out.reg.width);
  BasisIndex result_max = limit;
  if (policy == Overflow::kChecked) {
    if (a.max_value != 0 && b.max_value > (limit - out.max_value) / a.max_value) {
      throw UsageError("product " + a.reg.name + " * " + b.reg.name + " may overflow " +
                       std::to_string(out.reg.width) + " bits");
    }
    result_max = out.max_value + a.max_value * b.max_value;
  }
  for (int k = 0; k < b.reg.width && k < out.reg.width; ++k) {
    if (policy == Overflow::kChecked && ((b.max_value >> k) == 0)) break;
    const Register target = slice(out.reg, k, out.reg.width - k);
    add_in_place(c, a, BasisInt::full(target), ancilla, Overflow::kModular, control.with(b.reg.qubit(k), true));
  }
  return BasisInt(out.reg, result_max);
}

BasisInt load_stride(Circuit& c, const Register& s_register, BasisIndex s, Condition control) {
  if (s == 0) throw DomainError("stride must be a positive integer");
  if (s > width_max(s_register.width)) {
    throw UsageError("stride " + std::to_string(s) + " does not fit register " + s_register.name);
  }
  for (int b = 0; b < s_register.width; ++b) {
    if ((s >> b) & 1U) c.x(s_register.qubit(b), control);
  }
  return BasisInt(s_register, s);
}

IndexPair index_map(Circuit& c, const IndexPair& coarse, const IndexPair& offset, const BasisInt& stride,
                    const IndexPair& out, int ancilla, Overflow policy, Condition control) {
  IndexPair result;
  result.row = multiply(c, coarse.row, stride, out.row, ancilla, policy, control);
  result.row = add_in_place(c, offset.row, result.row, ancilla, policy, control);
  result.col = multiply(c, coarse.col, stride, out.col, ancilla, policy, control);
  result.col = add_in_place(c, offset.col, result.col, ancilla, policy, control);
  return result;
}

void comparator_uc(Circuit& c, const Register& m, const Register& m_tilde, int flag, Condition control) {
  if (m.width != m_tilde.width) {
    throw UsageError("comparator registers " + m.name + " and " + m_tilde.name + " differ in width");
  }
  check_disjoint(m, m_tilde);
  const BasisIndex flag_bit = BasisIndex{1} << flag;
  if ((m.mask() | m_tilde.mask()) & flag_bit) throw UsageError("comparator flag overlaps a register");
  auto forward = [&] {
    for (int b = 0; b < m.width; ++b) cnot(c, m.qubit(b), m_tilde.qubit(b), control);
    for (int b = 0; b < m.width; ++b) c.x(m_tilde.qubit(b), control);
  };
  forward();
  // m_tilde is all ones exactly when the registers were equal.
  c.x(flag, control.with(m_tilde.equals(width_max(m_tilde.width))));
  for (int b = m.width - 1; b >= 0; --b) c.x(m_tilde.qubit(b), control);
  for (int b = m.width - 1; b >= 0; --b) cnot(c, m.qubit(b), m_tilde.qubit(b), control);
}

void add_in_place(Statevector& state, const BasisInt& a, const BasisInt& b, int ancilla, Overflow policy) {
  Circuit c(state.num_qubits());
  add_in_place(c, a, b, ancilla, policy);
  c.apply(state);
}

void multiply(Statevector& state, const BasisInt& a, const BasisInt& b, const BasisInt& out, int ancilla,
              Overflow policy) {
  Circuit c(state.num_qubits());
  multiply(c, a, b, out, ancilla, policy);
  c.apply(state);
}

void load_stride(Statevector& state, const Register& s_register, BasisIndex s) {
  Circuit c(state.num_qubits());
  load_stride(c, s_register, s);
  c.apply(state);
}

void comparator_uc(Statevector& state, const Register& m, const Register& m_tilde, int flag) {
  Circuit c(state.num_qubits());
  comparator_uc(c, m, m_tilde, flag);
  c.apply(state);
}

}  // namespace qcnn
