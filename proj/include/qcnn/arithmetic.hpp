// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// Reversible basis-encoded arithmetic. Every builder appends gates to a
// Circuit and accepts an extra `control` condition applied to all of them.

#pragma once

#include "qcnn/circuit.hpp"
#include "qcnn/statevector.hpp"

namespace qcnn {

/// Unsigned integer held in a register, with the largest value it may carry.
struct BasisInt {
  Register reg;
  BasisIndex max_value = 0;

  BasisInt() = default;
  BasisInt(Register r, BasisIndex max);
  /// Full range of the register.
  static BasisInt full(const Register& r);
};

/// kChecked rejects at build time any operation whose result could exceed the target width.
/// kModular wraps modulo 2^width (exhaustive tests use it on full-range operands).
enum class Overflow { kChecked, kModular };

/// Number of bits needed for `v` (at least 1).
int bit_width_of(BasisIndex v);

/// b <- a + b (mod 2^b.width); `ancilla` must be |0> and is returned to |0>.
/// Ripple-carry (majority / unmajority-and-add) adder. Returns the updated description of b.
BasisInt add_in_place(Circuit& c, const BasisInt& a, const BasisInt& b, int ancilla,
                      Overflow policy = Overflow::kChecked, Condition control = {});

/// out <- out + a*b by shift-and-add; with out initially |0> this is a*b.
BasisInt multiply(Circuit& c, const BasisInt& a, const BasisInt& b, const BasisInt& out, int ancilla,
                  Overflow policy = Overflow::kChecked, Condition control = {});

/// X on the set bits of s. Throws DomainError for s = 0.
BasisInt load_stride(Circuit& c, const Register& s_register, BasisIndex s, Condition control = {});

struct IndexPair {
  BasisInt row;
  BasisInt col;
};

/// out <- (coarse.row * s + offset.row, coarse.col * s + offset.col); `out` must start at |0>.
IndexPair index_map(Circuit& c, const IndexPair& coarse, const IndexPair& offset, const BasisInt& stride,
                    const IndexPair& out, int ancilla, Overflow policy = Overflow::kChecked, Condition control = {});

/// Flips `flag` on branches where m == m_tilde. Works in place on m_tilde and restores it.
void comparator_uc(Circuit& c, const Register& m, const Register& m_tilde, int flag, Condition control = {});

// Statevector conveniences: build the circuit over the state's width and apply it.
void add_in_place(Statevector& state, const BasisInt& a, const BasisInt& b, int ancilla,
                  Overflow policy = Overflow::kChecked);
void multiply(Statevector& state, const BasisInt& a, const BasisInt& b, const BasisInt& out, int ancilla,
              Overflow policy = Overflow::kChecked);
void load_stride(Statevector& state, const Register& s_register, BasisIndex s);
void comparator_uc(Statevector& state, const Register& m, const Register& m_tilde, int flag);

}  // namespace qcnn
