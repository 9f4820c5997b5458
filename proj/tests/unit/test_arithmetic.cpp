// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// Exhaustive truth tables: every basis input is run through the circuit and the
// output must be a single basis state holding the classically computed value.

#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "qcnn/arithmetic.hpp"
#include "qcnn/errors.hpp"
#include "test_util.hpp"

namespace qcnn {
namespace {

// Runs `circuit` on every basis input over `input_mask` and compares with `expected(input)`.
int count_failures(const Circuit& circuit, int qubits, BasisIndex input_mask,
                   const std::function<BasisIndex(BasisIndex)>& expected) {
  const CompiledCircuit compiled(circuit);
  int failures = 0;
  for (BasisIndex in = 0; in < (BasisIndex{1} << qubits); ++in) {
    if ((in & ~input_mask) != 0) continue;
    Statevector s(qubits);
    s.reset_to_basis(in);
    compiled.apply(s);
    if (std::abs(std::norm(s.amplitudes()[expected(in)]) - 1.0) > 1e-12) ++failures;
  }
  return failures;
}

double inverse_round_trip(const Circuit& c, int qubits, BasisIndex support, std::uint64_t seed) {
  // Random superposition over the operand qubits; ancillas stay |0>.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Statevector s(qubits);
  double n2 = 0.0;
  for (BasisIndex i = 0; i < s.size(); ++i) {
    if ((i & ~support) != 0) continue;
    s.amplitudes()[i] = {g(rng), g(rng)};
    n2 += std::norm(s.amplitudes()[i]);
  }
  for (auto& a : s.amplitudes()) a /= std::sqrt(n2);
  const Statevector before = s;
  c.apply(s);
  c.inverse().apply(s);
  return fidelity(s, before);
}

TEST(Arithmetic, AdderExhaustiveAllWidthPairs) {
  for (int wa = 1; wa <= 4; ++wa) {
    for (int wb = 1; wb <= 4; ++wb) {
      RegisterLayout lay;
      const Register a = lay.add("a", wa);
      const Register b = lay.add("b", wb);
      const Register anc = lay.add("anc", 1);
      Circuit c(lay.total_width());
      add_in_place(c, BasisInt::full(a), BasisInt::full(b), anc.offset, Overflow::kModular);
      const BasisIndex mod = BasisIndex{1} << wb;
      const int failures = count_failures(c, lay.total_width(), a.mask() | b.mask(), [&](BasisIndex in) {
        const BasisIndex x = a.value_of(in), y = b.value_of(in);
        return a.place(x) | b.place((x + y) % mod);
      });
      EXPECT_EQ(failures, 0) << "wa=" << wa << " wb=" << wb;
      EXPECT_GE(inverse_round_trip(c, lay.total_width(), a.mask() | b.mask(), 1), 1.0 - 1e-10);
    }
  }
}

TEST(Arithmetic, ControlledAdderActsOnlyWhenControlHolds) {
  RegisterLayout lay;
  const Register a = lay.add("a", 3);
  const Register b = lay.add("b", 3);
  const Register anc = lay.add("anc", 1);
  const Register ctl = lay.add("ctl", 1);
  Circuit c(lay.total_width());
  add_in_place(c, BasisInt::full(a), BasisInt::full(b), anc.offset, Overflow::kModular, ctl.equals(1));
  const int failures =
      count_failures(c, lay.total_width(), a.mask() | b.mask() | ctl.mask(), [&](BasisIndex in) {
        const BasisIndex x = a.value_of(in), y = b.value_of(in);
        if (ctl.value_of(in) == 0) return in;
        return a.place(x) | b.place((x + y) % 8) | ctl.place(1);
      });
  EXPECT_EQ(failures, 0);
}

TEST(Arithmetic, CheckedAdderRejectsPossibleOverflow) {
  RegisterLayout lay;
  const Register a = lay.add("a", 2);
  const Register b = lay.add("b", 2);
  lay.add("anc", 1);
  Circuit c(lay.total_width());
  EXPECT_THROW(add_in_place(c, BasisInt::full(a), BasisInt::full(b), 4, Overflow::kChecked), UsageError);
  EXPECT_NO_THROW(add_in_place(c, BasisInt(a, 1), BasisInt(b, 2), 4, Overflow::kChecked));
  EXPECT_THROW(add_in_place(c, BasisInt::full(a), BasisInt::full(a), 4), UsageError);
}

TEST(Arithmetic, MultiplyExhaustiveWithAccumulator) {
  // a, b and the accumulator are all 4 bits: 4096 cases.
  RegisterLayout lay;
  const Register a = lay.add("a", 4);
  const Register b = lay.add("b", 4);
  const Register out = lay.add("out", 4);
  const Register anc = lay.add("anc", 1);
  Circuit c(lay.total_width());
  multiply(c, BasisInt::full(a), BasisInt::full(b), BasisInt::full(out), anc.offset, Overflow::kModular);
  const int failures =
      count_failures(c, lay.total_width(), a.mask() | b.mask() | out.mask(), [&](BasisIndex in) {
        const BasisIndex x = a.value_of(in), y = b.value_of(in), z = out.value_of(in);
        return a.place(x) | b.place(y) | out.place((z + x * y) % 16);
      });
  EXPECT_EQ(failures, 0);
  EXPECT_GE(inverse_round_trip(c, lay.total_width(), a.mask() | b.mask() | out.mask(), 2), 1.0 - 1e-10);
}

TEST(Arithmetic, MultiplySmallWidthsIntoWideOutput) {
  for (int wa = 1; wa <= 3; ++wa) {
    for (int wb = 1; wb <= 3; ++wb) {
      RegisterLayout lay;
      const Register a = lay.add("a", wa);
      const Register b = lay.add("b", wb);
      const Register out = lay.add("out", wa + wb);
      const Register anc = lay.add("anc", 1);
      Circuit c(lay.total_width());
      multiply(c, BasisInt::full(a), BasisInt::full(b), BasisInt(out, 0), anc.offset, Overflow::kChecked);
      const int failures = count_failures(c, lay.total_width(), a.mask() | b.mask(), [&](BasisIndex in) {
        const BasisIndex x = a.value_of(in), y = b.value_of(in);
        return in | out.place(x * y);
      });
      EXPECT_EQ(failures, 0) << "wa=" << wa << " wb=" << wb;
    }
  }
}

TEST(Arithmetic, CheckedMultiplyRejectsNarrowOutput) {
  RegisterLayout lay;
  const Register a = lay.add("a", 3);
  const Register b = lay.add("b", 3);
  const Register out = lay.add("out", 4);
  lay.add("anc", 1);
  Circuit c(lay.total_width());
  EXPECT_THROW(multiply(c, BasisInt::full(a), BasisInt::full(b), BasisInt(out, 0), 10), UsageError);
}

TEST(Arithmetic, IndexMapExhaustive) {
  // (x', y') in 2 bits each, (i, j) in 1 bit each, s in 2 bits, outputs 4 bits each.
  RegisterLayout lay;
  const Register xr = lay.add("x", 2);
  const Register yr = lay.add("y", 2);
  const Register ir = lay.add("i", 1);
  const Register jr = lay.add("j", 1);
  const Register sr = lay.add("s", 2);
  const Register orow = lay.add("orow", 4);
  const Register ocol = lay.add("ocol", 4);
  const Register anc = lay.add("anc", 1);
  Circuit c(lay.total_width());
  index_map(c, {BasisInt::full(xr), BasisInt::full(yr)}, {BasisInt::full(ir), BasisInt::full(jr)}, BasisInt::full(sr),
            {BasisInt(orow, 0), BasisInt(ocol, 0)}, anc.offset, Overflow::kChecked);
  const BasisIndex inputs = xr.mask() | yr.mask() | ir.mask() | jr.mask() | sr.mask();
  const int failures = count_failures(c, lay.total_width(), inputs, [&](BasisIndex in) {
    const BasisIndex s = sr.value_of(in);
    return in | orow.place(xr.value_of(in) * s + ir.value_of(in)) | ocol.place(yr.value_of(in) * s + jr.value_of(in));
  });
  EXPECT_EQ(failures, 0);
  EXPECT_GE(inverse_round_trip(c, lay.total_width(), inputs, 3), 1.0 - 1e-10);
}

TEST(Arithmetic, ComparatorExhaustive) {
  for (int w = 1; w <= 4; ++w) {
    RegisterLayout lay;
    const Register m = lay.add("m", w);
    const Register mt = lay.add("mt", w);
    const Register flag = lay.add("flag", 1);
    Circuit c(lay.total_width());
    comparator_uc(c, m, mt, flag.offset);
    const int failures = count_failures(c, lay.total_width(), m.mask() | mt.mask() | flag.mask(), [&](BasisIndex in) {
      const bool eq = m.value_of(in) == mt.value_of(in);
      return eq ? in ^ flag.mask() : in;
    });
    EXPECT_EQ(failures, 0) << "w=" << w;
    EXPECT_GE(inverse_round_trip(c, lay.total_width(), m.mask() | mt.mask() | flag.mask(), 4), 1.0 - 1e-10);
  }
}

TEST(Arithmetic, LoadStride) {
  RegisterLayout lay;
  const Register s = lay.add("s", 3);
  Statevector st = init_state(lay);
  load_stride(st, s, 5);
  EXPECT_NEAR(register_probability(st, s, 5), 1.0, 1e-15);
  Circuit c(3);
  EXPECT_THROW(load_stride(c, s, 0), DomainError);
  EXPECT_THROW(load_stride(c, s, 9), UsageError);
}

TEST(Arithmetic, BitWidth) {
  EXPECT_EQ(bit_width_of(0), 1);
  EXPECT_EQ(bit_width_of(1), 1);
  EXPECT_EQ(bit_width_of(2), 2);
  EXPECT_EQ(bit_width_of(7), 3);
  EXPECT_EQ(bit_width_of(8), 4);
}

}  // namespace
}  // namespace qcnn
