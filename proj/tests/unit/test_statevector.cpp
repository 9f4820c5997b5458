// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qcnn/errors.hpp"
#include "qcnn/statevector.hpp"
#include "test_util.hpp"

namespace qcnn {
namespace {

TEST(Statevector, InitStateIsAllZeros) {
  RegisterLayout lay;
  lay.add("a", 3);
  lay.add("b", 2);
  const Statevector s = init_state(lay);
  EXPECT_EQ(s.num_qubits(), 5);
  EXPECT_EQ(s.size(), 32u);
  EXPECT_EQ(s.amplitudes()[0], Amplitude(1.0));
  EXPECT_NEAR(s.norm_squared(), 1.0, 1e-15);
}

TEST(Statevector, BudgetViolationNamesRequester) {
  try {
    (void)init_state(30, 26, "convolution layer");
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_STREQ(e.what(), "convolution layer requires 30 qubits, exceeding the budget of 26");
  }
}

TEST(Statevector, QubitZeroIsLeastSignificantBit) {
  Statevector s(3);
  const Control on0[] = {{0, true}};
  apply_gate(s, gates::pauli_x(), 0, {});
  EXPECT_NEAR(std::abs(s.amplitudes()[1]), 1.0, 1e-15);
  apply_gate(s, gates::pauli_x(), 2, on0);
  EXPECT_NEAR(std::abs(s.amplitudes()[0b101]), 1.0, 1e-15);
}

TEST(Statevector, RotationConvention) {
  Statevector s(1);
  const double theta = 0.4;
  apply_gate(s, gates::rotation(theta), 0);
  EXPECT_NEAR(s.amplitudes()[0].real(), std::cos(theta), 1e-15);
  EXPECT_NEAR(s.amplitudes()[1].real(), std::sin(theta), 1e-15);
}

TEST(Statevector, HadamardTwiceIsIdentity) {
  std::mt19937_64 rng(1);
  Statevector s = testing::random_state(4, rng);
  const Statevector before = s;
  apply_gate(s, gates::hadamard(), 2);
  apply_gate(s, gates::hadamard(), 2);
  EXPECT_LT(testing::max_abs_diff(s, before), 1e-14);
}

TEST(Statevector, GateMatricesAreUnitary) {
  for (const auto& g : {gates::hadamard(), gates::pauli_x(), gates::pauli_z(), gates::rotation(1.3), gates::phase(0.7),
                        gates::swap()}) {
    EXPECT_TRUE(g.is_unitary());
  }
  EXPECT_TRUE(gates::pauli_x().is_pauli_x());
  EXPECT_FALSE(gates::hadamard().is_pauli_x());
}

TEST(Statevector, RegisterValueAndProbability) {
  RegisterLayout lay;
  const Register a = lay.add("a", 2);
  const Register b = lay.add("b", 3);
  Statevector s = init_state(lay);
  s.reset_to_basis(a.place(2) | b.place(5));
  EXPECT_NEAR(register_probability(s, b, 5), 1.0, 1e-15);
  EXPECT_NEAR(register_probability(s, lay, "a", 2), 1.0, 1e-15);
  EXPECT_EQ(b.value_of(a.place(2) | b.place(5)), 5u);
  const auto dist = register_distribution(s, b);
  ASSERT_EQ(dist.size(), 8u);
  EXPECT_NEAR(dist[5], 1.0, 1e-15);
}

TEST(Statevector, LayoutRejectsDuplicatesAndUnknownNames) {
  RegisterLayout lay;
  lay.add("x", 2);
  EXPECT_THROW(lay.add("x", 1), UsageError);
  EXPECT_THROW((void)lay["y"], UsageError);
  EXPECT_TRUE(lay.contains("x"));
}

TEST(Statevector, SamplingIsDeterministicAndFollowsDistribution) {
  RegisterLayout lay;
  lay.add("q", 1);
  Statevector s = init_state(lay);
  apply_gate(s, gates::rotation(std::numbers::pi / 6.0), 0);  // P(1) = 1/4
  const Histogram h1 = sample(s, lay, "q", 20000, 42);
  const Histogram h2 = sample(s, lay, "q", 20000, 42);
  EXPECT_EQ(h1, h2);
  const double p1 = static_cast<double>(h1.count(1) ? h1.at(1) : 0) / 20000.0;
  EXPECT_NEAR(p1, 0.25, 0.02);
}

TEST(Statevector, DisentangledRegistersReportUnitMass) {
  RegisterLayout lay;
  lay.add("data", 2);
  lay.add("scratch", 2);
  Statevector s = init_state(lay);
  apply_gate(s, gates::hadamard(), 0);
  const std::vector<std::string> scratch{"scratch"};
  EXPECT_NEAR(assert_disentangled(s, lay, scratch), 1.0, 1e-15);
  const Control c[] = {{0, true}};
  apply_gate(s, gates::pauli_x(), 3, c);
  EXPECT_NEAR(assert_disentangled(s, lay, scratch), 0.5, 1e-15);
}

TEST(Statevector, FidelityOfOrthogonalAndEqualStates) {
  Statevector a(2), b(2);
  b.reset_to_basis(3);
  EXPECT_NEAR(fidelity(a, a), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(a, b), 0.0, 1e-15);
  EXPECT_THROW((void)fidelity(a, Statevector(3)), UsageError);
}

TEST(Statevector, ControlledGateActsOnlyOnControlSubspace) {
  Statevector s(2);
  apply_gate(s, gates::hadamard(), 0);
  const Control c[] = {{0, false}};
  apply_gate(s, gates::pauli_x(), 1, c);
  // |0>|0> -> |1>|0> branch only.
  EXPECT_NEAR(std::norm(s.amplitudes()[0b10]), 0.5, 1e-15);
  EXPECT_NEAR(std::norm(s.amplitudes()[0b01]), 0.5, 1e-15);
}

}  // namespace
}  // namespace qcnn
