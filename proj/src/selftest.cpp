// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qcnn/selftest.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "qcnn/arithmetic.hpp"
#include "qcnn/kernels.hpp"
#include "qcnn/layers.hpp"
#include "qcnn/reference.hpp"
#include "qcnn/resources.hpp"

namespace qcnn {
namespace {

Matrix random_matrix(std::mt19937_64& rng, int side, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(side, side);
  for (double& v : m.data) v = u(rng);
  return m;
}

bool kernels_agree() {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  Statevector a(10);
  for (auto& x : a.amplitudes()) x = {g(rng), g(rng)};
  Statevector b = a;
  Circuit c(10);
  c.h(0).rotation(3, 0.7, Condition{}.with(1, true)).x(5, Condition{}.with(2, true).with(7, false));
  c.mux_rotation(9, {0, 4}, {0.1, 0.2, 0.3, 0.4});
  c.x(6, Condition{}.with(8, true)).x(8, Condition{}.with(6, true)).phase(Condition{}.with(2, true), {0.0, 1.0});
  c.apply(a);
  c.apply_reference(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.amplitudes()[i] - b.amplitudes()[i]));
  return worst < kAmplitudeTolerance;
}

bool adder_exhaustive() {
  RegisterLayout lay;
  const Register& ra = lay.add("a", 3);
  const Register& rb = lay.add("b", 3);
  lay.add("anc", 1);
  for (BasisIndex x = 0; x < 8; ++x) {
    for (BasisIndex y = 0; y < 8; ++y) {
      Statevector s = init_state(lay);
      s.reset_to_basis(ra.place(x) | rb.place(y));
      add_in_place(s, BasisInt::full(ra), BasisInt::full(rb), 6, Overflow::kModular);
      if (std::abs(register_probability(s, rb, (x + y) % 8) - 1.0) > kProbabilityTolerance) return false;
    }
  }
  return true;
}

bool conv_matches_reference() {
  std::mt19937_64 rng(5);
  const Matrix r = normalize(random_matrix(rng, 4, 0.0, 1.0));
  const Matrix w = normalize(random_matrix(rng, 2, -1.0, 1.0));
  for (int s : {1, 2}) {
    ConvConfig c;
    c.s = s;
    LayerDiagnostics d;
    const FeatureMap f = conv_layer(c, r, w, &d);
    const Matrix ref = conv2d_ref(r, w, s);
    const double bound = 2.0 * c.N * c.N * std::numbers::pi * std::ldexp(1.0, -c.L);
    for (std::size_t i = 0; i < ref.data.size(); ++i) {
      if (std::abs(f.features.data[i] - ref.data[i]) > bound) return false;
    }
    if (d.min_uncompute_fidelity < 1.0 - kProbabilityTolerance) return false;
  }
  return true;
}

bool pool_matches_reference() {
  std::mt19937_64 rng(6);
  FeatureMap in;
  in.features = random_matrix(rng, 3, -1.0, 1.0);
  in.scale = 1.0;
  PoolConfig p;
  p.M_prime = 3;
  const FeatureMap out = pool_layer(p, in);
  const Matrix ref = pool_ref(in.features, 2, 1, PoolMode::kSum);
  const double bound = 2.0 * 3 * 3 * 4 * std::numbers::pi * std::ldexp(1.0, -p.L);
  for (std::size_t i = 0; i < ref.data.size(); ++i) {
    if (std::abs(out.features.data[i] - ref.data[i]) > bound) return false;
  }
  return true;
}

bool fc_zero_case() {
  FcWeights w;
  w.K = 2;
  w.side = 2;
  w.weights = {Matrix(2, 2, 0.0), Matrix(2, 2, 0.0)};
  const auto p = fc_layer(Matrix(2, 2, 0.5), w);
  return std::abs(p[0] - 0.25) < 1e-9 && std::abs(p[1] - 0.25) < 1e-9;
}

bool qae_exact_phase() {
  // Single-qubit A = R(pi/8): theta = pi/8 is exact on a 3-bit grid.
  AmplitudeProblem p;
  p.a = Circuit(1);
  p.a.rotation(0, std::numbers::pi / 8.0);
  p.good = Condition{}.with(0, true);
  p.scope = 1;
  const QaeResult r = qae_estimate(p, 3);
  return r.folded_outcome == 1 && std::abs(r.modal_probability - 1.0) < 1e-9;
}

bool resources_spot_values() {
  const ResourceBudget b = estimate_resources(ResourceQuery{});
  return b.storage_qubits == 176 && b.working_qubits == 22 && b.comparison.back().storage == 56 &&
         b.comparison.back().working == 80;
}

bool stride_subsampling() {
  std::mt19937_64 rng(8);
  const Matrix r = normalize(random_matrix(rng, 4, 0.0, 1.0));
  const Matrix w = normalize(random_matrix(rng, 2, -1.0, 1.0));
  ConvConfig c1;
  ConvConfig c2;
  c2.s = 2;
  const FeatureMap f1 = conv_layer(c1, r, w);
  const FeatureMap f2 = conv_layer(c2, r, w);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      if (std::abs(f2.features(x, y) - f1.features(2 * x, 2 * y)) > 1e-12) return false;
    }
  }
  return true;
}

}  // namespace

bool run_selftest(std::ostream& out) {
  const std::pair<const char*, std::function<bool()>> checks[] = {
      {"serial and parallel kernels agree", kernels_agree},
      {"adder truth table (3 bits)", adder_exhaustive},
      {"convolution matches the classical reference", conv_matches_reference},
      {"pooling matches window sums", pool_matches_reference},
      {"fully connected zero case gives 1/(2K)", fc_zero_case},
      {"amplitude estimation on an exact phase", qae_exact_phase},
      {"resource spot values", resources_spot_values},
      {"stride 2 subsamples stride 1", stride_subsampling},
  };
  bool all = true;
  for (const auto& [name, check] : checks) {
    bool ok = false;
    std::string note;
    try {
      ok = check();
    } catch (const std::exception& e) {
      note = std::string(" (") + e.what() + ")";
    }
    out << (ok ? "ok   " : "FAIL ") << name << note << "\n";
    all = all && ok;
  }
  out << (all ? "selftest passed" : "selftest FAILED") << "\n";
  return all;
}

}  // namespace qcnn
