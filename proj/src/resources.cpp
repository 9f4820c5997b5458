// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qcnn/resources.hpp"

#include <cmath>
#include <ostream>

#include "qcnn/errors.hpp"

namespace qcnn {

void ResourceQuery::validate() const {
  if (M < 1 || N < 1 || M_prime < 1 || N_prime < 1 || L < 1 || s < 1 || s_prime < 1) {
    throw DomainError("resource estimate: sizes, L and strides must be >= 1");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("resource estimate: epsilon must lie in (0, 1)");
  if (N_prime > M_prime || (M_prime - N_prime) % s_prime != 0) {
    throw DomainError("resource estimate: (M' - N') must be a non-negative multiple of s'");
  }
}

int ceil_log2(std::uint64_t x) {
  if (x == 0) throw DomainError("ceil_log2 of zero");
  int k = 0;
  while ((std::uint64_t{1} << k) < x) ++k;
  return k;
}

int log_inverse_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  // Nudge before the ceiling so that exact powers of two are not rounded up by representation error.
  return static_cast<int>(std::ceil(std::log2(1.0 / epsilon) - 1e-12));
}

ResourceBudget estimate_resources(const ResourceQuery& q) {
  q.validate();
  using I = std::int64_t;
  const I M = q.M, N = q.N, Mp = q.M_prime, Np = q.N_prime, L = q.L;
  const I M2 = (Mp - Np) / q.s_prime + 1;
  const I lM = ceil_log2(static_cast<std::uint64_t>(M));
  const I lN = ceil_log2(static_cast<std::uint64_t>(N));
  const I lMp = ceil_log2(static_cast<std::uint64_t>(Mp));
  const I lM2 = ceil_log2(static_cast<std::uint64_t>(M2));
  const I ls = ceil_log2(static_cast<std::uint64_t>(q.s));
  const I lsp = ceil_log2(static_cast<std::uint64_t>(q.s_prime));
  const I le = log_inverse_epsilon(q.epsilon);

  ResourceBudget b;
  b.storage_qubits = M * M * (2 * lM * lM + L) + N * N * (2 * lN * lN + L);
  b.working_qubits = 4 * lM + 4 * lMp + 6 + 2 * le;
  b.working_qubits_max = 6 * lM + 6 * lMp + 6 + 2 * le;
  b.reusable_qubits = 4 * lM + 3 + 2 * (lM - lMp);

  b.steps = {
      {"convolution", "data storage (QRAM)", "-", b.storage_qubits, -1},
      {"convolution", "preparing the indexing state", "S1.0-S1.3", 6 * lM + ls, ls},
      {"convolution", "loading information", "S1.4-S1.5", 6 * lM + L + 3, L},
      {"convolution", "extracting features", "S1.6-S1.9", 6 * lM + 3 + le, b.reusable_qubits},
      {"convolution", "final system space", "-", 2 * lMp + le, -1},
      {"pooling", "preparing the indexing state", "S2.0-S2.1", 6 * lMp + lsp, lsp},
      {"pooling", "loading information", "S2.2", 6 * lMp + 1, -1},
      {"pooling", "extracting features", "S2.3-S2.6", 6 * lM + 6 * lMp + 6 + 2 * le,
       6 * lM + 4 * lMp + 6 + le + (lMp - lM2)},
      {"pooling", "final system space", "-", 2 * lM2 + le, -1},
  };

  const I lMpN = ceil_log2(static_cast<std::uint64_t>(Mp * N));
  const I lMpN2 = ceil_log2(static_cast<std::uint64_t>(Mp * N * N));
  b.comparison = {
      {"Kerenidis et al.", Mp * Mp * N * N * (4 * lMpN * lMpN + L) + N * N * (4 * lN * lN + L),
       2 * lMpN2 + 2 + 2 * le, "M'^2 N^2 (4 ceil(log M'N)^2 + L) + N^2 (4 ceil(log N)^2 + L)",
       "2 ceil(log M'N^2) + 2 + 2 log(1/eps)"},
      {"Li et al.", b.storage_qubits, 2 * lM + 2 * lMp + 6 * L + 4 + 2 * le,
       "M^2 (2 ceil(log M)^2 + L) + N^2 (2 ceil(log N)^2 + L)", "2 ceil(log M) + 2 ceil(log M') + 6L + 4 + 2 log(1/eps)"},
      {"this method", b.storage_qubits, b.working_qubits, "M^2 (2 ceil(log M)^2 + L) + N^2 (2 ceil(log N)^2 + L)",
       "4 ceil(log M) + 4 ceil(log M') + 6 + 2 log(1/eps)"},
      {"classical counterpart", (M * M + N * N) * L + (Mp * Mp + Np * Np) * L, M * M * N * N + Mp * Mp * Np * Np,
       "(M^2 + N^2) L + (M'^2 + N'^2) L", "M^2 N^2 + M'^2 N'^2"},
  };
  b.runtime_terms =
      "conv: O[(log(M'N) + polylog(M^2 N^2) + L) / eps]; "
      "pool: O[(log(M''N') + polylog M' + log(1/eps) + T_in) / eps]; "
      "fc: O[K (polylog(M-bar K) + L + log(1/eps) + T_in)]; "
      "total: O{K (log(M'N) + polylog(M^2 N^2) + L + log(1/eps)) / eps^2}";
  return b;
}

void ResourceBudget::write(std::ostream& out) const {
  out << "storage_qubits " << storage_qubits << "\n";
  out << "working_qubits " << working_qubits << "\n";
  out << "working_qubits_max " << working_qubits_max << "\n";
  out << "reusable_qubits " << reusable_qubits << "\n";
  out << "steps:\n";
  for (const auto& s : steps) {
    out << "  " << s.layer << " | " << s.function << " | " << s.steps << " | required " << s.required;
    if (s.reusable >= 0) out << " | reusable " << s.reusable;
    out << "\n";
  }
  out << "comparison:\n";
  for (const auto& c : comparison) {
    out << "  " << c.method << " | storage " << c.storage << " = " << c.storage_formula << " | working " << c.working
        << " = " << c.working_formula << "\n";
  }
  out << "runtime " << runtime_terms << "\n";
}

}  // namespace qcnn
