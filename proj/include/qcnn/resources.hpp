// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// Analytical qubit and memory counts for the convolution + pooling pair and
// the comparison rows for two related quantum schemes and a classical CNN.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qcnn {

struct ResourceQuery {
  int M = 4;
  int N = 2;
  int M_prime = 2;
  int N_prime = 2;
  int L = 2;
  double epsilon = 0.25;
  /// Strides only enter the index-preparation rows; M'' follows from M', N', s'.
  int s = 1;
  int s_prime = 1;

  void validate() const;
};

/// ceil(log2 x) for x >= 1.
int ceil_log2(std::uint64_t x);
/// ceil(log2(1 / epsilon)).
int log_inverse_epsilon(double epsilon);

struct StepRow {
  std::string layer;     // "convolution" or "pooling"
  std::string function;  // e.g. "preparing the indexing state"
  std::string steps;     // step range label
  std::int64_t required = 0;
  std::int64_t reusable = -1;  // -1: not applicable
};

struct ComparisonRow {
  std::string method;
  std::int64_t storage = 0;
  std::int64_t working = 0;
  std::string storage_formula;
  std::string working_formula;
};

struct ResourceBudget {
  std::int64_t storage_qubits = 0;
  /// Reduced working memory: 4ceil(log M) + 4ceil(log M') + 6 + 2 log(1/eps).
  std::int64_t working_qubits = 0;
  /// Unreduced bound: 6ceil(log M) + 6ceil(log M') + 6 + 2 log(1/eps).
  std::int64_t working_qubits_max = 0;
  /// Qubits released by the convolution layer after feature extraction.
  std::int64_t reusable_qubits = 0;
  std::vector<StepRow> steps;
  std::vector<ComparisonRow> comparison;
  std::string runtime_terms;

  void write(std::ostream& out) const;
};

ResourceBudget estimate_resources(const ResourceQuery& q);

}  // namespace qcnn
