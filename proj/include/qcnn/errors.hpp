// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace qcnn {

/// Caller misuse: overlapping qubits, unknown registers, width mismatches.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value outside the mathematical domain of an operation (|x| > 1 for arccos, s = 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Statevector would exceed the configured qubit budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All-zero image or kernel: the Frobenius normalization is undefined.
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input file (IDX, feature maps, weights, tables, configs).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A feature handed to a controlled rotation lies outside [-1, 1] after scaling.
class ScalingError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace qcnn
