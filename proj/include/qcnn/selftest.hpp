// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// Quick invariant suite run by `qcnn selftest`.

#pragma once

#include <iosfwd>

namespace qcnn {

/// Prints one "ok" / "FAIL" line per check; returns true when all pass.
bool run_selftest(std::ostream& out);

}  // namespace qcnn
