// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// IDX (MNIST) image and label files.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qcnn/encoding.hpp"

namespace qcnn {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

struct MnistImage {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  [[nodiscard]] Matrix to_matrix() const;
};

struct MnistData {
  std::vector<MnistImage> images;
  std::vector<int> labels;
};

/// Each failure mode raises FormatError with its own message: bad magic (naming it),
/// truncated header or payload, and image/label count mismatch.
std::vector<MnistImage> read_idx_images(std::istream& in, const std::string& source = "images");
std::vector<int> read_idx_labels(std::istream& in, const std::string& source = "labels");
MnistData load_mnist(const std::string& images_path, const std::string& labels_path);
/// Directory holding images-idx3-ubyte and labels-idx1-ubyte.
MnistData load_mnist(const std::string& directory);

void write_idx_images(std::ostream& out, const std::vector<MnistImage>& images);
void write_idx_labels(std::ostream& out, const std::vector<int>& labels);

}  // namespace qcnn
