// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qcnn/mnist.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "qcnn/errors.hpp"

namespace qcnn {
namespace {

std::string hex(std::uint32_t v) {
  std::ostringstream o;
  o << "0x" << std::hex << std::setw(8) << std::setfill('0') << v;
  return o.str();
}

bool read_u32(std::istream& in, std::uint32_t& v) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) return false;
  v = (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
  return true;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                              static_cast<char>(v)};
  out.write(b.data(), 4);
}

std::uint32_t header_field(std::istream& in, const std::string& source, const char* field) {
  std::uint32_t v = 0;
  if (!read_u32(in, v)) throw FormatError(source + ": truncated header (missing " + field + ")");
  return v;
}

void check_magic(std::uint32_t magic, std::uint32_t expected, const std::string& source) {
  if (magic != expected) {
    throw FormatError(source + ": bad magic " + hex(magic) + " (expected " + hex(expected) + ")");
  }
}

std::ifstream open_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return in;
}

}  // namespace

Matrix MnistImage::to_matrix() const {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < pixels.size(); ++i) m.data[i] = pixels[i];
  return m;
}

std::vector<MnistImage> read_idx_images(std::istream& in, const std::string& source) {
  check_magic(header_field(in, source, "magic"), kIdxImageMagic, source);
  const std::uint32_t count = header_field(in, source, "image count");
  const std::uint32_t rows = header_field(in, source, "row count");
  const std::uint32_t cols = header_field(in, source, "column count");
  if (rows == 0 || cols == 0 || rows > 4096 || cols > 4096) {
    throw FormatError(source + ": implausible image shape " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  const std::size_t per_image = std::size_t{rows} * cols;
  std::vector<MnistImage> images;
  images.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    MnistImage img;
    img.rows = static_cast<int>(rows);
    img.cols = static_cast<int>(cols);
    img.pixels.resize(per_image);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(per_image));
    if (in.gcount() != static_cast<std::streamsize>(per_image)) {
      throw FormatError(source + ": truncated pixel data (header promises " + std::to_string(count) +
                        " images, file ends inside image " + std::to_string(i) + ")");
    }
    images.push_back(std::move(img));
  }
  return images;
}

std::vector<int> read_idx_labels(std::istream& in, const std::string& source) {
  check_magic(header_field(in, source, "magic"), kIdxLabelMagic, source);
  const std::uint32_t count = header_field(in, source, "label count");
  std::vector<unsigned char> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
  if (in.gcount() != static_cast<std::streamsize>(count)) {
    throw FormatError(source + ": truncated label data (header promises " + std::to_string(count) + " labels, found " +
                      std::to_string(in.gcount()) + ")");
  }
  return {raw.begin(), raw.end()};
}

MnistData load_mnist(const std::string& images_path, const std::string& labels_path) {
  auto img_in = open_binary(images_path);
  auto lbl_in = open_binary(labels_path);
  MnistData data;
  data.images = read_idx_images(img_in, images_path);
  data.labels = read_idx_labels(lbl_in, labels_path);
  if (data.images.size() != data.labels.size()) {
    throw FormatError("count mismatch: " + std::to_string(data.images.size()) + " images but " +
                      std::to_string(data.labels.size()) + " labels");
  }
  return data;
}

MnistData load_mnist(const std::string& directory) {
  const std::filesystem::path dir(directory);
  return load_mnist((dir / "images-idx3-ubyte").string(), (dir / "labels-idx1-ubyte").string());
}

void write_idx_images(std::ostream& out, const std::vector<MnistImage>& images) {
  const int rows = images.empty() ? 28 : images.front().rows;
  const int cols = images.empty() ? 28 : images.front().cols;
  write_u32(out, kIdxImageMagic);
  write_u32(out, static_cast<std::uint32_t>(images.size()));
  write_u32(out, static_cast<std::uint32_t>(rows));
  write_u32(out, static_cast<std::uint32_t>(cols));
  for (const auto& img : images) {
    if (img.rows != rows || img.cols != cols) throw UsageError("IDX images must share one shape");
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  }
}

void write_idx_labels(std::ostream& out, const std::vector<int>& labels) {
  write_u32(out, kIdxLabelMagic);
  write_u32(out, static_cast<std::uint32_t>(labels.size()));
  for (int l : labels) out.put(static_cast<char>(l));
}

}  // namespace qcnn
