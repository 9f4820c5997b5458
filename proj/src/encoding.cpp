// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qcnn/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qcnn/errors.hpp"

namespace qcnn {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int r = 0; r < m.rows; ++r) {
    if (static_cast<int>(rows[r].size()) != m.cols) throw UsageError("ragged matrix rows");
    for (int c = 0; c < m.cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data) s += v * v;
  return std::sqrt(s);
}

ImageTensor::ImageTensor(Matrix pixels) : pixels_(std::move(pixels)), norm_(pixels_.frobenius_norm()) {
  if (!pixels_.square()) throw UsageError("image must be square");
  for (double v : pixels_.data) {
    if (!(v >= 0.0 && v <= 255.0)) throw DomainError("pixel value outside [0, 255]");
  }
}

KernelWeights::KernelWeights(Matrix weights) : weights_(std::move(weights)), norm_(weights_.frobenius_norm()) {
  if (!weights_.square()) throw UsageError("kernel must be square");
}

Matrix normalize(const Matrix& m) {
  const double norm = m.frobenius_norm();
  if (!(norm > 0.0)) throw DegenerateInputError("cannot normalize an all-zero matrix");
  Matrix out = m;
  for (double& v : out.data) v /= norm;
  return out;
}

Matrix normalize(const ImageTensor& image) { return normalize(image.pixels()); }
Matrix normalize(const KernelWeights& kernel) { return normalize(kernel.weights()); }

FixedPointAngle::FixedPointAngle(std::uint64_t code, int bits) : code_(code), bits_(bits) {
  if (bits < 1 || bits > 52) throw UsageError("angle bit count must lie in [1, 52]");
  if (code >> bits != 0) throw UsageError("angle code wider than its bit count");
}

bool FixedPointAngle::bit(int l) const {
  if (l < 1 || l > bits_) throw UsageError("angle bit index out of range");
  return (code_ >> (bits_ - l)) & 1U;
}

double FixedPointAngle::reconstruct() const {
  return std::ldexp(static_cast<double>(code_), -bits_) * std::numbers::pi;
}

std::string FixedPointAngle::to_string() const {
  std::string s(static_cast<std::size_t>(bits_), '0');
  for (int l = 1; l <= bits_; ++l) s[l - 1] = bit(l) ? '1' : '0';
  return s;
}

FixedPointAngle FixedPointAngle::parse(const std::string& bits) {
  std::uint64_t code = 0;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw FormatError("angle bits must be 0/1, got '" + bits + "'");
    code = (code << 1) | static_cast<std::uint64_t>(ch == '1');
  }
  return FixedPointAngle(code, static_cast<int>(bits.size()));
}

FixedPointAngle angle_of(double value, int bits) {
  if (!(std::abs(value) <= 1.0)) throw DomainError("angle_of: |value| > 1 (" + std::to_string(value) + ")");
  const double fraction = std::acos(value) / std::numbers::pi;
  const std::uint64_t limit = (std::uint64_t{1} << bits) - 1;
  auto code = static_cast<std::uint64_t>(std::floor(std::ldexp(fraction, bits)));
  return FixedPointAngle(std::min(code, limit), bits);
}

QramTable QramTable::from_values(std::span<const double> values, int angle_bits) {
  QramTable t;
  t.angle_bits = angle_bits;
  t.entries.reserve(values.size());
  for (double v : values) t.entries.push_back(angle_of(v, angle_bits));
  return t;
}

std::vector<double> QramTable::angles(std::size_t count) const {
  if (count < entries.size()) throw UsageError("table larger than the addressed range");
  std::vector<double> out(count, 0.0);
  for (std::size_t i = 0; i < entries.size(); ++i) out[i] = entries[i].reconstruct();
  return out;
}

void QramTable::write(std::ostream& out) const {
  out << "# index, angle_bits (L=" << angle_bits << ")\n";
  for (std::size_t i = 0; i < entries.size(); ++i) out << i << ", " << entries[i].to_string() << "\n";
}

QramTable QramTable::read(std::istream& in) {
  QramTable t;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("table line " + std::to_string(line_no) + ": missing comma");
    std::size_t index = 0;
    try {
      index = std::stoul(line.substr(0, comma));
    } catch (const std::exception&) {
      throw FormatError("table line " + std::to_string(line_no) + ": bad index");
    }
    std::string bits = line.substr(comma + 1);
    bits.erase(std::remove_if(bits.begin(), bits.end(), [](unsigned char ch) { return std::isspace(ch); }),
               bits.end());
    if (index != t.entries.size()) throw FormatError("table line " + std::to_string(line_no) + ": index out of order");
    auto angle = FixedPointAngle::parse(bits);
    if (t.angle_bits == 0) t.angle_bits = angle.bits();
    if (angle.bits() != t.angle_bits) throw FormatError("table line " + std::to_string(line_no) + ": width changes");
    t.entries.push_back(angle);
  }
  return t;
}

namespace {

void check_table_fits(const Register& index, const QramTable& table) {
  if (index.width < 63 && table.size() > (std::size_t{1} << index.width)) {
    throw UsageError("table of " + std::to_string(table.size()) + " entries exceeds index register " + index.name);
  }
}

}  // namespace

void qram_oracle(Circuit& c, const Register& index, const Register& angle_out, const QramTable& table,
                 Condition control) {
  check_table_fits(index, table);
  if (angle_out.width != table.angle_bits) throw UsageError("angle register width differs from table bits");
  for (std::size_t m = 0; m < table.size(); ++m) {
    const Condition at_m = control.with(index.equals(m));
    const auto code = table.entries[m].code();
    for (int b = 0; b < angle_out.width; ++b) {
      if ((code >> b) & 1U) c.x(angle_out.qubit(b), at_m);
    }
  }
}

void loader_O(Circuit& c, const Register& index, const Register& angle_scratch, int data_qubit,
              const QramTable& table, Condition control) {
  qram_oracle(c, index, angle_scratch, table, control);
  const int L = table.angle_bits;
  for (int l = 1; l <= L; ++l) {
    c.rotation(data_qubit, std::ldexp(std::numbers::pi, -l), control.with(angle_scratch.qubit(L - l), true));
  }
  qram_oracle(c, index, angle_scratch, table, control);
}

void loader_multiplexed(Circuit& c, const Register& index, int data_qubit, const QramTable& table,
                        Condition control) {
  check_table_fits(index, table);
  c.mux_rotation(data_qubit, index.qubits(), table.angles(std::size_t{1} << index.width), control);
}

void load_values(Circuit& c, LoaderImpl impl, const Register& index, const Register* scratch, int data_qubit,
                 const QramTable& table, Condition control) {
  if (impl == LoaderImpl::kMultiplexed) {
    loader_multiplexed(c, index, data_qubit, table, control);
    return;
  }
  if (scratch == nullptr) throw UsageError("QRAM loader needs an angle scratch register");
  loader_O(c, index, *scratch, data_qubit, table, control);
}

int index_width(BasisIndex count) {
  if (count == 0) throw UsageError("index range must be non-empty");
  int w = 0;
  while ((BasisIndex{1} << w) < count) ++w;
  return std::max(w, 1);
}

namespace {

// Number of values in [0, count) whose bits above `bit` equal `prefix`, and whose bit `bit` is 0 / 1.
void split_counts(BasisIndex count, int bit, BasisIndex prefix, BasisIndex& zeros, BasisIndex& ones) {
  const BasisIndex base = prefix << (bit + 1);
  const BasisIndex half = BasisIndex{1} << bit;
  auto clamp = [&](BasisIndex lo) { return count > lo ? std::min(count - lo, half) : BasisIndex{0}; };
  zeros = clamp(base);
  ones = clamp(base + half);
}

void prepare_tree(Circuit& c, const Register& reg, BasisIndex count, int bit, BasisIndex prefix, Condition cond) {
  if (bit < 0) return;
  BasisIndex zeros = 0, ones = 0;
  split_counts(count, bit, prefix, zeros, ones);
  if (zeros + ones == 0) return;
  if (ones == zeros) {
    // Full subtree: plain Hadamards on the remaining bits.
    for (int b = bit; b >= 0; --b) c.h(reg.qubit(b), cond);
    return;
  }
  if (ones > 0) {
    const double theta = std::acos(std::sqrt(static_cast<double>(zeros) / static_cast<double>(zeros + ones)));
    c.rotation(reg.qubit(bit), theta, cond);
  }
  prepare_tree(c, reg, count, bit - 1, prefix << 1, cond.with(reg.qubit(bit), false));
  if (ones > 0) prepare_tree(c, reg, count, bit - 1, (prefix << 1) | 1U, cond.with(reg.qubit(bit), true));
}

}  // namespace

void prepare_uniform(Circuit& c, const Register& reg, BasisIndex count, Condition control) {
  if (count == 0 || (reg.width < 63 && count > (BasisIndex{1} << reg.width))) {
    throw UsageError("uniform range does not fit register " + reg.name);
  }
  prepare_tree(c, reg, count, reg.width - 1, 0, control);
}

}  // namespace qcnn
