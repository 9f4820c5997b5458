// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qcnn/reference.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "qcnn/errors.hpp"

namespace qcnn {

Matrix conv2d_ref(const Matrix& r, const Matrix& w, int s) {
  if (!r.square() || !w.square()) throw UsageError("conv2d_ref expects square inputs");
  if (s < 1) throw DomainError("stride must be positive");
  if (w.rows > r.rows || (r.rows - w.rows) % s != 0) throw UsageError("conv2d_ref: (M - N) not divisible by stride");
  const int side = (r.rows - w.rows) / s + 1;
  Matrix out(side, side);
  for (int x = 0; x < side; ++x) {
    for (int y = 0; y < side; ++y) {
      double acc = 0.0;
      for (int a = 0; a < w.rows; ++a) {
        for (int b = 0; b < w.cols; ++b) acc += w(a, b) * r(x * s + a, y * s + b);
      }
      out(x, y) = acc;
    }
  }
  return out;
}

Matrix pool_ref(const Matrix& map, int window, int stride, PoolMode mode) {
  if (!map.square()) throw UsageError("pool_ref expects a square map");
  if (stride < 1) throw DomainError("stride must be positive");
  if (window < 1 || window > map.rows || (map.rows - window) % stride != 0) {
    throw UsageError("pool_ref: (M' - N') not divisible by stride");
  }
  const int side = (map.rows - window) / stride + 1;
  const double area = static_cast<double>(window) * window;
  Matrix out(side, side);
  for (int x = 0; x < side; ++x) {
    for (int y = 0; y < side; ++y) {
      double acc = 0.0;
      for (int a = 0; a < window; ++a) {
        for (int b = 0; b < window; ++b) acc += map(x * stride + a, y * stride + b);
      }
      out(x, y) = mode == PoolMode::kSum ? acc : acc / area;
    }
  }
  return out;
}

std::vector<double> fc_ref(const Matrix& features, const FcWeights& weights) {
  weights.validate();
  if (features.rows != weights.side || features.cols != weights.side) throw UsageError("fc_ref: shape mismatch");
  std::vector<double> scores(static_cast<std::size_t>(weights.K), 0.0);
  for (int k = 0; k < weights.K; ++k) {
    for (std::size_t i = 0; i < features.data.size(); ++i) scores[k] += features.data[i] * weights.weights[k].data[i];
  }
  return scores;
}

std::vector<double> fc_probabilities(const Matrix& features, const FcWeights& weights) {
  auto scores = fc_ref(features, weights);
  const double m2 = static_cast<double>(weights.side) * weights.side;
  for (double& s : scores) s = (m2 + s) / (2.0 * weights.K * m2);
  return scores;
}

int classify_ref(const std::vector<double>& scores) {
  if (scores.empty()) throw UsageError("classify_ref needs scores");
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

Matrix bilinear_resize(const Matrix& image, int out_side) {
  if (!image.square() || image.rows < 1) throw UsageError("bilinear_resize expects a non-empty square image");
  if (out_side < 1) throw UsageError("output side must be positive");
  const int in = image.rows;
  const double scale = static_cast<double>(in) / out_side;
  auto source = [&](int d, int& i0, int& i1, double& frac) {
    double pos = (d + 0.5) * scale - 0.5;
    pos = std::clamp(pos, 0.0, static_cast<double>(in - 1));
    i0 = static_cast<int>(std::floor(pos));
    i1 = std::min(i0 + 1, in - 1);
    frac = pos - i0;
  };
  Matrix out(out_side, out_side);
  for (int x = 0; x < out_side; ++x) {
    int x0, x1;
    double fx;
    source(x, x0, x1, fx);
    for (int y = 0; y < out_side; ++y) {
      int y0, y1;
      double fy;
      source(y, y0, y1, fy);
      const double top = image(x0, y0) * (1.0 - fy) + image(x0, y1) * fy;
      const double bottom = image(x1, y0) * (1.0 - fy) + image(x1, y1) * fy;
      out(x, y) = top * (1.0 - fx) + bottom * fx;
    }
  }
  return out;
}

namespace {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void softmax(std::vector<double>& z) {
  const double peak = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - peak);
    total += v;
  }
  for (double& v : z) v /= total;
}

double dot(const Matrix& a, const Matrix& b) {
  return std::inner_product(a.data.begin(), a.data.end(), b.data.begin(), 0.0);
}

void check_dataset(const std::vector<LabeledFeatures>& data, int K) {
  if (data.empty()) throw UsageError("training set is empty");
  if (K < 1) throw UsageError("need at least one class");
  for (const auto& d : data) {
    if (d.label < 0 || d.label >= K) throw UsageError("label outside [0, K)");
    if (!d.features.square() || d.features.rows != data.front().features.rows) {
      throw UsageError("training features differ in shape");
    }
  }
}

std::vector<std::size_t> shuffled(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[static_cast<std::size_t>(unit(rng) * i)]);
  return order;
}

}  // namespace

FcWeights train_fc(const std::vector<LabeledFeatures>& data, int K, const TrainOptions& options) {
  check_dataset(data, K);
  const int side = data.front().features.rows;
  std::mt19937_64 rng(options.seed);
  FcWeights fc;
  fc.K = K;
  fc.side = side;
  fc.weights.assign(static_cast<std::size_t>(K), Matrix(side, side));
  for (auto& w : fc.weights) {
    for (double& v : w.data) v = 0.02 * (unit(rng) - 0.5);
  }
  const double inv_n = 1.0 / static_cast<double>(data.size());
  std::vector<Matrix> grad(static_cast<std::size_t>(K), Matrix(side, side));
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (auto& g : grad) std::fill(g.data.begin(), g.data.end(), 0.0);
    for (const auto& d : data) {
      std::vector<double> z(static_cast<std::size_t>(K));
      for (int k = 0; k < K; ++k) z[k] = dot(d.features, fc.weights[k]);
      softmax(z);
      for (int k = 0; k < K; ++k) {
        const double delta = (z[k] - (k == d.label ? 1.0 : 0.0)) * inv_n;
        for (std::size_t i = 0; i < grad[k].data.size(); ++i) grad[k].data[i] += delta * d.features.data[i];
      }
    }
    for (int k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < grad[k].data.size(); ++i) {
        double& w = fc.weights[k].data[i];
        w = std::clamp(w - options.learning_rate * grad[k].data[i], -options.clip, options.clip);
      }
    }
  }
  return fc;
}

int Architecture::conv_side() const { return (image_side - kernel_side) / conv_stride + 1; }
int Architecture::pool_side() const { return (conv_side() - pool_window) / pool_stride + 1; }

void Architecture::validate() const {
  if (image_side < 1 || kernel_side < 1 || pool_window < 1 || classes < 1) {
    throw UsageError("architecture sizes must be positive");
  }
  if (conv_stride < 1 || pool_stride < 1) throw DomainError("strides must be positive integers");
  if (kernel_side > image_side || (image_side - kernel_side) % conv_stride != 0) {
    std::ostringstream msg;
    msg << "convolution: (" << image_side << " - " << kernel_side << ") is not divisible by stride " << conv_stride;
    throw UsageError(msg.str());
  }
  const int c = conv_side();
  if (pool_window > c || (c - pool_window) % pool_stride != 0) {
    std::ostringstream msg;
    msg << "pooling: (" << c << " - " << pool_window << ") is not divisible by stride " << pool_stride;
    throw UsageError(msg.str());
  }
}

namespace {

void write_matrix(std::ostream& out, const Matrix& m) {
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) out << (c ? " " : "") << std::setprecision(17) << m(r, c);
    out << "\n";
  }
}

Matrix read_matrix(std::istream& in, int side, const std::string& what) {
  Matrix m(side, side);
  for (double& v : m.data) {
    if (!(in >> v)) throw FormatError("weights file: truncated " + what);
  }
  return m;
}

}  // namespace

void RefModel::write(std::ostream& out) const {
  out << "# qcnn reference model\n";
  out << "K " << fc.K << "\n";
  out << "M_bar " << fc.side << "\n";
  out << "seed " << seed << "\n";
  out << "clip " << -clip << " " << clip << "\n";
  out << "architecture " << arch.image_side << " " << arch.kernel_side << " " << arch.conv_stride << " "
      << arch.pool_window << " " << arch.pool_stride << "\n";
  out << "kernel\n";
  write_matrix(out, kernel);
  for (int k = 0; k < fc.K; ++k) {
    out << "class " << k << "\n";
    write_matrix(out, fc.weights[k]);
  }
}

RefModel RefModel::read(std::istream& in) {
  RefModel m;
  std::string key;
  auto expect = [&](const std::string& want) {
    while (in >> key) {
      if (key[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      break;
    }
    if (key != want) throw FormatError("weights file: expected '" + want + "', got '" + key + "'");
  };
  double lo = 0.0;
  expect("K");
  in >> m.fc.K;
  expect("M_bar");
  in >> m.fc.side;
  expect("seed");
  in >> m.seed;
  expect("clip");
  in >> lo >> m.clip;
  expect("architecture");
  in >> m.arch.image_side >> m.arch.kernel_side >> m.arch.conv_stride >> m.arch.pool_window >> m.arch.pool_stride;
  if (!in) throw FormatError("weights file: malformed header");
  m.arch.classes = m.fc.K;
  expect("kernel");
  m.kernel = read_matrix(in, m.arch.kernel_side, "kernel");
  for (int k = 0; k < m.fc.K; ++k) {
    expect("class");
    int index = -1;
    in >> index;
    if (index != k) throw FormatError("weights file: classes out of order");
    m.fc.weights.push_back(read_matrix(in, m.fc.side, "class weights"));
  }
  m.fc.validate();
  return m;
}

Matrix reference_features(const Matrix& r, const Matrix& kernel_normalized, const Architecture& arch) {
  const Matrix conv = conv2d_ref(r, kernel_normalized, arch.conv_stride);
  return pool_ref(conv, arch.pool_window, arch.pool_stride, PoolMode::kAverage);
}

namespace {

// Linear two-stage network: conv(k1, s) -> stage2 -> fc. stage2 is either a fixed
// average pool or a learned second convolution with stride 1.
struct Net {
  Architecture arch;
  bool second_conv = false;
  Matrix k1, k2;
  std::vector<Matrix> fc;

  int side1() const { return arch.conv_side(); }
  int side2() const {
    return second_conv ? side1() - arch.pool_window + 1 : arch.pool_side();
  }

  struct Cache {
    Matrix h1, h2;
    std::vector<double> prob;
  };

  Cache forward(const Matrix& x) const {
    Cache c;
    c.h1 = conv2d_ref(x, k1, arch.conv_stride);
    c.h2 = second_conv ? conv2d_ref(c.h1, k2, 1) : pool_ref(c.h1, arch.pool_window, arch.pool_stride, PoolMode::kAverage);
    c.prob.resize(fc.size());
    for (std::size_t k = 0; k < fc.size(); ++k) c.prob[k] = dot(c.h2, fc[k]);
    softmax(c.prob);
    return c;
  }

  double loss(const std::vector<LabeledFeatures>& data) const {
    if (data.empty()) return 0.0;
    double total = 0.0;
    for (const auto& d : data) total -= std::log(std::max(forward(d.features).prob[d.label], 1e-300));
    return total / static_cast<double>(data.size());
  }

  // Accumulates gradients of the cross-entropy for one example.
  void backward(const LabeledFeatures& d, Matrix& g1, Matrix& g2, std::vector<Matrix>& gfc, double weight) const {
    const Cache c = forward(d.features);
    Matrix d2(c.h2.rows, c.h2.cols);
    for (std::size_t k = 0; k < fc.size(); ++k) {
      const double delta = (c.prob[k] - (static_cast<int>(k) == d.label ? 1.0 : 0.0)) * weight;
      for (std::size_t i = 0; i < d2.data.size(); ++i) {
        gfc[k].data[i] += delta * c.h2.data[i];
        d2.data[i] += delta * fc[k].data[i];
      }
    }
    Matrix d1(c.h1.rows, c.h1.cols);
    const int win = arch.pool_window;
    for (int a = 0; a < d2.rows; ++a) {
      for (int b = 0; b < d2.cols; ++b) {
        for (int i = 0; i < win; ++i) {
          for (int j = 0; j < win; ++j) {
            if (second_conv) {
              g2(i, j) += d2(a, b) * c.h1(a + i, b + j);
              d1(a + i, b + j) += d2(a, b) * k2(i, j);
            } else {
              d1(a * arch.pool_stride + i, b * arch.pool_stride + j) += d2(a, b) / (win * win);
            }
          }
        }
      }
    }
    const int s = arch.conv_stride;
    for (int a = 0; a < d1.rows; ++a) {
      for (int b = 0; b < d1.cols; ++b) {
        for (int i = 0; i < k1.rows; ++i) {
          for (int j = 0; j < k1.cols; ++j) g1(i, j) += d1(a, b) * d.features(a * s + i, b * s + j);
        }
      }
    }
  }
};

CnnTraining train_net(Net net, const std::vector<LabeledFeatures>& train, const std::vector<LabeledFeatures>& val,
                      const TrainOptions& options) {
  check_dataset(train, net.arch.classes);
  net.arch.validate();
  std::mt19937_64 rng(options.seed);
  auto init = [&](Matrix& m, int rows, int cols, double amplitude) {
    m = Matrix(rows, cols);
    for (double& v : m.data) v = amplitude * (2.0 * unit(rng) - 1.0);
  };
  init(net.k1, net.arch.kernel_side, net.arch.kernel_side, 1.0);
  if (net.second_conv) init(net.k2, net.arch.pool_window, net.arch.pool_window, 1.0);
  net.fc.resize(static_cast<std::size_t>(net.arch.classes));
  for (auto& w : net.fc) init(w, net.side2(), net.side2(), 0.1);

  constexpr std::size_t kBatch = 16;
  CnnTraining out;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const auto order = shuffled(train.size(), rng);
    for (std::size_t start = 0; start < order.size(); start += kBatch) {
      const std::size_t end = std::min(order.size(), start + kBatch);
      Matrix g1(net.k1.rows, net.k1.cols);
      Matrix g2(net.k2.rows, net.k2.cols);
      std::vector<Matrix> gfc(net.fc.size(), Matrix(net.side2(), net.side2()));
      const double weight = 1.0 / static_cast<double>(end - start);
      for (std::size_t i = start; i < end; ++i) net.backward(train[order[i]], g1, g2, gfc, weight);
      auto step = [&](Matrix& p, const Matrix& g) {
        for (std::size_t i = 0; i < p.data.size(); ++i) p.data[i] -= options.learning_rate * g.data[i];
      };
      step(net.k1, g1);
      if (net.second_conv) step(net.k2, g2);
      for (std::size_t k = 0; k < net.fc.size(); ++k) step(net.fc[k], gfc[k]);
    }
    out.curve.train.push_back(net.loss(train));
    out.curve.validation.push_back(net.loss(val));
  }
  out.kernel = net.k1;
  out.kernel2 = net.k2;
  out.fc = net.fc;
  return out;
}

}  // namespace

CnnTraining train_cpnn(const std::vector<LabeledFeatures>& train, const std::vector<LabeledFeatures>& validation,
                       const Architecture& arch, const TrainOptions& options) {
  Net net;
  net.arch = arch;
  return train_net(std::move(net), train, validation, options);
}

CnnTraining train_ccnn(const std::vector<LabeledFeatures>& train, const std::vector<LabeledFeatures>& validation,
                       const Architecture& arch, const TrainOptions& options) {
  Net net;
  net.arch = arch;
  net.second_conv = true;
  return train_net(std::move(net), train, validation, options);
}

}  // namespace qcnn
