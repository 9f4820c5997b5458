// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qcnn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qcnn/arithmetic.hpp"
#include "qcnn/errors.hpp"

namespace qcnn {

std::string to_string(Backend b) { return b == Backend::kExact ? "exact" : "circuit"; }

Backend parse_backend(const std::string& s) {
  if (s == "exact") return Backend::kExact;
  if (s == "circuit") return Backend::kCircuit;
  throw UsageError("unknown backend '" + s + "' (expected exact or circuit)");
}

namespace {

const char* loader_name(LoaderImpl l) { return l == LoaderImpl::kQram ? "qram" : "multiplexed"; }

void check_common(int L, int t) {
  if (L < 1 || L > 52) throw UsageError("angle bits L must lie in [1, 52]");
  if (t < 1 || t > 20) throw UsageError("QAE bits t must lie in [1, 20]");
}

void check_window(int in, int window, int stride, const char* what) {
  if (in < 1 || window < 1) throw UsageError(std::string(what) + ": sizes must be positive");
  if (window > in) throw UsageError(std::string(what) + ": window larger than input");
  if (stride < 1) throw DomainError(std::string(what) + ": stride must be a positive integer");
  if ((in - window) % stride != 0) {
    std::ostringstream msg;
    msg << what << ": (" << in << " - " << window << ") = " << (in - window) << " is not divisible by stride "
        << stride;
    throw UsageError(msg.str());
  }
}

Register joined(const std::string& name, const Register& lo, const Register& hi) {
  if (lo.offset + lo.width != hi.offset) throw UsageError("registers " + lo.name + ", " + hi.name + " not adjacent");
  return Register{name, lo.offset, lo.width + hi.width};
}

// Table over key = row + col * 2^w for a square matrix; unused keys hold angle 0.
QramTable square_table(const Matrix& m, int w, int angle_bits) {
  const std::size_t span = std::size_t{1} << w;
  std::vector<double> values(span * span, 1.0);
  for (int x = 0; x < m.rows; ++x) {
    for (int y = 0; y < m.cols; ++y) values[x + y * span] = m(x, y);
  }
  return QramTable::from_values(values, angle_bits);
}

BasisIndex all_qubits(int n) { return (BasisIndex{1} << n) - 1; }

void check_budget(int qubits, int budget, const std::string& layer) {
  if (qubits > budget) {
    throw ResourceError(layer + " requires " + std::to_string(qubits) + " qubits, exceeding the budget of " +
                        std::to_string(budget));
  }
}

struct Estimate {
  double p = 0.0;             // good-subspace probability (or sin^2 of the estimate)
  double feature_unit = 0.0;  // decoded value before any outer scaling
};

// Runs one per-feature estimation with either backend. `a_coef`, `b_coef`: f = a sin^2 - b.
Estimate estimate_feature(const AmplitudeProblem& problem, const RegisterLayout& layout,
                          const std::vector<std::string>& scratch, Backend backend, int t, const QaeOptions& qae,
                          bool verify, bool circuit_decode, double a_coef, double b_coef, int budget,
                          LayerDiagnostics* diag) {
  Estimate e;
  if (backend == Backend::kExact) {
    Statevector state = init_state(layout, budget);
    state.reset_to_basis(problem.initial_index);
    const CompiledCircuit a(problem.a);
    a.apply(state);
    e.p = condition_probability(state, problem.good);
    e.feature_unit = a_coef * e.p - b_coef;
    if (verify) {
      CompiledCircuit(problem.a.inverse()).apply(state);
      const double fid = assert_disentangled(state, layout, scratch, 0);
      if (diag != nullptr) diag->min_uncompute_fidelity = std::min(diag->min_uncompute_fidelity, fid);
    }
  } else {
    QaeOptions opts = qae;
    opts.verify_uncompute = verify;
    opts.qubit_budget = budget;
    QaeResult r = qae_estimate(problem, t, opts);
    const double s = std::sin(std::numbers::pi * r.theta_tilde);
    e.p = s * s;
    e.feature_unit = circuit_decode ? decode_feature_circuit(r.folded_outcome, t, a_coef, b_coef)
                                    : decode_affine(r.theta_tilde, a_coef, b_coef);
    if (diag != nullptr) {
      if (r.uncompute_fidelity >= 0.0) {
        diag->min_uncompute_fidelity = std::min(diag->min_uncompute_fidelity, r.uncompute_fidelity);
      }
      diag->qae.push_back(std::move(r));
    }
  }
  if (diag != nullptr) diag->good_probabilities.push_back(e.p);
  return e;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

int ConvConfig::output_side() const { return (M - N) / s + 1; }

void ConvConfig::validate() const {
  check_window(M, N, s, "convolution");
  check_common(L, t);
}

std::string ConvConfig::describe() const {
  std::ostringstream o;
  o << "M=" << M << " N=" << N << " s=" << s << " L=" << L << " t=" << t << " backend=" << to_string(backend)
    << " loader=" << loader_name(loader);
  return o.str();
}

int PoolConfig::output_side() const { return (M_prime - N_prime) / s_prime + 1; }

void PoolConfig::validate() const {
  check_window(M_prime, N_prime, s_prime, "pooling");
  check_common(L, t);
  if (input_scale < 0.0) throw UsageError("pooling input scale must be non-negative");
}

std::string PoolConfig::describe() const {
  std::ostringstream o;
  o << "M'=" << M_prime << " N'=" << N_prime << " s'=" << s_prime << " L=" << L << " t=" << t
    << " backend=" << to_string(backend) << " loader=" << loader_name(loader);
  return o.str();
}

void FcWeights::validate() const {
  if (K < 1 || side < 1) throw UsageError("fully connected layer needs K >= 1 and side >= 1");
  if (static_cast<int>(weights.size()) != K) throw UsageError("expected one weight matrix per class");
  for (const auto& w : weights) {
    if (w.rows != side || w.cols != side) throw UsageError("weight matrix shape differs from feature side");
    for (double v : w.data) {
      if (!(std::abs(v) <= 1.0)) throw DomainError("fully connected weight outside [-1, 1]");
    }
  }
}

// ---------------------------------------------------------------------------
// Feature maps

void FeatureMap::write(std::ostream& out) const {
  out << "# qcnn feature map\n";
  out << "layer " << (layer.empty() ? "-" : layer) << "\n";
  out << "config " << (config.empty() ? "-" : config) << "\n";
  out << "scale " << std::setprecision(17) << scale << "\n";
  out << "side " << features.rows << "\n";
  for (int r = 0; r < features.rows; ++r) {
    for (int c = 0; c < features.cols; ++c) out << (c ? " " : "") << std::setprecision(17) << features(r, c);
    out << "\n";
  }
}

FeatureMap FeatureMap::read(std::istream& in) {
  FeatureMap fm;
  std::string line;
  auto next = [&](const std::string& key) {
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] != '#') break;
    }
    if (line.rfind(key + " ", 0) != 0) throw FormatError("feature map: expected '" + key + "' line, got '" + line + "'");
    return line.substr(key.size() + 1);
  };
  fm.layer = next("layer");
  fm.config = next("config");
  try {
    fm.scale = std::stod(next("scale"));
    const int side = std::stoi(next("side"));
    if (side < 0) throw FormatError("feature map: negative side");
    fm.features = Matrix(side, side);
    for (int r = 0; r < side; ++r) {
      if (!std::getline(in, line)) throw FormatError("feature map: truncated at row " + std::to_string(r));
      std::istringstream row(line);
      for (int c = 0; c < side; ++c) {
        if (!(row >> fm.features(r, c))) throw FormatError("feature map: short row " + std::to_string(r));
      }
    }
  } catch (const std::invalid_argument&) {
    throw FormatError("feature map: malformed number");
  }
  return fm;
}

// ---------------------------------------------------------------------------
// Decoding

double decode_affine(double theta_tilde, double a, double b) {
  const double s = std::sin(std::numbers::pi * theta_tilde);
  return a * s * s - b;
}

double decode_feature(double theta_tilde, int N) {
  const double n2 = static_cast<double>(N) * N;
  return decode_affine(theta_tilde, 2.0 * n2, n2);
}

double decode_feature_circuit(BasisIndex folded_outcome, int t, double a, double b) {
  if (t < 1 || t > 20) throw UsageError("decode register width out of range");
  if (folded_outcome >> t != 0) throw UsageError("outcome wider than the phase register");
  RegisterLayout layout;
  const Register& y = layout.add("y", t);
  const Register& value = layout.add("value", 2 * t);
  const BasisIndex scale = BasisIndex{1} << (2 * t);
  Circuit uf(layout.total_width());
  for (BasisIndex k = 0; k < (BasisIndex{1} << t); ++k) {
    const double s = std::sin(std::numbers::pi * std::ldexp(static_cast<double>(k), -t));
    auto code = static_cast<BasisIndex>(std::floor(s * s * static_cast<double>(scale)));
    code = std::min(code, scale - 1);
    for (int bit = 0; bit < value.width; ++bit) {
      if ((code >> bit) & 1U) uf.x(value.qubit(bit), y.equals(k));
    }
  }
  Statevector state(layout.total_width());
  state.reset_to_basis(y.place(folded_outcome));
  uf.apply(state);
  const auto dist = register_distribution(state, value);
  const auto code = static_cast<BasisIndex>(std::max_element(dist.begin(), dist.end()) - dist.begin());
  return a * static_cast<double>(code) / static_cast<double>(scale) - b;
}

// ---------------------------------------------------------------------------
// Convolution

RegisterLayout conv_layout(const ConvConfig& config) {
  config.validate();
  const int w_out = index_width(static_cast<BasisIndex>(config.output_side()));
  const int w_kernel = index_width(static_cast<BasisIndex>(config.N));
  const int w_image = index_width(static_cast<BasisIndex>(config.M));
  RegisterLayout l;
  l.add("c1x", w_out);
  l.add("c1y", w_out);
  l.add("c2i", w_kernel);
  l.add("c2j", w_kernel);
  l.add("c3", bit_width_of(static_cast<BasisIndex>(config.s)));
  l.add("c4x", w_image);
  l.add("c4y", w_image);
  l.add("anc", 1);
  l.add("c5", 1);
  l.add("c6", 1);
  l.add("c7", 1);
  if (config.loader == LoaderImpl::kQram) l.add("c8", config.L);
  return l;
}

std::vector<std::string> conv_scratch_registers(const ConvConfig& config) {
  std::vector<std::string> names{"c2i", "c2j", "c3", "c4x", "c4y", "anc", "c5", "c6", "c7"};
  if (config.loader == LoaderImpl::kQram) names.emplace_back("c8");
  return names;
}

namespace {

Circuit conv_body(const ConvConfig& config, const RegisterLayout& l, const Matrix& r, const Matrix& w) {
  const int Mp = config.output_side();
  Circuit a(l.total_width());
  // Uniform superposition over kernel offsets (i, j).
  prepare_uniform(a, l["c2i"], static_cast<BasisIndex>(config.N));
  prepare_uniform(a, l["c2j"], static_cast<BasisIndex>(config.N));
  // (x, y) = (x' s + i, y' s + j) with the stride loaded and unloaded around it.
  const BasisInt stride = load_stride(a, l["c3"], static_cast<BasisIndex>(config.s));
  const IndexPair coarse{BasisInt(l["c1x"], Mp - 1), BasisInt(l["c1y"], Mp - 1)};
  const IndexPair offset{BasisInt(l["c2i"], config.N - 1), BasisInt(l["c2j"], config.N - 1)};
  const IndexPair out{BasisInt(l["c4x"], 0), BasisInt(l["c4y"], 0)};
  index_map(a, coarse, offset, stride, out, l["anc"].offset);
  load_stride(a, l["c3"], static_cast<BasisIndex>(config.s));
  // Interference of the two loaded values on c6, c7 through c5.
  const int c5 = l["c5"].offset;
  const Condition on_zero = l["c5"].equals(0);
  const Register* scratch = config.loader == LoaderImpl::kQram ? &l["c8"] : nullptr;
  a.h(c5);
  const Register image_key = joined("c4", l["c4x"], l["c4y"]);
  const Register kernel_key = joined("c2", l["c2i"], l["c2j"]);
  load_values(a, config.loader, image_key, scratch, l["c6"].offset, square_table(r, l["c4x"].width, config.L),
              on_zero);
  load_values(a, config.loader, kernel_key, scratch, l["c7"].offset, square_table(w, l["c2i"].width, config.L),
              on_zero);
  a.h(c5);
  return a;
}

void check_conv_inputs(const ConvConfig& config, const Matrix& r, const Matrix& w) {
  config.validate();
  if (r.rows != config.M || r.cols != config.M) throw UsageError("image side differs from M");
  if (w.rows != config.N || w.cols != config.N) throw UsageError("kernel side differs from N");
}

}  // namespace

AmplitudeProblem build_conv_A(const ConvConfig& config, const Matrix& r, const Matrix& w, int x_prime,
                              int y_prime) {
  check_conv_inputs(config, r, w);
  const int Mp = config.output_side();
  if (x_prime < 0 || y_prime < 0 || x_prime >= Mp || y_prime >= Mp) throw UsageError("output position out of range");
  const RegisterLayout l = conv_layout(config);
  AmplitudeProblem p;
  p.a = conv_body(config, l, r, w);
  p.good = l["c5"].equals(0);
  const BasisIndex c1 = l["c1x"].mask() | l["c1y"].mask();
  p.scope = all_qubits(l.total_width()) & ~c1;
  p.initial_index = l["c1x"].place(static_cast<BasisIndex>(x_prime)) | l["c1y"].place(static_cast<BasisIndex>(y_prime));
  return p;
}

FeatureMap conv_layer(const ConvConfig& config, const ImageTensor& image, const KernelWeights& kernel,
                      LayerDiagnostics* diagnostics) {
  return conv_layer(config, normalize(image), normalize(kernel), diagnostics);
}

FeatureMap conv_layer(const ConvConfig& config, const Matrix& r, const Matrix& w, LayerDiagnostics* diagnostics) {
  check_conv_inputs(config, r, w);
  const RegisterLayout layout = conv_layout(config);
  const int budget = config.qae.qubit_budget;
  const int extra = config.backend == Backend::kCircuit ? config.t : 0;
  check_budget(layout.total_width() + extra, budget, "convolution layer");
  if (diagnostics != nullptr) {
    diagnostics->work_qubits = layout.total_width();
    diagnostics->total_qubits = layout.total_width() + extra;
  }
  const int Mp = config.output_side();
  const double n2 = static_cast<double>(config.N) * config.N;
  const auto scratch = conv_scratch_registers(config);
  FeatureMap out;
  out.features = Matrix(Mp, Mp);
  out.layer = "conv";
  out.config = config.describe();
  out.scale = n2;
  for (int x = 0; x < Mp; ++x) {
    for (int y = 0; y < Mp; ++y) {
      const AmplitudeProblem p = build_conv_A(config, r, w, x, y);
      const Estimate e = estimate_feature(p, layout, scratch, config.backend, config.t, config.qae,
                                          config.verify_uncompute, config.circuit_decode, 2.0 * n2, n2, budget,
                                          diagnostics);
      out.features(x, y) = e.feature_unit;
    }
  }
  return out;
}

FeatureMap conv_layer_coherent(const ConvConfig& config, const Matrix& r, const Matrix& w,
                               LayerDiagnostics* diagnostics) {
  check_conv_inputs(config, r, w);
  if (config.M != 2) throw UsageError("coherent convolution mode supports 2x2 images only");
  const RegisterLayout layout = conv_layout(config);
  check_budget(layout.total_width() + config.t, config.qae.qubit_budget, "coherent convolution layer");
  const int Mp = config.output_side();
  AmplitudeProblem p = build_conv_A(config, r, w, 0, 0);
  p.prefix = Circuit(layout.total_width());
  prepare_uniform(p.prefix, layout["c1x"], static_cast<BasisIndex>(Mp));
  prepare_uniform(p.prefix, layout["c1y"], static_cast<BasisIndex>(Mp));
  const Statevector state = run_phase_estimation(p, config.t, config.qae.qubit_budget);

  const Register phase{"phase", layout.total_width(), config.t};
  const Register c1 = joined("c1", layout["c1x"], layout["c1y"]);
  const std::size_t outcomes = std::size_t{1} << config.t;
  std::vector<std::vector<double>> joint(std::size_t{1} << c1.width, std::vector<double>(outcomes, 0.0));
  const auto amps = state.amplitudes();
  for (BasisIndex i = 0; i < amps.size(); ++i) {
    const double pr = std::norm(amps[i]);
    if (pr != 0.0) joint[c1.value_of(i)][phase.value_of(i)] += pr;
  }
  const double n2 = static_cast<double>(config.N) * config.N;
  FeatureMap out;
  out.features = Matrix(Mp, Mp);
  out.layer = "conv-coherent";
  out.config = config.describe();
  out.scale = n2;
  if (diagnostics != nullptr) {
    diagnostics->work_qubits = layout.total_width();
    diagnostics->total_qubits = layout.total_width() + config.t;
  }
  const int wx = layout["c1x"].width;
  for (int x = 0; x < Mp; ++x) {
    for (int y = 0; y < Mp; ++y) {
      auto dist = joint[static_cast<std::size_t>(x) | (static_cast<std::size_t>(y) << wx)];
      double total = 0.0;
      for (double v : dist) total += v;
      for (double& v : dist) v /= total;
      QaeResult res;
      res.t = config.t;
      res.distribution = dist;
      const auto folded = fold_distribution(dist);
      const auto mode = static_cast<BasisIndex>(std::max_element(folded.begin(), folded.end()) - folded.begin());
      res.folded_outcome = res.raw_outcome = mode;
      res.theta_tilde = std::ldexp(static_cast<double>(mode), -config.t);
      res.modal_probability = folded[mode];
      res.confidence = folded[mode] + (mode > 0 ? folded[mode - 1] : 0.0) +
                       (mode + 1 < folded.size() ? folded[mode + 1] : 0.0);
      out.features(x, y) = config.circuit_decode ? decode_feature_circuit(mode, config.t, 2.0 * n2, n2)
                                                 : decode_feature(res.theta_tilde, config.N);
      if (diagnostics != nullptr) {
        const double s = std::sin(std::numbers::pi * res.theta_tilde);
        diagnostics->good_probabilities.push_back(s * s);
        diagnostics->qae.push_back(std::move(res));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pooling

RegisterLayout pool_layout(const PoolConfig& config) {
  config.validate();
  const int w_in = index_width(static_cast<BasisIndex>(config.M_prime));
  const int w_out = index_width(static_cast<BasisIndex>(config.output_side()));
  const int w_win = index_width(static_cast<BasisIndex>(config.N_prime));
  RegisterLayout l;
  l.add("c1x", w_in);
  l.add("c1y", w_in);
  if (config.loader == LoaderImpl::kQram) l.add("c9", config.L);
  l.add("p1x", w_out);
  l.add("p1y", w_out);
  l.add("p2x", w_win);
  l.add("p2y", w_win);
  l.add("p3", bit_width_of(static_cast<BasisIndex>(config.s_prime)));
  l.add("p4x", w_in);
  l.add("p4y", w_in);
  l.add("anc", 1);
  l.add("p5", 1);
  l.add("p6", 1);
  l.add("p7", 1);
  return l;
}

std::vector<std::string> pool_scratch_registers(const PoolConfig& config) {
  std::vector<std::string> names{"c1x", "c1y", "p2x", "p2y", "p3", "p4x", "p4y", "anc", "p5", "p6", "p7"};
  if (config.loader == LoaderImpl::kQram) names.emplace_back("c9");
  return names;
}

AmplitudeProblem build_pool_A(const PoolConfig& config, const Matrix& v, int x2, int y2) {
  config.validate();
  if (v.rows != config.M_prime || v.cols != config.M_prime) throw UsageError("feature map side differs from M'");
  const int M2 = config.output_side();
  if (x2 < 0 || y2 < 0 || x2 >= M2 || y2 >= M2) throw UsageError("pooled position out of range");
  const RegisterLayout l = pool_layout(config);
  const auto Mp = static_cast<BasisIndex>(config.M_prime);
  Circuit a(l.total_width());

  // Feature state: uniform over positions, with the value attached through the loader.
  prepare_uniform(a, l["c1x"], Mp);
  prepare_uniform(a, l["c1y"], Mp);
  const Register c1 = joined("c1", l["c1x"], l["c1y"]);
  const QramTable table = square_table(v, l["c1x"].width, config.L);
  if (config.loader == LoaderImpl::kQram) qram_oracle(a, c1, l["c9"], table);

  // Window position p4 = p1 s' + p2.
  prepare_uniform(a, l["p2x"], static_cast<BasisIndex>(config.N_prime));
  prepare_uniform(a, l["p2y"], static_cast<BasisIndex>(config.N_prime));
  const BasisInt stride = load_stride(a, l["p3"], static_cast<BasisIndex>(config.s_prime));
  const IndexPair coarse{BasisInt(l["p1x"], M2 - 1), BasisInt(l["p1y"], M2 - 1)};
  const IndexPair offset{BasisInt(l["p2x"], config.N_prime - 1), BasisInt(l["p2y"], config.N_prime - 1)};
  const IndexPair out{BasisInt(l["p4x"], 0), BasisInt(l["p4y"], 0)};
  index_map(a, coarse, offset, stride, out, l["anc"].offset);
  load_stride(a, l["p3"], static_cast<BasisIndex>(config.s_prime));

  // p5 = 0 exactly where the feature position lies at this window offset.
  const int p5 = l["p5"].offset;
  const int p6 = l["p6"].offset;
  const int p7 = l["p7"].offset;
  a.x(p5);
  comparator_uc(a, c1, joined("p4", l["p4x"], l["p4y"]), p5);
  const Condition matched = l["p5"].equals(0);
  a.h(p6, matched);
  const Condition rotate_on = matched.with(p6, false);
  if (config.loader == LoaderImpl::kQram) {
    const Register& c9 = l["c9"];
    for (int bit = 1; bit <= config.L; ++bit) {
      a.rotation(p7, std::ldexp(std::numbers::pi, -bit), rotate_on.with(c9.qubit(config.L - bit), true));
    }
  } else {
    a.mux_rotation(p7, c1.qubits(), table.angles(std::size_t{1} << c1.width), rotate_on);
  }
  a.h(p6, matched);

  AmplitudeProblem p;
  p.a = std::move(a);
  p.good = l["p5"].equals(0).with(l["p6"].equals(0));
  const BasisIndex p1 = l["p1x"].mask() | l["p1y"].mask();
  p.scope = all_qubits(l.total_width()) & ~p1;
  p.initial_index = l["p1x"].place(static_cast<BasisIndex>(x2)) | l["p1y"].place(static_cast<BasisIndex>(y2));
  return p;
}

FeatureMap pool_layer(const PoolConfig& config, const FeatureMap& input, LayerDiagnostics* diagnostics) {
  config.validate();
  if (input.side() != config.M_prime) throw UsageError("feature map side differs from M'");
  const double in_scale = config.input_scale > 0.0 ? config.input_scale : input.scale;
  if (!(in_scale > 0.0)) throw ScalingError("pooling input scale must be positive");
  Matrix v = input.features;
  for (int x = 0; x < v.rows; ++x) {
    for (int y = 0; y < v.cols; ++y) {
      v(x, y) /= in_scale;
      if (!std::isfinite(v(x, y)) || std::abs(v(x, y)) > 1.0) {
        std::ostringstream msg;
        msg << "pooling input at (" << x << ", " << y << ") = " << input.features(x, y) << " lies outside [-"
            << in_scale << ", " << in_scale << "] after scaling";
        throw ScalingError(msg.str());
      }
    }
  }
  const RegisterLayout layout = pool_layout(config);
  const int budget = config.qae.qubit_budget;
  const int extra = config.backend == Backend::kCircuit ? config.t : 0;
  check_budget(layout.total_width() + extra, budget, "pooling layer");
  if (diagnostics != nullptr) {
    diagnostics->work_qubits = layout.total_width();
    diagnostics->total_qubits = layout.total_width() + extra;
  }
  const double mp2 = static_cast<double>(config.M_prime) * config.M_prime;
  const double np2 = static_cast<double>(config.N_prime) * config.N_prime;
  const auto scratch = pool_scratch_registers(config);
  const int M2 = config.output_side();
  FeatureMap out;
  out.features = Matrix(M2, M2);
  out.layer = "pool";
  out.config = config.describe();
  out.scale = np2 * in_scale;
  for (int x = 0; x < M2; ++x) {
    for (int y = 0; y < M2; ++y) {
      const AmplitudeProblem p = build_pool_A(config, v, x, y);
      const Estimate e = estimate_feature(p, layout, scratch, config.backend, config.t, config.qae,
                                          config.verify_uncompute, config.circuit_decode, 2.0 * mp2 * np2, np2,
                                          budget, diagnostics);
      out.features(x, y) = e.feature_unit * in_scale;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fully connected

RegisterLayout fc_layout(int side, int K, const FcOptions& options) {
  if (side < 1 || K < 1) throw UsageError("fully connected layer needs side >= 1 and K >= 1");
  const int w = index_width(static_cast<BasisIndex>(side));
  RegisterLayout l;
  l.add("f1x", w);
  l.add("f1y", w);
  l.add("f3", index_width(static_cast<BasisIndex>(K)));
  if (options.loader == LoaderImpl::kQram) {
    l.add("f2", options.L);
    l.add("fw", options.L);
  }
  l.add("f4", 1);
  l.add("f5", 1);
  l.add("f6", 1);
  return l;
}

std::vector<double> fc_layer(const Matrix& features, const FcWeights& weights, const FcOptions& options) {
  weights.validate();
  if (features.rows != weights.side || features.cols != weights.side) {
    throw UsageError("feature side differs from the weight side");
  }
  for (double v : features.data) {
    if (!(std::abs(v) <= 1.0)) throw ScalingError("fully connected input outside [-1, 1]");
  }
  const RegisterLayout l = fc_layout(weights.side, weights.K, options);
  const int w = l["f1x"].width;
  const Register f1 = joined("f1", l["f1x"], l["f1y"]);
  const Register key = Register{"f13", f1.offset, f1.width + l["f3"].width};
  const QramTable r_table = square_table(features, w, options.L);

  const std::size_t span = std::size_t{1} << w;
  std::vector<double> wvals(std::size_t{1} << key.width, 1.0);
  for (int k = 0; k < weights.K; ++k) {
    for (int x = 0; x < weights.side; ++x) {
      for (int y = 0; y < weights.side; ++y) wvals[x + y * span + k * span * span] = weights.weights[k](x, y);
    }
  }
  const QramTable w_table = QramTable::from_values(wvals, options.L);

  Circuit c(l.total_width());
  prepare_uniform(c, l["f1x"], static_cast<BasisIndex>(weights.side));
  prepare_uniform(c, l["f1y"], static_cast<BasisIndex>(weights.side));
  prepare_uniform(c, l["f3"], static_cast<BasisIndex>(weights.K));
  const bool literal = options.loader == LoaderImpl::kQram;
  if (literal) qram_oracle(c, f1, l["f2"], r_table);
  const int f6 = l["f6"].offset;
  const Condition on_zero = l["f6"].equals(0);
  c.h(f6);
  load_values(c, options.loader, key, literal ? &l["fw"] : nullptr, l["f4"].offset, w_table, on_zero);
  if (literal) {
    const Register& f2 = l["f2"];
    for (int bit = 1; bit <= options.L; ++bit) {
      c.rotation(l["f5"].offset, std::ldexp(std::numbers::pi, -bit), on_zero.with(f2.qubit(options.L - bit), true));
    }
  } else {
    c.mux_rotation(l["f5"].offset, f1.qubits(), r_table.angles(std::size_t{1} << f1.width), on_zero);
  }
  c.h(f6);

  Statevector state = init_state(l, options.qubit_budget, "fully connected layer");
  c.apply(state);
  std::vector<double> prob(static_cast<std::size_t>(weights.K), 0.0);
  if (options.shots == 0) {
    for (int k = 0; k < weights.K; ++k) {
      prob[k] = condition_probability(state, l["f3"].equals(static_cast<BasisIndex>(k)).with(on_zero));
    }
    return prob;
  }
  RegisterLayout whole;
  whole.add("all", l.total_width());
  const Histogram hist = sample(state, whole, "all", options.shots, options.seed);
  for (const auto& [index, count] : hist) {
    if (!on_zero.holds(index)) continue;
    const BasisIndex k = l["f3"].value_of(index);
    if (k < prob.size()) prob[k] += static_cast<double>(count);
  }
  for (double& p : prob) p /= static_cast<double>(options.shots);
  return prob;
}

int classify(const std::vector<double>& prob) {
  if (prob.empty()) throw UsageError("classify needs a non-empty probability vector");
  int best = 0;
  for (int k = 1; k < static_cast<int>(prob.size()); ++k) {
    if (prob[k] > prob[best]) best = k;
  }
  return best;
}

}  // namespace qcnn
