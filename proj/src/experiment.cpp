// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qcnn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

#include "qcnn/errors.hpp"

namespace qcnn {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T v{};
  in >> v;
  if (!in || !(in >> std::ws).eof()) throw UsageError("config key '" + key + "': cannot parse '" + value + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& value) { return parse_number<int>(key, value); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

LoaderImpl parse_loader(const std::string& s) {
  if (s == "multiplexed") return LoaderImpl::kMultiplexed;
  if (s == "qram") return LoaderImpl::kQram;
  throw UsageError("unknown loader '" + s + "' (expected multiplexed or qram)");
}

const char* loader_name(LoaderImpl l) { return l == LoaderImpl::kQram ? "qram" : "multiplexed"; }

std::string format_double(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

std::string stride_tag(int s, int sp) { return std::to_string(s) + "_" + std::to_string(sp); }

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "dataset") {
    dataset = value;
  } else if (key == "digits") {
    digits.clear();
    for (const auto& d : split(value, ',')) digits.push_back(parse_int(key, d));
  } else if (key == "samples") {
    samples = parse_int(key, value);
  } else if (key == "train_samples") {
    train_samples = parse_int(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "image_side") {
    image_side = parse_int(key, value);
  } else if (key == "kernel_side") {
    kernel_side = parse_int(key, value);
  } else if (key == "pool_window") {
    pool_window = parse_int(key, value);
  } else if (key == "stride_conv") {
    stride_conv = parse_int(key, value);
  } else if (key == "stride_pool") {
    stride_pool = parse_int(key, value);
  } else if (key == "angle_bits") {
    angle_bits = parse_int(key, value);
  } else if (key == "qae_bits") {
    qae_bits = parse_int(key, value);
  } else if (key == "backend") {
    backend = parse_backend(value);
  } else if (key == "loader") {
    loader = parse_loader(value);
  } else if (key == "shots") {
    shots = parse_number<std::uint64_t>(key, value);
  } else if (key == "epochs") {
    epochs = parse_int(key, value);
  } else if (key == "learning_rate") {
    learning_rate = parse_number<double>(key, value);
  } else if (key == "weights") {
    weights = value;
  } else if (key == "out") {
    out = value;
  } else if (key == "qubit_budget") {
    qubit_budget = parse_int(key, value);
  } else if (key == "sweep") {
    // "1x1, 1x2, 2x1"
    sweep.clear();
    for (const auto& item : split(value, ',')) {
      const auto x = item.find('x');
      if (x == std::string::npos) throw UsageError("sweep entry '" + item + "' is not of the form SxS'");
      sweep.emplace_back(parse_int(key, item.substr(0, x)), parse_int(key, item.substr(x + 1)));
    }
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("config line " + std::to_string(number) + ": expected key = value");
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path);
  return parse(in);
}

std::string ExperimentConfig::echo() const {
  std::ostringstream o;
  o << "dataset = " << dataset << "\n";
  o << "digits = ";
  for (std::size_t i = 0; i < digits.size(); ++i) o << (i ? "," : "") << digits[i];
  o << "\n";
  o << "samples = " << samples << "\n";
  o << "train_samples = " << train_samples << "\n";
  o << "seed = " << seed << "\n";
  o << "image_side = " << image_side << "\n";
  o << "kernel_side = " << kernel_side << "\n";
  o << "pool_window = " << pool_window << "\n";
  o << "stride_conv = " << stride_conv << "\n";
  o << "stride_pool = " << stride_pool << "\n";
  o << "angle_bits = " << angle_bits << "\n";
  o << "qae_bits = " << qae_bits << "\n";
  o << "backend = " << to_string(backend) << "\n";
  o << "loader = " << loader_name(loader) << "\n";
  o << "shots = " << shots << "\n";
  o << "epochs = " << epochs << "\n";
  o << "learning_rate = " << format_double(learning_rate) << "\n";
  o << "weights = " << weights << "\n";
  o << "out = " << out << "\n";
  o << "qubit_budget = " << qubit_budget << "\n";
  o << "sweep = ";
  for (std::size_t i = 0; i < sweep.size(); ++i) o << (i ? "," : "") << sweep[i].first << "x" << sweep[i].second;
  o << "\n";
  return o.str();
}

void ExperimentConfig::validate() const {
  if (samples < 1) throw UsageError("samples must be at least 1 (got " + std::to_string(samples) + ")");
  if (train_samples < 0) throw UsageError("train_samples must be non-negative");
  if (digits.size() < 2) throw UsageError("at least two digits are needed");
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] < 0 || digits[i] > 9) throw UsageError("digit " + std::to_string(digits[i]) + " out of range");
    for (std::size_t j = 0; j < i; ++j) {
      if (digits[i] == digits[j]) throw UsageError("digit " + std::to_string(digits[i]) + " listed twice");
    }
  }
  if (angle_bits < 1 || angle_bits > 30) throw UsageError("angle_bits must lie in [1, 30]");
  if (qae_bits < 1 || qae_bits > 16) throw UsageError("qae_bits must lie in [1, 16]");
  if (epochs < 1) throw UsageError("epochs must be at least 1");
  if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be positive");
  if (weights.empty() && train_samples < 1) throw UsageError("no weights file and no training samples");
  if (!std::filesystem::exists(dataset)) throw UsageError("dataset path " + dataset + " does not exist");
  if (!weights.empty() && !std::filesystem::exists(weights)) {
    throw UsageError("weights file " + weights + " does not exist");
  }
  // Divisibility of the primary stride pair is checked here; sweep rows are checked per row.
  if (sweep.empty()) architecture(stride_conv, stride_pool).validate();
}

Architecture ExperimentConfig::architecture(int s, int s_prime) const {
  Architecture a;
  a.image_side = image_side;
  a.kernel_side = kernel_side;
  a.conv_stride = s;
  a.pool_window = pool_window;
  a.pool_stride = s_prime;
  a.classes = static_cast<int>(digits.size());
  return a;
}

std::vector<std::pair<int, int>> ExperimentConfig::stride_pairs() const {
  if (sweep.empty()) return {{stride_conv, stride_pool}};
  return sweep;
}

Matrix preprocess(const MnistImage& image, int side) { return normalize(bilinear_resize(image.to_matrix(), side)); }

SampleSplit select_samples(const MnistData& data, const ExperimentConfig& config) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    if (std::find(config.digits.begin(), config.digits.end(), data.labels[i]) != config.digits.end()) pool.push_back(i);
  }
  const auto need = static_cast<std::size_t>(config.samples) + static_cast<std::size_t>(config.train_samples);
  if (pool.size() < need) {
    throw UsageError("dataset holds " + std::to_string(pool.size()) + " images of the selected digits, " +
                     std::to_string(need) + " requested");
  }
  // Fisher-Yates with explicit draws so the order does not depend on the standard library.
  std::mt19937_64 rng(config.seed);
  for (std::size_t i = pool.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(pool[i], pool[j]);
  }
  // Images whose resized form is all zero cannot be normalized; they are skipped and counted.
  SampleSplit split;
  std::size_t taken = 0;
  for (std::size_t k = 0; k < pool.size() && taken < need; ++k) {
    const std::size_t src = pool[k];
    LabeledImage li;
    li.source_index = src;
    li.label = data.labels[src];
    li.class_index = static_cast<int>(std::find(config.digits.begin(), config.digits.end(), li.label) -
                                      config.digits.begin());
    try {
      li.normalized = preprocess(data.images[src], config.image_side);
    } catch (const DegenerateInputError&) {
      ++split.skipped_degenerate;
      continue;
    }
    (taken < static_cast<std::size_t>(config.samples) ? split.test : split.train).push_back(std::move(li));
    ++taken;
  }
  if (taken < need) {
    throw UsageError("dataset holds only " + std::to_string(taken) + " usable images of the selected digits, " +
                     std::to_string(need) + " requested");
  }
  return split;
}

RefModel train_model(const std::vector<LabeledImage>& train, const Architecture& arch, const ExperimentConfig& config) {
  arch.validate();
  std::vector<LabeledFeatures> images;
  images.reserve(train.size());
  for (const auto& t : train) images.push_back({t.normalized, t.class_index});

  TrainOptions opts;
  opts.epochs = config.epochs;
  opts.learning_rate = config.learning_rate;
  opts.seed = config.seed;
  const CnnTraining cnn = train_cpnn(images, {}, arch, opts);

  RefModel model;
  model.arch = arch;
  model.kernel = normalize(cnn.kernel);
  model.seed = config.seed;
  model.clip = 1.0;

  std::vector<LabeledFeatures> features;
  features.reserve(train.size());
  for (const auto& t : train) features.push_back({reference_features(t.normalized, model.kernel, arch), t.class_index});
  model.fc = train_fc(features, arch.classes, opts);
  return model;
}

std::vector<double> quantum_pipeline(const Matrix& r, const RefModel& model, const PipelineOptions& options,
                                     Matrix* features) {
  const Architecture& arch = model.arch;
  const bool exact = options.backend == Backend::kExact;

  ConvConfig cc;
  cc.M = arch.image_side;
  cc.N = arch.kernel_side;
  cc.s = arch.conv_stride;
  cc.L = options.angle_bits;
  cc.t = options.qae_bits;
  cc.backend = options.backend;
  cc.loader = options.loader;
  cc.qae.shots = options.shots;
  cc.qae.seed = options.seed;
  cc.qae.qubit_budget = options.qubit_budget;
  cc.verify_uncompute = exact;
  const FeatureMap conv = conv_layer(cc, r, model.kernel);

  PoolConfig pc;
  pc.M_prime = conv.side();
  pc.N_prime = arch.pool_window;
  pc.s_prime = arch.pool_stride;
  pc.L = options.angle_bits;
  pc.t = options.qae_bits;
  pc.backend = options.backend;
  pc.loader = options.loader;
  pc.qae = cc.qae;
  pc.qae.seed = options.seed + 1;
  pc.verify_uncompute = exact;
  // Normalized image and kernel bound every convolution output by 1 (Cauchy-Schwarz).
  pc.input_scale = 1.0;
  const FeatureMap pooled = pool_layer(pc, conv);

  Matrix avg = pooled.features;
  const double area = static_cast<double>(arch.pool_window * arch.pool_window);
  for (double& v : avg.data) v = std::clamp(v / area, -1.0, 1.0);
  if (features != nullptr) *features = avg;

  FcOptions fo;
  fo.L = options.angle_bits;
  fo.loader = options.loader;
  fo.shots = options.shots;
  fo.seed = options.seed + 2;
  fo.qubit_budget = options.qubit_budget;
  return fc_layer(avg, model.fc, fo);
}

StrideResult evaluate(const std::vector<LabeledImage>& test, const RefModel& model, const PipelineOptions& options,
                      const std::vector<int>& digits) {
  StrideResult result;
  result.s = model.arch.conv_stride;
  result.s_prime = model.arch.pool_stride;
  result.model = model;
  result.images.resize(test.size());
  std::vector<std::string> errors(test.size());

  const auto n = static_cast<std::int64_t>(test.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& img = test[static_cast<std::size_t>(i)];
    ImageOutcome& o = result.images[static_cast<std::size_t>(i)];
    try {
      o.index = static_cast<std::size_t>(i);
      o.true_label = img.label;
      const Matrix ref = reference_features(img.normalized, model.kernel, model.arch);
      o.classical_scores = fc_ref(ref, model.fc);
      o.classical_prediction = digits[static_cast<std::size_t>(classify_ref(o.classical_scores))];
      PipelineOptions per_image = options;
      per_image.seed = options.seed + 3 * static_cast<std::uint64_t>(i);
      Matrix q;
      o.quantum_probabilities = quantum_pipeline(img.normalized, model, per_image, &q);
      o.quantum_prediction = digits[static_cast<std::size_t>(classify(o.quantum_probabilities))];
      for (std::size_t k = 0; k < q.data.size(); ++k) {
        o.max_feature_error = std::max(o.max_feature_error, std::abs(q.data[k] - ref.data[k]));
      }
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw std::runtime_error("image " + std::to_string(i) + ": " + errors[i]);
  }

  std::size_t q_ok = 0, c_ok = 0, agree = 0;
  double err_sum = 0.0;
  for (const auto& o : result.images) {
    q_ok += o.quantum_prediction == o.true_label;
    c_ok += o.classical_prediction == o.true_label;
    agree += o.quantum_prediction == o.classical_prediction;
    result.max_feature_error = std::max(result.max_feature_error, o.max_feature_error);
    err_sum += o.max_feature_error;
  }
  const double count = static_cast<double>(std::max<std::size_t>(1, test.size()));
  result.quantum_accuracy = static_cast<double>(q_ok) / count;
  result.classical_accuracy = static_cast<double>(c_ok) / count;
  result.agreement = static_cast<double>(agree) / count;
  result.mean_feature_error = err_sum / count;
  return result;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  report.config_echo = config.echo();


  // Reject invalid stride rows before any data is read or simulated.
  const auto pairs = config.stride_pairs();
  std::vector<std::string> rejection(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    try {
      config.architecture(pairs[i].first, pairs[i].second).validate();
      ConvConfig cc;
      cc.M = config.image_side;
      cc.N = config.kernel_side;
      cc.s = pairs[i].first;
      cc.validate();
    } catch (const std::exception& e) {
      rejection[i] = e.what();
    }
  }

  std::optional<RefModel> loaded;
  if (!config.weights.empty()) {
    std::ifstream in(config.weights);
    if (!in) throw FormatError("cannot open weights " + config.weights);
    loaded = RefModel::read(in);
  }

  const MnistData data = load_mnist(config.dataset);
  const SampleSplit split = select_samples(data, config);
  report.skipped_degenerate = split.skipped_degenerate;

  PipelineOptions opts;
  opts.backend = config.backend;
  opts.angle_bits = config.angle_bits;
  opts.qae_bits = config.qae_bits;
  opts.loader = config.loader;
  opts.shots = config.shots;
  opts.seed = config.seed;
  opts.qubit_budget = config.qubit_budget;

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [s, sp] = pairs[i];
    if (!rejection[i].empty()) {
      StrideResult row;
      row.s = s;
      row.s_prime = sp;
      row.rejected = true;
      row.reason = rejection[i];
      report.rows.push_back(std::move(row));
      continue;
    }
    const Architecture arch = config.architecture(s, sp);
    const auto start = std::chrono::steady_clock::now();
    RefModel model;
    if (loaded) {
      model = *loaded;
      if (model.arch.conv_stride != s || model.arch.pool_stride != sp || model.arch.image_side != arch.image_side ||
          model.arch.kernel_side != arch.kernel_side || model.arch.pool_window != arch.pool_window ||
          model.arch.classes != arch.classes) {
        throw UsageError("weights file architecture does not match stride row " + std::to_string(s) + "x" +
                         std::to_string(sp));
      }
    } else {
      model = train_model(split.train, arch, config);
    }
    StrideResult row = evaluate(split.test, model, opts, config.digits);
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ResourceQuery q;
    q.M = arch.image_side;
    q.N = arch.kernel_side;
    q.M_prime = arch.conv_side();
    q.N_prime = arch.pool_window;
    q.L = config.angle_bits;
    q.epsilon = std::ldexp(1.0, -config.qae_bits);
    q.s = s;
    q.s_prime = sp;
    row.budget = estimate_resources(q);
    report.rows.push_back(std::move(row));
  }
  return report;
}

void ExperimentReport::write(std::ostream& out) const {
  out << "# qcnn experiment report\n";
  out << "[config]\n" << config_echo;
  out << "\n[data]\nskipped_all_zero_after_resize = " << skipped_degenerate << "\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& row : rows) {
    out << "\n[stride " << row.s << "x" << row.s_prime << "]\n";
    if (row.rejected) {
      out << "status = rejected\n";
      out << "reason = " << row.reason << "\n";
      continue;
    }
    out << "status = ok\n";
    out << "images = " << row.images.size() << "\n";
    out << "quantum_accuracy = " << row.quantum_accuracy << "\n";
    out << "classical_accuracy = " << row.classical_accuracy << "\n";
    out << "agreement = " << row.agreement << "\n";
    std::size_t disagree = 0;
    for (const auto& o : row.images) disagree += o.quantum_prediction != o.classical_prediction;
    out << "disagreements = " << disagree << "\n";
    for (const auto& o : row.images) {
      if (o.quantum_prediction == o.classical_prediction) continue;
      out << "  image " << o.index << ": classical " << o.classical_prediction << " quantum " << o.quantum_prediction
          << " scores";
      for (double v : o.classical_scores) out << " " << v;
      out << "\n";
    }
    out << "max_feature_error = " << row.max_feature_error << "\n";
    out << "mean_feature_error = " << row.mean_feature_error << "\n";
    out << "wall_clock = see timing.txt\n";
    out << "resources:\n";
    std::ostringstream budget;
    row.budget.write(budget);
    std::istringstream lines(budget.str());
    std::string line;
    while (std::getline(lines, line)) out << "  " << line << "\n";
  }
}

void ExperimentReport::write_table(std::ostream& out, const StrideResult& row) {
  out << "index,true_label,classical_prediction,quantum_prediction,max_feature_error\n";
  for (const auto& o : row.images) {
    out << o.index << "," << o.true_label << "," << o.classical_prediction << "," << o.quantum_prediction << ","
        << std::setprecision(17) << o.max_feature_error << "\n";
  }
}

void write_experiment(const ExperimentReport& report, const std::string& directory) {
  std::filesystem::create_directories(directory);
  const std::filesystem::path dir(directory);
  {
    std::ofstream out(dir / "report.txt");
    report.write(out);
  }
  std::ofstream timing(dir / "timing.txt");
  timing << std::fixed << std::setprecision(3);
  for (const auto& row : report.rows) {
    if (row.rejected) continue;
    const std::string tag = stride_tag(row.s, row.s_prime);
    std::ofstream table(dir / ("predictions_" + tag + ".csv"));
    ExperimentReport::write_table(table, row);
    std::ofstream model(dir / ("model_" + tag + ".txt"));
    row.model.write(model);
    timing << "stride " << row.s << "x" << row.s_prime << " seconds " << row.seconds << "\n";
  }
}

LossComparison compare_losses(const ExperimentConfig& config) {
  config.validate();
  const MnistData data = load_mnist(config.dataset);
  const SampleSplit split = select_samples(data, config);
  std::vector<LabeledFeatures> train, validation;
  for (const auto& t : split.train) train.push_back({t.normalized, t.class_index});
  for (const auto& t : split.test) validation.push_back({t.normalized, t.class_index});
  const Architecture arch = config.architecture(config.stride_conv, config.stride_pool);
  TrainOptions opts;
  opts.epochs = config.epochs;
  opts.learning_rate = config.learning_rate;
  opts.seed = config.seed;

  LossComparison cmp;
  cmp.cpnn = train_cpnn(train, validation, arch, opts).curve;
  cmp.ccnn = train_ccnn(train, validation, arch, opts).curve;
  cmp.cpnn_gap = std::abs(cmp.cpnn.validation.back() - cmp.cpnn.train.back());
  cmp.ccnn_gap = std::abs(cmp.ccnn.validation.back() - cmp.ccnn.train.back());
  return cmp;
}

void write_loss_comparison(const LossComparison& cmp, const ExperimentConfig& config, const std::string& directory) {
  std::filesystem::create_directories(directory);
  const std::filesystem::path dir(directory);
  auto curve = [&](const std::string& name, const LossCurve& c) {
    std::ofstream out(dir / name);
    out << "epoch,train,validation\n" << std::setprecision(17);
    for (std::size_t e = 0; e < c.train.size(); ++e) out << e + 1 << "," << c.train[e] << "," << c.validation[e] << "\n";
  };
  curve("cpnn_loss.csv", cmp.cpnn);
  curve("ccnn_loss.csv", cmp.ccnn);
  std::ofstream out(dir / "losses.txt");
  out << "# qcnn loss comparison\n[config]\n" << config.echo() << "\n" << std::fixed << std::setprecision(6);
  out << "cpnn_final_train = " << cmp.cpnn.train.back() << "\n";
  out << "cpnn_final_validation = " << cmp.cpnn.validation.back() << "\n";
  out << "cpnn_gap = " << cmp.cpnn_gap << "\n";
  out << "ccnn_final_train = " << cmp.ccnn.train.back() << "\n";
  out << "ccnn_final_validation = " << cmp.ccnn.validation.back() << "\n";
  out << "ccnn_gap = " << cmp.ccnn_gap << "\n";
  out << "cpnn_gap_not_larger = " << (cmp.cpnn_gap_not_larger() ? "yes" : "no") << "\n";
}

}  // namespace qcnn
