// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qcnn/errors.hpp"
#include "qcnn/experiment.hpp"
#include "qcnn/mnist.hpp"
#include "qcnn/resources.hpp"

namespace qcnn {
namespace {

const std::string kFixtures = QCNN_FIXTURE_DIR;
const std::string kData = QCNN_DATA_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string be32(std::uint32_t v) {
  return {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8), static_cast<char>(v)};
}

std::string format_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

TEST(Idx, HandBuiltFixtureRoundTrips) {
  const MnistData d =
      load_mnist(kFixtures + "/three-images-idx3-ubyte", kFixtures + "/three-labels-idx1-ubyte");
  ASSERT_EQ(d.images.size(), 3u);
  EXPECT_EQ(d.labels, (std::vector<int>{6, 9, 6}));
  const MnistImage& diag = d.images[0];
  EXPECT_EQ(diag.rows, 28);
  for (int r = 0; r < 28; ++r) {
    for (int c = 0; c < 28; ++c) {
      EXPECT_EQ(diag.pixels[r * 28 + c], r == c ? 255 : 0);
      EXPECT_EQ(d.images[1].pixels[r * 28 + c], c < 7 ? 200 : 0);
      EXPECT_EQ(d.images[2].pixels[r * 28 + c], (r / 7 + c / 7) % 2 ? 255 : 0);
    }
  }
  std::ostringstream out;
  write_idx_images(out, d.images);
  EXPECT_EQ(out.str(), slurp(kFixtures + "/three-images-idx3-ubyte"));
  std::ostringstream labels;
  write_idx_labels(labels, d.labels);
  EXPECT_EQ(labels.str(), slurp(kFixtures + "/three-labels-idx1-ubyte"));
}

TEST(Idx, BadMagicIsNamed) {
  std::istringstream in(be32(0x00000802) + be32(1) + be32(28) + be32(28));
  const std::string msg = format_error([&] { (void)read_idx_images(in); });
  EXPECT_NE(msg.find("0x00000802"), std::string::npos) << msg;
  EXPECT_NE(msg.find("bad magic"), std::string::npos) << msg;
}

TEST(Idx, TruncationAndCountMismatchAreDistinct) {
  std::istringstream header(be32(kIdxImageMagic) + be32(2));
  const std::string h = format_error([&] { (void)read_idx_images(header); });
  EXPECT_NE(h.find("truncated header"), std::string::npos) << h;

  std::istringstream payload(be32(kIdxImageMagic) + be32(2) + be32(2) + be32(2) + std::string(5, '\0'));
  const std::string p = format_error([&] { (void)read_idx_images(payload); });
  EXPECT_NE(p.find("truncated pixel data"), std::string::npos) << p;

  std::istringstream labels(be32(kIdxLabelMagic) + be32(4) + std::string(2, '\1'));
  const std::string l = format_error([&] { (void)read_idx_labels(labels); });
  EXPECT_NE(l.find("truncated label data"), std::string::npos) << l;

  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "qcnn_idx_mismatch";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "labels", std::ios::binary) << be32(kIdxLabelMagic) << be32(2) << std::string(2, '\6');
  const std::string m = format_error(
      [&] { (void)load_mnist(kFixtures + "/three-images-idx3-ubyte", (dir / "labels").string()); });
  EXPECT_NE(m.find("count mismatch"), std::string::npos) << m;
  EXPECT_NE(format_error([&] { (void)load_mnist((dir / "missing").string(), (dir / "labels").string()); }), "");
}

TEST(Config, ParseEchoAndErrors) {
  std::istringstream in("# comment\nsamples = 16\ndigits = 3,6\nbackend = circuit\nsweep = 1x1, 2x1\n");
  const ExperimentConfig c = ExperimentConfig::parse(in);
  EXPECT_EQ(c.samples, 16);
  EXPECT_EQ(c.digits, (std::vector<int>{3, 6}));
  EXPECT_EQ(c.backend, Backend::kCircuit);
  EXPECT_EQ(c.stride_pairs(), (std::vector<std::pair<int, int>>{{1, 1}, {2, 1}}));
  std::istringstream again(c.echo());
  EXPECT_EQ(ExperimentConfig::parse(again).echo(), c.echo());

  ExperimentConfig d;
  EXPECT_THROW(d.set("colour", "red"), UsageError);
  EXPECT_THROW(d.set("samples", "many"), UsageError);
  EXPECT_THROW(d.set("sweep", "12"), UsageError);
  std::istringstream bad("samples 3\n");
  EXPECT_THROW((void)ExperimentConfig::parse(bad), FormatError);
}

TEST(Config, ValidationRunsBeforeAnySimulation) {
  ExperimentConfig c;
  c.dataset = kData + "/mnist-desk";
  c.samples = 0;
  try {
    (void)run_experiment(c);
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("samples must be at least 1"), std::string::npos);
  }
  c.samples = 4;
  c.dataset = kData + "/nowhere";
  EXPECT_THROW(c.validate(), UsageError);
  c.dataset = kData + "/mnist-desk";
  c.digits = {6, 6};
  EXPECT_THROW(c.validate(), UsageError);
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.dataset = kData + "/mnist-desk";
  c.samples = 12;
  c.train_samples = 60;
  c.epochs = 5;
  return c;
}

TEST(Samples, SplitIsDisjointDeterministicAndFiltered) {
  const ExperimentConfig c = small_config();
  const MnistData data = load_mnist(c.dataset);
  const SampleSplit a = select_samples(data, c);
  const SampleSplit b = select_samples(data, c);
  ASSERT_EQ(a.test.size(), 12u);
  ASSERT_EQ(a.train.size(), 60u);
  std::set<std::size_t> seen;
  for (const auto& img : a.test) seen.insert(img.source_index);
  for (const auto& img : a.train) EXPECT_FALSE(seen.count(img.source_index));
  for (std::size_t i = 0; i < a.test.size(); ++i) {
    EXPECT_EQ(a.test[i].source_index, b.test[i].source_index);
    EXPECT_TRUE(a.test[i].label == 6 || a.test[i].label == 9);
    EXPECT_NEAR(a.test[i].normalized.frobenius_norm(), 1.0, 1e-12);
  }
  ExperimentConfig other = c;
  other.seed = c.seed + 1;
  const SampleSplit o = select_samples(data, other);
  bool differs = false;
  for (std::size_t i = 0; i < o.test.size(); ++i) differs |= o.test[i].source_index != a.test[i].source_index;
  EXPECT_TRUE(differs);
}

int clog2(std::int64_t x) {
  int k = 0;
  while ((std::int64_t{1} << k) < x) ++k;
  return k;
}

TEST(Resources, FormulasHoldOnAGrid) {
  for (int M : {2, 4, 5, 8, 16}) {
    for (int N : {1, 2, 3}) {
      if (N > M) continue;
      for (int L : {1, 2, 8}) {
        for (double eps : {0.5, 0.25, 0.01}) {
          ResourceQuery q;
          q.M = M;
          q.N = N;
          q.M_prime = M - N + 1;
          q.N_prime = 1;
          q.L = L;
          q.epsilon = eps;
          const ResourceBudget b = estimate_resources(q);
          const int lM = clog2(M), lN = clog2(N), lMp = clog2(q.M_prime);
          const int le = static_cast<int>(std::ceil(std::log2(1.0 / eps) - 1e-12));
          EXPECT_EQ(b.storage_qubits, M * M * (2 * lM * lM + L) + N * N * (2 * lN * lN + L));
          EXPECT_EQ(b.working_qubits, 4 * lM + 4 * lMp + 6 + 2 * le);
          EXPECT_GE(b.reusable_qubits, 0);
          const ComparisonRow& cls = b.comparison.back();
          EXPECT_EQ(cls.storage, (M * M + N * N) * L + (q.M_prime * q.M_prime + 1) * L);
          EXPECT_EQ(cls.working, M * M * N * N + q.M_prime * q.M_prime);
        }
      }
    }
  }
}

TEST(Resources, SpotValues) {
  const ResourceBudget b = estimate_resources(ResourceQuery{});
  EXPECT_EQ(b.storage_qubits, 176);
  EXPECT_EQ(b.working_qubits, 22);
  EXPECT_EQ(b.comparison.back().storage, 56);
  EXPECT_EQ(b.comparison.back().working, 80);
  ResourceQuery bad;
  bad.epsilon = 1.5;
  EXPECT_THROW((void)estimate_resources(bad), DomainError);
}

TEST(Experiment, ReportsAreByteIdenticalAcrossRuns) {
  const ExperimentConfig c = small_config();
  const auto dir = std::filesystem::temp_directory_path();
  const ExperimentReport a = run_experiment(c);
  const ExperimentReport b = run_experiment(c);
  write_experiment(a, (dir / "qcnn_rep_a").string());
  write_experiment(b, (dir / "qcnn_rep_b").string());
  EXPECT_EQ(slurp((dir / "qcnn_rep_a/report.txt").string()), slurp((dir / "qcnn_rep_b/report.txt").string()));
  EXPECT_EQ(slurp((dir / "qcnn_rep_a/predictions_2_1.csv").string()),
            slurp((dir / "qcnn_rep_b/predictions_2_1.csv").string()));
  const std::string table = slurp((dir / "qcnn_rep_a/predictions_2_1.csv").string());
  EXPECT_EQ(table.rfind("index,true_label,classical_prediction,quantum_prediction,max_feature_error\n", 0), 0u);
  ASSERT_EQ(a.rows.size(), 1u);
  EXPECT_EQ(a.rows[0].images.size(), 12u);
  EXPECT_GE(a.rows[0].agreement, 11.0 / 12.0);
}

TEST(Experiment, SweepRejectsInvalidStrideRow) {
  ExperimentConfig c = small_config();
  c.samples = 4;
  c.sweep = {{1, 1}, {1, 2}};
  const ExperimentReport r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_FALSE(r.rows[0].rejected);
  EXPECT_TRUE(r.rows[1].rejected);
  EXPECT_NE(r.rows[1].reason.find("not divisible"), std::string::npos) << r.rows[1].reason;
}

TEST(Experiment, QuantumPipelineMatchesClassicalFeatures) {
  const ExperimentConfig c = small_config();
  const SampleSplit split = select_samples(load_mnist(c.dataset), c);
  const Architecture arch = c.architecture(2, 1);
  const RefModel model = train_model(split.train, arch, c);
  PipelineOptions opts;
  for (std::size_t i = 0; i < 4; ++i) {
    Matrix features;
    const auto prob = quantum_pipeline(split.test[i].normalized, model, opts, &features);
    const Matrix ref = reference_features(split.test[i].normalized, model.kernel, arch);
    ASSERT_EQ(prob.size(), 2u);
    for (std::size_t k = 0; k < features.data.size(); ++k) EXPECT_NEAR(features.data[k], ref.data[k], 1e-2);
  }
}

TEST(Losses, OneEpochGivesOneRowAndSeedsRepeat) {
  ExperimentConfig c = small_config();
  c.epochs = 1;
  const LossComparison a = compare_losses(c);
  const LossComparison b = compare_losses(c);
  EXPECT_EQ(a.cpnn.train.size(), 1u);
  EXPECT_EQ(a.ccnn.validation.size(), 1u);
  EXPECT_EQ(a.cpnn.train, b.cpnn.train);
  EXPECT_EQ(a.ccnn.validation, b.ccnn.validation);
  const auto dir = std::filesystem::temp_directory_path() / "qcnn_losses";
  write_loss_comparison(a, c, dir.string());
  const std::string csv = slurp((dir / "cpnn_loss.csv").string());
  EXPECT_EQ(csv.rfind("epoch,train,validation\n", 0), 0u);
}

}  // namespace
}  // namespace qcnn
