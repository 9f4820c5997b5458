// Copyright 2026 The qcnn Authors.
// SPDX-License-Identifier: Apache-2.0

// qcnn: run experiments, estimate resources, train weights, compare losses, self-test.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qcnn/errors.hpp"
#include "qcnn/experiment.hpp"
#include "qcnn/resources.hpp"
#include "qcnn/selftest.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<int> stride_conv;
  std::optional<int> stride_pool;
  std::optional<std::string> backend;
  std::optional<int> qae_bits;
  std::optional<int> angle_bits;
  std::optional<std::uint64_t> shots;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> set;  // raw key=value pairs
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key = value configuration file");
  cmd->add_option("--stride-conv", o.stride_conv, "convolution stride s");
  cmd->add_option("--stride-pool", o.stride_pool, "pooling stride s'");
  cmd->add_option("--backend", o.backend, "exact or circuit")->check(CLI::IsMember({"exact", "circuit"}));
  cmd->add_option("--qae-bits", o.qae_bits, "phase register width t");
  cmd->add_option("--angle-bits", o.angle_bits, "fixed-point angle width L");
  cmd->add_option("--shots", o.shots, "0 reads exact distributions");
  cmd->add_option("--seed", o.seed, "seed for sampling, selection and training");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--set", o.set, "extra key=value overrides");
}

qcnn::ExperimentConfig resolve(const Overrides& o) {
  qcnn::ExperimentConfig c = o.config.empty() ? qcnn::ExperimentConfig{} : qcnn::ExperimentConfig::load(o.config);
  if (o.stride_conv) {
    c.stride_conv = *o.stride_conv;
    c.sweep.clear();
  }
  if (o.stride_pool) {
    c.stride_pool = *o.stride_pool;
    c.sweep.clear();
  }
  if (o.backend) c.backend = qcnn::parse_backend(*o.backend);
  if (o.qae_bits) c.qae_bits = *o.qae_bits;
  if (o.angle_bits) c.angle_bits = *o.angle_bits;
  if (o.shots) c.shots = *o.shots;
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out = *o.out;
  for (const auto& kv : o.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw qcnn::UsageError("--set expects key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcnn: flexible-stride quantum CNN simulator"};
  app.require_subcommand(1);

  Overrides run_o, train_o, loss_o;
  auto* run = app.add_subcommand("run", "end-to-end experiment (one stride pair or a sweep)");
  add_common(run, run_o);
  auto* train = app.add_subcommand("train", "train classical weights and write them to <out>/model.txt");
  add_common(train, train_o);
  auto* losses = app.add_subcommand("losses", "CPNN vs CCNN training and validation loss curves");
  add_common(losses, loss_o);

  qcnn::ResourceQuery q;
  std::string est_out;
  auto* estimate = app.add_subcommand("estimate", "qubit and memory counts");
  estimate->add_option("--M", q.M, "image side");
  estimate->add_option("--N", q.N, "filter side");
  estimate->add_option("--M-prime", q.M_prime, "convolution output side");
  estimate->add_option("--N-prime", q.N_prime, "pooling window side");
  estimate->add_option("--L", q.L, "angle bits");
  estimate->add_option("--epsilon", q.epsilon, "estimation precision");
  estimate->add_option("--stride-conv", q.s, "convolution stride");
  estimate->add_option("--stride-pool", q.s_prime, "pooling stride");
  estimate->add_option("--out", est_out, "write to this file instead of stdout");

  auto* selftest = app.add_subcommand("selftest", "quick invariant checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto config = resolve(run_o);
      const auto report = qcnn::run_experiment(config);
      qcnn::write_experiment(report, config.out);
      report.write(std::cout);
    } else if (train->parsed()) {
      const auto config = resolve(train_o);
      config.validate();
      const auto data = qcnn::load_mnist(config.dataset);
      const auto split = qcnn::select_samples(data, config);
      const auto model =
          qcnn::train_model(split.train, config.architecture(config.stride_conv, config.stride_pool), config);
      std::filesystem::create_directories(config.out);
      const auto path = std::filesystem::path(config.out) / "model.txt";
      std::ofstream out(path);
      model.write(out);
      std::cout << "wrote " << path.string() << "\n";
    } else if (losses->parsed()) {
      const auto config = resolve(loss_o);
      const auto cmp = qcnn::compare_losses(config);
      qcnn::write_loss_comparison(cmp, config, config.out);
      std::cout << "cpnn_gap " << cmp.cpnn_gap << " ccnn_gap " << cmp.ccnn_gap << " cpnn_gap_not_larger "
                << (cmp.cpnn_gap_not_larger() ? "yes" : "no") << "\n";
    } else if (estimate->parsed()) {
      const auto budget = qcnn::estimate_resources(q);
      if (est_out.empty()) {
        budget.write(std::cout);
      } else {
        std::ofstream out(est_out);
        budget.write(out);
      }
    } else if (selftest->parsed()) {
      return qcnn::run_selftest(std::cout) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "qcnn: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
