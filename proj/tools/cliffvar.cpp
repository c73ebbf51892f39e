// Copyright 2026 The cliffvar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cliffvar: run or validate an experiment config.
//
//   cliffvar run <config.json> --out <dir> [--threads N] [--seed S]
//   cliffvar validate <config.json>
//
// Exit codes: 0 success, 2 config error, 3 runtime error.

#include <csignal>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cliffvar/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

extern "C" void on_interrupt(int) { cliffvar::request_stop(); }

std::string describe(const cliffvar::ExperimentConfig& c) {
  std::string s = std::string(cliffvar::experiment_name(c.kind)) + ", quantity " +
                  std::string(cliffvar::target_name(c.target)) + ", n =";
  for (std::size_t n : c.n_values) s += " " + std::to_string(n);
  s += ", " + std::to_string(c.architectures) + " architecture(s), seed " + std::to_string(c.seed);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clifford-sampling estimates of variational circuit statistics"};
  app.require_subcommand(1);

  std::string run_config, out_dir;
  std::size_t threads = 1;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run an experiment and write its tables");
  run->add_option("config", run_config, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (defaults to the config's \"output\")");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Override the config's master seed");

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", validate_config, "Experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*validate) {
      const auto config = cliffvar::load_experiment_config(validate_config);
      std::cout << "ok: " << describe(config) << "\n";
      return 0;
    }
    const auto config = cliffvar::load_experiment_config(run_config);
    cliffvar::RunOptions options;
    options.out_dir = out_dir.empty() ? config.output : out_dir;
    options.threads = threads;
    options.seed = seed;
    if (options.out_dir.empty()) {
      throw cliffvar::ConfigError("no output directory: pass --out or set \"output\"");
    }
    std::signal(SIGINT, on_interrupt);
    std::signal(SIGTERM, on_interrupt);
    const auto result = cliffvar::run_experiment(config, options);
    for (const auto& f : result.files) std::cout << options.out_dir << "/" << f << "\n";
    if (result.interrupted) {
      std::cerr << "interrupted; partial results written\n";
      return kRuntimeError;
    }
    return 0;
  } catch (const cliffvar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
