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

#include "cliffvar/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cliffvar/dense.hpp"
#include "gtest/gtest.h"

using namespace cliffvar;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Table = std::vector<std::vector<std::string>>;

Table read_csv(const fs::path& path) {
  Table t;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    t.push_back(cells);
  }
  return t;
}

std::size_t column(const Table& t, const std::string& name) {
  const auto& h = t.at(0);
  const auto it = std::find(h.begin(), h.end(), name);
  if (it == h.end()) throw std::runtime_error("no column " + name);
  return static_cast<std::size_t>(it - h.begin());
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cliffvar_exp_" + name);
  fs::remove_all(p);
  return p;
}

json base_variance_config() {
  return json::parse(R"({
    "experiment": "variance_vs_n", "seed": 11,
    "template": {"layers": 1, "entangler": "brick", "axis": "random"},
    "n": [2, 3], "observable": {"type": "zero_projector"},
    "quantity": "squared_gradient", "samples": 200, "architectures": 3, "dense_draws": 50
  })");
}

RunSummary run_json(const json& j, const fs::path& out) {
  RunOptions o;
  o.out_dir = out.string();
  return run_experiment(parse_experiment_config(j), o);
}

}  // namespace

TEST(experiment_config, accepts_a_paper_style_config) {
  const auto c = parse_experiment_config(base_variance_config());
  EXPECT_EQ(c.kind, ExperimentKind::VarianceVsN);
  EXPECT_EQ(c.n_values, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(c.samples, 200U);
  EXPECT_EQ(c.target, Target::SquaredGradient);
}

TEST(experiment_config, rejects_invalid_configs) {
  auto expect_reject = [](const std::function<void(json&)>& edit) {
    json j = base_variance_config();
    edit(j);
    EXPECT_THROW(parse_experiment_config(j), ConfigError) << j.dump();
  };
  expect_reject([](json& j) { j["samples"] = 0; });
  expect_reject([](json& j) { j.erase("seed"); });
  expect_reject([](json& j) { j["seed"] = -4; });
  expect_reject([](json& j) { j["architectures"] = 0; });
  expect_reject([](json& j) { j["n"] = json::array(); });
  expect_reject([](json& j) { j["n"] = {0, 2}; });
  expect_reject([](json& j) { j["colour"] = "red"; });
  expect_reject([](json& j) { j["experiment"] = "everything"; });
  expect_reject([](json& j) { j["quantity"] = "hessian"; });
  expect_reject([](json& j) { j["template"]["entangler"] = "star"; });
  expect_reject([](json& j) { j["template"]["axis"] = "W"; });
  expect_reject([](json& j) { j["observable"] = {{"type", "pauli_sum"}, {"terms", {{{"pauli", "XX"}}}}}; });
  expect_reject([](json& j) { j.erase("samples"); });
  expect_reject([](json& j) {
    j.erase("samples");
    j["epsilon"] = 0.1;
  });
  expect_reject([](json& j) {
    j["epsilon"] = 0.1;
    j["delta"] = 0.1;
  });
  expect_reject([](json& j) {
    j["distribution"] = {{"dist", "tabulated"}, {"r", {0.5, 0.1}}, {"s", {0.0, 0.0}}};
  });
}

TEST(experiment_config, bias_studies_need_a_truth_within_reach) {
  json j = json::parse(R"({"experiment": "bias_vs_K", "seed": 1, "n": 5, "K": [10, 20]})");
  EXPECT_NO_THROW(parse_experiment_config(j));
  j["n"] = 20;
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
  j["truth"] = {{"method", "enumerate"}};
  EXPECT_NO_THROW(parse_experiment_config(j));
  j["n"] = 5;
  j["quantity"] = "gradient_variance";
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
  j["quantity"] = "squared_gradient";
  j["K"] = {10, 0};
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
  j["K"] = {10};
  j["bootstrap"] = 1;
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
}

TEST(generate_architecture, brick_layers_alternate) {
  TemplateSpec t;
  t.layers = 3;
  t.axis = PauliAxis::Y;
  std::mt19937_64 rng(1);
  const auto a = generate_architecture(t, 5, AngleDistribution::uniform(),
                                       json{{"type", "zero_projector"}}, rng);
  const auto& c = a.circuit;
  EXPECT_EQ(c.num_params(), 15U);
  EXPECT_TRUE(c.layers()[0].fixed.empty());
  ASSERT_EQ(c.layers()[1].fixed.size(), 2U);  // (0,1) (2,3)
  EXPECT_EQ(*c.layers()[1].fixed[1].control, 2U);
  ASSERT_EQ(c.layers()[2].fixed.size(), 2U);  // (1,2) (3,4)
  EXPECT_EQ(*c.layers()[2].fixed[0].control, 1U);
  EXPECT_EQ(c.tail().size(), 2U);
  EXPECT_EQ(*c.tail()[0].control, 0U);
  for (const auto& l : c.layers()) {
    for (const auto& r : l.rotations) EXPECT_EQ(r.axis, PauliAxis::Y);
  }
}

TEST(generate_architecture, thinning_keeps_distinct_sorted_qubits) {
  TemplateSpec t;
  t.layers = 40;
  t.thin_layers = true;
  std::mt19937_64 rng(5);
  const auto a = generate_architecture(t, 6, AngleDistribution::uniform(),
                                       json{{"type", "random_pauli_sum"}, {"terms", 10}}, rng);
  std::set<std::size_t> sizes;
  for (const auto& l : a.circuit.layers()) {
    sizes.insert(l.rotations.size());
    for (std::size_t i = 1; i < l.rotations.size(); ++i) {
      EXPECT_LT(l.rotations[i - 1].qubit, l.rotations[i].qubit);
    }
  }
  EXPECT_TRUE(sizes.count(0) || sizes.count(6));  // both ends are reachable
  EXPECT_GT(sizes.size(), 3U);
  EXPECT_LE(*sizes.rbegin(), 6U);
  EXPECT_EQ(std::get<PauliSum>(a.observable.kind()).terms.size(), 10U);
}

TEST(generate_architecture, zero_layers_have_no_parameters) {
  TemplateSpec t;
  t.layers = 0;
  std::mt19937_64 rng(2);
  const auto a = generate_architecture(t, 3, AngleDistribution::uniform(),
                                       json{{"type", "zero_projector"}}, rng);
  EXPECT_EQ(a.circuit.num_params(), 0U);
  EXPECT_TRUE(a.circuit.tail().empty());
}

// One rotation layer followed by CZs, measured by the global zero projector:
// the CZs are diagonal, so C factorises into prod_q cos^2(theta_q / 2) over
// the X and Y sites. Under uniform angles E[cos^4] = 3/8 and
// E[(d cos^2(t/2))^2] = E[sin^2 t] / 4 = 1/8.
TEST(generate_architecture, single_layer_matches_closed_form) {
  TemplateSpec t;
  for (std::uint64_t s = 0; s < 12; ++s) {
    std::mt19937_64 rng(s);
    const auto a = generate_architecture(t, 5, AngleDistribution::uniform(),
                                         json{{"type", "zero_projector"}}, rng);
    const auto& rot = a.circuit.layers()[0].rotations;
    double expected = rot[0].axis == PauliAxis::Z ? 0.0 : 0.125;
    for (std::size_t i = 1; i < rot.size(); ++i) {
      if (rot[i].axis != PauliAxis::Z) expected *= 0.375;
    }
    const double q = quadrature_average(a.circuit, a.observable,
                                        Quantity{QuantityKind::GradientSquared, 0});
    EXPECT_NEAR(q, expected, 1e-12) << "seed " << s;
  }
}

TEST(fit_line, recovers_an_exact_line) {
  const std::vector<double> x{1, 2, 4, 7};
  std::vector<double> y;
  for (double v : x) y.push_back(2 - 3 * v);
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, -3, 1e-12);
  EXPECT_NEAR(f.intercept, 2, 1e-12);
  EXPECT_NEAR(f.r_squared, 1, 1e-12);
}

TEST(format_double, round_trips) {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(architecture_seed, distinguishes_n_and_index) {
  std::set<std::uint64_t> seen;
  for (std::size_t n = 1; n < 20; ++n) {
    for (std::size_t a = 0; a < 20; ++a) seen.insert(architecture_seed(7, n, a));
  }
  EXPECT_EQ(seen.size(), 19U * 20U);
  EXPECT_NE(architecture_seed(7, 3, 0), architecture_seed(8, 3, 0));
}

TEST(variance_vs_n, rerun_is_bit_exact_apart_from_wall_time) {
  const auto strip = [](Table t) {
    for (auto& row : t) row.pop_back();
    return t;
  };
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b"), c = scratch("rerun_c");
  run_json(base_variance_config(), a);
  run_json(base_variance_config(), b);
  const Table ta = read_csv(a / "results.csv");
  EXPECT_EQ(ta.size(), 7U);
  EXPECT_EQ(ta[0].back(), "wall_time");
  EXPECT_EQ(strip(ta), strip(read_csv(b / "results.csv")));

  RunOptions o;
  o.out_dir = c.string();
  o.seed = 12;
  run_experiment(parse_experiment_config(base_variance_config()), o);
  EXPECT_NE(strip(ta), strip(read_csv(c / "results.csv")));
  EXPECT_EQ(json::parse(std::ifstream(c / "config.json")).at("seed"), 12);
}

TEST(variance_vs_n, rows_agree_with_dense_monte_carlo) {
  json j = base_variance_config();
  j["samples"] = 4000;
  j["dense_draws"] = 4000;
  j["n"] = {3};
  j["architectures"] = 4;
  const fs::path out = scratch("dense");
  run_json(j, out);
  const Table t = read_csv(out / "results.csv");
  const auto e = column(t, "estimate"), s = column(t, "stderr");
  const auto d = column(t, "dense_mean"), ds = column(t, "dense_stderr");
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double comb = std::hypot(std::stod(t[i][s]), std::stod(t[i][ds]));
    EXPECT_LE(std::abs(std::stod(t[i][e]) - std::stod(t[i][d])), 3 * comb + 1e-12) << i;
  }
  const json summary = json::parse(std::ifstream(out / "summary.json"));
  EXPECT_EQ(summary.at("per_n").size(), 1U);
}

TEST(variance_vs_n, thinned_away_parameter_reports_zero) {
  json j = base_variance_config();
  j["template"] = {{"layers", 1}, {"thinning", "uniform"}};
  j["architectures"] = 12;
  j["n"] = {2};
  const fs::path out = scratch("thin");
  run_json(j, out);
  const Table t = read_csv(out / "results.csv");
  std::size_t absent = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i][column(t, "num_params")] == "0") {
      ++absent;
      EXPECT_EQ(t[i][column(t, "estimate")], "0");
    }
  }
  EXPECT_GT(absent, 0U);
}

TEST(bias_vs_K, smoke_run_is_well_formed) {
  const json j = json::parse(R"({
    "experiment": "bias_vs_K", "seed": 3, "n": 3, "K": [10, 40],
    "bootstrap": 5, "pool": 50, "architectures": 1, "template": {"axis": "X"}
  })");
  const fs::path out = scratch("bias");
  run_json(j, out);
  const Table t = read_csv(out / "results.csv");
  ASSERT_EQ(t.size(), 3U);
  EXPECT_EQ(t[0], (std::vector<std::string>{"K", "squared_bias", "estimator_variance",
                                            "percentile_20", "percentile_80", "architectures",
                                            "bootstrap", "gamma_total", "seed"}));
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_EQ(t[i].size(), t[0].size());
    EXPECT_GE(std::stod(t[i][1]), 0.0);
    EXPECT_GT(std::stod(t[i][2]), 0.0);
  }
  // Axis X everywhere: truth = (1/8)(3/8)^2.
  const Table per = read_csv(out / "per_architecture.csv");
  EXPECT_NEAR(std::stod(per[1][column(per, "truth")]), 0.125 * 0.375 * 0.375, 1e-12);
  const json s = json::parse(std::ifstream(out / "summary.json"));
  EXPECT_TRUE(s.contains("squared_bias_fit"));
}

TEST(architecture_scan, downscaled_scan_matches_dense_oracle) {
  const json j = json::parse(R"({
    "experiment": "architecture_scan", "seed": 44, "n": 4,
    "template": {"layers": 3, "thinning": "uniform"},
    "observable": {"type": "random_pauli_sum", "terms": 10},
    "samples": 8000, "architectures": 2, "dense_draws": 8000
  })");
  const fs::path out = scratch("scan");
  run_json(j, out);
  const Table v = read_csv(out / "variances.csv");
  ASSERT_GT(v.size(), 2U);
  const auto e = column(v, "estimate"), s = column(v, "stderr");
  const auto d = column(v, "dense_mean"), ds = column(v, "dense_stderr");
  std::size_t within = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double comb = std::hypot(std::stod(v[i][s]), std::stod(v[i][ds]));
    if (std::abs(std::stod(v[i][e]) - std::stod(v[i][d])) <= 3 * comb + 1e-12) ++within;
    if (i > 1 && v[i][column(v, "arch")] == v[i - 1][column(v, "arch")]) {
      EXPECT_GE(std::stod(v[i - 1][e]), std::stod(v[i][e]));  // sorted per architecture
    }
  }
  // Independent 3-sigma checks: allow a single excursion.
  EXPECT_GE(within + 1, v.size() - 1);
  const Table a = read_csv(out / "architectures.csv");
  EXPECT_EQ(a.size(), 3U);
}

TEST(architecture_scan, zero_layer_circuits_have_zero_variance) {
  const json j = json::parse(R"({
    "experiment": "architecture_scan", "seed": 1, "n": 3, "template": {"layers": 0},
    "observable": {"type": "random_pauli_sum", "terms": 4}, "samples": 10, "architectures": 2
  })");
  const fs::path out = scratch("zero");
  run_json(j, out);
  const Table a = read_csv(out / "architectures.csv");
  for (std::size_t i = 1; i < a.size(); ++i) {
    EXPECT_EQ(a[i][column(a, "num_params")], "0");
    EXPECT_EQ(a[i][column(a, "mean_variance")], "0");
  }
  EXPECT_EQ(read_csv(out / "variances.csv").size(), 1U);
}

TEST(single_estimate, writes_estimate_and_mixtures) {
  const json j = json::parse(R"({
    "experiment": "single_estimate", "seed": 5, "quantity": "gradient_variance", "param": 0,
    "epsilon": 0.2, "delta": 0.1, "dense_draws": 2000,
    "problem": {
      "n": 2,
      "layers": [{"rotations": [{"qubit": 0, "axis": "Y", "dist": {"dist": "gaussian", "mean": 0.4, "var": 0.5}},
                                {"qubit": 1, "axis": "X", "dist": {"dist": "uniform"}}]}],
      "final": [{"kind": "CNOT", "q": [0, 1]}],
      "observable": {"type": "pauli_sum", "terms": [{"coeff": 1, "pauli": "ZZ"}]}
    }
  })");
  const fs::path out = scratch("single");
  run_json(j, out);
  const Table t = read_csv(out / "estimate.csv");
  ASSERT_EQ(t.size(), 2U);
  const auto k = std::stoul(t[1][column(t, "K")]);
  EXPECT_GT(k, 100U);
  const json s = json::parse(std::ifstream(out / "summary.json"));
  EXPECT_EQ(s.at("mixtures").at("one_fold").size(), 2U);
  EXPECT_EQ(s.at("mixtures").at("two_fold").size(), 2U);
}

TEST(run_experiment, stop_request_leaves_partial_tables) {
  const fs::path out = scratch("stop");
  request_stop();
  const RunSummary r = run_json(base_variance_config(), out);
  clear_stop();
  EXPECT_TRUE(r.interrupted);
  EXPECT_EQ(read_csv(out / "results.csv").size(), 1U);
  EXPECT_TRUE(json::parse(std::ifstream(out / "summary.json")).at("interrupted").get<bool>());
}
