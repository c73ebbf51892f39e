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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

#include "cliffvar/dense.hpp"

namespace cliffvar {

using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

std::mt19937_64 tagged_rng(std::uint64_t seed, std::uint64_t key, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32), tag};
  return std::mt19937_64(seq);
}

constexpr std::uint32_t kDenseTag = 0xD;
constexpr std::uint32_t kTruthTag = 0x7;
constexpr std::uint32_t kPoolTag = 0xB;

// ---------------------------------------------------------------- config

const std::set<std::string> kKnownKeys = {
    "experiment", "description", "seed",        "template",      "n",       "distribution",
    "observable", "quantity",    "param",       "samples",       "epsilon", "delta",
    "architectures", "dense_draws", "K",        "bootstrap",     "pool",    "truth",
    "problem",    "output"};

template <typename T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("\"") + key + "\" has the wrong type");
  }
}

std::size_t count_field(const json& j, const char* key, std::size_t fallback, std::size_t min) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < static_cast<std::int64_t>(min)) {
    throw ConfigError(std::string("\"") + key + "\" must be an integer >= " + std::to_string(min));
  }
  return v.get<std::size_t>();
}

std::vector<std::size_t> count_list(const json& j, const char* key, std::size_t min) {
  const auto& v = j.at(key);
  std::vector<std::size_t> out;
  auto push = [&](const json& e) {
    if (!e.is_number_integer() || e.get<std::int64_t>() < static_cast<std::int64_t>(min)) {
      throw ConfigError(std::string("entries of \"") + key + "\" must be integers >= " +
                        std::to_string(min));
    }
    out.push_back(e.get<std::size_t>());
  };
  if (v.is_array()) {
    for (const auto& e : v) push(e);
  } else {
    push(v);
  }
  if (out.empty()) throw ConfigError(std::string("\"") + key + "\" must not be empty");
  return out;
}

ExperimentKind parse_kind(const std::string& s) {
  if (s == "variance_vs_n") return ExperimentKind::VarianceVsN;
  if (s == "bias_vs_K") return ExperimentKind::BiasVsK;
  if (s == "var_vs_K") return ExperimentKind::VarVsK;
  if (s == "architecture_scan") return ExperimentKind::ArchitectureScan;
  if (s == "single_estimate") return ExperimentKind::SingleEstimate;
  throw ConfigError("unknown experiment \"" + s + "\"");
}

Target parse_target(const std::string& s) {
  if (s == "cost") return Target::Cost;
  if (s == "gradient") return Target::Gradient;
  if (s == "cost_squared") return Target::CostSquared;
  if (s == "squared_gradient") return Target::SquaredGradient;
  if (s == "gradient_variance") return Target::GradientVariance;
  throw ConfigError("unknown quantity \"" + s + "\"");
}

TemplateSpec parse_template(const json& j) {
  if (!j.is_object()) throw ConfigError("\"template\" must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "layers" && key != "entangler" && key != "axis" && key != "thinning") {
      throw ConfigError("unknown template field \"" + key + "\"");
    }
  }
  TemplateSpec t;
  t.layers = count_field(j, "layers", 1, 0);
  const auto ent = field<std::string>(j, "entangler", "brick");
  if (ent == "brick") {
    t.entangler = Entangler::Brick;
  } else if (ent == "ladder") {
    t.entangler = Entangler::Ladder;
  } else if (ent == "none") {
    t.entangler = Entangler::None;
  } else {
    throw ConfigError("unknown entangler \"" + ent + "\"");
  }
  const auto axis = field<std::string>(j, "axis", "random");
  if (axis != "random") {
    try {
      t.axis = parse_axis(axis);
    } catch (const std::invalid_argument&) {
      throw ConfigError("template axis must be random, X, Y or Z");
    }
  }
  const auto thin = field<std::string>(j, "thinning", "none");
  if (thin == "uniform") {
    t.thin_layers = true;
  } else if (thin != "none") {
    throw ConfigError("unknown thinning \"" + thin + "\"");
  }
  return t;
}

void check_observable_spec(const json& j, const std::vector<std::size_t>& ns) {
  if (!j.is_object()) throw ConfigError("\"observable\" must be an object");
  const auto type = field<std::string>(j, "type", "");
  if (type == "random_pauli_sum") {
    count_field(j, "terms", 10, 1);
    field<double>(j, "coeff", 1.0);
    const std::size_t weight = count_field(j, "weight", 0, 1);
    for (std::size_t n : ns) {
      if (weight > n) throw ConfigError("random_pauli_sum weight exceeds n");
    }
    return;
  }
  if (type == "zero_projector" && j.contains("support_size")) {
    const std::size_t k = count_field(j, "support_size", 1, 1);
    for (std::size_t n : ns) {
      if (k > n) throw ConfigError("support_size exceeds n");
    }
    return;
  }
  // Explicit forms must make sense at every n.
  for (std::size_t n : ns) observable_from_json(j, n);
}

}  // namespace

std::string_view experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::VarianceVsN: return "variance_vs_n";
    case ExperimentKind::BiasVsK: return "bias_vs_K";
    case ExperimentKind::VarVsK: return "var_vs_K";
    case ExperimentKind::ArchitectureScan: return "architecture_scan";
    case ExperimentKind::SingleEstimate: return "single_estimate";
  }
  return "?";
}

std::string_view target_name(Target target) {
  switch (target) {
    case Target::Cost: return "cost";
    case Target::Gradient: return "gradient";
    case Target::CostSquared: return "cost_squared";
    case Target::SquaredGradient: return "squared_gradient";
    case Target::GradientVariance: return "gradient_variance";
  }
  return "?";
}

ExperimentConfig parse_experiment_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config field \"" + key + "\"");
  }
  ExperimentConfig c;
  c.source = j;
  if (!j.contains("experiment")) throw ConfigError("config is missing \"experiment\"");
  c.kind = parse_kind(field<std::string>(j, "experiment", ""));
  if (!j.contains("seed") || !j.at("seed").is_number_integer() ||
      (!j.at("seed").is_number_unsigned() && j.at("seed").get<std::int64_t>() < 0)) {
    throw ConfigError("config needs a nonnegative integer \"seed\"");
  }
  c.seed = j.at("seed").get<std::uint64_t>();
  c.output = field<std::string>(j, "output", "");

  const bool single = c.kind == ExperimentKind::SingleEstimate;
  const bool bias = c.kind == ExperimentKind::BiasVsK || c.kind == ExperimentKind::VarVsK;

  if (j.contains("template")) c.templ = parse_template(j.at("template"));
  if (j.contains("distribution")) c.distribution = distribution_from_json(j.at("distribution"));

  if (single) {
    if (!j.contains("problem")) throw ConfigError("single_estimate needs \"problem\"");
    c.problem = problem_from_json(j.at("problem"));
    c.n_values = {c.problem->circuit.num_qubits()};
    if (!j.contains("quantity")) throw ConfigError("single_estimate needs \"quantity\"");
  } else {
    if (!j.contains("n")) throw ConfigError("config is missing \"n\"");
    c.n_values = count_list(j, "n", 1);
    if (j.contains("observable")) c.observable = j.at("observable");
    check_observable_spec(c.observable, c.n_values);
  }

  const Target fallback =
      c.kind == ExperimentKind::ArchitectureScan ? Target::GradientVariance : Target::SquaredGradient;
  c.target = j.contains("quantity") ? parse_target(field<std::string>(j, "quantity", "")) : fallback;
  const std::int64_t param = field<std::int64_t>(j, "param", 0);
  if (param < 0) throw ConfigError("\"param\" must be nonnegative");
  c.param = static_cast<std::uint32_t>(param);
  if (single && c.target != Target::Cost && c.target != Target::CostSquared &&
      c.param >= c.problem->circuit.num_params()) {
    throw ConfigError("\"param\" exceeds the circuit's parameter count");
  }

  if (j.contains("samples")) {
    c.samples = count_field(j, "samples", 0, 1);
    if (j.contains("epsilon") || j.contains("delta")) {
      throw ConfigError("give either \"samples\" or (\"epsilon\", \"delta\"), not both");
    }
  } else if (!bias) {
    if (!j.contains("epsilon") || !j.contains("delta")) {
      throw ConfigError("config needs \"samples\" or both \"epsilon\" and \"delta\"");
    }
    c.epsilon = field<double>(j, "epsilon", 0.0);
    c.delta = field<double>(j, "delta", 0.0);
    if (!(*c.epsilon > 0.0) || !(*c.delta > 0.0 && *c.delta < 1.0)) {
      throw ConfigError("need epsilon > 0 and 0 < delta < 1");
    }
  }

  c.architectures = count_field(j, "architectures", 1, 1);
  c.dense_draws = count_field(j, "dense_draws", 0, 0);
  if (c.dense_draws > 0 && std::holds_alternative<TabulatedLaw>(c.distribution.law())) {
    throw ConfigError("dense Monte Carlo cannot sample a tabulated distribution");
  }

  if (bias) {
    if (!j.contains("K")) throw ConfigError(std::string(experiment_name(c.kind)) + " needs \"K\"");
    c.k_values = count_list(j, "K", 1);
    c.bootstrap = count_field(j, "bootstrap", 100, 2);
    c.pool = count_field(j, "pool", 0, 0);
    if (c.n_values.size() != 1) throw ConfigError("bias/variance studies take a single n");
    if (c.target == Target::GradientVariance) {
      throw ConfigError("bias/variance studies need a directly sampled quantity");
    }
    if (j.contains("truth")) {
      const auto& t = j.at("truth");
      const auto method = field<std::string>(t, "method", "quadrature");
      if (method == "quadrature") {
        c.truth = TruthMethod::Quadrature;
      } else if (method == "dense_mc") {
        c.truth = TruthMethod::DenseMonteCarlo;
      } else if (method == "enumerate") {
        c.truth = TruthMethod::Enumerate;
      } else {
        throw ConfigError("unknown truth method \"" + method + "\"");
      }
      c.truth_draws = count_field(t, "draws", 4000, 1);
    }
    if (c.truth != TruthMethod::Enumerate && c.n_values.front() > kDenseQubitCap) {
      throw ConfigError("n = " + std::to_string(c.n_values.front()) +
                        " exceeds the dense oracle cap of " + std::to_string(kDenseQubitCap));
    }
    if (c.truth == TruthMethod::DenseMonteCarlo &&
        std::holds_alternative<TabulatedLaw>(c.distribution.law())) {
      throw ConfigError("dense Monte Carlo cannot sample a tabulated distribution");
    }
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_json_file(path));
}

void request_stop() { g_stop.store(true); }
bool stop_requested() { return g_stop.load(); }
void clear_stop() { g_stop.store(false); }

std::uint64_t architecture_seed(std::uint64_t master, std::size_t n, std::size_t index) {
  return mix(mix(master, n), index);
}

// ---------------------------------------------------------------- templates

namespace {

std::vector<CliffordGate> entangler_gates(Entangler e, std::size_t n, std::size_t layer) {
  std::vector<CliffordGate> out;
  const auto cz = [&](std::size_t a) {
    out.push_back(CliffordGate::pair(GateKind::CZ, static_cast<std::uint32_t>(a),
                                     static_cast<std::uint32_t>(a + 1)));
  };
  switch (e) {
    case Entangler::Brick:
      for (std::size_t a = layer % 2; a + 1 < n; a += 2) cz(a);
      break;
    case Entangler::Ladder:
      for (std::size_t a = 0; a + 1 < n; ++a) cz(a);
      break;
    case Entangler::None:
      break;
  }
  return out;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t count) {
  return std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
}

PauliString random_pauli(std::size_t n, std::size_t weight, std::mt19937_64& rng) {
  PauliString p(n);
  if (weight == 0) {
    // Uniform over non-identity strings.
    do {
      for (std::size_t q = 0; q < n; ++q) p.set(q, static_cast<PauliOp>(uniform_index(rng, 4)));
    } while (p.support().empty());
    return p;
  }
  std::vector<std::size_t> qubits(n);
  std::iota(qubits.begin(), qubits.end(), 0);
  for (std::size_t i = 0; i < weight; ++i) std::swap(qubits[i], qubits[i + uniform_index(rng, n - i)]);
  for (std::size_t i = 0; i < weight; ++i) {
    p.set(qubits[i], static_cast<PauliOp>(1 + uniform_index(rng, 3)));
  }
  return p;
}

Observable build_observable(const json& spec, std::size_t n, std::mt19937_64& rng) {
  const auto type = field<std::string>(spec, "type", "");
  if (type == "random_pauli_sum") {
    const std::size_t terms = count_field(spec, "terms", 10, 1);
    const double coeff = field<double>(spec, "coeff", 1.0);
    const std::size_t weight = count_field(spec, "weight", 0, 1);
    std::vector<PauliTerm> out;
    for (std::size_t t = 0; t < terms; ++t) out.push_back({coeff, random_pauli(n, weight, rng)});
    return Observable::pauli_sum(n, std::move(out));
  }
  if (type == "zero_projector" && spec.contains("support_size")) {
    std::vector<std::uint32_t> support(count_field(spec, "support_size", 1, 1));
    std::iota(support.begin(), support.end(), 0U);
    return Observable::zero_projector(n, std::move(support));
  }
  return observable_from_json(spec, n);
}

}  // namespace

Architecture generate_architecture(const TemplateSpec& templ, std::size_t n,
                                   const AngleDistribution& dist, const json& observable,
                                   std::mt19937_64& rng) {
  std::vector<Layer> layers(templ.layers);
  std::uint32_t param = 0;
  std::vector<std::size_t> qubits(n);
  for (std::size_t l = 0; l < templ.layers; ++l) {
    if (l > 0) layers[l].fixed = entangler_gates(templ.entangler, n, l - 1);
    std::iota(qubits.begin(), qubits.end(), 0);
    std::size_t m = n;
    if (templ.thin_layers) {
      m = std::uniform_int_distribution<std::size_t>(0, n)(rng);
      for (std::size_t i = 0; i < m; ++i) std::swap(qubits[i], qubits[i + uniform_index(rng, n - i)]);
      std::sort(qubits.begin(), qubits.begin() + static_cast<std::ptrdiff_t>(m));
    }
    for (std::size_t i = 0; i < m; ++i) {
      RotationSite site;
      site.qubit = static_cast<std::uint32_t>(qubits[i]);
      site.axis = templ.axis ? *templ.axis : static_cast<PauliAxis>(uniform_index(rng, 3));
      site.param = param++;
      site.dist = 0;
      layers[l].rotations.push_back(site);
    }
  }
  std::vector<CliffordGate> tail;
  if (templ.layers > 0) tail = entangler_gates(templ.entangler, n, templ.layers - 1);
  ParamCircuit circuit(n, std::move(layers), std::move(tail), {dist});
  Observable obs = build_observable(observable, n, rng);
  return Architecture{std::move(circuit), std::move(obs)};
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line needs matching sizes");
  LinearFit f;
  f.points = x.size();
  if (x.size() < 2) return f;
  const auto k = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / k;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / k;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return f;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- runners

namespace {

json fit_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared},
          {"points", f.points}};
}

std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
    // Rows survive an interrupted run.
    out_.flush();
  }

 private:
  std::ofstream out_;
};

std::string str(std::size_t v) { return std::to_string(v); }
std::string str(std::uint64_t v, int) { return std::to_string(v); }

bool is_gradient_target(Target t) {
  return t == Target::Gradient || t == Target::SquaredGradient || t == Target::GradientVariance;
}

int target_order(Target t) {
  return (t == Target::Cost || t == Target::Gradient) ? 1 : 2;
}

Quantity direct_quantity(Target t, std::uint32_t param) {
  switch (t) {
    case Target::Cost: return {QuantityKind::Cost, param};
    case Target::Gradient: return {QuantityKind::Gradient, param};
    case Target::CostSquared: return {QuantityKind::CostSquared, param};
    case Target::SquaredGradient: return {QuantityKind::GradientSquared, param};
    case Target::GradientVariance: break;
  }
  throw std::logic_error("gradient variance is not a direct quantity");
}

// The parameter does not exist (thinned away): its gradient vanishes identically.
bool absent_param(const ParamCircuit& c, Target t, std::uint32_t param) {
  return is_gradient_target(t) && param >= c.num_params();
}

std::size_t resolve_samples(const ExperimentConfig& cfg, const ParamCircuit& circuit,
                            const Observable& obs, Target t) {
  if (cfg.samples > 0) return cfg.samples;
  const int order = target_order(t);
  const double gamma = circuit.num_params() == 0 ? 1.0 : sampling_gamma(circuit, order).first;
  const double norm = order == 2 ? obs.norm_bound() * obs.norm_bound() : obs.norm_bound();
  const auto plan = plan_samples(*cfg.epsilon, *cfg.delta, std::max<std::size_t>(1, circuit.num_params()),
                                 norm, gamma);
  return std::max<std::size_t>(1, plan.samples);
}

EstimateReport estimate_target(const ParamCircuit& circuit, const Observable& obs, Target t,
                               std::uint32_t param, std::size_t samples,
                               const EstimatorOptions& opts) {
  if (absent_param(circuit, t, param)) {
    EstimateReport r;
    r.quantity = std::string(target_name(t));
    r.samples = samples;
    r.seed = opts.seed;
    r.stream = opts.stream;
    return r;
  }
  if (t == Target::GradientVariance) {
    return estimate_gradient_variance(circuit, obs, param, samples, opts);
  }
  return estimate_quantity(circuit, obs, direct_quantity(t, param), samples, opts);
}

DenseAverage dense_target(const ParamCircuit& circuit, const Observable& obs, Target t,
                          std::uint32_t param, std::size_t draws, std::mt19937_64& rng) {
  if (absent_param(circuit, t, param)) return DenseAverage{0.0, 0.0, draws};
  if (t != Target::GradientVariance) {
    return mc_average(circuit, obs, direct_quantity(t, param), draws, rng);
  }
  const Quantity grad{QuantityKind::Gradient, param};
  std::vector<double> g(draws);
  std::vector<double> theta(circuit.num_params());
  for (std::size_t i = 0; i < draws; ++i) {
    for (std::size_t k = 0; k < theta.size(); ++k) {
      theta[k] = circuit.distribution_of(static_cast<std::uint32_t>(k)).sample(rng);
    }
    g[i] = evaluate_quantity(circuit, obs, grad, theta);
  }
  const auto d = static_cast<double>(draws);
  double mean = 0.0, mean_sq = 0.0;
  for (double v : g) {
    mean += v / d;
    mean_sq += v * v / d;
  }
  DenseAverage out{mean_sq - mean * mean, 0.0, draws};
  if (draws > 1) {
    // Delta method: influence of draw i is g_i^2 - 2 mean g_i.
    double m = 0.0, acc = 0.0;
    for (double v : g) m += (v * v - 2 * mean * v) / d;
    for (double v : g) acc += std::pow(v * v - 2 * mean * v - m, 2);
    out.standard_error = std::sqrt(acc / (d - 1) / d);
  }
  return out;
}

double gamma_of(const ParamCircuit& circuit, Target t) {
  if (circuit.num_params() == 0) return 1.0;
  return sampling_gamma(circuit, target_order(t)).first;
}

double reference_value(const ParamCircuit& circuit, const Observable& obs, Target t,
                       std::uint32_t param, TruthMethod method, std::size_t draws,
                       std::mt19937_64& rng) {
  if (absent_param(circuit, t, param)) return 0.0;
  if (t == Target::GradientVariance && method != TruthMethod::DenseMonteCarlo) {
    const double g = reference_value(circuit, obs, Target::Gradient, param, method, draws, rng);
    return reference_value(circuit, obs, Target::SquaredGradient, param, method, draws, rng) -
           g * g;
  }
  switch (method) {
    case TruthMethod::Quadrature:
      return quadrature_average(circuit, obs, direct_quantity(t, param));
    case TruthMethod::DenseMonteCarlo:
      return dense_target(circuit, obs, t, param, draws, rng).mean;
    case TruthMethod::Enumerate:
      return exact_quantity(circuit, obs, direct_quantity(t, param));
  }
  return 0.0;
}

std::string_view truth_name(TruthMethod m) {
  switch (m) {
    case TruthMethod::Quadrature: return "quadrature";
    case TruthMethod::DenseMonteCarlo: return "dense_mc";
    case TruthMethod::Enumerate: return "enumerate";
  }
  return "?";
}

Architecture architecture_for(const ExperimentConfig& cfg, std::size_t n, std::uint64_t arch_seed) {
  std::mt19937_64 rng(arch_seed);
  return generate_architecture(cfg.templ, n, cfg.distribution, cfg.observable, rng);
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sem_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  const auto k = static_cast<double>(v.size());
  return std::sqrt(acc / (k - 1) / k);
}

// Linear interpolation between order statistics.
double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = p / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

LinearFit log_fit(const std::vector<double>& x, const std::vector<double>& y, bool log_x) {
  std::vector<double> fx, fy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] > 0.0 && std::isfinite(y[i])) {
      fx.push_back(log_x ? std::log(x[i]) : x[i]);
      fy.push_back(std::log(y[i]));
    }
  }
  return fit_line(fx, fy);
}

RunSummary run_variance_vs_n(const ExperimentConfig& cfg, const RunOptions& opt,
                             std::uint64_t seed) {
  namespace fs = std::filesystem;
  RunSummary out;
  const bool any_dense = cfg.dense_draws > 0;
  std::vector<std::string> header{"n", "arch", "arch_seed", "num_params", "param", "quantity",
                                  "estimate", "stderr", "K", "gamma_total", "seed"};
  if (any_dense) {
    for (const char* h : {"dense_mean", "dense_stderr", "dense_draws"}) header.emplace_back(h);
  }
  header.emplace_back("wall_time");
  CsvWriter csv(fs::path(opt.out_dir) / "results.csv", header);
  out.files.push_back("results.csv");

  json per_n = json::array();
  std::vector<double> ns, means;
  for (std::size_t n : cfg.n_values) {
    std::vector<double> est, dense, diff;
    for (std::size_t a = 0; a < cfg.architectures && !stop_requested(); ++a) {
      const std::uint64_t arch_seed = architecture_seed(seed, n, a);
      const Architecture arch = architecture_for(cfg, n, arch_seed);
      const std::size_t k = resolve_samples(cfg, arch.circuit, arch.observable, cfg.target);
      EstimatorOptions eo;
      eo.seed = seed;
      eo.stream = arch_seed;
      eo.threads = opt.threads;
      const auto start = std::chrono::steady_clock::now();
      const EstimateReport r =
          estimate_target(arch.circuit, arch.observable, cfg.target, cfg.param, k, eo);
      std::vector<std::string> row{str(n), str(a), str(arch_seed, 0), str(arch.circuit.num_params()),
                                   str(std::size_t{cfg.param}), std::string(target_name(cfg.target)),
                                   format_double(r.estimate), format_double(r.standard_error), str(k),
                                   format_double(gamma_of(arch.circuit, cfg.target)), str(seed, 0)};
      est.push_back(r.estimate);
      if (any_dense) {
        if (n <= kDenseQubitCap) {
          std::mt19937_64 rng = tagged_rng(seed, arch_seed, kDenseTag);
          const DenseAverage d = dense_target(arch.circuit, arch.observable, cfg.target, cfg.param,
                                              cfg.dense_draws, rng);
          row.push_back(format_double(d.mean));
          row.push_back(format_double(d.standard_error));
          row.push_back(str(d.draws));
          dense.push_back(d.mean);
          diff.push_back(r.estimate - d.mean);
        } else {
          row.insert(row.end(), {"", "", "0"});
        }
      }
      row.push_back(format_seconds(
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()));
      csv.row(row);
    }
    if (est.empty()) break;
    json entry = {{"n", n},
                  {"architectures", est.size()},
                  {"mean_estimate", mean_of(est)},
                  {"sem_estimate", sem_of(est)}};
    if (!dense.empty()) {
      entry["mean_dense"] = mean_of(dense);
      entry["sem_dense"] = sem_of(dense);
      entry["mean_difference"] = mean_of(diff);
      entry["sem_difference"] = sem_of(diff);
    }
    per_n.push_back(entry);
    ns.push_back(static_cast<double>(n));
    means.push_back(mean_of(est));
    if (stop_requested()) break;
  }
  out.summary["per_n"] = per_n;
  out.summary["log_mean_vs_n"] = fit_json(log_fit(ns, means, false));
  return out;
}

RunSummary run_bias_var(const ExperimentConfig& cfg, const RunOptions& opt, std::uint64_t seed) {
  namespace fs = std::filesystem;
  RunSummary out;
  const std::size_t n = cfg.n_values.front();
  const bool bias_primary = cfg.kind == ExperimentKind::BiasVsK;
  CsvWriter per_arch(fs::path(opt.out_dir) / "per_architecture.csv",
                     {"arch", "arch_seed", "K", "truth", "mean_estimate", "squared_bias",
                      "estimator_variance", "bootstrap", "pool", "gamma_total", "seed"});
  out.files.push_back("per_architecture.csv");

  const std::size_t nk = cfg.k_values.size();
  std::vector<std::vector<double>> sq_bias(nk), est_var(nk);
  double gamma_max = 1.0;
  const Quantity quantity = direct_quantity(cfg.target, cfg.param);
  for (std::size_t a = 0; a < cfg.architectures && !stop_requested(); ++a) {
    const std::uint64_t arch_seed = architecture_seed(seed, n, a);
    const Architecture arch = architecture_for(cfg, n, arch_seed);
    const bool absent = absent_param(arch.circuit, cfg.target, cfg.param);
    std::mt19937_64 truth_rng = tagged_rng(seed, arch_seed, kTruthTag);
    const double truth = reference_value(arch.circuit, arch.observable, cfg.target, cfg.param,
                                         cfg.truth, cfg.truth_draws, truth_rng);
    std::optional<QuantitySampler> sampler;
    if (!absent) sampler.emplace(arch.circuit, arch.observable, quantity);
    const double gamma = sampler ? sampler->gamma_total() : 1.0;
    gamma_max = std::max(gamma_max, gamma);
    std::optional<StabilizerTableau> tableau;
    if (sampler) tableau.emplace(sampler->make_tableau());
    std::vector<std::size_t> choices;

    std::vector<double> pool;
    if (sampler && cfg.pool > 0) {
      std::mt19937_64 rng = tagged_rng(seed, arch_seed, kPoolTag);
      pool.resize(cfg.pool);
      for (double& v : pool) v = sampler->sample(rng, *tableau, choices);
    }
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const std::size_t k = cfg.k_values[ki];
      std::vector<double> estimators(cfg.bootstrap, 0.0);
      if (sampler) {
        for (std::size_t r = 0; r < cfg.bootstrap; ++r) {
          std::mt19937_64 rng = batch_rng(seed, mix(arch_seed, k), r);
          double sum = 0.0;
          for (std::size_t i = 0; i < k; ++i) {
            sum += pool.empty() ? sampler->sample(rng, *tableau, choices)
                                : pool[uniform_index(rng, pool.size())];
          }
          estimators[r] = sum / static_cast<double>(k);
        }
      }
      const double m = mean_of(estimators);
      double var = 0.0;
      for (double e : estimators) var += (e - m) * (e - m);
      var /= static_cast<double>(cfg.bootstrap - 1);
      const double b2 = (m - truth) * (m - truth);
      sq_bias[ki].push_back(b2);
      est_var[ki].push_back(var);
      per_arch.row({str(a), str(arch_seed, 0), str(k), format_double(truth), format_double(m),
                    format_double(b2), format_double(var), str(cfg.bootstrap), str(cfg.pool),
                    format_double(gamma), str(seed, 0)});
    }
  }

  CsvWriter csv(fs::path(opt.out_dir) / "results.csv",
                {"K", "squared_bias", "estimator_variance", "percentile_20", "percentile_80",
                 "architectures", "bootstrap", "gamma_total", "seed"});
  out.files.insert(out.files.begin(), "results.csv");
  std::vector<double> ks, b_means, v_means;
  for (std::size_t ki = 0; ki < nk; ++ki) {
    if (sq_bias[ki].empty()) break;
    const auto& primary = bias_primary ? sq_bias[ki] : est_var[ki];
    const double mb = mean_of(sq_bias[ki]);
    const double mv = mean_of(est_var[ki]);
    csv.row({str(cfg.k_values[ki]), format_double(mb), format_double(mv),
             format_double(percentile(primary, 20)), format_double(percentile(primary, 80)),
             str(sq_bias[ki].size()), str(cfg.bootstrap), format_double(gamma_max), str(seed, 0)});
    ks.push_back(static_cast<double>(cfg.k_values[ki]));
    b_means.push_back(mb);
    v_means.push_back(mv);
  }
  out.summary["n"] = n;
  out.summary["truth_method"] = std::string(truth_name(cfg.truth));
  out.summary["squared_bias_fit"] = fit_json(log_fit(ks, b_means, true));
  out.summary["estimator_variance_fit"] = fit_json(log_fit(ks, v_means, true));
  return out;
}

RunSummary run_architecture_scan(const ExperimentConfig& cfg, const RunOptions& opt,
                                 std::uint64_t seed) {
  namespace fs = std::filesystem;
  RunSummary out;
  const bool any_dense = cfg.dense_draws > 0;
  CsvWriter archs(fs::path(opt.out_dir) / "architectures.csv",
                  {"n", "arch", "arch_seed", "layers", "num_params", "quantity", "mean_variance",
                   "mean_cost", "mean_cost_stderr", "K", "gamma_total", "seed", "wall_time"});
  std::vector<std::string> vheader{"n", "arch", "arch_seed", "rank", "param", "layer", "qubit",
                                   "axis", "estimate", "stderr", "K", "gamma_total", "seed"};
  if (any_dense) {
    for (const char* h : {"dense_mean", "dense_stderr", "dense_draws"}) vheader.emplace_back(h);
  }
  CsvWriter vars(fs::path(opt.out_dir) / "variances.csv", vheader);
  out.files = {"architectures.csv", "variances.csv"};

  json points = json::array();
  std::vector<double> mean_costs, mean_vars;
  for (std::size_t n : cfg.n_values) {
    for (std::size_t a = 0; a < cfg.architectures && !stop_requested(); ++a) {
      const auto start = std::chrono::steady_clock::now();
      const std::uint64_t arch_seed = architecture_seed(seed, n, a);
      const Architecture arch = architecture_for(cfg, n, arch_seed);
      const ParamCircuit& c = arch.circuit;
      const std::size_t k = resolve_samples(cfg, c, arch.observable, cfg.target);
      const double gamma = gamma_of(c, cfg.target);
      EstimatorOptions eo;
      eo.seed = seed;
      eo.threads = opt.threads;
      eo.stream = arch_seed;
      const EstimateReport cost = estimate_first_order(c, arch.observable, std::nullopt, k, eo);

      struct Row {
        std::uint32_t param;
        EstimateReport report;
        std::optional<DenseAverage> dense;
      };
      std::vector<Row> rows;
      for (std::uint32_t p = 0; p < c.num_params() && !stop_requested(); ++p) {
        eo.stream = mix(arch_seed, p + 1);
        Row row{p, estimate_target(c, arch.observable, cfg.target, p, k, eo), std::nullopt};
        if (any_dense && n <= kDenseQubitCap) {
          std::mt19937_64 rng = tagged_rng(seed, mix(arch_seed, p + 1), kDenseTag);
          row.dense = dense_target(c, arch.observable, cfg.target, p, cfg.dense_draws, rng);
        }
        rows.push_back(std::move(row));
      }
      if (stop_requested()) break;
      std::stable_sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
        return x.report.estimate > y.report.estimate;
      });
      std::vector<double> values;
      for (std::size_t rank = 0; rank < rows.size(); ++rank) {
        const Row& r = rows[rank];
        const auto pos = c.sites_of(r.param).front();
        const RotationSite& site = c.site(pos);
        std::vector<std::string> cells{
            str(n), str(a), str(arch_seed, 0), str(rank), str(std::size_t{r.param}),
            str(pos.first), str(std::size_t{site.qubit}), std::string(1, axis_char(site.axis)),
            format_double(r.report.estimate), format_double(r.report.standard_error), str(k),
            format_double(gamma), str(seed, 0)};
        if (any_dense) {
          if (r.dense) {
            cells.insert(cells.end(), {format_double(r.dense->mean),
                                       format_double(r.dense->standard_error), str(r.dense->draws)});
          } else {
            cells.insert(cells.end(), {"", "", "0"});
          }
        }
        vars.row(cells);
        values.push_back(r.report.estimate);
      }
      const double mv = mean_of(values);
      archs.row({str(n), str(a), str(arch_seed, 0), str(cfg.templ.layers), str(c.num_params()),
                 std::string(target_name(cfg.target)), format_double(mv),
                 format_double(cost.estimate), format_double(cost.standard_error), str(k),
                 format_double(gamma), str(seed, 0),
                 format_seconds(std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - start).count())});
      mean_costs.push_back(cost.estimate);
      mean_vars.push_back(mv);
    }
  }
  out.summary["architectures_completed"] = mean_vars.size();
  out.summary["mean_of_mean_variance"] = mean_of(mean_vars);
  out.summary["mean_of_mean_cost"] = mean_of(mean_costs);
  return out;
}

RunSummary run_single_estimate(const ExperimentConfig& cfg, const RunOptions& opt,
                               std::uint64_t seed) {
  namespace fs = std::filesystem;
  RunSummary out;
  const ParamCircuit& c = cfg.problem->circuit;
  const Observable& obs = cfg.problem->observable;
  const std::size_t k = resolve_samples(cfg, c, obs, cfg.target);
  EstimatorOptions eo;
  eo.seed = seed;
  eo.threads = opt.threads;
  const EstimateReport r = estimate_target(c, obs, cfg.target, cfg.param, k, eo);

  std::vector<std::string> header{"quantity", "param", "estimate", "stderr", "K",
                                  "gamma_total", "mode", "seed", "stream"};
  std::vector<std::string> row{std::string(target_name(cfg.target)), str(std::size_t{cfg.param}),
                               format_double(r.estimate), format_double(r.standard_error), str(k),
                               format_double(gamma_of(c, cfg.target)),
                               std::string(mode_name(r.mode)), str(seed, 0), str(r.stream, 0)};
  if (cfg.dense_draws > 0 && c.num_qubits() <= kDenseQubitCap) {
    std::mt19937_64 rng = tagged_rng(seed, 0, kDenseTag);
    const DenseAverage d = dense_target(c, obs, cfg.target, cfg.param, cfg.dense_draws, rng);
    header.insert(header.end(), {"dense_mean", "dense_stderr", "dense_draws"});
    row.insert(row.end(), {format_double(d.mean), format_double(d.standard_error), str(d.draws)});
  }
  header.emplace_back("wall_time");
  row.push_back(format_seconds(r.wall_seconds));
  CsvWriter csv(fs::path(opt.out_dir) / "estimate.csv", header);
  csv.row(row);
  out.files.push_back("estimate.csv");

  out.summary["report"] = to_json(r);
  out.summary["num_params"] = c.num_params();
  const ParamCircuit prepared = prepare_for_sampling(c);
  if (c.num_params() > 0) {
    json mixtures = json::object();
    for (int order : {1, 2}) {
      const ApproximantSampler s = ApproximantSampler::for_circuit(
          order == 1 ? prepared : double_circuit(prepared, std::nullopt, std::nullopt));
      json list = json::array();
      for (const auto& m : s.mixtures()) list.push_back(to_json(m));
      mixtures[order == 1 ? "one_fold" : "two_fold"] = list;
    }
    out.summary["mixtures"] = mixtures;
  }
  return out;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  namespace fs = std::filesystem;
  if (options.out_dir.empty()) throw ConfigError("no output directory given");
  fs::create_directories(options.out_dir);
  const std::uint64_t seed = options.seed.value_or(config.seed);
  const auto start = std::chrono::steady_clock::now();

  json effective = config.source;
  effective["seed"] = seed;
  {
    std::ofstream f(fs::path(options.out_dir) / "config.json");
    f << effective.dump(2) << '\n';
  }

  RunSummary out;
  switch (config.kind) {
    case ExperimentKind::VarianceVsN: out = run_variance_vs_n(config, options, seed); break;
    case ExperimentKind::BiasVsK:
    case ExperimentKind::VarVsK: out = run_bias_var(config, options, seed); break;
    case ExperimentKind::ArchitectureScan: out = run_architecture_scan(config, options, seed); break;
    case ExperimentKind::SingleEstimate: out = run_single_estimate(config, options, seed); break;
  }
  out.interrupted = stop_requested();
  out.summary["experiment"] = std::string(experiment_name(config.kind));
  out.summary["seed"] = seed;
  out.summary["quantity"] = std::string(target_name(config.target));
  out.summary["interrupted"] = out.interrupted;
  out.summary["files"] = out.files;
  out.summary["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream f(fs::path(options.out_dir) / "summary.json");
  f << out.summary.dump(2) << '\n';
  out.files.push_back("summary.json");
  return out;
}

}  // namespace cliffvar
