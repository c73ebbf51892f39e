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

#include "cliffvar/estimator.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace cliffvar {

std::string_view mode_name(EstimatorMode mode) {
  return mode == EstimatorMode::Convex ? "convex" : "quasiprobability";
}

SamplePlan plan_samples(double epsilon, double delta, std::size_t num_params, double norm_bound,
                        double gamma_total) {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (num_params < 1) throw std::invalid_argument("need at least one parameter");
  if (!(norm_bound > 0)) throw std::invalid_argument("norm bound must be positive");
  if (!(gamma_total >= 1 - 1e-12)) throw std::invalid_argument("gamma must be >= 1");
  SamplePlan plan;
  plan.epsilon = epsilon;
  plan.delta = delta;
  plan.num_params = num_params;
  plan.norm_bound = norm_bound;
  plan.gamma_total = gamma_total;
  plan.mode = gamma_total > 1 + 1e-12 ? EstimatorMode::Quasiprobability : EstimatorMode::Convex;
  const double k = 2.0 / (epsilon * epsilon) * std::log(2.0 / delta) * gamma_total *
                   static_cast<double>(num_params) * norm_bound * norm_bound;
  // Guard against ceil(7378.0000000001) style round-up from the log.
  const double rounded = std::round(k);
  plan.samples = static_cast<std::size_t>(std::abs(k - rounded) < 1e-9 * k ? rounded : std::ceil(k));
  plan.samples = std::max<std::size_t>(plan.samples, 1);
  return plan;
}

ApproximantSampler::ApproximantSampler(ParamCircuit circuit, std::vector<CliffordMixture> mixtures)
    : circuit_(std::move(circuit)), mixtures_(std::move(mixtures)), order_(circuit_.copies()) {
  if (!circuit_.all_z()) throw std::invalid_argument("sampler needs a Z-only circuit");
  if (mixtures_.size() != circuit_.num_params()) {
    throw std::invalid_argument("need one mixture per parameter");
  }
  for (const auto& m : mixtures_) {
    if (m.order() != order_) throw std::invalid_argument("mixture order does not match circuit");
    gamma_total_ *= m.gamma();
    if (!m.is_convex()) mode_ = EstimatorMode::Quasiprobability;
  }
  for (const auto& layer : circuit_.layers()) {
    for (const auto& g : layer.fixed) program_.push_back(Step{g});
    for (const auto& r : layer.rotations) {
      const auto& sites = circuit_.sites_of(r.param);
      Step step;
      step.param = r.param;
      if (order_ == 1) {
        step.qubits[0] = r.qubit;
      } else {
        // Copy A carries the slot; copy B is covered by the pair term.
        if (circuit_.site(sites[0]).qubit != r.qubit) continue;
        step.qubits[0] = r.qubit;
        step.qubits[1] = circuit_.site(sites[1]).qubit;
      }
      program_.push_back(step);
    }
  }
  for (const auto& g : circuit_.tail()) program_.push_back(Step{g});
}

ApproximantSampler ApproximantSampler::for_circuit(const ParamCircuit& circuit) {
  const int order = circuit.copies();
  std::vector<std::optional<CliffordMixture>> by_dist(circuit.distributions().size());
  std::vector<CliffordMixture> mixtures;
  for (std::uint32_t k = 0; k < circuit.num_params(); ++k) {
    const std::uint32_t d = circuit.site(circuit.sites_of(k)[0]).dist;
    if (!by_dist[d]) {
      const AngleDistribution& dist = circuit.distributions()[d];
      if (dist.center()) throw std::invalid_argument("extract symmetry centres before sampling");
      by_dist[d] = order == 1 ? one_fold(dist) : two_fold(dist);
    }
    mixtures.push_back(*by_dist[d]);
  }
  return ApproximantSampler(circuit, std::move(mixtures));
}

void ApproximantSampler::draw_choices(std::mt19937_64& rng, std::vector<std::size_t>& out) const {
  out.resize(mixtures_.size());
  for (std::size_t k = 0; k < mixtures_.size(); ++k) out[k] = mixtures_[k].draw(rng);
}

std::vector<std::size_t> ApproximantSampler::draw_choices(std::mt19937_64& rng) const {
  std::vector<std::size_t> out;
  draw_choices(rng, out);
  return out;
}

double ApproximantSampler::sign(const std::vector<std::size_t>& choices) const {
  double s = 1.0;
  for (std::size_t k = 0; k < mixtures_.size(); ++k) s *= mixtures_[k].sign(choices[k]);
  return s;
}

double ApproximantSampler::weight(const std::vector<std::size_t>& choices) const {
  double w = 1.0;
  for (std::size_t k = 0; k < mixtures_.size(); ++k) w *= mixtures_[k].terms()[choices[k]].weight;
  return w;
}

template <typename F>
void ApproximantSampler::for_each_gate(const std::vector<std::size_t>& choices, F&& f) const {
  if (choices.size() != mixtures_.size()) throw std::invalid_argument("one choice per parameter");
  for (const Step& step : program_) {
    if (step.param < 0) {
      f(step.gate);
      continue;
    }
    const auto p = static_cast<std::size_t>(step.param);
    for (const CliffordGate& local : mixtures_[p].terms()[choices[p]].gates) {
      CliffordGate g = local;
      g.target = step.qubits[g.target];
      if (g.control) g.control = step.qubits[*g.control];
      f(g);
    }
  }
}

void ApproximantSampler::run(const std::vector<std::size_t>& choices,
                             StabilizerTableau& tableau) const {
  tableau.reset();
  for_each_gate(choices, [&](const CliffordGate& g) { tableau.apply(g); });
}

std::vector<CliffordGate> ApproximantSampler::gates(const std::vector<std::size_t>& choices) const {
  std::vector<CliffordGate> out;
  for_each_gate(choices, [&](const CliffordGate& g) { out.push_back(g); });
  return out;
}

Approximant draw_approximant(const ParamCircuit& circuit, int order,
                             const std::vector<CliffordMixture>& mixtures, std::mt19937_64& rng) {
  if (order != circuit.copies()) {
    throw std::invalid_argument("order " + std::to_string(order) + " needs a circuit with " +
                                std::to_string(order) + " copies");
  }
  const ApproximantSampler sampler(circuit, mixtures);
  const auto choices = sampler.draw_choices(rng);
  return Approximant{sampler.gates(choices), sampler.sign(choices)};
}

double observable_expectation(const StabilizerTableau& tableau, const Observable& observable) {
  if (const auto* sum = std::get_if<PauliSum>(&observable.kind())) {
    double total = 0.0;
    for (const auto& t : sum->terms) total += t.coeff * tableau.pauli_expectation(t.pauli);
    return total;
  }
  return tableau.zero_projector_probability(std::get<ZeroProjector>(observable.kind()).support);
}

std::mt19937_64 batch_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t batch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(batch)};
  return std::mt19937_64(seq);
}

namespace {

ParamCircuit shifted(const ParamCircuit& prepared, std::optional<ParamShift> shift) {
  return shift ? apply_parameter_shift(prepared, *shift) : prepared;
}

void check_param(const ParamCircuit& circuit, std::uint32_t param) {
  if (param >= circuit.num_params()) throw std::invalid_argument("parameter index out of range");
}

}  // namespace

QuantitySampler::QuantitySampler(const ParamCircuit& circuit, const Observable& observable,
                                 const Quantity& quantity)
    : observable_(observable) {
  const ParamCircuit prepared = prepare_for_sampling(circuit);
  auto first = [&](std::optional<ParamShift> s, double c) {
    variants_.push_back(Variant{ApproximantSampler::for_circuit(shifted(prepared, s)), c});
  };
  auto second = [&](std::optional<ParamShift> a, std::optional<ParamShift> b, double c) {
    variants_.push_back(Variant{ApproximantSampler::for_circuit(double_circuit(prepared, a, b)), c});
  };
  const ParamShift plus{quantity.param, ShiftSign::Plus}, minus{quantity.param, ShiftSign::Minus};
  switch (quantity.kind) {
    case QuantityKind::Cost:
      first(std::nullopt, 1.0);
      break;
    case QuantityKind::Gradient:
      check_param(circuit, quantity.param);
      first(plus, 0.5);
      first(minus, -0.5);
      break;
    case QuantityKind::CostSquared:
      second(std::nullopt, std::nullopt, 1.0);
      break;
    case QuantityKind::GradientSquared:
      check_param(circuit, quantity.param);
      // E[C+C-] = E[C-C+], so the cross term is evaluated once with weight -2/4.
      second(plus, plus, 0.25);
      second(plus, minus, -0.5);
      second(minus, minus, 0.25);
      break;
  }
  if (variants_.front().sampler.order() == 2) observable_ = observable.tensor_square();
}

QuantitySampler::QuantitySampler(const ParamCircuit& circuit, const Observable& observable,
                                 std::optional<ParamShift> shift_a,
                                 std::optional<ParamShift> shift_b, int order)
    : observable_(order == 2 ? observable.tensor_square() : observable) {
  const ParamCircuit prepared = prepare_for_sampling(circuit);
  if (order == 1) {
    variants_.push_back(Variant{ApproximantSampler::for_circuit(shifted(prepared, shift_a)), 1.0});
  } else {
    variants_.push_back(
        Variant{ApproximantSampler::for_circuit(double_circuit(prepared, shift_a, shift_b)), 1.0});
  }
}

// Every variant shares the rotation structure and mixtures, so one draw of
// term choices drives all of them (common random numbers).
double QuantitySampler::sample(std::mt19937_64& rng, StabilizerTableau& tableau,
                               std::vector<std::size_t>& choices) const {
  const ApproximantSampler& lead = variants_.front().sampler;
  lead.draw_choices(rng, choices);
  double value = 0.0;
  for (const auto& v : variants_) {
    v.sampler.run(choices, tableau);
    value += v.coeff * observable_expectation(tableau, observable_);
  }
  return lead.gamma_total() * lead.sign(choices) * value;
}

namespace {

struct Aggregate {
  double mean = 0.0;
  double standard_error = 0.0;
  double gamma_total = 1.0;
  EstimatorMode mode = EstimatorMode::Convex;
};

Aggregate run_batches(const QuantitySampler& sampler, std::size_t samples,
                      const EstimatorOptions& options) {
  if (samples == 0) throw std::invalid_argument("sample count must be positive");
  const std::size_t batches = std::max<std::size_t>(1, std::min(options.batches, samples));
  std::vector<double> batch_sum(batches, 0.0);
  std::vector<std::size_t> batch_size(batches, 0);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      StabilizerTableau tableau(sampler.observable().num_qubits());
      std::vector<std::size_t> choices;
      for (std::size_t b = next++; b < batches; b = next++) {
        const std::size_t begin = samples * b / batches;
        const std::size_t end = samples * (b + 1) / batches;
        std::mt19937_64 rng = batch_rng(options.seed, options.stream, b);
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) sum += sampler.sample(rng, tableau, choices);
        batch_sum[b] = sum;
        batch_size[b] = end - begin;
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = batches;
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, batches));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  Aggregate out;
  out.gamma_total = sampler.gamma_total();
  out.mode = sampler.mode();
  double total = 0.0;
  for (double s : batch_sum) total += s;
  const auto k = static_cast<double>(samples);
  out.mean = total / k;
  if (batches > 1) {
    double acc = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      const double dev = batch_sum[b] - static_cast<double>(batch_size[b]) * out.mean;
      acc += dev * dev;
    }
    const auto nb = static_cast<double>(batches);
    out.standard_error = std::sqrt(acc / (k * k) * nb / (nb - 1));
  }
  return out;
}

EstimateReport make_report(std::string label, const Aggregate& agg, std::size_t samples,
                           const EstimatorOptions& options,
                           std::chrono::steady_clock::time_point start) {
  EstimateReport r;
  r.quantity = std::move(label);
  r.estimate = agg.mean;
  r.standard_error = agg.standard_error;
  r.samples = samples;
  r.gamma_total = agg.gamma_total;
  r.mode = agg.mode;
  r.seed = options.seed;
  r.stream = options.stream;
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string shift_label(std::optional<ParamShift> s) {
  if (!s) return "";
  return std::string(s->sign == ShiftSign::Plus ? "+" : "-") + std::to_string(s->param);
}

}  // namespace

EstimateReport estimate_first_order(const ParamCircuit& circuit, const Observable& observable,
                                    std::optional<ParamShift> shift, std::size_t samples,
                                    const EstimatorOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const QuantitySampler sampler(circuit, observable, shift, std::nullopt, 1);
  const Aggregate agg = run_batches(sampler, samples, options);
  const std::string label = shift ? "E[C(" + shift_label(shift) + ")]" : "E[C]";
  return make_report(label, agg, samples, options, start);
}

EstimateReport estimate_second_order(const ParamCircuit& circuit, const Observable& observable,
                                     std::optional<ParamShift> shift_a,
                                     std::optional<ParamShift> shift_b, std::size_t samples,
                                     const EstimatorOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const QuantitySampler sampler(circuit, observable, shift_a, shift_b, 2);
  const Aggregate agg = run_batches(sampler, samples, options);
  const std::string label = (shift_a || shift_b) ? "E[C(" + shift_label(shift_a) + ")C(" +
                                                       shift_label(shift_b) + ")]"
                                                 : "E[C^2]";
  return make_report(label, agg, samples, options, start);
}

EstimateReport estimate_gradient(const ParamCircuit& circuit, const Observable& observable,
                                 std::uint32_t param, std::size_t samples,
                                 const EstimatorOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const QuantitySampler sampler(circuit, observable, Quantity{QuantityKind::Gradient, param});
  const Aggregate agg = run_batches(sampler, samples, options);
  return make_report("E[dC/dtheta_" + std::to_string(param) + "]", agg, samples, options, start);
}

EstimateReport estimate_squared_gradient(const ParamCircuit& circuit, const Observable& observable,
                                         std::uint32_t param, std::size_t samples,
                                         const EstimatorOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const QuantitySampler sampler(circuit, observable,
                                Quantity{QuantityKind::GradientSquared, param});
  const Aggregate agg = run_batches(sampler, samples, options);
  return make_report("E[(dC/dtheta_" + std::to_string(param) + ")^2]", agg, samples, options,
                     start);
}

EstimateReport estimate_gradient_variance(const ParamCircuit& circuit,
                                          const Observable& observable, std::uint32_t param,
                                          std::size_t samples, const EstimatorOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const EstimateReport second = estimate_squared_gradient(circuit, observable, param, samples, options);
  EstimatorOptions first_options = options;
  first_options.stream = options.stream ^ 0x9E3779B97F4A7C15ULL;
  const EstimateReport first = estimate_gradient(circuit, observable, param, samples, first_options);
  EstimateReport r = second;
  r.quantity = "Var[dC/dtheta_" + std::to_string(param) + "]";
  r.estimate = second.estimate - first.estimate * first.estimate;
  // Delta method for the squared mean.
  const double g_term = 2 * first.estimate * first.standard_error;
  r.standard_error = std::sqrt(second.standard_error * second.standard_error + g_term * g_term);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

EstimateReport estimate_quantity(const ParamCircuit& circuit, const Observable& observable,
                                 const Quantity& quantity, std::size_t samples,
                                 const EstimatorOptions& options) {
  switch (quantity.kind) {
    case QuantityKind::Cost:
      return estimate_first_order(circuit, observable, std::nullopt, samples, options);
    case QuantityKind::Gradient:
      return estimate_gradient(circuit, observable, quantity.param, samples, options);
    case QuantityKind::CostSquared:
      return estimate_second_order(circuit, observable, std::nullopt, std::nullopt, samples,
                                   options);
    case QuantityKind::GradientSquared:
      return estimate_squared_gradient(circuit, observable, quantity.param, samples, options);
  }
  throw std::logic_error("unknown quantity");
}

double enumerate_exact(const ParamCircuit& circuit, const Observable& observable, int order,
                       std::optional<ParamShift> shift_a, std::optional<ParamShift> shift_b) {
  const ParamCircuit prepared = prepare_for_sampling(circuit);
  std::optional<ApproximantSampler> sampler;
  Observable lifted = observable;
  if (order == 1) {
    if (shift_b) throw std::invalid_argument("first-order enumeration takes one shift");
    sampler.emplace(ApproximantSampler::for_circuit(shifted(prepared, shift_a)));
  } else if (order == 2) {
    sampler.emplace(ApproximantSampler::for_circuit(double_circuit(prepared, shift_a, shift_b)));
    lifted = observable.tensor_square();
  } else {
    throw std::invalid_argument("enumeration supports order 1 or 2");
  }
  const auto& mixtures = sampler->mixtures();
  double count = 1.0;
  for (const auto& m : mixtures) count *= static_cast<double>(m.terms().size());
  if (count > static_cast<double>(1U << 20)) {
    throw std::length_error("enumeration over " + std::to_string(count) +
                            " approximants exceeds 2^20");
  }
  StabilizerTableau tableau(lifted.num_qubits());
  std::vector<std::size_t> choices(mixtures.size(), 0);
  double total = 0.0;
  for (;;) {
    sampler->run(choices, tableau);
    total += sampler->weight(choices) * observable_expectation(tableau, lifted);
    std::size_t k = 0;
    for (; k < choices.size(); ++k) {
      if (++choices[k] < mixtures[k].terms().size()) break;
      choices[k] = 0;
    }
    if (k == choices.size()) break;
  }
  return total;
}

double exact_quantity(const ParamCircuit& circuit, const Observable& observable,
                      const Quantity& quantity) {
  const ParamShift plus{quantity.param, ShiftSign::Plus};
  const ParamShift minus{quantity.param, ShiftSign::Minus};
  switch (quantity.kind) {
    case QuantityKind::Cost:
      return enumerate_exact(circuit, observable, 1);
    case QuantityKind::Gradient:
      check_param(circuit, quantity.param);
      return (enumerate_exact(circuit, observable, 1, plus) -
              enumerate_exact(circuit, observable, 1, minus)) /
             2;
    case QuantityKind::CostSquared:
      return enumerate_exact(circuit, observable, 2);
    case QuantityKind::GradientSquared:
      check_param(circuit, quantity.param);
      return (enumerate_exact(circuit, observable, 2, plus, plus) -
              2 * enumerate_exact(circuit, observable, 2, plus, minus) +
              enumerate_exact(circuit, observable, 2, minus, minus)) /
             4;
  }
  throw std::logic_error("unknown quantity");
}

std::pair<double, EstimatorMode> sampling_gamma(const ParamCircuit& circuit, int order) {
  const ParamCircuit prepared = prepare_for_sampling(circuit);
  const ApproximantSampler sampler = ApproximantSampler::for_circuit(
      order == 2 ? double_circuit(prepared, std::nullopt, std::nullopt) : prepared);
  return {sampler.gamma_total(), sampler.mode()};
}

}  // namespace cliffvar
