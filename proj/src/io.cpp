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

#include "cliffvar/io.hpp"

#include <fstream>
#include <map>

namespace cliffvar {

using nlohmann::json;

namespace {

template <typename T>
T get_field(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string(what) + " is missing \"" + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(what) + ": field \"" + key + "\" has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field \"") + key + "\" has the wrong type");
  }
}

bool is_index(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::vector<std::uint32_t> qubit_list(const json& q) {
  if (is_index(q)) return {q.get<std::uint32_t>()};
  if (!q.is_array()) throw ConfigError("gate \"q\" must be an index or an index list");
  std::vector<std::uint32_t> out;
  for (const auto& v : q) {
    if (!is_index(v)) throw ConfigError("qubit indices must be nonnegative integers");
    out.push_back(v.get<std::uint32_t>());
  }
  return out;
}

}  // namespace

AngleDistribution distribution_from_json(const json& j) {
  const auto kind = get_field<std::string>(j, "dist", "distribution");
  try {
    AngleDistribution d = [&] {
      if (kind == "uniform") return AngleDistribution::uniform();
      if (kind == "gaussian") {
        return AngleDistribution::gaussian(get_field<double>(j, "mean", "gaussian"),
                                           get_field<double>(j, "var", "gaussian"));
      }
      if (kind == "dirac") {
        std::vector<DiracAtom> atoms;
        for (const auto& a : get_field<json>(j, "atoms", "dirac")) {
          if (!a.is_array() || a.size() != 2) throw ConfigError("dirac atoms are [angle, weight] pairs");
          atoms.push_back({a[0].get<double>(), a[1].get<double>()});
        }
        return AngleDistribution::dirac(std::move(atoms));
      }
      if (kind == "tabulated") {
        return AngleDistribution::tabulated(get_field<std::vector<double>>(j, "r", "tabulated"),
                                            get_field<std::vector<double>>(j, "s", "tabulated"));
      }
      throw ConfigError("unknown distribution \"" + kind + "\"");
    }();
    if (j.contains("center")) {
      d = d.with_center(clifford_angle_from_radians(get_field<double>(j, "center", "distribution")));
    }
    return d;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("distribution: ") + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("distribution: ") + e.what());
  }
}

json to_json(const AngleDistribution& dist) {
  json j = std::visit(
      [](const auto& law) -> json {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, UniformLaw>) {
          return {{"dist", "uniform"}};
        } else if constexpr (std::is_same_v<T, GaussianLaw>) {
          return {{"dist", "gaussian"}, {"mean", law.mean}, {"var", law.variance}};
        } else if constexpr (std::is_same_v<T, DiracLaw>) {
          json atoms = json::array();
          for (const auto& a : law.atoms) atoms.push_back({a.angle, a.weight});
          return {{"dist", "dirac"}, {"atoms", atoms}};
        } else {
          return {{"dist", "tabulated"}, {"r", law.r}, {"s", law.s}};
        }
      },
      dist.law());
  if (dist.center()) j["center"] = radians(*dist.center());
  return j;
}

CliffordGate gate_from_json(const json& j, std::size_t n) {
  const auto name = get_field<std::string>(j, "kind", "gate");
  GateKind kind;
  try {
    kind = parse_gate_kind(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!j.contains("q")) throw ConfigError("gate " + name + " is missing \"q\"");
  const auto qs = qubit_list(j.at("q"));
  CliffordGate g;
  if (is_two_qubit(kind)) {
    if (qs.size() != 2) throw ConfigError("gate " + name + " needs two qubits");
    g = CliffordGate::pair(kind, qs[0], qs[1]);
  } else {
    if (qs.size() != 1) throw ConfigError("gate " + name + " needs one qubit");
    g = CliffordGate::single(kind, qs[0]);
  }
  try {
    validate_gate(g, n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return g;
}

json to_json(const CliffordGate& gate) {
  json q = json::array();
  if (gate.control) q.push_back(*gate.control);
  q.push_back(gate.target);
  return {{"kind", std::string(gate_name(gate.kind))}, {"q", q}};
}

Observable observable_from_json(const json& j, std::size_t n) {
  const auto type = get_field<std::string>(j, "type", "observable");
  try {
    if (type == "zero_projector") {
      if (!j.contains("support")) return Observable::all_zero(n);
      return Observable::zero_projector(n, qubit_list(j.at("support")));
    }
    if (type == "pauli_sum") {
      std::vector<PauliTerm> terms;
      for (const auto& t : get_field<json>(j, "terms", "pauli_sum observable")) {
        terms.push_back({get_or<double>(t, "coeff", 1.0),
                         PauliString::parse(get_field<std::string>(t, "pauli", "pauli term"))});
      }
      if (terms.empty()) throw ConfigError("pauli_sum observable needs at least one term");
      return Observable::pauli_sum(n, std::move(terms));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("observable: ") + e.what());
  }
  throw ConfigError("unknown observable type \"" + type + "\"");
}

json to_json(const Observable& observable) {
  if (const auto* p = std::get_if<ZeroProjector>(&observable.kind())) {
    return {{"type", "zero_projector"}, {"support", p->support}};
  }
  json terms = json::array();
  for (const auto& t : std::get<PauliSum>(observable.kind()).terms) {
    terms.push_back({{"coeff", t.coeff}, {"pauli", t.pauli.str()}});
  }
  return {{"type", "pauli_sum"}, {"terms", terms}};
}

Problem problem_from_json(const json& j) {
  const auto n = get_field<std::size_t>(j, "n", "circuit");
  if (n == 0) throw ConfigError("circuit needs n >= 1");

  std::vector<AngleDistribution> dists;
  std::map<std::string, std::uint32_t> named;
  if (j.contains("distributions")) {
    if (!j.at("distributions").is_object()) throw ConfigError("\"distributions\" must be an object");
    for (const auto& [name, spec] : j.at("distributions").items()) {
      named[name] = static_cast<std::uint32_t>(dists.size());
      dists.push_back(distribution_from_json(spec));
    }
  }
  auto dist_index = [&](const json& d) -> std::uint32_t {
    if (d.is_string()) {
      const auto it = named.find(d.get<std::string>());
      if (it == named.end()) throw ConfigError("unknown distribution name \"" + d.get<std::string>() + "\"");
      return it->second;
    }
    dists.push_back(distribution_from_json(d));
    return static_cast<std::uint32_t>(dists.size() - 1);
  };

  std::vector<Layer> layers;
  std::uint32_t param = 0;
  for (const auto& lj : get_field<json>(j, "layers", "circuit")) {
    Layer layer;
    for (const auto& g : get_or<json>(lj, "fixed", json::array())) layer.fixed.push_back(gate_from_json(g, n));
    std::vector<json> rots;
    if (lj.contains("rotation")) rots.push_back(lj.at("rotation"));
    for (const auto& r : get_or<json>(lj, "rotations", json::array())) rots.push_back(r);
    for (const auto& r : rots) {
      RotationSite site;
      site.qubit = get_field<std::uint32_t>(r, "qubit", "rotation");
      try {
        site.axis = parse_axis(get_or<std::string>(r, "axis", "Z"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      site.param = param++;
      if (!r.contains("dist")) throw ConfigError("rotation is missing \"dist\"");
      site.dist = dist_index(r.at("dist"));
      layer.rotations.push_back(site);
    }
    layers.push_back(std::move(layer));
  }
  std::vector<CliffordGate> tail;
  for (const auto& g : get_or<json>(j, "final", json::array())) tail.push_back(gate_from_json(g, n));
  if (!j.contains("observable")) throw ConfigError("circuit is missing \"observable\"");
  Observable obs = observable_from_json(j.at("observable"), n);
  try {
    return Problem{ParamCircuit(n, std::move(layers), std::move(tail), std::move(dists)), std::move(obs)};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("circuit: ") + e.what());
  }
}

json to_json(const ParamCircuit& circuit) {
  json dists = json::object();
  for (std::size_t i = 0; i < circuit.distributions().size(); ++i) {
    dists["d" + std::to_string(i)] = to_json(circuit.distributions()[i]);
  }
  json layers = json::array();
  for (const auto& layer : circuit.layers()) {
    json fixed = json::array();
    for (const auto& g : layer.fixed) fixed.push_back(to_json(g));
    json rots = json::array();
    for (const auto& r : layer.rotations) {
      rots.push_back({{"qubit", r.qubit},
                      {"axis", std::string(1, axis_char(r.axis))},
                      {"dist", "d" + std::to_string(r.dist)},
                      {"param", r.param}});
    }
    layers.push_back({{"fixed", fixed}, {"rotations", rots}});
  }
  json tail = json::array();
  for (const auto& g : circuit.tail()) tail.push_back(to_json(g));
  return {{"n", circuit.num_qubits()}, {"distributions", dists}, {"layers", layers}, {"final", tail}};
}

json to_json(const CliffordMixture& mixture) {
  json terms = json::array();
  for (const auto& t : mixture.terms()) terms.push_back({{"label", t.label}, {"weight", t.weight}});
  return {{"order", mixture.order()},
          {"convex", mixture.is_convex()},
          {"gamma", mixture.gamma()},
          {"terms", terms}};
}

json to_json(const EstimateReport& r) {
  return {{"quantity", r.quantity},
          {"estimate", r.estimate},
          {"standard_error", r.standard_error},
          {"samples", r.samples},
          {"gamma_total", r.gamma_total},
          {"mode", std::string(mode_name(r.mode))},
          {"seed", r.seed},
          {"stream", r.stream},
          {"wall_seconds", r.wall_seconds}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace cliffvar
