#pragma once

// Seeded synthetic quality-score scenarios and the published aggregate
// fixtures used for golden tests.
//
// Generator: std::mt19937_64 (its output sequence is fixed by the C++
// standard). Uniforms take the top 53 bits of one engine output. Normal
// variates use the basic Box-Muller transform, one variate per pair of
// uniforms:
//
//   u1 = (bits + 1) / 2^53 in (0, 1],  u2 = bits / 2^53 in [0, 1)
//   z  = sqrt(-2 ln u1) * cos(2 pi u2)
//
// Groups are drawn in spec order from a single engine seeded with the spec's
// seed. A mixture draws its component with one uniform before the normal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sqfr/dataset.hpp"
#include "sqfr/errors.hpp"
#include "sqfr/fairness.hpp"

namespace sqfr {

enum class Distribution { normal, mixture_of_normals, constant };

inline std::string_view distribution_name(Distribution d) {
  switch (d) {
    case Distribution::normal: return "normal";
    case Distribution::mixture_of_normals: return "mixture_of_normals";
    case Distribution::constant: return "constant";
  }
  return "unknown";
}

struct GroupSpec {
  std::string label;
  Distribution distribution = Distribution::normal;
  // normal: one mean/stddev; mixture: one entry per component;
  // constant: means[0] is the value.
  std::vector<double> means;
  std::vector<double> stddevs;
  std::vector<double> weights;
  std::size_t sample_count = 0;
};

struct ScenarioSpec {
  std::string name;
  std::vector<GroupSpec> groups;
  std::uint64_t seed = 0;
  double clamp_low = 0.0;
  double clamp_high = 100.0;
  bool quantize = true;
};

class PinnedRng {
 public:
  explicit PinnedRng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * kScale; }

  double standard_normal() {
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * kScale;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; derives independent per-component seeds.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline void check_spec(const ScenarioSpec& spec) {
  const std::string where = "scenario '" + spec.name + "'";
  if (spec.name.empty()) throw ConfigError("scenario name must not be empty");
  if (spec.groups.empty()) throw ConfigError(where + ": no groups");
  if (!std::isfinite(spec.clamp_low) || !std::isfinite(spec.clamp_high) ||
      spec.clamp_low < 0.0 || spec.clamp_low > spec.clamp_high) {
    throw ConfigError(where + ": clamp range must satisfy 0 <= low <= high");
  }
  std::set<std::string> labels;
  for (const auto& g : spec.groups) {
    const std::string gw = where + " group '" + g.label + "'";
    if (g.label.empty() || !labels.insert(g.label).second) {
      throw ConfigError(where + ": group labels must be unique and non-empty");
    }
    if (g.sample_count < 1) throw ConfigError(gw + ": sample_count must be >= 1");
    for (double m : g.means) {
      if (!std::isfinite(m)) throw ConfigError(gw + ": means must be finite");
    }
    for (double s : g.stddevs) {
      if (!std::isfinite(s) || s < 0.0) throw ConfigError(gw + ": stddevs must be >= 0");
    }
    switch (g.distribution) {
      case Distribution::constant:
        if (g.means.size() != 1) throw ConfigError(gw + ": constant needs one value in means");
        break;
      case Distribution::normal:
        if (g.means.size() != 1 || g.stddevs.size() != 1) {
          throw ConfigError(gw + ": normal needs one mean and one stddev");
        }
        break;
      case Distribution::mixture_of_normals: {
        const auto k = g.means.size();
        if (k == 0 || g.stddevs.size() != k || g.weights.size() != k) {
          throw ConfigError(gw + ": mixture needs equally many means, stddevs and weights");
        }
        double total = 0.0;
        for (double w : g.weights) {
          if (!std::isfinite(w) || w < 0.0) throw ConfigError(gw + ": weights must be >= 0");
          total += w;
        }
        if (std::abs(total - 1.0) > 1e-9) throw ConfigError(gw + ": weights must sum to 1");
        break;
      }
    }
  }
}

inline GroupedScores generate(const ScenarioSpec& spec) {
  check_spec(spec);
  PinnedRng rng(spec.seed);
  GroupedScores out;
  out.component_id = spec.name;
  auto finish = [&](double x) {
    x = std::clamp(x, spec.clamp_low, spec.clamp_high);
    if (spec.quantize) x = std::clamp(std::round(x), spec.clamp_low, spec.clamp_high);
    return x;
  };
  for (const auto& g : spec.groups) {
    std::vector<double> samples;
    samples.reserve(g.sample_count);
    for (std::size_t i = 0; i < g.sample_count; ++i) {
      double x = 0.0;
      switch (g.distribution) {
        case Distribution::constant:
          x = g.means[0];
          break;
        case Distribution::normal:
          x = g.means[0] + g.stddevs[0] * rng.standard_normal();
          break;
        case Distribution::mixture_of_normals: {
          const double u = rng.uniform();
          std::size_t k = 0;
          double acc = g.weights[0];
          while (k + 1 < g.weights.size() && u >= acc) acc += g.weights[++k];
          x = g.means[k] + g.stddevs[k] * rng.standard_normal();
          break;
        }
      }
      samples.push_back(finish(x));
    }
    out.groups.emplace(g.label, std::move(samples));
  }
  return out;
}

inline Dataset generate_dataset(const std::vector<ScenarioSpec>& specs) {
  Dataset ds;
  ds.provenance.source = "<generated>";
  for (const auto& spec : specs) {
    if (ds.components.count(spec.name)) {
      throw ConfigError("duplicate scenario name '" + spec.name + "'");
    }
    auto scores = generate(spec);
    for (const auto& [label, v] : scores.groups) ds.provenance.rows += v.size();
    ds.components.emplace(spec.name, std::move(scores));
  }
  ds.canonicalize();
  return ds;
}

// ---------------------------------------------------------------------------
// Scenario specs as JSON. A document is one spec object, an array of them,
// or {"scenarios": [...]}.

inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  try {
    ScenarioSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.quantize = j.value("quantize", true);
    if (j.contains("clamp_range")) {
      const auto& r = j.at("clamp_range");
      if (!r.is_array() || r.size() != 2) throw ConfigError("clamp_range must be [low, high]");
      spec.clamp_low = r[0].get<double>();
      spec.clamp_high = r[1].get<double>();
    }
    for (const auto& g : j.at("groups")) {
      GroupSpec gs;
      gs.label = g.at("label").get<std::string>();
      const auto dist = g.at("distribution").get<std::string>();
      if (dist == "normal") {
        gs.distribution = Distribution::normal;
      } else if (dist == "mixture_of_normals") {
        gs.distribution = Distribution::mixture_of_normals;
      } else if (dist == "constant") {
        gs.distribution = Distribution::constant;
      } else {
        throw ConfigError("unknown distribution '" + dist + "'");
      }
      auto numbers = [&](const char* key) {
        std::vector<double> v;
        if (!g.contains(key)) return v;
        const auto& x = g.at(key);
        if (x.is_number()) return std::vector<double>{x.get<double>()};
        return x.get<std::vector<double>>();
      };
      gs.means = numbers("means");
      gs.stddevs = numbers("stddevs");
      gs.weights = numbers("weights");
      gs.sample_count = g.at("sample_count").get<std::size_t>();
      spec.groups.push_back(std::move(gs));
    }
    check_spec(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid scenario spec: ") + e.what());
  }
}

inline nlohmann::ordered_json scenario_to_json(const ScenarioSpec& spec) {
  nlohmann::ordered_json groups = nlohmann::ordered_json::array();
  for (const auto& g : spec.groups) {
    nlohmann::ordered_json jg;
    jg["label"] = g.label;
    jg["distribution"] = distribution_name(g.distribution);
    jg["means"] = g.means;
    jg["stddevs"] = g.stddevs;
    jg["weights"] = g.weights;
    jg["sample_count"] = g.sample_count;
    groups.push_back(std::move(jg));
  }
  nlohmann::ordered_json j;
  j["name"] = spec.name;
  j["groups"] = std::move(groups);
  j["seed"] = spec.seed;
  j["clamp_range"] = {spec.clamp_low, spec.clamp_high};
  j["quantize"] = spec.quantize;
  return j;
}

inline std::vector<ScenarioSpec> scenarios_from_json(const nlohmann::json& doc) {
  const nlohmann::json* list = &doc;
  if (doc.is_object() && doc.contains("scenarios")) list = &doc.at("scenarios");
  std::vector<ScenarioSpec> out;
  if (list->is_array()) {
    for (const auto& j : *list) out.push_back(scenario_from_json(j));
  } else if (list->is_object()) {
    out.push_back(scenario_from_json(*list));
  } else {
    throw ConfigError("scenario document must be an object or an array");
  }
  if (out.empty()) throw ConfigError("scenario document has no scenarios");
  return out;
}

inline std::vector<ScenarioSpec> load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return scenarios_from_json(doc);
}

// ---------------------------------------------------------------------------
// Built-in scenarios. Sample sets behind the published tables were never
// released, so distribution shapes below are free choices tuned to land near
// the published group means; their outputs are repo-local golden values.

namespace detail {

inline GroupSpec normal_group(std::string label, double mean, double sd,
                              std::size_t n) {
  return {std::move(label), Distribution::normal, {mean}, {sd}, {}, n};
}

inline GroupSpec constant_group(std::string label, double value, std::size_t n) {
  return {std::move(label), Distribution::constant, {value}, {}, {}, n};
}

inline ScenarioSpec constant_scenario(std::string name,
                                      const std::vector<double>& values,
                                      std::size_t n) {
  ScenarioSpec s;
  s.name = std::move(name);
  s.quantize = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.groups.push_back(constant_group(std::string(1, static_cast<char>('A' + i)),
                                      values[i], n));
  }
  return s;
}

}  // namespace detail

inline const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names = {
      "q1", "q2", "q3", "q5", "all-equal", "bias3", "bias5", "bench"};
  return names;
}

// Specs for a named scenario; each spec becomes one quality component. Seeds
// are derived from base_seed and the component's position.
inline std::vector<ScenarioSpec> builtin_scenario(std::string_view name,
                                                  std::uint64_t base_seed = 42) {
  using detail::constant_scenario;
  using detail::normal_group;
  std::vector<ScenarioSpec> specs;
  if (name == "q1") {
    specs.push_back({"Q1",
                     {normal_group("A", 81.3, 6.0, 1000),
                      normal_group("B", 85.3, 5.0, 1000),
                      normal_group("C", 86.1, 5.0, 1000)}});
  } else if (name == "q2") {
    specs.push_back({"Q2",
                     {normal_group("A", 76.6, 6.0, 1000),
                      normal_group("B", 89.4, 3.5, 1000),
                      normal_group("C", 90.2, 3.5, 1000)}});
  } else if (name == "q3") {
    // Group A is bimodal with roughly the same mean as the unimodal group B.
    ScenarioSpec s{"Q3", {}};
    s.groups.push_back({"A", Distribution::mixture_of_normals,
                        {70.0, 92.0}, {4.0, 3.0}, {0.45, 0.55}, 1000});
    s.groups.push_back(normal_group("B", 82.5, 4.0, 1000));
    specs.push_back(std::move(s));
  } else if (name == "q5") {
    specs.push_back({"Q5",
                     {normal_group("A", 72.3, 2.0, 500),
                      normal_group("B", 83.7, 2.0, 500),
                      normal_group("C", 90.4, 2.0, 500)}});
  } else if (name == "all-equal") {
    specs.push_back(constant_scenario("all-equal", {87.5, 87.5, 87.5}, 100));
  } else if (name == "bias3") {
    specs.push_back(constant_scenario("bias3-one-strong-bias", {35, 95, 89}, 10));
    specs.push_back(constant_scenario("bias3-one-slight-bias", {67, 82, 89}, 10));
    specs.push_back(constant_scenario("bias3-all-different", {30, 50, 95}, 10));
    specs.push_back(constant_scenario("bias3-all-similar", {84, 89, 87}, 10));
  } else if (name == "bias5") {
    specs.push_back(constant_scenario("bias5-1-one-strong-bias",
                                      {31.4, 84.4, 84.9, 85.2, 86.8}, 10));
    specs.push_back(constant_scenario("bias5-2-two-strong-bias",
                                      {31.1, 26.7, 85, 85.1, 87.1}, 10));
    specs.push_back(constant_scenario("bias5-3-one-slight-bias",
                                      {79.1, 85.6, 85, 85.1, 86.9}, 10));
    specs.push_back(constant_scenario("bias5-4-two-slight-bias",
                                      {76, 77.5, 85.6, 86.9, 85.8}, 10));
    specs.push_back(constant_scenario("bias5-5-all-similar",
                                      {85.7, 87.5, 85.6, 86.6, 86.5}, 10));
    specs.push_back(constant_scenario("bias5-6-all-equal",
                                      {87.5, 87.5, 87.5, 87.5, 87.5}, 10));
    specs.push_back(constant_scenario("bias5-7-all-different",
                                      {87.5, 72.2, 25, 14.3, 47.3}, 10));
  } else if (name == "bench") {
    // 10 components x 5 groups x 1000 samples.
    for (int c = 0; c < 10; ++c) {
      ScenarioSpec s;
      s.name = "component-" + std::to_string(c);
      for (int g = 0; g < 5; ++g) {
        s.groups.push_back(normal_group(std::string(1, static_cast<char>('A' + g)),
                                        60.0 + 4.0 * g + 1.5 * c, 5.0 + 0.5 * g, 1000));
      }
      specs.push_back(std::move(s));
    }
  } else {
    std::string known;
    for (const auto& n : builtin_scenario_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown scenario '" + std::string(name) +
                      "'; available: " + known);
  }
  for (std::size_t i = 0; i < specs.size(); ++i) specs[i].seed = mix_seed(base_seed, i);
  return specs;
}

// ---------------------------------------------------------------------------
// Published aggregate fixtures.

struct AggregateFixture {
  std::string name;
  std::map<std::string, double> group_values;
  std::map<Measure, double> expected;
  double tolerance = 0.005;  // half a unit in the table's last printed decimal
  std::string source;
};

// Evaluates a GC-based measure directly on the fixture's aggregate values.
inline double fixture_value(const AggregateFixture& f, Measure m) {
  std::vector<double> values;
  for (const auto& [label, v] : f.group_values) values.push_back(v);
  const double gc = gini_coefficient(values);
  switch (m) {
    case Measure::mean_gc_sqfr:
    case Measure::median_gc_sqfr:
    case Measure::lwm_gc_sqfr:
      return sqfr(gc).value;
    case Measure::mean_gc_csqfr:
    case Measure::median_gc_csqfr:
    case Measure::lwm_gc_csqfr:
      return csqfr(gc).value;
    case Measure::mdg_sqfr:
      break;
  }
  throw DomainError("mdg-sqfr needs per-sample scores, not aggregates");
}

inline const std::vector<AggregateFixture>& builtin_fixtures() {
  using M = Measure;
  static const std::vector<AggregateFixture> fixtures = [] {
    auto groups = [](const std::vector<double>& values) {
      std::map<std::string, double> out;
      char label = 'A';
      for (double v : values) out.emplace(std::string(1, label++), v);
      return out;
    };
    std::vector<AggregateFixture> f;
    f.push_back({"Q1-mean", groups({81.3, 85.3, 86.1}), {{M::mean_gc_sqfr, 0.98}}, 0.005, "Q1 group aggregates"});
    f.push_back({"Q1-median", groups({82, 85.5, 85}), {{M::median_gc_sqfr, 0.99}}, 0.005, "Q1 group aggregates"});
    f.push_back({"Q2-mean", groups({76.6, 89.4, 90.2}), {{M::mean_gc_sqfr, 0.95}}, 0.005, "Q2 group aggregates"});
    f.push_back({"Q2-median", groups({77, 90, 90}), {{M::median_gc_sqfr, 0.95}}, 0.005, "Q2 group aggregates"});
    f.push_back({"bias3-one-strong-bias", groups({35, 95, 89}),
                 {{M::mean_gc_sqfr, 0.73}, {M::mean_gc_csqfr, 0.38}}, 0.005, "three-group bias archetypes"});
    f.push_back({"bias3-one-slight-bias", groups({67, 82, 89}),
                 {{M::mean_gc_sqfr, 0.91}, {M::mean_gc_csqfr, 0.75}}, 0.005, "three-group bias archetypes"});
    f.push_back({"bias3-all-different", groups({30, 50, 95}),
                 {{M::mean_gc_sqfr, 0.63}, {M::mean_gc_csqfr, 0.25}}, 0.005, "three-group bias archetypes"});
    f.push_back({"bias3-all-similar", groups({84, 89, 87}),
                 {{M::mean_gc_sqfr, 0.98}, {M::mean_gc_csqfr, 0.94}}, 0.005, "three-group bias archetypes"});
    f.push_back({"Q3-mean", groups({81.95, 82.5}), {{M::mean_gc_sqfr, 0.997}}, 0.0005, "Q3 group aggregates"});
    f.push_back({"Q3-median", groups({81.5, 82.5}), {{M::median_gc_sqfr, 0.994}}, 0.0005, "Q3 group aggregates"});
    f.push_back({"Q3-lwm", groups({75.4, 81.4}),
                 {{M::lwm_gc_sqfr, 0.962}, {M::lwm_gc_csqfr, 0.889}}, 0.0005, "Q3 group aggregates"});
    f.push_back({"Q5-mean", groups({72.3, 83.7, 90.4}), {{M::mean_gc_sqfr, 0.93}}, 0.005, "Q5 group aggregates"});
    f.push_back({"Q5-median", groups({72, 83.5, 90}), {{M::median_gc_sqfr, 0.93}}, 0.005, "Q5 group aggregates"});
    const std::vector<std::tuple<const char*, std::vector<double>, double, double>> bias5 = {
        {"bias5-one-strong-bias", {31.4, 84.4, 84.9, 85.2, 86.8}, 0.85, 0.61},
        {"bias5-two-strong-bias", {31.1, 26.7, 85, 85.1, 87.1}, 0.72, 0.38},
        {"bias5-one-slight-bias", {79.1, 85.6, 85, 85.1, 86.9}, 0.98, 0.94},
        {"bias5-two-slight-bias", {76, 77.5, 85.6, 86.9, 85.8}, 0.96, 0.89},
        {"bias5-all-similar", {85.7, 87.5, 85.6, 86.6, 86.5}, 0.99, 0.98},
        {"bias5-all-equal", {87.5, 87.5, 87.5, 87.5, 87.5}, 1.0, 1.0},
        {"bias5-all-different", {87.5, 72.2, 25, 14.3, 47.3}, 0.61, 0.22},
    };
    for (const auto& [name, values, s, c] : bias5) {
      f.push_back({name, groups(values), {{M::mean_gc_sqfr, s}, {M::mean_gc_csqfr, c}},
                   0.005, "five-group bias archetypes"});
    }
    return f;
  }();
  return fixtures;
}

}  // namespace sqfr
