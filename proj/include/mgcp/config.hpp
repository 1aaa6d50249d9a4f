#pragma once

// JSON run configuration: model parameters, threshold law, series controls
// and Monte Carlo controls in one document. Parsing is strict: unknown or
// ill-typed keys are rejected with their dotted path, and every value is
// validated on load. A missing section keeps its default, and the defaults
// reproduce the two-component survival-figure setup. Requires the vendored
// single-header JSON library.

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mgcp/montecarlo.hpp"

namespace mgcp {

struct RunConfig {
  TcModelParams model;
  ThresholdDistribution threshold = GeometricThreshold{0.5};
  SeriesControl series{};
  McConfig mc{};

  void validate() const {
    model.validate();
    validate_threshold(threshold);
    if (!(series.rel_tol > 0.0))
      throw std::invalid_argument("config: series.rel_tol must be > 0");
    if (series.max_terms < 1)
      throw std::invalid_argument("config: series.max_terms must be >= 1");
    if (mc.samples < 1)
      throw std::invalid_argument("config: mc.samples must be >= 1");
    if (mc.workers < 0)
      throw std::invalid_argument("config: mc.workers must be >= 0");
  }
};

inline RunConfig default_config() {
  RunConfig c;
  c.model = TcModelParams{
      MultiGcpParams{{GcpParams{{0.5}}, GcpParams{{0.5, 0.5}}}},
      SubordinatorParams{1.0, 0.5, {1.0, 1.0}}};
  return c;
}

namespace detail {

[[noreturn]] inline void config_fail(const std::string& path,
                                     const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::string& path,
                                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) config_fail(path + "." + it.key(), "unknown key");
  }
}

inline const nlohmann::json& object_at(const nlohmann::json& obj,
                                       const std::string& path,
                                       const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_object()) config_fail(path + "." + key, "expected an object");
  return v;
}

inline double num_field(const nlohmann::json& obj, const std::string& path,
                        const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) config_fail(path + "." + key, "expected a number");
  return v.get<double>();
}

inline long long int_field(const nlohmann::json& obj, const std::string& path,
                           const char* key, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) config_fail(path + "." + key,
                                          "expected an integer");
  return v.get<long long>();
}

inline std::vector<double> number_array(const nlohmann::json& v,
                                        const std::string& path) {
  if (!v.is_array()) config_fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) config_fail(path, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline void parse_model(const nlohmann::json& m, TcModelParams& model) {
  reject_unknown_keys(m, "config.model", {"q", "lambda", "theta", "a",
                                          "rates"});
  model.sub.lambda = num_field(m, "config.model", "lambda", model.sub.lambda);
  model.sub.theta = num_field(m, "config.model", "theta", model.sub.theta);
  if (m.contains("a"))
    model.sub.a = number_array(m.at("a"), "config.model.a");
  if (m.contains("rates")) {
    const auto& r = m.at("rates");
    if (!r.is_array())
      config_fail("config.model.rates", "expected an array of rate arrays");
    std::vector<GcpParams> comps;
    comps.reserve(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
      comps.push_back(GcpParams{number_array(
          r.at(i), "config.model.rates[" + std::to_string(i) + "]")});
    model.gcp.components = std::move(comps);
  }
  if (m.contains("q")) {
    const long long q = int_field(m, "config.model", "q", 0);
    if (q != static_cast<long long>(model.sub.a.size()) ||
        q != static_cast<long long>(model.gcp.components.size()))
      config_fail("config.model.q",
                  "does not match the lengths of a and rates");
  }
}

inline void parse_threshold(const nlohmann::json& th,
                            ThresholdDistribution& dist) {
  if (!th.contains("variant"))
    config_fail("config.threshold.variant", "missing");
  const auto& v = th.at("variant");
  if (!v.is_string())
    config_fail("config.threshold.variant", "expected a string");
  const std::string variant = v.get<std::string>();
  if (variant == "geometric") {
    reject_unknown_keys(th, "config.threshold", {"variant", "p"});
    dist = GeometricThreshold{num_field(th, "config.threshold", "p", 0.5)};
    return;
  }
  if (variant == "hypergeometric") {
    reject_unknown_keys(th, "config.threshold", {"variant", "N", "K", "n"});
    dist = HypergeometricThreshold{int_field(th, "config.threshold", "N", 0),
                                   int_field(th, "config.threshold", "K", 0),
                                   int_field(th, "config.threshold", "n", 0)};
    return;
  }
  if (variant == "explicit") {
    reject_unknown_keys(th, "config.threshold", {"variant", "pmf"});
    if (!th.contains("pmf"))
      config_fail("config.threshold.pmf", "missing");
    const auto& rows = th.at("pmf");
    if (!rows.is_array())
      config_fail("config.threshold.pmf", "expected an array of [k, p] pairs");
    ExplicitThreshold table;
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != 2 ||
          !row.at(0).is_number_integer() || !row.at(1).is_number())
        config_fail("config.threshold.pmf",
                    "expected an array of [k, p] pairs");
      table.pmf.emplace_back(row.at(0).get<long long>(),
                             row.at(1).get<double>());
    }
    dist = std::move(table);
    return;
  }
  config_fail("config.threshold.variant",
              "must be geometric, hypergeometric or explicit");
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") +
                                e.what());
  }
  if (!j.is_object())
    detail::config_fail("config", "top level must be an object");
  detail::reject_unknown_keys(j, "config",
                              {"model", "threshold", "series", "mc"});
  RunConfig cfg = default_config();
  if (j.contains("model"))
    detail::parse_model(detail::object_at(j, "config", "model"), cfg.model);
  if (j.contains("threshold"))
    detail::parse_threshold(detail::object_at(j, "config", "threshold"),
                            cfg.threshold);
  if (j.contains("series")) {
    const auto& s = detail::object_at(j, "config", "series");
    detail::reject_unknown_keys(s, "config.series", {"rel_tol", "max_terms"});
    cfg.series.rel_tol =
        detail::num_field(s, "config.series", "rel_tol", cfg.series.rel_tol);
    const long long mt =
        detail::int_field(s, "config.series", "max_terms",
                          static_cast<long long>(cfg.series.max_terms));
    if (mt < 1) detail::config_fail("config.series.max_terms", "must be >= 1");
    cfg.series.max_terms = static_cast<std::size_t>(mt);
  }
  if (j.contains("mc")) {
    const auto& m = detail::object_at(j, "config", "mc");
    detail::reject_unknown_keys(m, "config.mc", {"samples", "seed", "workers"});
    const long long samples =
        detail::int_field(m, "config.mc", "samples",
                          static_cast<long long>(cfg.mc.samples));
    if (samples < 1) detail::config_fail("config.mc.samples", "must be >= 1");
    cfg.mc.samples = static_cast<std::size_t>(samples);
    const long long seed = detail::int_field(
        m, "config.mc", "seed", static_cast<long long>(cfg.mc.seed));
    cfg.mc.seed = static_cast<std::uint64_t>(seed);
    if (m.contains("workers")) {
      const long long workers = detail::int_field(m, "config.mc", "workers", 0);
      if (workers < 1)
        detail::config_fail("config.mc.workers", "must be >= 1");
      cfg.mc.workers = static_cast<int>(workers);
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("config: cannot read file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// the configuration as a JSON document in the schema parse_config accepts
inline std::string config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  auto& m = j["model"];
  m["q"] = cfg.model.q();
  m["lambda"] = cfg.model.sub.lambda;
  m["theta"] = cfg.model.sub.theta;
  m["a"] = cfg.model.sub.a;
  auto& rates = m["rates"] = nlohmann::json::array();
  for (const auto& c : cfg.model.gcp.components) rates.push_back(c.rates);
  auto& th = j["threshold"];
  if (const auto* g = std::get_if<GeometricThreshold>(&cfg.threshold)) {
    th["variant"] = "geometric";
    th["p"] = g->p;
  } else if (const auto* h =
                 std::get_if<HypergeometricThreshold>(&cfg.threshold)) {
    th["variant"] = "hypergeometric";
    th["N"] = h->N;
    th["K"] = h->K;
    th["n"] = h->n;
  } else {
    th["variant"] = "explicit";
    auto& rows = th["pmf"] = nlohmann::json::array();
    for (const auto& [k, pr] : std::get<ExplicitThreshold>(cfg.threshold).pmf)
      rows.push_back(nlohmann::json::array({k, pr}));
  }
  j["series"] = {{"rel_tol", cfg.series.rel_tol},
                 {"max_terms", cfg.series.max_terms}};
  j["mc"] = {{"samples", cfg.mc.samples}, {"seed", cfg.mc.seed}};
  if (cfg.mc.workers > 0) j["mc"]["workers"] = cfg.mc.workers;
  return j.dump(2);
}

}  // namespace mgcp
