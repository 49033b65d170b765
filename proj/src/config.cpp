#include "lhdeform/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace lhdeform {

using Json = nlohmann::ordered_json;

namespace {

void closed(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": not finite");
  return v;
}

double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

Json required(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  return j.at(key);
}

CoefficientTerm parse_term(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a term object");
  const Json type = required(j, "type", where);
  if (!type.is_string()) throw ConfigError(where + ".type: expected a string");
  const std::string t = type.get<std::string>();
  if (t == "constant") {
    closed(j, where, {"type", "c"});
    return term::Constant{number(required(j, "c", where), where + ".c")};
  }
  if (t == "monomial") {
    closed(j, where, {"type", "c", "power"});
    const Json p = required(j, "power", where);
    if (!p.is_number_integer() || p.get<long>() < 0)
      throw ConfigError(where + ".power: expected a nonnegative integer");
    return term::Monomial{number(required(j, "c", where), where + ".c"), p.get<int>()};
  }
  if (t == "sinusoid") {
    closed(j, where, {"type", "c", "omega", "phase"});
    return term::Sinusoid{number(required(j, "c", where), where + ".c"), number_or(j, "omega", 1.0, where),
                          number_or(j, "phase", 0.0, where)};
  }
  if (t == "exponential") {
    closed(j, where, {"type", "c", "rate"});
    return term::Exponential{number(required(j, "c", where), where + ".c"),
                             number(required(j, "rate", where), where + ".rate")};
  }
  throw ConfigError(where + ".type: unknown term type '" + t + "'");
}

PhasePoint parse_initial(const Json& j, std::size_t copies, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    if (j[i].is_array()) {
      if (j[i].size() != 2) throw ConfigError(w + ": expected a pair");
      v.push_back(number(j[i][0], w + "[0]"));
      v.push_back(number(j[i][1], w + "[1]"));
    } else {
      v.push_back(number(j[i], w));
    }
  }
  if (v.size() != 2 * copies)
    throw ConfigError(where + ": system needs " + std::to_string(2 * copies) + " coordinates, got " +
                      std::to_string(v.size()));
  return PhasePoint(std::move(v));
}

}  // namespace

CoefficientSpec parse_coefficient(const Json& j, const std::string& where) {
  if (j.is_number()) return CoefficientSpec::constant(number(j, where));
  if (!j.is_array()) throw ConfigError(where + ": expected a number or a list of terms");
  std::vector<CoefficientTerm> terms;
  for (std::size_t i = 0; i < j.size(); ++i) terms.push_back(parse_term(j[i], where + "[" + std::to_string(i) + "]"));
  return CoefficientSpec(std::move(terms));
}

Json coefficient_to_json(const CoefficientSpec& spec) {
  Json out = Json::array();
  for (const auto& t : spec.terms()) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, term::Constant>)
            out.push_back({{"type", "constant"}, {"c", v.c}});
          else if constexpr (std::is_same_v<T, term::Monomial>)
            out.push_back({{"type", "monomial"}, {"c", v.c}, {"power", v.power}});
          else if constexpr (std::is_same_v<T, term::Sinusoid>)
            out.push_back({{"type", "sinusoid"}, {"c", v.c}, {"omega", v.omega}, {"phase", v.phase}});
          else
            out.push_back({{"type", "exponential"}, {"c", v.c}, {"rate", v.rate}});
        },
        t);
  }
  return out;
}

ExperimentConfig parse_config(const Json& j) {
  closed(j, "config", {"version", "system", "z", "s", "coefficients", "initial", "tspan", "integrator",
                       "samples", "seed"});
  const Json version = required(j, "version", "config");
  if (!version.is_number_integer() || version.get<int>() != ExperimentConfig::kVersion)
    throw ConfigError("config.version: expected " + std::to_string(ExperimentConfig::kVersion));

  ExperimentConfig cfg;
  const Json system = required(j, "system", "config");
  if (!system.is_string()) throw ConfigError("config.system: expected a string");
  cfg.flow.system = system.get<std::string>();
  if (!is_known_system(cfg.flow.system)) throw ConfigError("config.system: unknown system '" + cfg.flow.system + "'");
  const bool polar = is_polar(cfg.flow.system);

  cfg.flow.z = number_or(j, "z", 0.0, "config");
  if (polar) {
    cfg.flow.s = number(required(j, "s", "config"), "config.s");
  } else if (j.contains("s")) {
    throw ConfigError("config.s: only Bernoulli systems take s");
  }

  if (j.contains("coefficients")) {
    const Json& c = j.at("coefficients");
    if (polar) {
      closed(c, "config.coefficients", {"a1", "a2"});
      if (c.contains("a1")) cfg.flow.a1 = parse_coefficient(c.at("a1"), "config.coefficients.a1");
      if (c.contains("a2")) cfg.flow.a2 = parse_coefficient(c.at("a2"), "config.coefficients.a2");
    } else {
      closed(c, "config.coefficients", {"b1", "b2", "b3", "b0"});
      H4Coefficients& h = cfg.flow.coefficients;
      if (c.contains("b1")) h.b1 = parse_coefficient(c.at("b1"), "config.coefficients.b1");
      if (c.contains("b2")) h.b2 = parse_coefficient(c.at("b2"), "config.coefficients.b2");
      if (c.contains("b3")) h.b3 = parse_coefficient(c.at("b3"), "config.coefficients.b3");
      if (c.contains("b0")) h.b0 = parse_coefficient(c.at("b0"), "config.coefficients.b0");
    }
  }

  cfg.initial = parse_initial(required(j, "initial", "config"), system_copies(cfg.flow.system), "config.initial");

  const Json tspan = required(j, "tspan", "config");
  if (!tspan.is_array() || tspan.size() != 2) throw ConfigError("config.tspan: expected [t0, t1]");
  cfg.t0 = number(tspan[0], "config.tspan[0]");
  cfg.t1 = number(tspan[1], "config.tspan[1]");
  if (!(cfg.t1 > cfg.t0)) throw ConfigError("config.tspan: need t1 > t0");

  if (j.contains("integrator")) {
    const Json& ic = j.at("integrator");
    closed(ic, "config.integrator", {"rel_tol", "abs_tol", "max_step", "max_steps"});
    cfg.integrator.rel_tol = number_or(ic, "rel_tol", cfg.integrator.rel_tol, "config.integrator");
    cfg.integrator.abs_tol = number_or(ic, "abs_tol", cfg.integrator.abs_tol, "config.integrator");
    cfg.integrator.max_step = number_or(ic, "max_step", cfg.integrator.max_step, "config.integrator");
    if (ic.contains("max_steps")) {
      if (!ic.at("max_steps").is_number_integer()) throw ConfigError("config.integrator.max_steps: expected an integer");
      cfg.integrator.max_steps = ic.at("max_steps").get<long>();
    }
    try {
      cfg.integrator.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("config.integrator: ") + e.what());
    }
  }
  if (j.contains("samples")) {
    const Json& s = j.at("samples");
    if (!s.is_number_integer() || s.get<long>() < 2) throw ConfigError("config.samples: expected an integer >= 2");
    cfg.samples = s.get<std::size_t>();
  }
  if (j.contains("seed")) {
    const Json& s = j.at("seed");
    if (!s.is_number_integer() || s.get<long long>() < 0) throw ConfigError("config.seed: expected a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }

  try {
    validate(cfg.flow);
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

Json to_json(const ExperimentConfig& cfg) {
  Json j;
  j["version"] = ExperimentConfig::kVersion;
  j["system"] = cfg.flow.system;
  j["z"] = cfg.flow.z;
  const bool polar = is_polar(cfg.flow.system);
  if (polar) j["s"] = cfg.flow.s;
  Json c = Json::object();
  if (polar) {
    c["a1"] = coefficient_to_json(cfg.flow.a1);
    c["a2"] = coefficient_to_json(cfg.flow.a2);
  } else {
    c["b1"] = coefficient_to_json(cfg.flow.coefficients.b1);
    c["b2"] = coefficient_to_json(cfg.flow.coefficients.b2);
    c["b3"] = coefficient_to_json(cfg.flow.coefficients.b3);
    c["b0"] = coefficient_to_json(cfg.flow.coefficients.b0);
  }
  j["coefficients"] = std::move(c);
  j["initial"] = cfg.initial.values();
  j["tspan"] = {cfg.t0, cfg.t1};
  Json ic{{"rel_tol", cfg.integrator.rel_tol}, {"abs_tol", cfg.integrator.abs_tol}};
  if (std::isfinite(cfg.integrator.max_step)) ic["max_step"] = cfg.integrator.max_step;
  ic["max_steps"] = cfg.integrator.max_steps;
  j["integrator"] = std::move(ic);
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace lhdeform
