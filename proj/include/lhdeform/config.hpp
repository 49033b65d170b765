#pragma once

// Experiment configuration: one JSON document with a version field and a
// closed schema. Unknown keys anywhere are rejected.
//
// {
//   "version": 1,
//   "system": "h4-deformed-prolonged",
//   "z": 0.5,
//   "s": 3,                                   (Bernoulli systems only)
//   "coefficients": {"b1": 1, "b2": [{"type": "monomial", "c": 1, "power": 1}], ...},
//   "initial": [x1, y1, x2, y2, x3, y3]       (or [[x1, y1], ...]; (r, theta) for Bernoulli)
//   "tspan": [0, 5],
//   "integrator": {"rel_tol": 1e-12, "abs_tol": 1e-12, "max_step": 0.1, "max_steps": 100000},
//   "samples": 50,
//   "seed": 1
// }
//
// Coefficient names are b1, b2, b3, b0 for plane systems and a1, a2 for
// Bernoulli systems. A coefficient is a number (constant) or a list of terms:
// constant {c}, monomial {c, power}, sinusoid {c, omega, phase},
// exponential {c, rate}.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "lhdeform/experiment.hpp"

namespace lhdeform {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ExperimentConfig {
  static constexpr int kVersion = 1;

  FlowSpec flow;
  PhasePoint initial;
  double t0 = 0.0;
  double t1 = 1.0;
  IntegratorConfig integrator{1e-12, 1e-12};
  std::size_t samples = 50;
  std::uint64_t seed = 0;
};

/// Throws ConfigError with the offending key path.
ExperimentConfig parse_config(const nlohmann::ordered_json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

CoefficientSpec parse_coefficient(const nlohmann::ordered_json& j, const std::string& where);
nlohmann::ordered_json coefficient_to_json(const CoefficientSpec& spec);

}  // namespace lhdeform
