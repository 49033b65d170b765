#pragma once

// Numerical certification of the identities of the deformed oscillator
// systems. Every check returns a CheckReport; a suite runs the checks
// selected by glob patterns concurrently and aggregates them in registry order.
//
// Reports with metadata.comparison == "ge" are lower-bound checks (a drift or
// a convergence order that must reach the tolerance); all others pass when
// measured <= tolerance.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lhdeform/experiment.hpp"

namespace lhdeform::verify {

using Json = nlohmann::ordered_json;

struct Witness {
  std::vector<double> input;
  double residual = 0.0;
};

struct CheckReport {
  std::string check_id;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::vector<Witness> witnesses;
  Json metadata = Json::object();

  bool lower_bound() const { return metadata.value("comparison", "le") == "ge"; }
};

Json to_json(const CheckReport& r);
CheckReport report_from_json(const Json& j);

/// Inputs of a conservation or superposition run.
struct FlowConfig {
  FlowSpec flow;
  PhasePoint initial;
  double t0 = 0.0;
  double t1 = 5.0;
  IntegratorConfig integrator{1e-12, 1e-12};
  std::size_t samples = 50;
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
};

/// Coefficients (b1, b2, b3) = (1, t, sin t).
H4Coefficients reference_coefficients();
/// Three copies starting at (-0.5, 1), (-1, -0.5), (-1.5, 0.5).
PhasePoint reference_initial();
/// Polar reference data: s = 3, a1 = 0.3, a2 = sin t.
FlowConfig reference_bernoulli(double z);
FlowConfig reference_flow(const std::string& system, double z, double t1);

/// Drift of a named constant along the flow. The permuted candidates S12,
/// S13, S23 are lower-bound checks with floor 1e-3.
CheckReport check_conservation(const std::string& system_id, const std::string& constant_id,
                               const FlowConfig& cfg);

/// Tables: h4, h4-deformed, h4-prolonged-deformed, b2, b2-deformed,
/// bernoulli, bernoulli-deformed, twisted-h2. `corrupt` flips the sign of
/// the first relation.
CheckReport check_bracket_table(const std::string& table_id, std::size_t sample_count, double tol,
                                std::uint64_t seed, double z = 1.0, bool corrupt = false);
const std::vector<std::string>& bracket_tables();

/// Integrate, calibrate the branch at t0, reconstruct copy 1 on the sample grid.
CheckReport check_superposition(const std::string& system_id, const FlowConfig& cfg);

/// Empirical order of the distance between a deformed object and its limit
/// over z_grid (positive, decreasing); lower-bound check against min_order.
CheckReport check_limit(const std::string& family_id, const std::vector<double>& z_grid,
                        std::uint64_t seed, double min_order = 0.95);
const std::vector<std::string>& limit_families();

/// Fraction of points where the row-normalized gradient stack has rank below
/// the number of constants (singular-value threshold 1e-8); passes at <= 5%.
CheckReport check_independence(const std::string& id, const std::vector<ScalarField>& constants,
                               const std::vector<PhasePoint>& points, double threshold = 1e-8,
                               double max_deficient = 0.05);

/// Uniform points of `copies` planes in [-half, half]^(2 copies).
std::vector<PhasePoint> random_points(std::size_t n, std::size_t copies, double half,
                                      std::uint64_t seed);

struct CheckEntry {
  std::string id;
  std::function<CheckReport(std::uint64_t seed)> run;
};

/// All registered checks in report order.
const std::vector<CheckEntry>& registry();

/// Checks matching any comma-separated glob; "all" selects everything.
/// Throws Error when nothing matches.
std::vector<const CheckEntry*> select(const std::string& selector);

/// Per-check seed derived from the suite seed and the check id.
std::uint64_t check_seed(std::uint64_t suite_seed, const std::string& id);

std::vector<CheckReport> run_suite(const std::string& selector, std::uint64_t seed = 20240601);
Json suite_report(const std::vector<CheckReport>& reports, const std::string& selector,
                  std::uint64_t seed);
std::size_t failures(const std::vector<CheckReport>& reports);

}  // namespace lhdeform::verify
