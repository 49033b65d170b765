#pragma once

// Named systems, their constants of motion and the end-to-end superposition
// experiment, shared by the verification suite and the command line.

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lhdeform/bernoulli.hpp"
#include "lhdeform/ode.hpp"

namespace lhdeform {

/// A system and its parameters. Bernoulli systems read s, a1, a2; the others
/// read coefficients. z is ignored by undeformed systems.
struct FlowSpec {
  std::string system = "h4";
  double z = 0.0;
  double s = 3.0;
  H4Coefficients coefficients;
  CoefficientSpec a1, a2;

  bernoulli::Params bernoulli_params() const { return {s, a1, a2, z}; }
};

/// h4, h4-deformed, b2, b2-deformed, minimal-deformed, bernoulli,
/// bernoulli-deformed, h4-prolonged, h4-deformed-prolonged,
/// bernoulli-prolonged, bernoulli-deformed-prolonged.
const std::vector<std::string>& system_names();
bool is_known_system(const std::string& system);
std::size_t system_copies(const std::string& system);
bool is_polar(const std::string& system);
bool is_deformed(const std::string& system);

/// Throws Error for unknown systems or inconsistent parameters
/// (b1 nonzero on a book system, bad s).
void validate(const FlowSpec& spec);
VectorField make_flow(const FlowSpec& spec);

/// Constants reported for a three-copy system.
std::vector<std::string> constant_names(const FlowSpec& spec);
/// Evaluates a named constant (including S12, S13, S23 on h4 systems).
double eval_constant(const FlowSpec& spec, const std::string& name, const PhasePoint& P);

/// max |F(t) - F(t0)| / max(|F(t0)|, 1) over the given states.
double relative_drift(const std::vector<double>& values);

/// Three-copy systems that carry a superposition rule.
bool has_superposition(const std::string& system);

struct ReconstructionSample {
  double t = 0.0;
  PhasePoint integrated;
  std::optional<PhasePoint> reconstructed;
  double error = 0.0;
  std::string failure;
  bool ambiguous = false;
};

struct Reconstruction {
  Branch branch = Branch::plus;
  double k1 = 0.0;
  double k = 0.0;
  std::vector<ReconstructionSample> samples;
  double max_error = 0.0;
  std::size_t failures = 0;
  std::size_t ambiguous = 0;
};

/// Reconstructs copy 1 from copies 2 and 3 at `samples` uniform times of the
/// trajectory. Constants come from the initial state; without an explicit
/// branch it is calibrated at t0 and then held fixed.
Reconstruction reconstruct(const FlowSpec& spec, const Trajectory& traj, std::optional<Branch> branch,
                           std::size_t samples);

/// Header t,x1,y1,x1_rec,y1_rec,error; failed samples carry nan in the last
/// three columns. 17 significant digits.
void write_csv(std::ostream& os, const Reconstruction& rec);

struct ReconstructionTable {
  std::vector<double> times;
  std::vector<std::array<double, 5>> rows;  // x1, y1, x1_rec, y1_rec, error
};
ReconstructionTable read_reconstruction_csv(std::istream& is);

/// The rule itself for a three-copy state: copy 1 from copies 2 and 3.
PhasePoint superpose_state(const FlowSpec& spec, const PhasePoint& P, double k1, double k,
                           Branch branch);

/// Uniform grid of n >= 2 times covering [t0, t1].
std::vector<double> uniform_times(double t0, double t1, std::size_t n);

}  // namespace lhdeform
