#pragma once

// Adaptive Dormand-Prince 5(4) integration of non-autonomous systems with
// PI step-size control and the standard fourth-order continuous extension.

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "lhdeform/errors.hpp"
#include "lhdeform/symplectic.hpp"

namespace lhdeform {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 100000;

  /// Throws Error on nonpositive tolerances, step bound or step budget.
  void validate() const;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

class IntegrationError : public Error {
 public:
  enum class Reason { step_limit, domain_exit, step_underflow };

  IntegrationError(Reason reason, const std::string& what, double last_time,
                   std::vector<double> last_state)
      : Error(what), reason_(reason), last_time_(last_time), last_state_(std::move(last_state)) {}

  Reason reason() const noexcept { return reason_; }
  double last_time() const noexcept { return last_time_; }
  const std::vector<double>& last_state() const noexcept { return last_state_; }

 private:
  Reason reason_;
  double last_time_;
  std::vector<double> last_state_;
};

/// Accepted steps of an integration plus the dense-output polynomials
/// between them. Immutable once built.
class Trajectory {
 public:
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<PhasePoint>& states() const noexcept { return states_; }
  const IntegrationStats& stats() const noexcept { return stats_; }
  std::size_t dim() const noexcept { return dim_; }
  double t0() const { return times_.front(); }
  double t1() const { return times_.back(); }
  const PhasePoint& final_state() const { return states_.back(); }

  /// Dense output at t; exact at stored nodes. Throws RangeError outside [t0, t1].
  PhasePoint sample(double t) const;

 private:
  friend Trajectory integrate(const VectorField&, const PhasePoint&, double, double,
                              const IntegratorConfig&);
  std::size_t dim_ = 0;
  std::vector<double> times_;
  std::vector<PhasePoint> states_;
  // Five coefficient vectors of length dim_ per step.
  std::vector<double> dense_;
  IntegrationStats stats_;
};

/// Integrates dx/dt = field(t, x) from t0 to t1 > t0.
/// Domain errors raised by the field shrink the step; when the step can no
/// longer shrink, or the step budget runs out, IntegrationError is thrown.
Trajectory integrate(const VectorField& field, const PhasePoint& x0, double t0, double t1,
                     const IntegratorConfig& cfg = {});

inline PhasePoint sample(const Trajectory& traj, double t) { return traj.sample(t); }

/// Rows of a trajectory CSV file.
struct TrajectoryTable {
  std::vector<std::string> header;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
};

/// Header t,x1,y1[,x2,y2,x3,y3]; 17 significant digits.
void write_csv(std::ostream& os, const Trajectory& traj);
void write_csv(std::ostream& os, const TrajectoryTable& table);
TrajectoryTable read_csv(std::istream& is);
TrajectoryTable to_table(const Trajectory& traj);
std::vector<std::string> csv_header(std::size_t copies);

}  // namespace lhdeform
