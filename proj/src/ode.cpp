#include "lhdeform/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace lhdeform {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI controller constants.
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kFacMin = 0.2;   // smallest ratio h_new / h
constexpr double kFacMax = 10.0;  // largest ratio h_new / h

using Vec = std::vector<double>;

class Stepper {
 public:
  Stepper(const VectorField& f, std::size_t n) : f_(f), n_(n) {
    for (auto* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &tmp, &y1}) v->assign(n, 0.0);
  }

  void eval(double t, const Vec& y, Vec& out) {
    ++evaluations;
    f_.eval(t, y, out);
    for (double v : out) {
      if (!std::isfinite(v)) throw DomainError("vector field returned a non-finite value", y);
    }
  }

  // One trial step from (t, y) with k1 = f(t, y) already set. Returns the
  // scaled error norm; y1 and k7 hold the proposed state and its slope.
  double step(double t, const Vec& y, double h, double atol, double rtol) {
    for (std::size_t i = 0; i < n_; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    eval(t + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < n_; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    eval(t + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < n_; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    eval(t + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < n_; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    eval(t + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < n_; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    eval(t + h, tmp, k6);
    for (std::size_t i = 0; i < n_; ++i)
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    eval(t + h, y1, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sk = atol + rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
      err += (e / sk) * (e / sk);
    }
    return std::sqrt(err / static_cast<double>(n_));
  }

  void dense(const Vec& y, double h, std::vector<double>& out) const {
    const std::size_t base = out.size();
    out.resize(base + 5 * n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double ydiff = y1[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      out[base + i] = y[i];
      out[base + n_ + i] = ydiff;
      out[base + 2 * n_ + i] = bspl;
      out[base + 3 * n_ + i] = ydiff - h * k7[i] - bspl;
      out[base + 4 * n_ + i] =
          h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
  }

  Vec k1, k2, k3, k4, k5, k6, k7, tmp, y1;
  long evaluations = 0;

 private:
  const VectorField& f_;
  std::size_t n_;
};

double initial_step(Stepper& s, double t0, const Vec& y0, double hmax, double atol, double rtol) {
  const std::size_t n = y0.size();
  double dnf = 0.0, dny = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = atol + rtol * std::abs(y0[i]);
    dnf += (s.k1[i] / sk) * (s.k1[i] / sk);
    dny += (y0[i] / sk) * (y0[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, hmax);
  Vec y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h * s.k1[i];
  try {
    s.eval(t0 + h, y1, f1);
  } catch (const DomainError&) {
    return std::min(1e-6, hmax);
  }
  double der2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = atol + rtol * std::abs(y0[i]);
    der2 += ((f1[i] - s.k1[i]) / sk) * ((f1[i] - s.k1[i]) / sk);
  }
  der2 = std::sqrt(der2) / h;
  const double der12 = std::max(der2, std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
  return std::min({100.0 * h, h1, hmax});
}

std::string format_state(double t, const Vec& y) {
  std::ostringstream os;
  os.precision(17);
  os << "t=" << t << " state=(";
  for (std::size_t i = 0; i < y.size(); ++i) os << (i ? ", " : "") << y[i];
  os << ')';
  return os.str();
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw Error("integrator tolerances must be positive");
  if (!(max_step > 0.0)) throw Error("integrator max_step must be positive");
  if (max_steps <= 0) throw Error("integrator max_steps must be positive");
}

Trajectory integrate(const VectorField& field, const PhasePoint& x0, double t0, double t1,
                     const IntegratorConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0))
    throw Error("integration span must satisfy t1 > t0");

  const std::size_t n = x0.dim();
  Stepper s(field, n);
  Vec y(x0.values());
  double t = t0;

  Trajectory traj;
  traj.dim_ = n;
  traj.times_.push_back(t0);
  traj.states_.push_back(x0);

  try {
    s.eval(t, y, s.k1);
  } catch (const DomainError& e) {
    throw IntegrationError(IntegrationError::Reason::domain_exit,
                           std::string("initial point outside the field domain: ") + e.what(), t, y);
  }

  const double hmax = std::min(cfg.max_step, t1 - t0);
  double h = initial_step(s, t, y, hmax, cfg.abs_tol, cfg.rel_tol);
  double facold = 1e-4;
  bool last_rejected = false;
  std::string last_domain_issue;

  while (t < t1) {
    if (traj.stats_.accepted + traj.stats_.rejected >= cfg.max_steps) {
      traj.stats_.evaluations = s.evaluations;
      throw IntegrationError(IntegrationError::Reason::step_limit,
                             "step budget exhausted at " + format_state(t, y), t, y);
    }
    const double hmin = 1e-14 * std::max(1.0, std::abs(t));
    if (h < hmin) {
      const auto reason = last_domain_issue.empty() ? IntegrationError::Reason::step_underflow
                                                    : IntegrationError::Reason::domain_exit;
      std::string msg = last_domain_issue.empty() ? "step size underflow at "
                                                  : "domain exit (" + last_domain_issue + ") near ";
      throw IntegrationError(reason, msg + format_state(t, y), t, y);
    }
    bool final_step = false;
    if (t + h >= t1) {
      h = t1 - t;
      final_step = true;
    }

    double err;
    try {
      err = s.step(t, y, h, cfg.abs_tol, cfg.rel_tol);
      last_domain_issue.clear();
    } catch (const DomainError& e) {
      last_domain_issue = e.what();
      ++traj.stats_.rejected;
      h *= 0.5;
      last_rejected = true;
      continue;
    }

    const double fac11 = std::pow(err, kExpo);
    double fac = fac11 / std::pow(facold, kBeta);
    fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac / kSafety));
    double hnew = h / fac;

    if (err <= 1.0) {
      facold = std::max(err, 1e-4);
      ++traj.stats_.accepted;
      s.dense(y, h, traj.dense_);
      y = s.y1;
      s.k1 = s.k7;
      t = final_step ? t1 : t + h;
      traj.times_.push_back(t);
      traj.states_.emplace_back(y);
      hnew = std::min(hnew, hmax);
      if (last_rejected) hnew = std::min(hnew, h);
      last_rejected = false;
      h = hnew;
    } else {
      hnew = h / std::min(1.0 / kFacMin, fac11 / kSafety);
      ++traj.stats_.rejected;
      last_rejected = true;
      h = hnew;
    }
  }
  traj.stats_.evaluations = s.evaluations;
  return traj;
}

PhasePoint Trajectory::sample(double t) const {
  if (!(t >= times_.front() && t <= times_.back())) {
    std::ostringstream os;
    os.precision(17);
    os << "sample time " << t << " outside [" << times_.front() << ", " << times_.back() << "]";
    throw RangeError(os.str());
  }
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const auto idx = static_cast<std::size_t>(it - times_.begin());
  if (*it == t) return states_[idx];
  const std::size_t step = idx - 1;
  const double h = times_[idx] - times_[step];
  const double theta = (t - times_[step]) / h;
  const double theta1 = 1.0 - theta;
  const double* r = dense_.data() + step * 5 * dim_;
  std::vector<double> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    out[i] = r[i] + theta * (r[dim_ + i] +
                             theta1 * (r[2 * dim_ + i] + theta * (r[3 * dim_ + i] + theta1 * r[4 * dim_ + i])));
  }
  return PhasePoint(std::move(out));
}

std::vector<std::string> csv_header(std::size_t copies) {
  std::vector<std::string> h{"t"};
  for (std::size_t j = 1; j <= copies; ++j) {
    h.push_back("x" + std::to_string(j));
    h.push_back("y" + std::to_string(j));
  }
  return h;
}

TrajectoryTable to_table(const Trajectory& traj) {
  TrajectoryTable table;
  table.header = csv_header(traj.dim() / 2);
  table.times = traj.times();
  for (const auto& s : traj.states()) table.states.push_back(s.values());
  return table;
}

void write_csv(std::ostream& os, const TrajectoryTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
  os << '\n';
  char buf[32];
  for (std::size_t r = 0; r < table.times.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17g", table.times[r]);
    os << buf;
    for (double v : table.states[r]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << ',' << buf;
    }
    os << '\n';
  }
}

void write_csv(std::ostream& os, const Trajectory& traj) { write_csv(os, to_table(traj)); }

TrajectoryTable read_csv(std::istream& is) {
  TrajectoryTable table;
  std::string line;
  if (!std::getline(is, line)) throw Error("trajectory CSV is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  const std::size_t cols = table.header.size();
  if (cols < 3 || cols % 2 == 0 || table.header.front() != "t" || table.header != csv_header((cols - 1) / 2))
    throw Error("trajectory CSV header must be t,x1,y1[,x2,y2,x3,y3]");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size() || cell.empty())
        throw Error("trajectory CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != cols)
      throw Error("trajectory CSV line " + std::to_string(lineno) + ": expected " +
                  std::to_string(cols) + " columns");
    if (!table.times.empty() && !(row[0] > table.times.back()))
      throw Error("trajectory CSV line " + std::to_string(lineno) + ": times must increase");
    table.times.push_back(row[0]);
    table.states.emplace_back(row.begin() + 1, row.end());
  }
  return table;
}

}  // namespace lhdeform
