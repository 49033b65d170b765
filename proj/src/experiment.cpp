#include "lhdeform/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "lhdeform/twist.hpp"

namespace lhdeform {

namespace {

double effective_z(const FlowSpec& spec) { return is_deformed(spec.system) ? spec.z : 0.0; }

PhasePoint plane_image(const FlowSpec& spec, const PhasePoint& P) {
  return is_polar(spec.system) ? bernoulli::polar_to_plane(P, spec.s) : P;
}

void require_three(const std::string& system) {
  if (system_copies(system) != 3)
    throw Error("system '" + system + "' has one copy; constants need a three-copy system");
}

}  // namespace

const std::vector<std::string>& system_names() {
  static const std::vector<std::string> names{
      "h4",           "h4-deformed",           "b2",
      "b2-deformed",  "minimal-deformed",      "bernoulli",
      "bernoulli-deformed", "h4-prolonged",    "h4-deformed-prolonged",
      "bernoulli-prolonged", "bernoulli-deformed-prolonged"};
  return names;
}

bool is_known_system(const std::string& system) {
  const auto& n = system_names();
  return std::find(n.begin(), n.end(), system) != n.end();
}

std::size_t system_copies(const std::string& system) {
  if (!is_known_system(system)) throw Error("unknown system '" + system + "'");
  return system.ends_with("-prolonged") ? 3 : 1;
}

bool is_polar(const std::string& system) { return system.starts_with("bernoulli"); }

bool is_deformed(const std::string& system) { return system.find("deformed") != std::string::npos; }

void validate(const FlowSpec& spec) {
  if (!is_known_system(spec.system)) throw Error("unknown system '" + spec.system + "'");
  if (!std::isfinite(spec.z)) throw Error("z must be finite");
  if (is_polar(spec.system)) {
    spec.bernoulli_params().validate();
  } else if (spec.system.starts_with("b2") && !spec.coefficients.b1.empty()) {
    throw Error("book systems require b1 to be identically zero (empty term list)");
  }
}

VectorField make_flow(const FlowSpec& spec) {
  validate(spec);
  const std::string& s = spec.system;
  const double z = effective_z(spec);
  if (s == "h4" || s == "b2") return h4::vector_field(spec.coefficients);
  if (s == "h4-deformed" || s == "b2-deformed") return deformed::vector_field(spec.coefficients, z);
  if (s == "minimal-deformed") return twist::minimal_field(spec.coefficients, z);
  if (s == "h4-prolonged") return h4::prolonged_field(spec.coefficients);
  if (s == "h4-deformed-prolonged") return deformed::prolonged_field(spec.coefficients, z);
  bernoulli::Params p = spec.bernoulli_params();
  p.z = z;
  if (s == "bernoulli" || s == "bernoulli-deformed") return bernoulli::vector_field(p);
  return bernoulli::prolonged_field(p);
}

std::vector<std::string> constant_names(const FlowSpec& spec) {
  require_three(spec.system);
  const bool zero = effective_z(spec) == 0.0;
  if (is_polar(spec.system)) {
    if (zero) return {"F2", "F2R", "F3"};
    return {"Fz2", "Fz2R", "Fz3"};
  }
  if (zero) return {"F2", "F13", "F23", "F3"};
  return {"F2", "F13", "F3"};
}

double eval_constant(const FlowSpec& spec, const std::string& name, const PhasePoint& P) {
  require_three(spec.system);
  if (P.copies() != 3) throw Error("constants need a three-copy state");
  const double z = effective_z(spec);
  if (is_polar(spec.system)) {
    bernoulli::Params p = spec.bernoulli_params();
    p.z = z;
    if (name == "F2") return bernoulli::constant(P, p, bernoulli::Constant::F2);
    if (name == "F2R") return bernoulli::constant(P, p, bernoulli::Constant::F2_right);
    if (name == "F3") return bernoulli::constant(P, p, bernoulli::Constant::F3);
    if (name == "Fz2") return bernoulli::constant(P, p, bernoulli::Constant::Fz2);
    const PhasePoint X = bernoulli::polar_to_plane(P, spec.s);
    if (name == "Fz2R") return deformed::fz2_right(X, z);
    if (name == "Fz3") return deformed::fz3(X, z);
    throw Error("unknown bernoulli constant '" + name + "'");
  }
  if (name == "F2") return deformed::fz2(P, z);
  if (name == "F13") return deformed::fz2_right(P, z);
  if (name == "F3") return deformed::fz3(P, z);
  if (name == "F23") {
    if (z != 0.0) throw Error("F23 has no deformed counterpart");
    return h4::f2_perm(P.copy(0), P.copy(1), P.copy(2), h4::Permuted::F23);
  }
  const auto perm = deformed::perm_candidates(P, z);
  if (name == "S12") return perm[0];
  if (name == "S13") return perm[1];
  if (name == "S23") return perm[2];
  throw Error("unknown constant '" + name + "'");
}

double relative_drift(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double d = 0.0;
  for (double v : values) d = std::max(d, std::abs(v - values.front()));
  return d / std::max(std::abs(values.front()), 1.0);
}

bool has_superposition(const std::string& system) {
  return is_known_system(system) && system_copies(system) == 3;
}

PhasePoint superpose_state(const FlowSpec& spec, const PhasePoint& P, double k1, double k,
                           Branch branch) {
  const SuperpositionConstants sc{k1, k, 0.0, branch};
  const double z = effective_z(spec);
  if (is_polar(spec.system)) {
    bernoulli::Params p = spec.bernoulli_params();
    p.z = z;
    return bernoulli::superpose(P.copy(1), P.copy(2), sc, p);
  }
  return deformed::superpose(P.copy(1), P.copy(2), sc, z);
}

std::vector<double> uniform_times(double t0, double t1, std::size_t n) {
  if (n < 2) throw Error("need at least two sample times");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i)
    t[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
  t.back() = t1;
  return t;
}

Reconstruction reconstruct(const FlowSpec& spec, const Trajectory& traj, std::optional<Branch> branch,
                           std::size_t samples) {
  if (!has_superposition(spec.system))
    throw Error("system '" + spec.system + "' has no superposition rule");
  const double z = effective_z(spec);
  const PhasePoint P0 = traj.states().front();
  const PhasePoint X0 = plane_image(spec, P0);
  Reconstruction rec;
  rec.k1 = deformed::fz2(X0, z);
  rec.k = deformed::fz3(X0, z);
  rec.branch = branch ? *branch
                      : calibrate_branch(
                            [&](Branch b) { return superpose_state(spec, P0, rec.k1, rec.k, b); },
                            P0.copy(0));
  for (double t : uniform_times(traj.t0(), traj.t1(), samples)) {
    ReconstructionSample s;
    s.t = t;
    const PhasePoint P = traj.sample(t);
    s.integrated = P.copy(0);
    try {
      const double k3 = deformed::fz2_right(plane_image(spec, P), z);
      s.ambiguous = h4::branch_root(rec.k1, rec.k, k3) < kBranchAmbiguity;
      const PhasePoint r = superpose_state(spec, P, rec.k1, rec.k, rec.branch);
      s.error = std::max(std::abs(r[0] - s.integrated[0]), std::abs(r[1] - s.integrated[1]));
      s.reconstructed = r;
    } catch (const Error& e) {
      s.failure = e.what();
      s.error = std::numeric_limits<double>::infinity();
      ++rec.failures;
    }
    if (s.ambiguous) ++rec.ambiguous;
    rec.max_error = std::max(rec.max_error, s.error);
    rec.samples.push_back(std::move(s));
  }
  return rec;
}

void write_csv(std::ostream& os, const Reconstruction& rec) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  os << "t,x1,y1,x1_rec,y1_rec,error\n" << std::setprecision(17);
  for (const auto& s : rec.samples) {
    const bool ok = s.reconstructed.has_value();
    os << s.t << ',' << s.integrated[0] << ',' << s.integrated[1] << ',' << (ok ? (*s.reconstructed)[0] : nan)
       << ',' << (ok ? (*s.reconstructed)[1] : nan) << ',' << (ok ? s.error : nan) << '\n';
  }
}

ReconstructionTable read_reconstruction_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t,x1,y1,x1_rec,y1_rec,error")
    throw Error("reconstruction CSV header must be t,x1,y1,x1_rec,y1_rec,error");
  ReconstructionTable table;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      try {
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        used = 0;
      }
      if (cell.empty() || used != cell.size())
        throw Error("reconstruction CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
    }
    if (row.size() != 6) throw Error("reconstruction CSV line " + std::to_string(lineno) + ": expected 6 columns");
    table.times.push_back(row[0]);
    table.rows.push_back({row[1], row[2], row[3], row[4], row[5]});
  }
  return table;
}

}  // namespace lhdeform
