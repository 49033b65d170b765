#include "lhdeform/verify.hpp"

#include <fnmatch.h>

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "lhdeform/parallel.hpp"
#include "lhdeform/twist.hpp"

namespace lhdeform::verify {

namespace {

using Vec = std::vector<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxWitnesses = 5;

double scaled_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double max_scaled_diff(const Vec& a, const Vec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, scaled_diff(a[i], b[i]));
  return d;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json coefficient_json(const CoefficientSpec& spec) {
  Json terms = Json::array();
  for (const auto& t : spec.terms()) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          Json j;
          if constexpr (std::is_same_v<T, term::Constant>) {
            j = {{"type", "constant"}, {"c", v.c}};
          } else if constexpr (std::is_same_v<T, term::Monomial>) {
            j = {{"type", "monomial"}, {"c", v.c}, {"power", v.power}};
          } else if constexpr (std::is_same_v<T, term::Sinusoid>) {
            j = {{"type", "sinusoid"}, {"c", v.c}, {"omega", v.omega}, {"phase", v.phase}};
          } else {
            j = {{"type", "exponential"}, {"c", v.c}, {"rate", v.rate}};
          }
          terms.push_back(std::move(j));
        },
        t);
  }
  return terms;
}

Json flow_json(const FlowSpec& f) {
  Json j;
  if (is_polar(f.system)) {
    j["s"] = f.s;
    j["a1"] = coefficient_json(f.a1);
    j["a2"] = coefficient_json(f.a2);
  } else {
    j["b1"] = coefficient_json(f.coefficients.b1);
    j["b2"] = coefficient_json(f.coefficients.b2);
    j["b3"] = coefficient_json(f.coefficients.b3);
  }
  return j;
}

CheckReport finish(std::string id, double measured, double tol, bool lower_bound,
                   std::vector<Witness> witnesses, Json meta) {
  CheckReport r;
  r.check_id = std::move(id);
  r.measured = measured;
  r.tolerance = tol;
  r.passed = lower_bound ? measured >= tol : measured <= tol;
  meta["comparison"] = lower_bound ? "ge" : "le";
  r.metadata = std::move(meta);
  r.witnesses = std::move(witnesses);
  if (!r.passed && r.witnesses.empty()) r.witnesses.push_back({{}, measured});
  return r;
}

// Residual per input, evaluated in parallel; evaluation errors count as +inf.
CheckReport pointwise(std::string id, const std::vector<Vec>& inputs,
                      const std::function<double(const Vec&)>& residual, double tol, Json meta) {
  const std::vector<double> res = par::map<double>(inputs.size(), [&](std::size_t i) {
    try {
      return residual(inputs[i]);
    } catch (const Error&) {
      return kInf;
    }
  });
  const par::Worst w = par::serial::worst(res.size(), [&](std::size_t i) { return res[i]; });
  std::vector<Witness> witnesses;
  for (std::size_t i = 0; i < res.size() && witnesses.size() < kMaxWitnesses; ++i)
    if (!(res[i] <= tol)) witnesses.push_back({inputs[i], res[i]});
  meta["samples"] = inputs.size();
  return finish(std::move(id), res.empty() ? 0.0 : w.value, tol, false, std::move(witnesses),
                std::move(meta));
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  Vec plane(std::size_t copies, double half) {
    Vec v(2 * copies);
    for (double& c : v) c = uniform(-half, half);
    return v;
  }
  // (r, theta) per copy with theta (s-1) in [0.3, pi - 0.3].
  Vec polar(std::size_t copies, double s) {
    Vec v(2 * copies);
    for (std::size_t j = 0; j < copies; ++j) {
      v[2 * j] = uniform(0.5, 2.0);
      v[2 * j + 1] = uniform(0.3, std::numbers::pi - 0.3) / (s - 1.0);
    }
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

std::vector<Vec> plane_inputs(std::size_t n, std::size_t copies, double half, std::uint64_t seed) {
  Sampler s(seed);
  std::vector<Vec> out(n);
  for (auto& v : out) v = s.plane(copies, half);
  return out;
}

Json box_json(double half) { return {{"type", "box"}, {"half_width", half}}; }

Json polar_box_json() {
  return {{"type", "polar"}, {"r", {0.5, 2.0}}, {"phi", {0.3, std::numbers::pi - 0.3}}};
}


// ---------------------------------------------------------------- brackets

struct Relation {
  std::string name;
  ScalarField f, g;
  std::function<double(Coords)> rhs;
};

struct Table {
  SymplecticWeight weight = SymplecticWeight::canonical();
  std::vector<Relation> relations;
};

// Deformed relations among (h1, h2, h3, h0).
std::vector<Relation> deformed_relations(const std::array<ScalarField, 4>& h, double z,
                                         const std::string& tag) {
  const ScalarField h1 = h[0], h2 = h[1], h0 = h[3];
  return {
      {"{h1,h2}" + tag, h[0], h[1], [h2, h0, z](Coords p) { return std::exp(-z * h2(p)) * h0(p); }},
      {"{h1,h3}" + tag, h[0], h[2], [h1](Coords p) { return -h1(p); }},
      {"{h2,h3}" + tag, h[1], h[2],
       [h2, z](Coords p) {
         const double v = h2(p);
         return v * deformed::phi(-z * v);
       }},
  };
}

std::vector<Relation> undeformed_relations(const std::array<ScalarField, 4>& h) {
  const ScalarField h1 = h[0], h2 = h[1], h0 = h[3];
  return {
      {"{h1,h2}", h[0], h[1], [h0](Coords p) { return h0(p); }},
      {"{h1,h3}", h[0], h[2], [h1](Coords p) { return -h1(p); }},
      {"{h2,h3}", h[1], h[2], [h2](Coords p) { return h2(p); }},
  };
}

std::array<ScalarField, 4> h4_set() {
  return {h4::hamiltonian(0), h4::hamiltonian(1), h4::hamiltonian(2), h4::hamiltonian(3)};
}
std::array<ScalarField, 4> hz_set(double z) {
  return {deformed::hamiltonian(0, z), deformed::hamiltonian(1, z), deformed::hamiltonian(2, z),
          deformed::hamiltonian(3, z)};
}

Table bernoulli_table(double s, double z) {
  Table t;
  t.weight = bernoulli::weight(s);
  const ScalarField h1 = bernoulli::hamiltonian(0, s, z), h2 = bernoulli::hamiltonian(1, s, z);
  if (z == 0.0) {
    t.relations.push_back({"{hb1,hb2}", h1, h2, [h2, s](Coords p) { return -(s - 1.0) * h2(p); }});
  } else {
    t.relations.push_back({"{hbz1,hbz2}", h1, h2, [h2, s, z](Coords p) {
                             const double v = h2(p);
                             return -(s - 1.0) * v * deformed::phi(-z * v);
                           }});
  }
  return t;
}

double table_residual(const Table& t, Coords p, bool corrupt) {
  double worst = 0.0;
  for (std::size_t i = 0; i < t.relations.size(); ++i) {
    const Relation& r = t.relations[i];
    double expected = r.rhs(p);
    if (corrupt && i == 0) expected = -expected;
    worst = std::max(worst, scaled_diff(poisson_bracket(r.f, r.g, t.weight, p), expected));
  }
  return worst;
}

// ---------------------------------------------------------------- limits

struct Family {
  std::size_t copies = 1;
  bool polar = false;
  double order = 1.0;
  std::function<double(double z, const Vec& p)> distance;
};

double vec_dist(const Vec& a, const Vec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

template <std::size_t N>
Vec as_vec(const std::array<double, N>& a) {
  return {a.begin(), a.end()};
}

constexpr double kLimitS = 3.0;

Family family(const std::string& id) {
  const H4Coefficients c = reference_coefficients();
  Family f;
  if (id == "hz-hamiltonians") {
    f.distance = [](double z, const Vec& p) {
      return vec_dist(as_vec(deformed::hamiltonians(PhasePoint(p), z)), as_vec(h4::hamiltonians(PhasePoint(p))));
    };
  } else if (id == "hz-generators") {
    f.distance = [](double z, const Vec& p) {
      double d = 0.0;
      for (int i : {1, 3}) d = std::max(d, vec_dist(deformed::generator(i, z)(0.0, p), h4::generator(i)(0.0, p)));
      return d;
    };
  } else if (id == "hz-rhs") {
    f.distance = [c](double z, const Vec& p) {
      double d = 0.0;
      for (double t : {0.0, 0.7, 1.9})
        d = std::max(d, vec_dist(as_vec(deformed::rhs(t, PhasePoint(p), z, c)), as_vec(h4::rhs(t, PhasePoint(p), c))));
      return d;
    };
  } else if (id == "first-order") {
    f.order = 2.0;
    f.distance = [c](double z, const Vec& p) {
      double d = 0.0;
      for (double t : {0.0, 0.7, 1.9})
        d = std::max(d, vec_dist(as_vec(deformed::rhs(t, PhasePoint(p), z, c)),
                                 as_vec(deformed::rhs_first_order(t, PhasePoint(p), z, c))));
      return d;
    };
  } else if (id == "prolonged-hamiltonians") {
    f.copies = 3;
    f.distance = [](double z, const Vec& p) {
      const PhasePoint P(p);
      std::array<double, 4> sum{0.0, 0.0, 0.0, 0.0};
      for (std::size_t j = 0; j < 3; ++j) {
        const auto h = h4::hamiltonians(P.copy(j));
        for (std::size_t i = 0; i < 4; ++i) sum[i] += h[i];
      }
      return vec_dist(as_vec(deformed::prolonged_hamiltonians(P, z)), as_vec(sum));
    };
  } else if (id == "prolonged-rhs") {
    f.copies = 3;
    f.distance = [c](double z, const Vec& p) {
      double d = 0.0;
      for (double t : {0.0, 0.7, 1.9})
        d = std::max(d, vec_dist(as_vec(deformed::prolonged_rhs(t, PhasePoint(p), z, c)),
                                 h4::prolonged_field(c)(t, p)));
      return d;
    };
  } else if (id == "fz2" || id == "fz2-right" || id == "fz3" || id == "perm-candidates") {
    f.copies = 3;
    f.distance = [id](double z, const Vec& p) {
      const PhasePoint P(p);
      const PhasePoint a = P.copy(0), b = P.copy(1), e = P.copy(2);
      if (id == "fz2") return std::abs(deformed::fz2(P, z) - h4::f2(a, b));
      if (id == "fz2-right") return std::abs(deformed::fz2_right(P, z) - h4::f2_perm(a, b, e, h4::Permuted::F13));
      if (id == "fz3") return std::abs(deformed::fz3(P, z) - h4::f3(a, b, e));
      return vec_dist(as_vec(deformed::perm_candidates(P, z)), {h4::f2(b, a), h4::f2(e, b), h4::f2(a, e)});
    };
  } else if (id == "twist-vars") {
    f.distance = [](double z, const Vec& p) { return vec_dist(twist::twist_vars(PhasePoint(p), z).values(), p); };
  } else if (id == "twisted-map") {
    f.copies = 2;
    f.distance = [](double z, const Vec& p) {
      return vec_dist(twist::twisted_two_copy_map(PhasePoint(p), z).values(), p);
    };
  } else if (id == "twisted-hamiltonians") {
    f.copies = 2;
    f.distance = [](double z, const Vec& p) {
      const PhasePoint P(p);
      const auto a = h4::hamiltonians(P.copy(0)), b = h4::hamiltonians(P.copy(1));
      return vec_dist(as_vec(twist::twisted_h2_functions(P, z)), {a[0] + b[0], a[1] + b[1], a[2] + b[2], 2.0});
    };
  } else if (id == "minimal-rhs") {
    f.distance = [c](double z, const Vec& p) {
      double d = 0.0;
      for (double t : {0.5, 1.0, 1.9})
        d = std::max(d, vec_dist(as_vec(twist::minimal_rhs(t, PhasePoint(p), z, c)), as_vec(h4::rhs(t, PhasePoint(p), c))));
      return d;
    };
  } else if (id == "bernoulli-hamiltonians") {
    f.polar = true;
    f.distance = [](double z, const Vec& p) {
      return vec_dist(as_vec(bernoulli::hamiltonians(PhasePoint(p), kLimitS, z)),
                      as_vec(bernoulli::hamiltonians(PhasePoint(p), kLimitS, 0.0)));
    };
  } else if (id == "bernoulli-rhs") {
    f.polar = true;
    f.distance = [](double z, const Vec& p) {
      const bernoulli::Params prm{kLimitS, CoefficientSpec::constant(0.3),
                                  CoefficientSpec({term::Sinusoid{1.0, 1.0, 0.0}}), z};
      double d = 0.0;
      for (double t : {0.0, 0.7, 1.9})
        d = std::max(d, vec_dist(as_vec(bernoulli::deformed_rhs(t, PhasePoint(p), prm)),
                                 as_vec(bernoulli::rhs(t, PhasePoint(p), prm))));
      return d;
    };
  } else if (id == "bernoulli-fz2") {
    f.polar = true;
    f.copies = 3;
    f.distance = [](double z, const Vec& p) {
      const bernoulli::Params prm{kLimitS, {}, {}, z};
      return std::abs(bernoulli::constant(PhasePoint(p), prm, bernoulli::Constant::Fz2) -
                      bernoulli::constant(PhasePoint(p), prm, bernoulli::Constant::F2));
    };
  } else if (id == "superposition") {
    f.copies = 3;
    f.distance = [](double z, const Vec& p) {
      const PhasePoint P(p);
      const double k1 = h4::f2(P.copy(0), P.copy(1)), k = h4::f3(P.copy(0), P.copy(1), P.copy(2));
      const Branch b = calibrate_branch(
          [&](Branch br) { return h4::superpose(P.copy(1), P.copy(2), {k1, k, 0.0, br}); }, P.copy(0));
      const PhasePoint u = h4::superpose(P.copy(1), P.copy(2), {k1, k, 0.0, b});
      const PhasePoint d = deformed::superpose(P.copy(1), P.copy(2), {k1, k, 0.0, b}, z);
      return std::max(std::abs(deformed::dexp(d[0], z) - u[0]), std::abs(d[1] - u[1]));
    };
  } else {
    throw Error("unknown limit family '" + id + "'");
  }
  return f;
}

// Points for a family; superposition points avoid the rule's singular set.
std::vector<Vec> family_points(const std::string& id, const Family& f, std::uint64_t seed) {
  Sampler s(seed);
  std::vector<Vec> pts;
  while (pts.size() < 20) {
    Vec p = f.polar ? s.polar(f.copies, kLimitS) : s.plane(f.copies, 1.5);
    if (id == "superposition") {
      const PhasePoint P(p);
      const double k1 = h4::f2(P.copy(0), P.copy(1)), k = h4::f3(P.copy(0), P.copy(1), P.copy(2));
      const double k3 = h4::f2_perm(P.copy(0), P.copy(1), P.copy(2), h4::Permuted::F13);
      if (std::abs(p[3] - p[5]) < 0.2 || std::abs(p[2] - p[4]) < 0.2 ||
          h4::discriminant(k1, k, k3) < 0.5)
        continue;
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

double fit_order(const std::vector<double>& z, const std::vector<double>& d) {
  double mx = 0, my = 0;
  const double n = static_cast<double>(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    mx += std::log(z[i]) / n;
    my += std::log(d[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double dx = std::log(z[i]) - mx;
    sxy += dx * (std::log(d[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------- registry helpers

std::vector<ScalarField> all_fields() {
  std::vector<ScalarField> out;
  for (int i = 0; i < 4; ++i) out.push_back(h4::hamiltonian(i));
  out.push_back(h4::f2_field());
  out.push_back(h4::f3_field());
  out.push_back(h4::f2_perm_field(h4::Permuted::F13));
  out.push_back(h4::f2_perm_field(h4::Permuted::F23));
  for (double z : {0.5, 1.0}) {
    for (int i = 0; i < 4; ++i) out.push_back(deformed::hamiltonian(i, z));
    for (int i = 0; i < 4; ++i) out.push_back(deformed::prolonged_hamiltonian(i, z));
    for (int i = 0; i < 4; ++i) out.push_back(deformed::pair_hamiltonian(i, z, deformed::Side::left));
    for (int i = 0; i < 4; ++i) out.push_back(deformed::pair_hamiltonian(i, z, deformed::Side::right));
    out.push_back(deformed::fz2_field(z));
    out.push_back(deformed::fz2_right_field(z));
    out.push_back(deformed::fz3_field(z));
    for (int i = 0; i < 3; ++i) out.push_back(deformed::perm_candidate_field(i, z));
    for (int i = 0; i < 4; ++i) out.push_back(twist::twisted_h2_field(i, z));
  }
  return out;
}

std::vector<ScalarField> bernoulli_fields() {
  std::vector<ScalarField> out;
  for (double z : {0.0, 0.5})
    for (int i = 0; i < 2; ++i) out.push_back(bernoulli::hamiltonian(i, kLimitS, z));
  return out;
}

ScalarField combination(std::vector<ScalarField> fields, std::vector<double> weights) {
  ScalarField h;
  h.name = "combination";
  h.copies = fields.front().copies;
  h.value = [fields, weights](Coords p) {
    double v = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i) v += weights[i] * fields[i](p);
    return v;
  };
  h.gradient = [fields, weights](Coords p) {
    Vec g(p.size(), 0.0);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const Vec gi = fields[i].gradient(p);
      for (std::size_t k = 0; k < g.size(); ++k) g[k] += weights[i] * gi[k];
    }
    return g;
  };
  return h;
}

// Lie bracket relation [X, Y] = expected at p, scaled max-norm residual.
double bracket_residual(const VectorField& X, const VectorField& Y, Coords p, const Vec& expected) {
  const Vec br = lie_bracket(X, Y, 0.0, p);
  double scale = 1.0;
  for (double v : expected) scale = std::max(scale, std::abs(v));
  double d = 0.0;
  for (std::size_t i = 0; i < br.size(); ++i) d = std::max(d, std::abs(br[i] - expected[i]));
  return d / scale;
}

Vec scale_vec(Vec v, double a) {
  for (double& x : v) x *= a;
  return v;
}

CheckReport failed_integration(const std::string& id, const IntegrationError& e, Json meta) {
  meta["error"] = e.what();
  Vec input{e.last_time()};
  input.insert(input.end(), e.last_state().begin(), e.last_state().end());
  return finish(id, kInf, 0.0, false, {{input, kInf}}, std::move(meta));
}

Json initial_json(const FlowConfig& cfg) {
  return {{"initial", cfg.initial.values()},
          {"tspan", {cfg.t0, cfg.t1}},
          {"rel_tol", cfg.integrator.rel_tol},
          {"abs_tol", cfg.integrator.abs_tol}};
}

}  // namespace

// ---------------------------------------------------------------- reports

Json to_json(const CheckReport& r) {
  Json w = Json::array();
  for (const auto& x : r.witnesses) w.push_back({{"input", x.input}, {"residual", finite_or_null(x.residual)}});
  Json j;
  j["check_id"] = r.check_id;
  j["passed"] = r.passed;
  j["measured"] = finite_or_null(r.measured);
  j["tolerance"] = r.tolerance;
  j["witnesses"] = std::move(w);
  j["metadata"] = r.metadata;
  return j;
}

CheckReport report_from_json(const Json& j) {
  auto number = [](const Json& v) { return v.is_null() ? kInf : v.get<double>(); };
  CheckReport r;
  r.check_id = j.at("check_id").get<std::string>();
  r.passed = j.at("passed").get<bool>();
  r.measured = number(j.at("measured"));
  r.tolerance = j.at("tolerance").get<double>();
  for (const auto& w : j.at("witnesses"))
    r.witnesses.push_back({w.at("input").get<Vec>(), number(w.at("residual"))});
  r.metadata = j.at("metadata");
  return r;
}

// ---------------------------------------------------------------- reference data

H4Coefficients reference_coefficients() {
  return H4Coefficients{CoefficientSpec::constant(1.0), CoefficientSpec({term::Monomial{1.0, 1}}),
                        CoefficientSpec({term::Sinusoid{1.0, 1.0, 0.0}}), CoefficientSpec::zero()};
}

PhasePoint reference_initial() { return PhasePoint{-0.5, 1.0, -1.0, -0.5, -1.5, 0.5}; }

FlowConfig reference_bernoulli(double z) {
  FlowConfig cfg;
  cfg.flow.system = z == 0.0 ? "bernoulli-prolonged" : "bernoulli-deformed-prolonged";
  cfg.flow.s = 3.0;
  cfg.flow.z = z;
  // The deformed book flow blows up in finite time for b3 > 0.
  cfg.flow.a1 = CoefficientSpec::constant(z == 0.0 ? 0.3 : -0.3);
  cfg.flow.a2 = CoefficientSpec({term::Sinusoid{1.0, 1.0, 0.0}});
  cfg.initial = PhasePoint{1.0, 0.5, 0.8, 0.9, 1.2, 1.2};
  cfg.t1 = 2.0;
  return cfg;
}

FlowConfig reference_flow(const std::string& system, double z, double t1) {
  if (is_polar(system)) {
    FlowConfig cfg = reference_bernoulli(z);
    cfg.flow.system = system;
    cfg.t1 = t1;
    return cfg;
  }
  FlowConfig cfg;
  cfg.flow.system = system;
  cfg.flow.z = z;
  cfg.flow.coefficients = reference_coefficients();
  cfg.initial = reference_initial();
  cfg.t1 = t1;
  return cfg;
}

std::vector<PhasePoint> random_points(std::size_t n, std::size_t copies, double half,
                                      std::uint64_t seed) {
  std::vector<PhasePoint> out;
  for (auto& v : plane_inputs(n, copies, half, seed)) out.emplace_back(std::move(v));
  return out;
}

// ---------------------------------------------------------------- checks

CheckReport check_conservation(const std::string& system_id, const std::string& constant_id,
                               const FlowConfig& cfg) {
  FlowConfig c = cfg;
  c.flow.system = system_id;
  const bool lower = constant_id.size() == 3 && constant_id[0] == 'S';
  const std::string id = std::string(lower ? "nonconservation." : "conservation.") + system_id + "." + constant_id;
  Json meta{{"system", system_id}, {"constant", constant_id}, {"z", c.flow.z}, {"seed", c.seed}};
  meta["coefficients"] = flow_json(c.flow);
  meta.update(initial_json(c));
  meta["drift"] = "max|F(t) - F(t0)| / max(|F(t0)|, 1)";
  Trajectory traj;
  try {
    traj = integrate(make_flow(c.flow), c.initial, c.t0, c.t1, c.integrator);
  } catch (const IntegrationError& e) {
    return failed_integration(id, e, std::move(meta));
  }
  const std::vector<double> times = uniform_times(c.t0, c.t1, c.samples);
  std::vector<double> vals;
  vals.reserve(times.size());
  for (double t : times) vals.push_back(eval_constant(c.flow, constant_id, traj.sample(t)));
  const double drift = relative_drift(vals);
  meta["samples"] = times.size();
  meta["steps"] = traj.stats().accepted;
  meta["initial_value"] = vals.front();
  const double tol = lower ? 1e-3 : c.tolerance;
  std::vector<Witness> w;
  const bool ok = lower ? drift >= tol : drift <= tol;
  if (!ok) {
    std::size_t worst = 0;
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (std::abs(vals[i] - vals[0]) > std::abs(vals[worst] - vals[0])) worst = i;
    Vec input{times[worst]};
    const auto st = traj.sample(times[worst]).values();
    input.insert(input.end(), st.begin(), st.end());
    w.push_back({input, drift});
  }
  return finish(id, drift, tol, lower, std::move(w), std::move(meta));
}

const std::vector<std::string>& bracket_tables() {
  static const std::vector<std::string> t{"h4", "h4-deformed", "h4-prolonged-deformed", "b2",
                                          "b2-deformed", "bernoulli", "bernoulli-deformed", "twisted-h2"};
  return t;
}

CheckReport check_bracket_table(const std::string& table_id, std::size_t sample_count, double tol,
                                std::uint64_t seed, double z, bool corrupt) {
  Json meta{{"table", table_id}, {"seed", seed}, {"corrupted", corrupt}};
  meta["residual"] = "|{f,g} - rhs| / max(1, |rhs|), worst relation";
  const std::string id = "bracket." + table_id + (corrupt ? ".corrupted" : "");
  if (table_id == "bernoulli" || table_id == "bernoulli-deformed") {
    const double zz = table_id == "bernoulli" ? 0.0 : z;
    meta["z"] = zz;
    meta["s"] = {3.0, 0.5};
    meta["box"] = polar_box_json();
    Sampler smp(seed);
    std::vector<Vec> inputs;
    for (std::size_t i = 0; i < sample_count; ++i) {
      const double s = i % 2 == 0 ? 3.0 : 0.5;
      Vec q = smp.polar(1, s);
      inputs.push_back({s, q[0], q[1]});
    }
    const Table t3 = bernoulli_table(3.0, zz), th = bernoulli_table(0.5, zz);
    return pointwise(id, inputs,
                     [&](const Vec& v) {
                       const Vec q{v[1], v[2]};
                       return table_residual(v[0] == 3.0 ? t3 : th, q, corrupt);
                     },
                     tol, std::move(meta));
  }
  Table t;
  std::size_t copies = 1;
  double half = 2.0;
  if (table_id == "h4") {
    t.relations = undeformed_relations(h4_set());
  } else if (table_id == "h4-deformed") {
    meta["z"] = z;
    t.relations = deformed_relations(hz_set(z), z, "");
  } else if (table_id == "h4-prolonged-deformed") {
    meta["z"] = z;
    copies = 3;
    half = 1.5;
    using deformed::Side;
    std::array<ScalarField, 4> p3, left, right;
    for (int i = 0; i < 4; ++i) {
      p3[i] = deformed::prolonged_hamiltonian(i, z);
      left[i] = deformed::pair_hamiltonian(i, z, Side::left);
      right[i] = deformed::pair_hamiltonian(i, z, Side::right);
    }
    t.relations = deformed_relations(p3, z, "(3)");
    for (auto& r : deformed_relations(left, z, "(2)L")) t.relations.push_back(r);
    for (auto& r : deformed_relations(right, z, "(2)R")) t.relations.push_back(r);
  } else if (table_id == "b2") {
    const auto h = h4_set();
    t.relations = {undeformed_relations(h)[2]};
  } else if (table_id == "b2-deformed") {
    meta["z"] = z;
    t.relations = {deformed_relations(hz_set(z), z, "")[2]};
  } else if (table_id == "twisted-h2") {
    meta["z"] = 0.5;
    copies = 2;
    half = 0.9;
    std::array<ScalarField, 4> h;
    for (int i = 0; i < 4; ++i) h[i] = twist::twisted_h2_field(i, 0.5);
    t.relations = undeformed_relations(h);
  } else {
    throw Error("unknown bracket table '" + table_id + "'");
  }
  meta["box"] = box_json(half);
  Json names = Json::array();
  for (const auto& r : t.relations) names.push_back(r.name);
  meta["relations"] = std::move(names);
  const auto inputs = plane_inputs(sample_count, copies, half, seed);
  return pointwise(id, inputs, [&](const Vec& p) { return table_residual(t, p, corrupt); }, tol,
                   std::move(meta));
}

CheckReport check_superposition(const std::string& system_id, const FlowConfig& cfg) {
  FlowConfig c = cfg;
  std::string system = system_id;
  if (!system.ends_with("-prolonged")) system += "-prolonged";
  c.flow.system = system;
  const std::string id = "superposition." + system_id;
  Json meta{{"system", system}, {"z", c.flow.z}, {"seed", c.seed}};
  meta["coefficients"] = flow_json(c.flow);
  meta.update(initial_json(c));
  Trajectory traj;
  try {
    traj = integrate(make_flow(c.flow), c.initial, c.t0, c.t1, c.integrator);
  } catch (const IntegrationError& e) {
    return failed_integration(id, e, std::move(meta));
  }
  const Reconstruction rec = reconstruct(c.flow, traj, std::nullopt, c.samples);
  meta["branch"] = rec.branch == Branch::plus ? "plus" : "minus";
  meta["k1"] = rec.k1;
  meta["k"] = rec.k;
  meta["samples"] = rec.samples.size();
  meta["rule_failures"] = rec.failures;
  if (rec.ambiguous > 0) meta["warning"] = "branch ambiguity: B below 1e-10 at " + std::to_string(rec.ambiguous) + " samples";
  std::vector<Witness> w;
  for (const auto& s : rec.samples) {
    if (s.error <= c.tolerance || w.size() >= kMaxWitnesses) continue;
    Vec input{s.t, s.integrated[0], s.integrated[1]};
    w.push_back({input, s.error});
  }
  return finish(id, rec.max_error, c.tolerance, false, std::move(w), std::move(meta));
}

const std::vector<std::string>& limit_families() {
  static const std::vector<std::string> f{
      "hz-hamiltonians", "hz-generators", "hz-rhs", "first-order", "prolonged-hamiltonians",
      "prolonged-rhs", "fz2", "fz2-right", "fz3", "perm-candidates", "twist-vars", "twisted-map",
      "twisted-hamiltonians", "minimal-rhs", "bernoulli-hamiltonians", "bernoulli-rhs",
      "bernoulli-fz2", "superposition"};
  return f;
}

CheckReport check_limit(const std::string& family_id, const std::vector<double>& z_grid,
                        std::uint64_t seed, double min_order) {
  if (z_grid.size() < 2) throw Error("limit check needs at least two z values");
  for (std::size_t i = 0; i < z_grid.size(); ++i)
    if (!(z_grid[i] > 0.0) || (i > 0 && !(z_grid[i] < z_grid[i - 1])))
      throw Error("z grid must be positive and decreasing");
  const Family f = family(family_id);
  const auto pts = family_points(family_id, f, seed);
  std::vector<double> d;
  std::vector<Witness> w;
  for (double z : z_grid) {
    const par::Worst worst = par::worst(pts.size(), [&](std::size_t i) { return f.distance(z, pts[i]); });
    d.push_back(worst.value);
  }
  Json meta{{"family", family_id}, {"z_grid", z_grid}, {"distances", d}, {"seed", seed},
            {"points", pts.size()}, {"expected_order", f.order}};
  meta["box"] = f.polar ? polar_box_json() : box_json(1.5);
  double order = 0.0;
  if (std::all_of(d.begin(), d.end(), [](double v) { return v > 0.0 && std::isfinite(v); })) {
    order = fit_order(z_grid, d);
  } else {
    meta["error"] = "distance vanished or was not finite on the grid";
  }
  const double threshold = f.order == 2.0 ? min_order + 1.0 : min_order;
  if (!(order >= threshold)) w.push_back({z_grid, order});
  return finish("limit." + family_id, order, threshold, true, std::move(w), std::move(meta));
}

CheckReport check_independence(const std::string& id, const std::vector<ScalarField>& constants,
                               const std::vector<PhasePoint>& points, double threshold,
                               double max_deficient) {
  const std::size_t n = constants.size();
  std::vector<double> smallest(points.size());
  const std::size_t deficient = par::count_if(points.size(), [&](std::size_t k) {
    const Coords p = points[k];
    Eigen::MatrixXd m(n, p.size());
    for (std::size_t i = 0; i < n; ++i) {
      const Vec g = constants[i].gradient(p);
      Eigen::Map<const Eigen::RowVectorXd> row(g.data(), g.size());
      const double norm = row.norm();
      m.row(i) = norm > 0.0 ? Eigen::RowVectorXd(row / norm) : Eigen::RowVectorXd(row);
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    smallest[k] = sv.size() < static_cast<Eigen::Index>(n) ? 0.0 : sv(sv.size() - 1);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > threshold ? 1 : 0;
    return rank < n;
  });
  const double fraction = points.empty() ? 1.0 : static_cast<double>(deficient) / static_cast<double>(points.size());
  Json names = Json::array();
  for (const auto& c : constants) names.push_back(c.name);
  Json meta{{"constants", names}, {"points", points.size()}, {"deficient", deficient},
            {"singular_value_threshold", threshold},
            {"min_singular_value", *std::min_element(smallest.begin(), smallest.end())}};
  std::vector<Witness> w;
  for (std::size_t k = 0; k < points.size() && w.size() < kMaxWitnesses; ++k)
    if (!(smallest[k] > threshold)) w.push_back({points[k].values(), smallest[k]});
  return finish(id, fraction, max_deficient, false, std::move(w), std::move(meta));
}

// ---------------------------------------------------------------- registry

namespace {

std::string z_tag(double z) {
  std::ostringstream os;
  os << "z" << z;
  return os.str();
}

CheckReport check_gradients(std::uint64_t seed) {
  const auto plane = all_fields();
  const auto polar = bernoulli_fields();
  Sampler s(seed);
  std::vector<Vec> inputs;
  for (std::size_t f = 0; f < plane.size(); ++f)
    for (int i = 0; i < 100; ++i) {
      Vec v{static_cast<double>(f)};
      // Twisted fields stay clear of 1 - z x2 = 0.
      const Vec p = s.plane(plane[f].copies, plane[f].name.starts_with("th") ? 0.5 : 1.5);
      v.insert(v.end(), p.begin(), p.end());
      inputs.push_back(std::move(v));
    }
  for (std::size_t f = 0; f < polar.size(); ++f)
    for (int i = 0; i < 100; ++i) {
      Vec v{static_cast<double>(plane.size() + f)};
      const Vec p = s.polar(1, kLimitS);
      v.insert(v.end(), p.begin(), p.end());
      inputs.push_back(std::move(v));
    }
  Json names = Json::array();
  for (const auto& f : plane) names.push_back(f.name);
  for (const auto& f : polar) names.push_back(f.name);
  Json meta{{"fields", names}, {"seed", seed}, {"box", box_json(1.5)}};
  meta["residual"] = "||grad - central differences||_inf / max(1, ||grad||_inf)";
  return pointwise("gradient.all", inputs,
                   [&](const Vec& v) {
                     const auto idx = static_cast<std::size_t>(v[0]);
                     const Vec p(v.begin() + 1, v.end());
                     return gradient_error(idx < plane.size() ? plane[idx] : polar[idx - plane.size()], p);
                   },
                   1e-6, std::move(meta));
}

CheckReport check_poisson(std::uint64_t seed) {
  const double z = 0.5;
  const std::vector<ScalarField> fs{deformed::prolonged_hamiltonian(0, z), deformed::prolonged_hamiltonian(2, z),
                                    deformed::fz2_field(z), deformed::fz3_field(z), h4::f3_field()};
  const auto w = SymplecticWeight::canonical();
  const auto inputs = plane_inputs(100, 3, 1.5, seed);
  Json meta{{"z", z}, {"seed", seed}, {"box", box_json(1.5)}};
  meta["residual"] = "max(|{f,g} + {g,f}|, |{f,g} - X_g f| / max(1, |{f,g}|))";
  return pointwise("poisson.consistency", inputs,
                   [&](const Vec& p) {
                     double r = 0.0;
                     for (std::size_t i = 0; i < fs.size(); ++i)
                       for (std::size_t j = 0; j < fs.size(); ++j) {
                         if (i == j) continue;
                         const double fg = poisson_bracket(fs[i], fs[j], w, p);
                         r = std::max(r, std::abs(fg + poisson_bracket(fs[j], fs[i], w, p)) /
                                             std::max(1.0, std::abs(fg)) * 1e3);
                         const Vec xg = hamiltonian_vector_field(fs[j], w)(0.0, p);
                         const Vec df = fd_gradient(fs[i].value, p);
                         double dir = 0.0;
                         for (std::size_t k = 0; k < p.size(); ++k) dir += df[k] * xg[k];
                         r = std::max(r, scaled_diff(dir, fg));
                       }
                     return r;
                   },
                   1e-6, std::move(meta));
}

CheckReport check_involution(const std::string& id, double z, std::uint64_t seed) {
  const auto w = SymplecticWeight::canonical();
  const auto inputs = plane_inputs(100, 3, 1.5, seed);
  std::vector<std::pair<ScalarField, ScalarField>> pairs;
  Json meta{{"z", z}, {"seed", seed}, {"box", box_json(1.5)}};
  if (z == 0.0 && id == "involution.h4") {
    pairs = {{h4::f2_field(), h4::f3_field()}, {h4::f2_perm_field(h4::Permuted::F13), h4::f3_field()}};
  } else {
    const ScalarField f2 = deformed::fz2_field(z), f2r = deformed::fz2_right_field(z), f3 = deformed::fz3_field(z);
    for (int i = 0; i < 4; ++i) {
      const ScalarField h = deformed::prolonged_hamiltonian(i, z);
      pairs.push_back({f2, h});
      pairs.push_back({f2r, h});
      pairs.push_back({f3, h});
    }
    pairs.push_back({f2, f3});
    pairs.push_back({f2r, f3});
    double unasserted = 0.0;
    for (const auto& p : inputs) unasserted = std::max(unasserted, std::abs(poisson_bracket(f2, f2r, w, p)));
    meta["reported_not_asserted"] = {{"bracket", "{Fz2, Fz2R}"}, {"max_abs", unasserted}};
  }
  Json names = Json::array();
  for (const auto& [f, g] : pairs) names.push_back("{" + f.name + "," + g.name + "}");
  meta["brackets"] = std::move(names);
  meta["residual"] = "|{F,G}| / max(1, |grad F| |grad G|)";
  return pointwise(id, inputs,
                   [&](const Vec& p) {
                     double r = 0.0;
                     for (const auto& [f, g] : pairs) {
                       const Vec gf = f.gradient(p), gg = g.gradient(p);
                       double nf = 0, ng = 0;
                       for (std::size_t k = 0; k < p.size(); ++k) {
                         nf = std::max(nf, std::abs(gf[k]));
                         ng = std::max(ng, std::abs(gg[k]));
                       }
                       r = std::max(r, std::abs(poisson_bracket(f, g, w, p)) / std::max(1.0, nf * ng));
                     }
                     return r;
                   },
                   1e-9, std::move(meta));
}

CheckReport check_lie(const std::string& which, std::uint64_t seed) {
  Json meta{{"seed", seed}};
  meta["residual"] = "||[X,Y] - expected||_inf / max(1, ||expected||_inf)";
  const double z = 0.5, s = kLimitS;
  if (which == "h4") {
    const auto X1 = h4::generator(1), X2 = h4::generator(2), X3 = h4::generator(3);
    meta["relations"] = {"[X1,X2]=0", "[X1,X3]=X1", "[X2,X3]=-X2"};
    return pointwise("lie.h4", plane_inputs(100, 1, 2.0, seed),
                     [=](const Vec& p) {
                       return std::max({bracket_residual(X1, X2, p, {0.0, 0.0}),
                                        bracket_residual(X1, X3, p, X1(0.0, p)),
                                        bracket_residual(X2, X3, p, scale_vec(X2(0.0, p), -1.0))});
                     },
                     1e-6, std::move(meta));
  }
  if (which == "h4-deformed") {
    const auto X1 = deformed::generator(1, z), X2 = deformed::generator(2, z), X3 = deformed::generator(3, z);
    meta["z"] = z;
    meta["relations"] = {"[Xz1,Xz2]=z e^{zx} Xz2", "[Xz1,Xz3]=Xz1", "[Xz2,Xz3]=-e^{zx} Xz2"};
    return pointwise("lie.h4-deformed", plane_inputs(100, 1, 2.0, seed),
                     [=](const Vec& p) {
                       const double e = std::exp(z * p[0]);
                       return std::max({bracket_residual(X1, X2, p, scale_vec(X2(0.0, p), z * e)),
                                        bracket_residual(X1, X3, p, X1(0.0, p)),
                                        bracket_residual(X2, X3, p, scale_vec(X2(0.0, p), -e))});
                     },
                     1e-6, std::move(meta));
  }
  if (which == "prolonged-deformed") {
    const auto w = SymplecticWeight::canonical();
    const auto X1 = hamiltonian_vector_field(deformed::prolonged_hamiltonian(0, z), w);
    const auto X3 = hamiltonian_vector_field(deformed::prolonged_hamiltonian(2, z), w);
    meta["z"] = z;
    meta["relations"] = {"[X_h1(3), X_h3(3)] = X_h1(3)"};
    return pointwise("lie.prolonged-deformed", plane_inputs(100, 3, 1.0, seed),
                     [=](const Vec& p) { return bracket_residual(X1, X3, p, X1(0.0, p)); }, 1e-6,
                     std::move(meta));
  }
  // Bernoulli: Y1 and Y2 are the a1 and a2 parts of the polar field.
  const bool def = which == "bernoulli-deformed";
  const double zz = def ? z : 0.0;
  const auto Y1 = bernoulli::vector_field({s, CoefficientSpec::constant(1.0), {}, zz});
  const auto Y2 = bernoulli::vector_field({s, {}, CoefficientSpec::constant(1.0), zz});
  meta["s"] = s;
  meta["z"] = zz;
  meta["relations"] = {def ? "[Yz1,Yz2] = (s-1) exp(z x) Yz2" : "[Y1,Y2] = (s-1) Y2"};
  Sampler smp(seed);
  std::vector<Vec> inputs;
  for (int i = 0; i < 100; ++i) inputs.push_back(smp.polar(1, s));
  return pointwise("lie." + which, inputs,
                   [=](const Vec& q) {
                     const double x = bernoulli::polar_to_plane(PhasePoint(q), s)[0];
                     return bracket_residual(Y1, Y2, q, scale_vec(Y2(0.0, q), (s - 1.0) * std::exp(zz * x)));
                   },
                   1e-6, std::move(meta));
}

// The explicit systems against the Hamilton equations of their Hamiltonians.
CheckReport check_hamilton(const std::string& which, std::uint64_t seed) {
  const auto c = reference_coefficients();
  const auto canonical = SymplecticWeight::canonical();
  const double z = 0.5;
  Json meta{{"z", z}, {"seed", seed}, {"times", {0.0, 0.7, 1.9}}};
  meta["residual"] = "||explicit - X_h||_inf / max(1, ||X_h||_inf)";
  auto compare = [](const Vec& a, const Vec& b) {
    double scale = 1.0, d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      scale = std::max(scale, std::abs(b[i]));
      d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d / scale;
  };
  if (which == "h4-deformed" || which == "prolonged-deformed") {
    const bool pro = which == "prolonged-deformed";
    return pointwise("hamilton." + which, plane_inputs(100, pro ? 3 : 1, 1.5, seed),
                     [=](const Vec& p) {
                       double r = 0.0;
                       for (double t : {0.0, 0.7, 1.9}) {
                         std::vector<ScalarField> hs;
                         for (int i = 0; i < 4; ++i)
                           hs.push_back(pro ? deformed::prolonged_hamiltonian(i, z) : deformed::hamiltonian(i, z));
                         const auto H = combination(hs, {c.b1(t), c.b2(t), c.b3(t), c.b0(t)});
                         const Vec xh = hamiltonian_vector_field(H, canonical)(t, p);
                         const Vec explicit_rhs = pro ? as_vec(deformed::prolonged_rhs(t, PhasePoint(p), z, c))
                                                 : as_vec(deformed::rhs(t, PhasePoint(p), z, c));
                         r = std::max(r, compare(explicit_rhs, xh));
                       }
                       return r;
                     },
                     1e-12, std::move(meta));
  }
  const double s = kLimitS;
  const bool def = which == "bernoulli-deformed";
  const double zz = def ? z : 0.0;
  meta["z"] = zz;
  meta["s"] = s;
  const bernoulli::Params prm{s, CoefficientSpec::constant(0.3), CoefficientSpec({term::Sinusoid{1.0, 1.0, 0.0}}), zz};
  Sampler smp(seed);
  std::vector<Vec> inputs;
  for (int i = 0; i < 100; ++i) inputs.push_back(smp.polar(1, s));
  return pointwise("hamilton." + which, inputs,
                   [=](const Vec& q) {
                     double r = 0.0;
                     for (double t : {0.0, 0.7, 1.9}) {
                       const auto H = combination({bernoulli::hamiltonian(0, s, zz), bernoulli::hamiltonian(1, s, zz)},
                                                  {prm.a1(t), prm.a2(t)});
                       const Vec xh = hamiltonian_vector_field(H, bernoulli::weight(s))(t, q);
                       r = std::max(r, compare(as_vec(bernoulli::deformed_rhs(t, PhasePoint(q), prm)), xh));
                     }
                     return r;
                   },
                   1e-10, std::move(meta));
}

CheckReport check_symmetry(std::uint64_t seed) {
  const auto inputs = plane_inputs(100, 3, 2.0, seed);
  Json meta{{"seed", seed}, {"box", box_json(2.0)}};
  meta["relations"] = {"f2 o S12 = f2", "f3 o sigma = f3 for all six permutations"};
  return pointwise("symmetry.h4", inputs,
                   [](const Vec& v) {
                     const PhasePoint P(v);
                     std::array<PhasePoint, 3> c{P.copy(0), P.copy(1), P.copy(2)};
                     const double f2 = h4::f2(c[0], c[1]), f3 = h4::f3(c[0], c[1], c[2]);
                     double r = scaled_diff(h4::f2(c[1], c[0]), f2);
                     std::array<int, 3> perm{0, 1, 2};
                     do {
                       r = std::max(r, scaled_diff(h4::f3(c[perm[0]], c[perm[1]], c[perm[2]]), f3));
                     } while (std::next_permutation(perm.begin(), perm.end()));
                     return r;
                   },
                   1e-12, std::move(meta));
}

// Fraction of generic points where fz2 is unchanged by S12 (z != 0), plus
// the exact symmetry at z = 0 folded in as an infinite residual on failure.
CheckReport check_broken_symmetry(std::uint64_t seed) {
  const double z = 0.5;
  const auto pts = random_points(200, 3, 2.0, seed);
  const std::size_t unchanged = par::count_if(pts.size(), [&](std::size_t i) {
    const PhasePoint& P = pts[i];
    const PhasePoint S = PhasePoint::join({P.copy(1), P.copy(0), P.copy(2)});
    return std::abs(deformed::fz2(P, z) - deformed::fz2(S, z)) <= 1e-8 * std::max(1.0, std::abs(deformed::fz2(P, z)));
  });
  double zero_gap = 0.0;
  for (const auto& P : pts) {
    const PhasePoint S = PhasePoint::join({P.copy(1), P.copy(0), P.copy(2)});
    zero_gap = std::max(zero_gap, std::abs(deformed::fz2(P, 0.0) - deformed::fz2(S, 0.0)));
  }
  Json meta{{"z", z}, {"seed", seed}, {"points", pts.size()}, {"unchanged", unchanged},
            {"undeformed_max_gap", zero_gap}};
  meta["measured"] = "fraction of points with fz2(S12 P) = fz2(P) at z = 0.5";
  const double fraction = static_cast<double>(unchanged) / static_cast<double>(pts.size());
  return finish("symmetry.deformed-broken", zero_gap <= 1e-12 ? fraction : kInf, 0.05, false, {},
                std::move(meta));
}

CheckReport check_legacy(std::uint64_t seed) {
  Sampler smp(seed);
  std::vector<Vec> inputs;
  while (inputs.size() < 200) {
    Vec v = smp.plane(3, 2.0);
    if (std::abs(v[3] - v[5]) < 0.1 || std::abs(v[2] - v[4]) < 0.1) continue;
    inputs.push_back(std::move(v));
  }
  Json meta{{"seed", seed}, {"box", box_json(2.0)}};
  meta["residual"] = "max over branches of |legacy - simplified| / max(1, |simplified|)";
  return pointwise("superposition.h4-legacy", inputs,
                   [](const Vec& v) {
                     const PhasePoint P(v);
                     const PhasePoint a = P.copy(0), b = P.copy(1), c = P.copy(2);
                     const double k1 = h4::f2(a, b), k2 = h4::f2_perm(a, b, c, h4::Permuted::F23);
                     const double k3 = h4::f2_perm(a, b, c, h4::Permuted::F13);
                     double r = 0.0;
                     for (Branch br : {Branch::plus, Branch::minus}) {
                       const PhasePoint l = h4::superpose_legacy(b, c, k1, k2, br);
                       const PhasePoint s = h4::superpose(b, c, {k1, k1 + k2 + k3, 0.0, br});
                       r = std::max({r, scaled_diff(l[0], s[0]), scaled_diff(l[1], s[1])});
                     }
                     return r;
                   },
                   1e-10, std::move(meta));
}

CheckReport check_bernoulli_implicit(std::uint64_t seed) {
  Sampler smp(seed);
  std::vector<Vec> inputs;
  for (double s : {2.0, 3.0}) {
    int made = 0;
    while (made < 100) {
      Vec q = smp.polar(3, s);
      const PhasePoint X = bernoulli::polar_to_plane(PhasePoint(q), s);
      if (std::abs(X[3] - X[5]) < 0.05 || std::abs(X[2] - X[4]) < 0.05) continue;
      Vec v{s};
      v.insert(v.end(), q.begin(), q.end());
      inputs.push_back(std::move(v));
      ++made;
    }
  }
  Json meta{{"seed", seed}, {"s", {2.0, 3.0}}, {"box", polar_box_json()}};
  meta["residual"] = "|plane route - polar route| / max(1, |plane route|)";
  return pointwise("superposition.bernoulli-implicit", inputs,
                   [](const Vec& v) {
                     const double s = v[0];
                     const PhasePoint Q(Vec(v.begin() + 1, v.end()));
                     const bernoulli::Params prm{s, {}, {}, 0.0};
                     const double k1 = bernoulli::constant(Q, prm, bernoulli::Constant::F2);
                     const double k = bernoulli::constant(Q, prm, bernoulli::Constant::F3);
                     double r = 0.0;
                     for (Branch br : {Branch::plus, Branch::minus}) {
                       auto attempt = [&](auto&& rule) -> std::optional<PhasePoint> {
                         try {
                           return rule(Q.copy(1), Q.copy(2), SuperpositionConstants{k1, k, 0.0, br}, prm);
                         } catch (const DomainError&) {
                           return std::nullopt;
                         }
                       };
                       const auto a = attempt(bernoulli::superpose);
                       const auto b = attempt(bernoulli::superpose_implicit);
                       // A branch leaving the polar domain must be rejected by both routes.
                       if (a.has_value() != b.has_value()) return kInf;
                       if (a) r = std::max({r, scaled_diff((*b)[0], (*a)[0]), scaled_diff((*b)[1], (*a)[1])});
                     }
                     return r;
                   },
                   1e-10, std::move(meta));
}

CheckReport check_twist_canonical(std::uint64_t seed) {
  const double z = 0.5;
  Sampler smp(seed);
  std::vector<Vec> inputs;
  for (int i = 0; i < 100; ++i) inputs.push_back(smp.plane(1, 2.0));
  for (int i = 0; i < 100; ++i) inputs.push_back(smp.plane(2, 0.9));
  const auto w = SymplecticWeight::canonical();
  Json meta{{"z", z}, {"seed", seed}, {"maps", {"twist_vars", "twisted_two_copy_map"}}};
  meta["residual"] = "max |J^T Omega J - Omega|";
  return pointwise("twist.canonical", inputs,
                   [&](const Vec& p) {
                     if (p.size() == 2)
                       return symplectic_jacobian_residual(
                           [z](Coords q) { return twist::twist_vars(PhasePoint({q[0], q[1]}), z).values(); }, w, p);
                     return symplectic_jacobian_residual(
                         [z](Coords q) { return twist::twisted_two_copy_map(PhasePoint({q.begin(), q.end()}), z).values(); },
                         w, p);
                   },
                   1e-7, std::move(meta));
}

CheckReport check_twist_roundtrip(std::uint64_t seed) {
  const double z = 0.5;
  Sampler smp(seed);
  std::vector<Vec> inputs;
  for (int i = 0; i < 100; ++i) inputs.push_back(smp.plane(1, 2.0));
  for (int i = 0; i < 100; ++i) inputs.push_back(smp.plane(2, 0.9));
  Json meta{{"z", z}, {"seed", seed}};
  meta["residual"] = "||inverse(forward(p)) - p||_inf / max(1, ||p||_inf)";
  return pointwise("twist.roundtrip", inputs,
                   [z](const Vec& p) {
                     const PhasePoint P(p);
                     const PhasePoint back =
                         p.size() == 2
                             ? twist::twist_vars(twist::twist_vars(P, z), z, twist::Direction::inverse)
                             : twist::twisted_two_copy_map(twist::twisted_two_copy_map(P, z), z, twist::Direction::inverse);
                     return max_scaled_diff(back.values(), p);
                   },
                   1e-12, std::move(meta));
}

CheckReport check_twist_hamiltonians(std::uint64_t seed) {
  const double z = 0.5;
  Json meta{{"z", z}, {"seed", seed}, {"box", box_json(0.9)}};
  meta["residual"] = "|th_i(T(P')) - (h_i(p1') + h_i(p2'))| / max(1, |sum|)";
  return pointwise("twist.hamiltonians", plane_inputs(200, 2, 0.9, seed),
                   [z](const Vec& p) {
                     const PhasePoint P(p);
                     const auto t = twist::twisted_h2_functions(twist::twisted_two_copy_map(P, z), z);
                     const auto a = h4::hamiltonians(P.copy(0)), b = h4::hamiltonians(P.copy(1));
                     return max_scaled_diff(as_vec(t), {a[0] + b[0], a[1] + b[1], a[2] + b[2], 2.0});
                   },
                   1e-10, std::move(meta));
}

CheckReport check_twist_conjugacy(std::uint64_t seed) {
  const double z = 0.5;
  const auto c = reference_coefficients();
  const std::vector<PhasePoint> starts{{-1.2, 0.4}, {-1.5, 1.0}, {-2.0, -0.7}};
  const IntegratorConfig ic{1e-12, 1e-12};
  Json meta{{"z", z}, {"seed", seed}, {"tspan", {0.0, 2.0}}, {"rel_tol", 1e-12}};
  meta["coefficients"] = flow_json({"h4", z, 3.0, c, {}, {}});
  meta["residual"] = "||twist(end of deformed flow) - end of minimal flow||_inf";
  std::vector<Vec> inputs;
  for (const auto& p : starts) inputs.push_back(p.values());
  return pointwise("twist.conjugacy", inputs,
                   [&](const Vec& p) {
                     const auto a = integrate(deformed::vector_field(c, z), PhasePoint(p), 0.0, 2.0, ic);
                     const auto b = integrate(twist::minimal_field(c, z), twist::twist_vars(PhasePoint(p), z), 0.0, 2.0, ic);
                     return vec_dist(twist::twist_vars(a.final_state(), z).values(), b.final_state().values());
                   },
                   1e-8, std::move(meta));
}

CheckReport check_twist_essential(std::uint64_t seed) {
  const double z = 0.5;
  const H4Coefficients c{{}, CoefficientSpec::constant(1.0), {}, {}};
  const auto pts = plane_inputs(100, 1, 1.5, seed);
  double largest = 0.0;
  for (const auto& p : pts) {
    const auto m = twist::minimal_rhs(0.0, PhasePoint(p), z, c);
    const auto u = h4::rhs(0.0, PhasePoint(p), c);
    largest = std::max(largest, vec_dist(as_vec(m), as_vec(u)));
  }
  Json meta{{"z", z}, {"seed", seed}, {"coefficients", {{"b2", 1.0}}}, {"points", pts.size()}};
  meta["measured"] = "max over points of |minimal_rhs - h4_rhs|";
  return finish("twist.essential", largest, 1e-3, true, {}, std::move(meta));
}

std::vector<Vec> polar_inputs(std::size_t n, double s, std::uint64_t seed) {
  Sampler smp(seed);
  std::vector<Vec> out(n);
  for (auto& v : out) v = smp.polar(1, s);
  return out;
}

CheckReport check_bernoulli_roundtrip(std::uint64_t seed) {
  std::vector<Vec> inputs;
  for (double s : {3.0, 2.0, 0.5, -1.0})
    for (auto& q : polar_inputs(50, s, seed)) inputs.push_back({s, q[0], q[1]});
  Json meta{{"seed", seed}, {"s", {3.0, 2.0, 0.5, -1.0}}, {"box", polar_box_json()}};
  meta["residual"] = "||plane_to_polar(polar_to_plane(q)) - q||_inf / max(1, ||q||_inf)";
  return pointwise("bernoulli.roundtrip", inputs,
                   [](const Vec& v) {
                     const PhasePoint q{v[1], v[2]};
                     return max_scaled_diff(bernoulli::plane_to_polar(bernoulli::polar_to_plane(q, v[0]), v[0]).values(),
                                            q.values());
                   },
                   1e-10, std::move(meta));
}

CheckReport check_bernoulli_pullback(std::uint64_t seed) {
  std::vector<Vec> inputs;
  for (double s : {3.0, 0.5})
    for (auto& q : polar_inputs(50, s, seed)) inputs.push_back({s, q[0], q[1]});
  Json meta{{"seed", seed}, {"s", {3.0, 0.5}}};
  meta["residual"] = "max |J^T Omega_plane J - Omega_polar| / max(1, |weight|)";
  return pointwise("bernoulli.pullback", inputs,
                   [](const Vec& v) {
                     const double s = v[0];
                     const Vec q{v[1], v[2]};
                     const auto w = bernoulli::weight(s);
                     return symplectic_jacobian_residual(
                                [s](Coords p) { return bernoulli::polar_to_plane(PhasePoint({p[0], p[1]}), s).values(); },
                                w, SymplecticWeight::canonical(), q) /
                            std::max(1.0, std::abs(w.density(q, 0)));
                   },
                   1e-7, std::move(meta));
}

CheckReport check_bernoulli_constants(std::uint64_t seed) {
  const double z = 0.5;
  std::vector<Vec> inputs;
  Sampler smp(seed);
  for (double s : {3.0, 0.5})
    for (int i = 0; i < 50; ++i) {
      Vec v{s};
      const Vec q = smp.polar(3, s);
      v.insert(v.end(), q.begin(), q.end());
      inputs.push_back(std::move(v));
    }
  Json meta{{"seed", seed}, {"z", z}, {"s", {3.0, 0.5}}};
  meta["residual"] = "|polar constant - plane constant of the image| / max(1, |plane|)";
  return pointwise("bernoulli.constants", inputs,
                   [z](const Vec& v) {
                     const double s = v[0];
                     const PhasePoint Q(Vec(v.begin() + 1, v.end()));
                     const PhasePoint X = bernoulli::polar_to_plane(Q, s);
                     const bernoulli::Params prm{s, {}, {}, z};
                     const PhasePoint a = X.copy(0), b = X.copy(1), c = X.copy(2);
                     using bernoulli::Constant;
                     return std::max({scaled_diff(bernoulli::constant(Q, prm, Constant::F2), h4::f2(a, b)),
                                      scaled_diff(bernoulli::constant(Q, prm, Constant::F2_right),
                                                  h4::f2_perm(a, b, c, h4::Permuted::F13)),
                                      scaled_diff(bernoulli::constant(Q, prm, Constant::F3), h4::f3(a, b, c)),
                                      scaled_diff(bernoulli::constant(Q, prm, Constant::Fz2), deformed::fz2(X, z))});
                   },
                   1e-10, std::move(meta));
}

CheckReport check_bernoulli_functoriality(double z, std::uint64_t seed) {
  const FlowConfig ref = reference_bernoulli(z);
  const bernoulli::Params prm = ref.flow.bernoulli_params();
  const IntegratorConfig ic{1e-12, 1e-12};
  std::vector<Vec> inputs;
  for (std::size_t j = 0; j < 3; ++j) inputs.push_back(ref.initial.copy(j).values());
  Json meta{{"z", z}, {"s", prm.s}, {"seed", seed}, {"tspan", {0.0, 2.0}}, {"rel_tol", 1e-12}};
  meta["coefficients"] = flow_json(ref.flow);
  meta["residual"] = "||map(end of polar flow) - end of plane flow||_inf";
  return pointwise("bernoulli.functoriality." + z_tag(z), inputs,
                   [&](const Vec& q) {
                     const auto a = integrate(bernoulli::vector_field(prm), PhasePoint(q), 0.0, 2.0, ic);
                     const auto b = integrate(deformed::vector_field(prm.plane_coefficients(), z),
                                              bernoulli::polar_to_plane(PhasePoint(q), prm.s), 0.0, 2.0, ic);
                     return vec_dist(bernoulli::polar_to_plane(a.final_state(), prm.s).values(), b.final_state().values());
                   },
                   1e-8, std::move(meta));
}

std::vector<CheckEntry> build_registry() {
  std::vector<CheckEntry> r;
  auto add = [&](std::string id, std::function<CheckReport(std::uint64_t)> f) {
    r.push_back({std::move(id), std::move(f)});
  };
  for (const auto& t : bracket_tables())
    add("bracket." + t, [t](std::uint64_t s) { return check_bracket_table(t, 100, 1e-9, s); });
  add("gradient.all", check_gradients);
  add("poisson.consistency", check_poisson);
  add("involution.h4", [](std::uint64_t s) { return check_involution("involution.h4", 0.0, s); });
  for (double z : {0.5, 1.0})
    add("involution.h4-deformed." + z_tag(z),
        [z](std::uint64_t s) { return check_involution("involution.h4-deformed." + z_tag(z), z, s); });
  for (std::string w : {"h4", "h4-deformed", "prolonged-deformed", "bernoulli", "bernoulli-deformed"})
    add("lie." + w, [w](std::uint64_t s) { return check_lie(w, s); });
  for (std::string w : {"h4-deformed", "prolonged-deformed", "bernoulli", "bernoulli-deformed"})
    add("hamilton." + w, [w](std::uint64_t s) { return check_hamilton(w, s); });
  add("symmetry.h4", check_symmetry);
  add("symmetry.deformed-broken", check_broken_symmetry);

  for (std::string c : {"F2", "F13", "F23", "F3"})
    add("conservation.h4-prolonged." + c, [c](std::uint64_t s) {
      FlowConfig cfg = reference_flow("h4-prolonged", 0.0, 5.0);
      cfg.seed = s;
      return check_conservation("h4-prolonged", c, cfg);
    });
  for (double z : {0.1, 0.5, 1.0})
    for (std::string c : {"F2", "F13", "F3"})
      add("conservation.h4-deformed-prolonged." + z_tag(z) + "." + c, [z, c](std::uint64_t s) {
        FlowConfig cfg = reference_flow("h4-deformed-prolonged", z, 5.0);
        cfg.seed = s;
        CheckReport rep = check_conservation("h4-deformed-prolonged", c, cfg);
        rep.check_id = "conservation.h4-deformed-prolonged." + z_tag(z) + "." + c;
        return rep;
      });
  for (std::string c : {"S12", "S13", "S23"})
    add("nonconservation.h4-deformed-prolonged.z0.5." + c, [c](std::uint64_t s) {
      FlowConfig cfg = reference_flow("h4-deformed-prolonged", 0.5, 3.0);
      cfg.seed = s;
      CheckReport rep = check_conservation("h4-deformed-prolonged", c, cfg);
      rep.check_id = "nonconservation.h4-deformed-prolonged.z0.5." + c;
      return rep;
    });
  for (std::string c : {"F2", "F2R", "F3"})
    add("conservation.bernoulli-prolonged." + c, [c](std::uint64_t s) {
      FlowConfig cfg = reference_bernoulli(0.0);
      cfg.seed = s;
      return check_conservation("bernoulli-prolonged", c, cfg);
    });
  for (std::string c : {"Fz2", "Fz2R", "Fz3"})
    add("conservation.bernoulli-deformed-prolonged.z0.5." + c, [c](std::uint64_t s) {
      FlowConfig cfg = reference_bernoulli(0.5);
      cfg.seed = s;
      CheckReport rep = check_conservation("bernoulli-deformed-prolonged", c, cfg);
      rep.check_id = "conservation.bernoulli-deformed-prolonged.z0.5." + c;
      return rep;
    });

  add("superposition.h4", [](std::uint64_t s) {
    FlowConfig cfg = reference_flow("h4-prolonged", 0.0, 2.0);
    cfg.seed = s;
    return check_superposition("h4", cfg);
  });
  add("superposition.h4-legacy", check_legacy);
  for (double z : {0.3, 0.5})
    add("superposition.h4-deformed." + z_tag(z), [z](std::uint64_t s) {
      FlowConfig cfg = reference_flow("h4-deformed-prolonged", z, 2.0);
      cfg.seed = s;
      CheckReport rep = check_superposition("h4-deformed", cfg);
      rep.check_id += "." + z_tag(z);
      return rep;
    });
  add("superposition.bernoulli", [](std::uint64_t s) {
    FlowConfig cfg = reference_bernoulli(0.0);
    cfg.seed = s;
    return check_superposition("bernoulli", cfg);
  });
  add("superposition.bernoulli-deformed.z0.5", [](std::uint64_t s) {
    FlowConfig cfg = reference_bernoulli(0.5);
    cfg.seed = s;
    CheckReport rep = check_superposition("bernoulli-deformed", cfg);
    rep.check_id += ".z0.5";
    return rep;
  });
  add("superposition.bernoulli-implicit", check_bernoulli_implicit);

  for (const auto& f : limit_families())
    add("limit." + f, [f](std::uint64_t s) { return check_limit(f, {1e-2, 1e-3, 1e-4}, s); });

  add("independence.h4", [](std::uint64_t s) {
    return check_independence("independence.h4",
                              {h4::f2_field(), h4::f2_perm_field(h4::Permuted::F13), h4::f3_field()},
                              random_points(200, 3, 2.0, s));
  });
  for (double z : {0.0, 0.5})
    add("independence.h4-deformed." + z_tag(z), [z](std::uint64_t s) {
      CheckReport rep = check_independence("independence.h4-deformed." + z_tag(z),
                                           {deformed::fz2_field(z), deformed::fz2_right_field(z), deformed::fz3_field(z)},
                                           random_points(200, 3, 2.0, s));
      rep.metadata["z"] = z;
      rep.metadata["seed"] = s;
      return rep;
    });

  add("twist.canonical", check_twist_canonical);
  add("twist.roundtrip", check_twist_roundtrip);
  add("twist.hamiltonians", check_twist_hamiltonians);
  add("twist.conjugacy", check_twist_conjugacy);
  add("twist.essential", check_twist_essential);

  add("bernoulli.roundtrip", check_bernoulli_roundtrip);
  add("bernoulli.pullback", check_bernoulli_pullback);
  add("bernoulli.constants", check_bernoulli_constants);
  for (double z : {0.0, 0.5})
    add("bernoulli.functoriality." + z_tag(z), [z](std::uint64_t s) { return check_bernoulli_functoriality(z, s); });
  return r;
}

}  // namespace

const std::vector<CheckEntry>& registry() {
  static const std::vector<CheckEntry> r = build_registry();
  return r;
}

std::vector<const CheckEntry*> select(const std::string& selector) {
  std::vector<std::string> globs;
  std::stringstream ss(selector);
  std::string g;
  while (std::getline(ss, g, ','))
    if (!g.empty()) globs.push_back(g == "all" ? "*" : g);
  std::vector<const CheckEntry*> out;
  for (const auto& e : registry())
    for (const auto& pattern : globs)
      if (fnmatch(pattern.c_str(), e.id.c_str(), 0) == 0) {
        out.push_back(&e);
        break;
      }
  if (out.empty()) throw Error("selector '" + selector + "' matches no check");
  return out;
}

std::uint64_t check_seed(std::uint64_t suite_seed, const std::string& id) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : id) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return suite_seed ^ h;
}

std::vector<CheckReport> run_suite(const std::string& selector, std::uint64_t seed) {
  const auto chosen = select(selector);
  std::vector<CheckReport> out(chosen.size());
  par::for_each(chosen.size(), [&](std::size_t i) {
    const std::uint64_t s = check_seed(seed, chosen[i]->id);
    try {
      out[i] = chosen[i]->run(s);
    } catch (const std::exception& e) {
      out[i] = finish(chosen[i]->id, kInf, 0.0, false, {}, Json{{"error", e.what()}, {"seed", s}});
    }
    out[i].check_id = chosen[i]->id;
    out[i].metadata["seed"] = s;
  });
  return out;
}

std::size_t failures(const std::vector<CheckReport>& reports) {
  return static_cast<std::size_t>(
      std::count_if(reports.begin(), reports.end(), [](const CheckReport& r) { return !r.passed; }));
}

Json suite_report(const std::vector<CheckReport>& reports, const std::string& selector,
                  std::uint64_t seed) {
  Json checks = Json::array();
  for (const auto& r : reports) checks.push_back(to_json(r));
  Json j;
  j["selector"] = selector;
  j["seed"] = seed;
  j["total"] = reports.size();
  j["failed"] = failures(reports);
  j["checks"] = std::move(checks);
  return j;
}

}  // namespace lhdeform::verify
