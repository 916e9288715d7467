#include "gaussbv/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gaussbv/error.hpp"
#include "gaussbv/variation.hpp"

namespace gaussbv {

using nlohmann::json;

namespace {
[[noreturn]] void fail(const std::string& field, const std::string& what) { throw ConfigError(field + ": " + what); }

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path.empty() ? "config" : path, "expected an object");
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (!ok.count(k)) fail(path.empty() ? k : path + "." + k, "unknown key");
  }
}

double number(const json& j, const char* key, const std::string& path, double dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (v.is_string() && (v == "inf" || v == "infinity")) return kInf;
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (std::isnan(x)) fail(path, "must not be NaN");
  return x;
}

std::size_t count(const json& j, const char* key, const std::string& path, std::size_t dflt, std::size_t min = 1) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min))
    fail(path, "expected an integer >= " + std::to_string(min));
  return v.get<std::size_t>();
}

std::string text(const json& j, const char* key, const std::string& path, const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_string()) fail(path, "expected a string");
  return j.at(key).get<std::string>();
}

bool flag(const json& j, const char* key, const std::string& path, bool dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_boolean()) fail(path, "expected true or false");
  return j.at(key).get<bool>();
}

std::vector<double> numbers(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) return {};
  const json& v = j.at(key);
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

void require_len(const std::vector<double>& v, int dim, const std::string& path) {
  if (static_cast<int>(v.size()) != dim)
    fail(path, "expected " + std::to_string(dim) + " entries, got " + std::to_string(v.size()));
}

void require_finite_positive(const std::vector<double>& v, const std::string& path) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) fail(path + "[" + std::to_string(i) + "]", "must be positive and finite");
}

void require_decreasing(const std::vector<double>& v, const std::string& path) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) fail(path, "must be strictly decreasing");
}

std::vector<double> grid(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) return {};
  const json& v = j.at(key);
  if (v.is_object()) {
    allow_keys(v, path, {"t0", "points"});
    const double t0 = number(v, "t0", path + ".t0", kNaN);
    if (!(t0 > 0.0) || !std::isfinite(t0)) fail(path + ".t0", "must be positive and finite");
    const auto n = count(v, "points", path + ".points", 6);
    return geometric_t_grid(t0, static_cast<int>(n));
  }
  std::vector<double> out = numbers(j, key, path);
  if (out.empty()) fail(path, "must be nonempty");
  require_finite_positive(out, path);
  return out;
}

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

Vec default_unit(int dim) {
  Vec e = Vec::Zero(dim);
  e[0] = 1.0;
  return e;
}

json vec_json(const std::vector<double>& v) { return json(v); }

json inf_json(double x) { return std::isfinite(x) ? json(x) : json("inf"); }

bool needs_model(const std::string& e) { return e != "inequalities"; }
bool needs_omega_engine(const std::string& e) {
  return e == "degiorgi" || e == "perimeter" || e == "commutation";
}
}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"degiorgi", "perimeter",   "penalty-sweep", "commutation",
                                                 "voc",      "inequalities", "ledoux",       "hyp-d-check"};
  return names;
}

ExperimentConfig parse_config(const json& j) {
  allow_keys(j, "", {"experiment", "seed", "model", "weight", "domain", "epsilon", "field", "t_grid", "eps_grid",
                     "sde", "estimator", "points", "output"});
  ExperimentConfig c;
  if (!j.contains("experiment")) fail("experiment", "missing");
  c.experiment = text(j, "experiment", "experiment", "");
  bool known = false;
  for (const auto& n : experiment_names()) known = known || n == c.experiment;
  if (!known) fail("experiment", "unknown experiment '" + c.experiment + "'");
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
      fail("seed", "expected a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }

  // Model.
  if (j.contains("model")) {
    const json& m = j.at("model");
    allow_keys(m, "model", {"eigenvalues", "dim", "lambda1", "decay"});
    if (m.contains("eigenvalues")) {
      if (m.contains("dim") || m.contains("lambda1") || m.contains("decay"))
        fail("model", "give either eigenvalues or dim/lambda1/decay");
      c.eigenvalues = numbers(m, "eigenvalues", "model.eigenvalues");
      if (c.eigenvalues.empty()) fail("model.eigenvalues", "must be nonempty");
    } else {
      const auto d = count(m, "dim", "model.dim", 0);
      if (d == 0) fail("model.dim", "missing");
      const double l1 = number(m, "lambda1", "model.lambda1", 1.0);
      const double rho = number(m, "decay", "model.decay", 1.0);
      try {
        const GaussianModel g = GaussianModel::geometric(static_cast<int>(d), l1, rho);
        c.eigenvalues.assign(g.eigenvalues().data(), g.eigenvalues().data() + g.dim());
      } catch (const InvalidArgument& e) {
        fail("model", e.what());
      }
    }
    try {
      (void)GaussianModel(c.eigenvalues);
    } catch (const InvalidArgument& e) {
      fail("model.eigenvalues", e.what());
    }
  } else if (needs_model(c.experiment)) {
    fail("model", "missing");
  }
  const int d = c.dim();

  // Weight.
  if (j.contains("weight")) {
    const json& w = j.at("weight");
    allow_keys(w, "weight", {"kind", "k", "kappa"});
    c.weight.kind = text(w, "kind", "weight.kind", "zero");
    c.weight.k = numbers(w, "k", "weight.k");
    c.weight.kappa = number(w, "kappa", "weight.kappa", 0.0);
    if (c.weight.kind == "quadratic") {
      require_len(c.weight.k, d, "weight.k");
      for (std::size_t i = 0; i < c.weight.k.size(); ++i)
        if (!(c.weight.k[i] >= 0.0)) fail("weight.k[" + std::to_string(i) + "]", "must be >= 0");
    } else if (c.weight.kind == "smoothed-norm") {
      if (!(c.weight.kappa >= 0.0) || !std::isfinite(c.weight.kappa)) fail("weight.kappa", "must be >= 0");
    } else if (c.weight.kind != "zero") {
      fail("weight.kind", "unknown weight '" + c.weight.kind + "'");
    }
  }

  // Domain.
  if (j.contains("domain")) {
    const json& o = j.at("domain");
    allow_keys(o, "domain", {"kind", "normal", "offset", "lo", "hi", "center", "radius", "semi_axes"});
    DomainSpec& s = c.domain;
    s.kind = text(o, "kind", "domain.kind", "whole");
    s.normal = numbers(o, "normal", "domain.normal");
    s.offset = number(o, "offset", "domain.offset", 0.0);
    s.lo = number(o, "lo", "domain.lo", kNaN);
    s.hi = number(o, "hi", "domain.hi", kNaN);
    s.center = numbers(o, "center", "domain.center");
    s.radius = number(o, "radius", "domain.radius", kNaN);
    s.semi_axes = numbers(o, "semi_axes", "domain.semi_axes");
    if (s.kind == "half-space" || s.kind == "slab") {
      if (s.normal.empty()) s.normal.assign(static_cast<std::size_t>(d), 0.0), s.normal[0] = 1.0;
      require_len(s.normal, d, "domain.normal");
      if (s.kind == "slab") {
        if (!std::isfinite(s.lo)) fail("domain.lo", "missing or not finite");
        if (!std::isfinite(s.hi)) fail("domain.hi", "missing or not finite");
        if (!(s.lo < s.hi)) fail("domain.hi", "must exceed domain.lo");
      }
    } else if (s.kind == "h-ball" || s.kind == "ball" || s.kind == "h-ellipsoid") {
      if (s.center.empty()) s.center.assign(static_cast<std::size_t>(d), 0.0);
      require_len(s.center, d, "domain.center");
      if (s.kind == "h-ellipsoid") {
        require_len(s.semi_axes, d, "domain.semi_axes");
        require_finite_positive(s.semi_axes, "domain.semi_axes");
      } else if (!(s.radius > 0.0) || !std::isfinite(s.radius)) {
        fail("domain.radius", "must be positive and finite");
      }
    } else if (s.kind != "whole") {
      fail("domain.kind", "unknown domain '" + s.kind + "'");
    }
  }
  c.epsilon = number(j, "epsilon", "epsilon", kInf);
  if (!(c.epsilon > 0.0)) fail("epsilon", "must be positive");
  if (c.domain.kind != "whole" && !std::isfinite(c.epsilon) && needs_omega_engine(c.experiment))
    fail("epsilon", "required when the domain is not the whole space");
  if (c.experiment == "voc" && c.domain.kind != "whole") fail("domain.kind", "voc needs the whole space");

  // Field.
  if (j.contains("field")) {
    const json& f = j.at("field");
    allow_keys(f, "field", {"kind", "coeffs", "offset"});
    c.field.kind = text(f, "kind", "field.kind", "indicator");
    c.field.coeffs = numbers(f, "coeffs", "field.coeffs");
    c.field.offset = number(f, "offset", "field.offset", 0.0);
    static const std::set<std::string> kinds = {"indicator", "linear",   "sine",   "tanh",
                                                "sin-bump",  "constant", "profile"};
    if (!kinds.count(c.field.kind)) fail("field.kind", "unknown field '" + c.field.kind + "'");
    if (!std::isfinite(c.field.offset)) fail("field.offset", "must be finite");
  }
  if (c.has_model()) {
    if (c.field.coeffs.empty()) c.field.coeffs.assign(static_cast<std::size_t>(d), 0.0), c.field.coeffs[0] = 1.0;
    require_len(c.field.coeffs, d, "field.coeffs");
  }

  // Grids.
  c.t_grid = grid(j, "t_grid", "t_grid");
  if (c.t_grid.empty()) {
    if (c.experiment == "degiorgi" || c.experiment == "perimeter") c.t_grid = geometric_t_grid(0.4, 6);
    else if (c.experiment == "ledoux") c.t_grid = geometric_t_grid(0.04, 6);
    else if (c.experiment == "inequalities") c.t_grid = {0.2, 0.1, 0.05};
    else c.t_grid = {0.1};
  }
  if (c.experiment == "degiorgi" || c.experiment == "perimeter" || c.experiment == "ledoux" ||
      c.experiment == "inequalities")
    require_decreasing(c.t_grid, "t_grid");
  if (j.contains("eps_grid")) {
    c.eps_grid = numbers(j, "eps_grid", "eps_grid");
    if (c.eps_grid.empty()) fail("eps_grid", "must be nonempty");
    require_finite_positive(c.eps_grid, "eps_grid");
    require_decreasing(c.eps_grid, "eps_grid");
  }
  if (c.experiment == "penalty-sweep") {
    if (c.eps_grid.empty()) fail("eps_grid", "required for penalty-sweep");
    if (d != 1) fail("model", "penalty-sweep needs dimension 1");
    if (c.domain.kind == "whole") fail("domain.kind", "penalty-sweep needs a proper domain");
  }

  // SDE.
  if (j.contains("sde")) {
    const json& s = j.at("sde");
    allow_keys(s, "sde", {"dt", "paths", "min_steps", "scheme", "gradient", "delta", "stream"});
    c.sde.dt = number(s, "dt", "sde.dt", c.sde.dt);
    if (!(c.sde.dt > 0.0) || !std::isfinite(c.sde.dt)) fail("sde.dt", "must be positive and finite");
    c.sde.paths = count(s, "paths", "sde.paths", c.sde.paths);
    c.sde.min_steps = static_cast<int>(count(s, "min_steps", "sde.min_steps", 1));
    c.sde.stream = static_cast<std::uint32_t>(count(s, "stream", "sde.stream", 0, 0));
    c.sde.scheme = text(s, "scheme", "sde.scheme", c.sde.scheme);
    if (c.sde.scheme != "euler-maruyama") fail("sde.scheme", "only euler-maruyama is available");
    const std::string mode = text(s, "gradient", "sde.gradient", "jacobian-flow");
    try {
      c.gradient.mode = gradient_mode_from_string(mode);
    } catch (const InvalidArgument&) {
      fail("sde.gradient", "unknown gradient mode '" + mode + "'");
    }
    c.gradient.delta = number(s, "delta", "sde.delta", kNaN);
    if (s.contains("delta") && !(c.gradient.delta > 0.0)) fail("sde.delta", "must be positive");
  }
  c.sde.seed = c.seed;

  // Estimator.
  if (j.contains("estimator")) {
    const json& e = j.at("estimator");
    allow_keys(e, "estimator", {"outer_samples", "inner_paths", "ledoux_samples", "quadrature_order", "doublings",
                                "refine", "k2", "relative_tolerance", "widths", "configs"});
    EstimatorSpec& s = c.estimator;
    s.outer_samples = count(e, "outer_samples", "estimator.outer_samples", s.outer_samples, 2);
    s.inner_paths = count(e, "inner_paths", "estimator.inner_paths", s.inner_paths);
    s.ledoux_samples = count(e, "ledoux_samples", "estimator.ledoux_samples", s.ledoux_samples, 2);
    s.quadrature_order = static_cast<int>(count(e, "quadrature_order", "estimator.quadrature_order", 16, 2));
    s.doublings = static_cast<int>(count(e, "doublings", "estimator.doublings", 4));
    s.refine = flag(e, "refine", "estimator.refine", false);
    s.k2 = number(e, "k2", "estimator.k2", kNaN);
    if (e.contains("k2") && !(s.k2 > 0.0 && std::isfinite(s.k2))) fail("estimator.k2", "must be positive");
    s.relative_tolerance = number(e, "relative_tolerance", "estimator.relative_tolerance", 0.02);
    if (!(s.relative_tolerance > 0.0)) fail("estimator.relative_tolerance", "must be positive");
    s.widths = numbers(e, "widths", "estimator.widths");
    require_finite_positive(s.widths, "estimator.widths");
    if (e.contains("configs")) {
      if (!e.at("configs").is_array()) fail("estimator.configs", "expected an array of names");
      for (const auto& n : e.at("configs")) {
        if (!n.is_string()) fail("estimator.configs", "expected an array of names");
        s.configs.push_back(n.get<std::string>());
      }
    }
  }
  if (c.estimator.widths.empty()) c.estimator.widths = {1.0, 0.5, 0.25, 0.1, 0.05};
  // |mean| over one sign-indefinite sample overstates the norm of the mean.
  if ((c.experiment == "degiorgi" || c.experiment == "perimeter") &&
      c.gradient.mode == GradientMode::MollifiedBel && c.estimator.inner_paths < 2)
    fail("estimator.inner_paths", "mollified-bel needs at least 2 inner paths");

  // Points.
  if (j.contains("points")) {
    const json& p = j.at("points");
    if (!p.is_array() || p.empty()) fail("points", "expected a nonempty array of points");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::string path = "points[" + std::to_string(i) + "]";
      if (!p[i].is_array()) fail(path, "expected an array of numbers");
      std::vector<double> x;
      for (const auto& v : p[i]) {
        if (!v.is_number()) fail(path, "expected an array of numbers");
        x.push_back(v.get<double>());
      }
      if (c.has_model()) require_len(x, d, path);
      c.points.push_back(std::move(x));
    }
  } else if (c.has_model()) {
    c.points.push_back(std::vector<double>(static_cast<std::size_t>(d), 0.0));
  }

  // Output.
  if (j.contains("output")) {
    const json& o = j.at("output");
    allow_keys(o, "output", {"dir", "prefix"});
    c.output_dir = text(o, "dir", "output.dir", "");
    c.output_prefix = text(o, "prefix", "output.prefix", "");
  }
  if (c.output_prefix.empty()) c.output_prefix = c.experiment;
  if (c.output_prefix.find('/') != std::string::npos) fail("output.prefix", "must not contain '/'");

  // Canonical form of the resolved configuration.
  json can;
  can["experiment"] = c.experiment;
  can["seed"] = c.seed;
  can["model"] = {{"eigenvalues", vec_json(c.eigenvalues)}};
  can["weight"] = {{"kind", c.weight.kind}, {"k", vec_json(c.weight.k)}, {"kappa", c.weight.kappa}};
  can["domain"] = {{"kind", c.domain.kind},       {"normal", vec_json(c.domain.normal)},
                   {"offset", c.domain.offset},   {"lo", inf_json(c.domain.lo)},
                   {"hi", inf_json(c.domain.hi)}, {"center", vec_json(c.domain.center)},
                   {"radius", inf_json(c.domain.radius)}, {"semi_axes", vec_json(c.domain.semi_axes)}};
  can["epsilon"] = inf_json(c.epsilon);
  can["field"] = {{"kind", c.field.kind}, {"coeffs", vec_json(c.field.coeffs)}, {"offset", c.field.offset}};
  can["t_grid"] = vec_json(c.t_grid);
  can["eps_grid"] = vec_json(c.eps_grid);
  can["sde"] = {{"dt", c.sde.dt},           {"paths", c.sde.paths},   {"min_steps", c.sde.min_steps},
                {"scheme", c.sde.scheme},   {"stream", c.sde.stream}, {"gradient", to_string(c.gradient.mode)},
                {"delta", inf_json(c.gradient.delta)}};
  const EstimatorSpec& e = c.estimator;
  can["estimator"] = {{"outer_samples", e.outer_samples},   {"inner_paths", e.inner_paths},
                      {"ledoux_samples", e.ledoux_samples}, {"quadrature_order", e.quadrature_order},
                      {"doublings", e.doublings},           {"refine", e.refine},
                      {"k2", inf_json(e.k2)},               {"relative_tolerance", e.relative_tolerance},
                      {"widths", vec_json(e.widths)},       {"configs", e.configs}};
  can["points"] = c.points;
  c.canonical = can;
  c.digest = config_digest(can);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return parse_config(j);
}

std::string config_digest(const json& canonical) {
  const std::string s = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GaussianModel build_model(const ExperimentConfig& c) {
  if (!c.has_model()) throw ConfigError("model: missing");
  return GaussianModel(c.eigenvalues);
}

ConvexWeight build_weight(const ExperimentConfig& c) {
  const int d = c.dim();
  if (c.weight.kind == "quadratic") return ConvexWeight::quadratic(to_vec(c.weight.k));
  if (c.weight.kind == "smoothed-norm") return ConvexWeight::smoothed_norm(d, c.weight.kappa);
  return ConvexWeight::zero(d);
}

ConvexDomain build_domain(const ExperimentConfig& c) {
  const DomainSpec& s = c.domain;
  if (s.kind == "half-space") return ConvexDomain::half_space(to_vec(s.normal), s.offset);
  if (s.kind == "slab") return ConvexDomain::slab(to_vec(s.normal), s.lo, s.hi);
  if (s.kind == "h-ball") return ConvexDomain::h_ball(to_vec(s.center), s.radius);
  if (s.kind == "ball") return ConvexDomain::euclidean_ball(to_vec(s.center), s.radius);
  if (s.kind == "h-ellipsoid") return ConvexDomain::h_ellipsoid(to_vec(s.center), to_vec(s.semi_axes));
  return ConvexDomain::whole_space(c.dim());
}

ScalarField build_field(const ExperimentConfig& c) {
  const Vec a = c.field.coeffs.empty() ? default_unit(c.dim()) : to_vec(c.field.coeffs);
  const double b = c.field.offset;
  const std::string& k = c.field.kind;
  if (k == "indicator") return ScalarField::indicator({a, b}).set_name("indicator");
  if (k == "linear") return ScalarField::linear(a, b).set_lipschitz().set_name("linear");
  if (k == "constant") return ScalarField::constant(b).set_name("constant");
  if (k == "sine")
    return ScalarField([a, b](const Point& x) { return std::sin(a.dot(x) + b); },
                       [a, b](const Point& x) { return (std::cos(a.dot(x) + b) * a).eval(); })
        .set_bounded(1.0)
        .set_lipschitz()
        .set_name("sine");
  if (k == "tanh")
    return ScalarField([a](const Point& x) { return a.dot(x.array().tanh().matrix()); },
                       [a](const Point& x) { return a.cwiseProduct((1.0 - x.array().tanh().square()).matrix()).eval(); })
        .set_bounded(a.cwiseAbs().sum())
        .set_lipschitz()
        .set_name("tanh");
  if (k == "sin-bump")
    return ScalarField(
               [a, b](const Point& x) { return std::sin(a.dot(x) + b) * std::exp(-x.squaredNorm() / 4); },
               [a, b](const Point& x) {
                 const double s = a.dot(x) + b, e = std::exp(-x.squaredNorm() / 4);
                 return (e * (std::cos(s) * a - 0.5 * std::sin(s) * x)).eval();
               })
        .set_bounded(1.0)
        .set_lipschitz()
        .set_name("sin-bump");
  // profile: (1 - <a, x>^2)^2 on |<a, x>| < 1.
  return ScalarField(
             [a](const Point& x) {
               const double s = a.dot(x);
               return std::abs(s) < 1.0 ? std::pow(1.0 - s * s, 2) : 0.0;
             },
             [a](const Point& x) {
               const double s = a.dot(x);
               Vec g = Vec::Zero(a.size());
               if (std::abs(s) < 1.0) g = -4.0 * s * (1.0 - s * s) * a;
               return g;
             })
      .set_bounded(1.0)
      .set_lipschitz()
      .set_name("profile");
}

PenalizedPotential build_potential(const ExperimentConfig& c) {
  return PenalizedPotential(build_model(c), build_weight(c), build_domain(c), c.epsilon);
}

std::vector<Point> build_points(const ExperimentConfig& c) {
  std::vector<Point> out;
  for (const auto& p : c.points) out.push_back(to_vec(p));
  return out;
}

}  // namespace gaussbv
