#include <algorithm>
#include <cmath>

#include "gaussbv/content.hpp"
#include "gaussbv/error.hpp"
#include "gaussbv/variation.hpp"
#include "gaussbv/verification.hpp"

namespace gaussbv {

namespace {
Vec unit(int dim, int i) {
  Vec v = Vec::Zero(dim);
  v[i] = 1.0;
  return v;
}

Point point(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p[i++] = x;
  return p;
}

// sin(<a, x> + 0.3)
ScalarField sine_field(const Vec& a) {
  return ScalarField([a](const Point& x) { return std::sin(a.dot(x) + 0.3); },
                     [a](const Point& x) { return (std::cos(a.dot(x) + 0.3) * a).eval(); })
      .set_bounded(1.0)
      .set_lipschitz();
}

// 1 / (1 + |x|^2)
ScalarField bump_field_scalar() {
  return ScalarField([](const Point& x) { return 1.0 / (1.0 + x.squaredNorm()); },
                     [](const Point& x) {
                       const double q = 1.0 + x.squaredNorm();
                       return (-2.0 / (q * q) * x).eval();
                     })
      .set_bounded(1.0)
      .set_lipschitz();
}

// sum_i c_i tanh(x_i)
ScalarField tanh_field(const Vec& c) {
  return ScalarField(
             [c](const Point& x) { return c.dot(x.array().tanh().matrix()); },
             [c](const Point& x) {
               return c.cwiseProduct((1.0 - x.array().tanh().square()).matrix()).eval();
             })
      .set_bounded(c.cwiseAbs().sum())
      .set_lipschitz();
}

// (1 - x_1^2)^2 on |x_1| < 1, C^1 after zero extension.
ScalarField slab_profile() {
  return ScalarField([](const Point& x) { return std::abs(x[0]) < 1.0 ? std::pow(1.0 - x[0] * x[0], 2) : 0.0; },
                     [](const Point& x) {
                       Vec g = Vec::Zero(x.size());
                       if (std::abs(x[0]) < 1.0) g[0] = -4.0 * x[0] * (1.0 - x[0] * x[0]);
                       return g;
                     })
      .set_bounded(1.0)
      .set_lipschitz();
}

std::vector<K2Probe> k2_probes(int dim) {
  const Point origin = Point::Zero(dim);
  Point off = Point::Zero(dim);
  off[0] = 0.5;
  return {{ScalarField::linear(unit(dim, 0)), 0.02, origin},
          {tanh_field(unit(dim, 0)), 0.02, origin},
          {sine_field(unit(dim, 0)), 0.02, off}};
}

std::vector<Point> probe_points(int dim) {
  if (dim == 1) return {point({0.0}), point({0.4}), point({-0.6})};
  return {point({0.0, 0.0}), point({0.7, -0.4}), point({-0.6, 0.5})};
}

ProbeConfig make_config(std::string name, PenalizedPotential pot, ScalarField u, double u_var) {
  const int d = pot.model().dim();
  ProbeConfig c{std::move(name), std::move(pot), std::move(u), u_var, {}, {}, {}, kNaN, {}, {}};
  Vec a = Vec::Zero(d);
  a[0] = 1.0;
  if (d > 1) a[1] = -0.5;
  c.f = sine_field(a);
  c.g = bump_field_scalar();
  c.chi = ScalarField::indicator({unit(d, 0), 0.0});
  c.chi_perimeter = halfspace_perimeter_oracle(c.potential.model(), c.potential.weight(), unit(d, 0), 0.0,
                                               c.potential.domain())
                        .value;
  c.points = probe_points(d);
  c.k2_probes = k2_probes(d);
  return c;
}

Estimate exact(double v) { return Estimate{v, 0.0, 1, {}}; }
}  // namespace

std::vector<ProbeConfig> builtin_probe_matrix() {
  std::vector<ProbeConfig> out;
  {
    const GaussianModel m({1.0});
    PenalizedPotential p(m, ConvexWeight::zero(1), ConvexDomain::whole_space(1));
    out.push_back(make_config("ou-1d", p, ScalarField::indicator({unit(1, 0), 0.0}), 1.0 / std::sqrt(2.0 * M_PI)));
  }
  {
    const GaussianModel m({1.0});
    PenalizedPotential p(m, ConvexWeight::quadratic(Vec::Constant(1, 1.0)), ConvexDomain::whole_space(1));
    out.push_back(make_config("quadratic-1d", p, tanh_field(unit(1, 0)), kNaN));
  }
  {
    const GaussianModel m({2.0, 1.0});
    PenalizedPotential p(m, ConvexWeight::zero(2), ConvexDomain::whole_space(2));
    out.push_back(make_config("ou-2d", p, tanh_field(point({1.0, 0.5})), kNaN));
  }
  {
    const GaussianModel m({2.0, 1.0});
    PenalizedPotential p(m, ConvexWeight::quadratic(point({0.5, 1.0})), ConvexDomain::whole_space(2));
    out.push_back(make_config("quadratic-2d", p, tanh_field(point({1.0, 0.5})), kNaN));
  }
  {
    const GaussianModel m({1.0});
    PenalizedPotential p(m, ConvexWeight::zero(1), ConvexDomain::slab(unit(1, 0), -1.0, 1.0), 0.05);
    out.push_back(make_config("slab-1d", p, slab_profile(), kNaN));
  }
  return out;
}

std::vector<CheckReport> inequality_suite(const std::vector<ProbeConfig>& configs, const SdeConfig& cfg,
                                          const SuiteOptions& opt) {
  cfg.validate();
  if (configs.empty()) throw InvalidArgument("inequality_suite needs at least one configuration");
  if (opt.curve_t.empty()) throw InvalidArgument("inequality_suite needs a nonempty curve_t");
  std::vector<CheckReport> out;
  std::vector<double> k2_values;
  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    const ProbeConfig& c = configs[ci];
    const PenalizedPotential& pot = c.potential;
    const GaussianModel& m = pot.model();
    auto sub = [&](int check) {
      SdeConfig s = cfg;
      s.stream = cfg.stream + static_cast<std::uint32_t>(ci * 32 + static_cast<std::size_t>(check));
      s.paths = opt.path_samples;
      return s;
    };
    auto push = [&](CheckReport r, const std::string& label) {
      r.name += "/" + c.name + label;
      out.push_back(std::move(r));
    };

    push(symmetry_check(pot, c.f, c.g, opt.probe_t, sub(0), opt.path_samples), "");

    for (std::size_t k = 0; k < c.points.size(); ++k)
      push(gradient_contraction_check(pot, c.f, opt.probe_t, c.points[k], 2.0, sub(1 + static_cast<int>(k))),
           "/x" + std::to_string(k));

    const K2Result k2 = calibrate_k2(pot, c.k2_probes, sub(5));
    k2_values.push_back(k2.value);
    push(k2.report, "");

    // Variation curve and the decay bound along it.
    const Estimate variation = std::isfinite(c.u_variation)
                                   ? exact(c.u_variation)
                                   : smooth_variation_oracle(pot, c.u, GradientNorm::H);
    DeGiorgiOptions dg;
    dg.outer_samples = opt.outer_samples;
    dg.inner_paths = m.dim() == 1 ? 1 : opt.inner_paths;
    SdeConfig dcfg = sub(6);
    dcfg.min_steps = std::max(cfg.min_steps, 20);
    const VariationEstimate curve = de_giorgi_curve(pot, c.u, opt.curve_t, dcfg, dg);
    const double rate = gradient_rate(m);
    for (const auto& [t, e] : curve.curve) {
      CheckReport r = inequality_report("variation-decay", e, scaled(variation, std::exp(-rate * t)));
      r.seed = cfg.seed;
      r.extras["t"] = t;
      push(std::move(r), "/t" + std::to_string(t));
    }

    // Content bounds for u and for the half-space indicator.
    const double k2_root = 2.0 * std::sqrt(k2.value);
    ContentOptions co{opt.outer_samples, c.u.is_indicator() ? std::size_t{1} : opt.inner_paths};
    const Estimate cu = ou_content(pot, c.u, opt.probe_t, sub(7), co);
    push(inequality_report("content-bound", cu, scaled(variation, k2_root)), "/u");
    const Estimate cchi = ou_content(pot, c.chi, opt.probe_t, sub(8), {opt.outer_samples, 1});
    push(inequality_report("content-bound", cchi, exact(k2_root * c.chi_perimeter)), "/chi");
    const ContentOptions whole_x{opt.outer_samples, 1, true};
    const Estimate full = pot.penalized() ? ou_content(pot, c.chi, opt.probe_t, sub(8), whole_x) : cchi;
    const Estimate half = ou_content_halfside(pot, c.chi, opt.probe_t, sub(9), whole_x);
    push(equality_report("content-halfside-identity", full, half), "");

    // S_1^* bound on a field with sup |F|_H = 1.
    const int d = m.dim();
    const auto field = [d](const Point& x) { return (x.array().tanh() / std::sqrt(static_cast<double>(d))).matrix().eval(); };
    for (std::size_t k = 0; k < c.points.size(); ++k)
      push(s1_adjoint_check(pot, field, 1.0, opt.probe_t, c.points[k], sub(10 + static_cast<int>(k))),
           "/x" + std::to_string(k));

    // Ledoux chain: variation limit <= (sqrt(pi) / 2) |Q^{1/2}| Ledoux limit.
    SdeConfig lcfg = sub(14);
    lcfg.paths = opt.ledoux_samples;
    const Estimate led =
        ledoux_content(m, pot.weight(), pot.domain(), zero_extension(c.u, m, pot.domain()), opt.ledoux_t, lcfg);
    CheckReport chain = inequality_report("ledoux-chain", curve.extrapolated,
                                          scaled(led, 0.5 * std::sqrt(M_PI) * std::sqrt(m.lambda_max())));
    chain.seed = cfg.seed;
    chain.extras["ledoux"] = led.value;
    chain.extras["variation_oracle"] = variation.value;
    push(std::move(chain), "");
  }
  const auto [lo, hi] = std::minmax_element(k2_values.begin(), k2_values.end());
  CheckReport spread = inequality_report("gradient-bound-k2-spread", exact(*hi / *lo - 1.0), exact(opt.k2_max_variation), 0.0);
  spread.seed = cfg.seed;
  spread.extras["k2_min"] = *lo;
  spread.extras["k2_max"] = *hi;
  out.push_back(std::move(spread));
  return out;
}

}  // namespace gaussbv
