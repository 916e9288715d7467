#include "gaussbv/duality.hpp"

#include <cmath>
#include <limits>

#include "gaussbv/error.hpp"
#include "gaussbv/quadrature.hpp"

namespace gaussbv {

double divnu_field(const GaussianModel& model, const ConvexWeight& weight, const VectorField& g, const Point& x) {
  model.require_dim(x.size(), "divnu_field");
  const Vec ge = g.e_coords(x);
  Vec dg(x.size());
  if (g.diagonal_partials) {
    dg = g.diagonal_partials(x);
  } else {
    Point y = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
      y[i] = x[i] + h;
      const double gp = g.e_coords(y)[i];
      y[i] = x[i] - h;
      const double gm = g.e_coords(y)[i];
      y[i] = x[i];
      dg[i] = (gp - gm) / (2.0 * h);
    }
  }
  const Vec du = weight.gradient(x);
  const Vec& s = model.sqrt_eigenvalues();
  double div = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) div += s[i] * dg[i] - ge[i] * s[i] * du[i] - x[i] * ge[i] / s[i];
  return div;
}

namespace {

// Range of <a, x> over the box, +-inf when unbounded along a.
std::pair<double, double> linear_range(const Vec& a, const Vec& lo, const Vec& hi) {
  double mn = 0.0, mx = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    const double p = a[i] * lo[i], q = a[i] * hi[i];
    mn += std::min(p, q);
    mx += std::max(p, q);
  }
  return {mn, mx};
}

void require_support_inside(const GaussianModel& model, const ConvexDomain& dom, const VectorField& g) {
  if (dom.is_whole_space()) return;
  if (!g.support) throw InvalidArgument("duality on a proper domain needs a support box for g");
  const auto& [lo, hi] = *g.support;
  if (dom.kind() == ConvexDomain::Kind::HalfSpace || dom.kind() == ConvexDomain::Kind::Slab) {
    const auto [mn, mx] = linear_range(dom.normal(), lo, hi);
    if (!(mn > dom.lower() && mx < dom.upper())) throw InvalidArgument("support of g touches the boundary of Omega");
    return;
  }
  if (!lo.allFinite() || !hi.allFinite()) throw InvalidArgument("support of g touches the boundary of Omega");
  // A box lies in a convex set iff its corners do.
  const Eigen::Index d = lo.size();
  for (long mask = 0; mask < (1L << d); ++mask) {
    Point c(d);
    for (Eigen::Index i = 0; i < d; ++i) c[i] = (mask >> i) & 1 ? hi[i] : lo[i];
    if (!dom.contains(model, c)) throw InvalidArgument("support of g touches the boundary of Omega");
  }
}

}  // namespace

Estimate duality_lower_bound(const PenalizedPotential& potential, const ScalarField& u, const VectorField& g,
                             const DualityOptions& opt) {
  const GaussianModel& model = potential.model();
  const ConvexWeight& w = potential.weight();
  require_support_inside(model, potential.domain(), g);
  const int d = model.dim();
  if (g.support && d <= 2) {
    // Composite Gauss-Legendre against the density of nu; unbounded sides
    // are cut where the Gaussian density carries e^{-72}.
    const QuadratureRule gl = gauss_legendre(opt.points_per_panel);
    Vec lo = g.support->first, hi = g.support->second;
    for (int k = 0; k < d; ++k) {
      const double cut = 12.0 * std::sqrt(model.lambda(k));
      lo[k] = std::max(lo[k], -cut);
      hi[k] = std::min(hi[k], cut);
    }
    const int panels = d == 1 ? opt.panels : std::max(50, static_cast<int>(std::sqrt(double(opt.panels)) * 4));
    double log_norm = 0.0;
    for (int k = 0; k < d; ++k) log_norm -= 0.5 * std::log(2.0 * M_PI * model.lambda(k));
    std::vector<std::vector<double>> ax(static_cast<std::size_t>(d)), aw(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      const double h = (hi[k] - lo[k]) / panels;
      for (int p = 0; p < panels; ++p)
        for (std::size_t q = 0; q < gl.size(); ++q) {
          ax[static_cast<std::size_t>(k)].push_back(lo[k] + h * (p + gl.nodes[q]));
          aw[static_cast<std::size_t>(k)].push_back(h * gl.weights[q]);
        }
    }
    double sum = 0.0;
    Point x(d);
    const std::size_t m = ax[0].size();
    auto term = [&]() {
      double logd = log_norm - w.value(x);
      for (int k = 0; k < d; ++k) logd -= x[k] * x[k] / (2.0 * model.lambda(k));
      return u(x) * divnu_field(model, w, g, x) * std::exp(logd);
    };
    if (d == 1) {
      for (std::size_t i = 0; i < m; ++i) {
        x[0] = ax[0][i];
        sum += aw[0][i] * term();
      }
    } else {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < ax[1].size(); ++j) {
          x[0] = ax[0][i];
          x[1] = ax[1][j];
          sum += aw[0][i] * aw[1][j] * term();
        }
    }
    return Estimate{sum, 0.0, m, {}};
  }
  if (potential.domain().is_whole_space()) {
    return gaussian_expectation(
        model, [&](const Point& x) { return std::exp(-w.value(x)) * u(x) * divnu_field(model, w, g, x); },
        opt.gaussian);
  }
  GaussianQuadrature mc = opt.gaussian;
  mc.max_tensor_dim = 0;
  return gaussian_expectation(
      model,
      [&](const Point& x) {
        return potential.domain().contains(model, x) ? std::exp(-w.value(x)) * u(x) * divnu_field(model, w, g, x)
                                                     : 0.0;
      },
      mc);
}

VectorField bump_field(int dim, double center, double width) {
  if (!(width > 0.0)) throw InvalidArgument("bump width must be positive");
  VectorField g;
  auto psi = [](double s) { return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; };
  g.e_coords = [=](const Point& x) {
    Vec e = Vec::Zero(x.size());
    e[0] = psi((x[0] - center) / width);
    return e;
  };
  g.diagonal_partials = [=](const Point& x) {
    Vec e = Vec::Zero(x.size());
    const double s = (x[0] - center) / width;
    if (std::abs(s) < 1.0) e[0] = psi(s) * (-2.0 * s / std::pow(1.0 - s * s, 2)) / width;
    return e;
  };
  Vec lo = Vec::Constant(dim, -std::numeric_limits<double>::infinity()), hi = Vec::Constant(dim, std::numeric_limits<double>::infinity());
  lo[0] = center - width;
  hi[0] = center + width;
  g.support = std::make_pair(lo, hi);
  return g;
}

}  // namespace gaussbv
