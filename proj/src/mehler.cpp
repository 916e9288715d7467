#include "gaussbv/mehler.hpp"

#include <cmath>

#include "gaussbv/error.hpp"
#include "gaussbv/parallel.hpp"
#include "gaussbv/quadrature.hpp"
#include "gaussbv/rng.hpp"

namespace gaussbv {

namespace {
constexpr std::uint32_t kTagGamma = 0x47414d00u;
constexpr std::uint32_t kTagMehler = 0x4d454800u;
}  // namespace

Estimate gaussian_expectation(const GaussianModel& model, const std::function<double(const Point&)>& g,
                              const GaussianQuadrature& rule) {
  const int d = model.dim();
  if (rule.order < 1) throw InvalidArgument("quadrature order must be >= 1");
  if (d <= rule.max_tensor_dim) {
    const QuadratureRule gh = gauss_hermite(rule.order);
    double sum = 0.0;
    Point y(d);
    for_each_tensor_node(d, gh, [&](const Vec& z, double w) {
      y = model.sqrt_eigenvalues().cwiseProduct(z);
      sum += w * g(y);
    });
    if (!std::isfinite(sum)) throw NumericalError("non-finite Gaussian quadrature");
    return Estimate{sum, 0.0, static_cast<std::size_t>(std::pow(gh.size(), d)), {}};
  }
  if (rule.mc_samples < 2) throw InvalidArgument("need at least two Monte Carlo samples");
  const RunningStats s = reduce_blocks<RunningStats>(rule.mc_samples, [&](std::size_t b, std::size_t e, RunningStats& acc) {
    Point y(d);
    for (std::size_t i = b; i < e; ++i) {
      NormalStream rng(rule.seed, kTagMehler, i);
      for (int k = 0; k < d; ++k) y[k] = model.sqrt_eigenvalues()[k] * rng.next();
      acc.add(g(y));
    }
  });
  if (!std::isfinite(s.mean())) throw NumericalError("non-finite Gaussian expectation");
  Estimate est = s.estimate();
  est.meta.seed = rule.seed;
  return est;
}

Estimate mehler_apply(const GaussianModel& model, const ScalarField& f, double t, const Point& x,
                      const GaussianQuadrature& rule) {
  model.require_dim(x.size(), "mehler_apply");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("time must be finite and non-negative");
  if (t == 0.0) {
    Estimate e{f(x), 0.0, 1, {}};
    e.meta.t = 0.0;
    return e;
  }
  const double a = std::exp(-t);
  const double b = std::sqrt(-std::expm1(-2.0 * t));
  const Point ax = a * x;
  Estimate e = gaussian_expectation(
      model, [&](const Point& y) { return f(ax + b * y); }, rule);
  e.meta.t = t;
  return e;
}

std::vector<Point> sample_gamma(const GaussianModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("sample_gamma needs n >= 1");
  const int d = model.dim();
  std::vector<Point> out(n, Point(d));
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    NormalStream rng(seed, kTagGamma, static_cast<std::uint64_t>(i));
    Point& p = out[static_cast<std::size_t>(i)];
    for (int k = 0; k < d; ++k) p[k] = model.sqrt_eigenvalues()[k] * rng.next();
  }
  return out;
}

}  // namespace gaussbv
