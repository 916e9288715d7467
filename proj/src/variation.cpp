#include "gaussbv/variation.hpp"

#include <cmath>

#include "gaussbv/error.hpp"
#include "gaussbv/nu_sampler.hpp"
#include "gaussbv/parallel.hpp"
#include "gaussbv/quadrature.hpp"
#include "gaussbv/rng.hpp"

namespace gaussbv {

namespace {
constexpr std::uint32_t kTagDeGiorgi = 0x44470000u;
constexpr std::uint32_t kTagOracle = 0x4f520000u;

// Weighted least squares y ~ X beta with weights w; returns beta and its covariance.
std::pair<Vec, Mat> wls(const Mat& x, const Vec& y, const Vec& w) {
  const Mat xtw = x.transpose() * w.asDiagonal();
  const Mat cov = (xtw * x).inverse();
  return {cov * xtw * y, cov};
}
}  // namespace

const char* to_string(ExtrapolationModel m) { return m == ExtrapolationModel::Exponential ? "exponential" : "linear"; }

std::vector<double> geometric_t_grid(double t0, int points) {
  if (!(t0 > 0.0) || points < 1) throw InvalidArgument("t grid needs t0 > 0 and at least one point");
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) t[static_cast<std::size_t>(k)] = t0 * std::ldexp(1.0, -k);
  return t;
}

VariationEstimate extrapolate_curve(std::vector<std::pair<double, Estimate>> curve, double rate) {
  if (curve.empty()) throw InvalidArgument("cannot extrapolate an empty curve");
  VariationEstimate out;
  out.curve = std::move(curve);
  out.rate = rate;
  const std::size_t n = out.curve.size();
  const std::size_t k = std::min<std::size_t>(3, n);
  // The curve is ordered by decreasing t; the fit uses its tail.
  Vec t(k), y(k), se(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& [ti, e] = out.curve[n - k + i];
    t[i] = ti;
    y[i] = e.value;
    se[i] = e.stderr();
  }
  const bool weighted = se.minCoeff() > 0.0;
  const Vec w = weighted ? Vec(se.cwiseAbs2().cwiseInverse()) : Vec(Vec::Ones(k));
  const double floor = weighted ? 0.0 : 1e-12 * std::max(1.0, y.cwiseAbs().maxCoeff());

  Mat xe(k, 1);
  xe.col(0) = (-rate * t).array().exp().matrix();
  auto [be, ce] = wls(xe, y, w);
  const Vec re = y - xe * be;
  bool exp_ok = true;
  for (std::size_t i = 0; i < k; ++i)
    if (std::abs(re[i]) > 5.0 * se[i] + floor) exp_ok = false;
  EstimateMeta meta = out.curve.back().second.meta;
  meta.t = 0.0;
  if (exp_ok || k < 2) {
    out.model = ExtrapolationModel::Exponential;
    out.extrapolated = Estimate{be[0], weighted ? std::sqrt(ce(0, 0)) : 0.0, out.curve.back().second.n, meta};
    return out;
  }
  Mat xl(k, 2);
  xl.col(0).setOnes();
  xl.col(1) = t;
  auto [bl, cl] = wls(xl, y, w);
  out.model = ExtrapolationModel::Linear;
  out.extrapolated = Estimate{bl[0], weighted ? std::sqrt(cl(0, 0)) : 0.0, out.curve.back().second.n, meta};
  return out;
}

VariationEstimate de_giorgi_curve(const PenalizedPotential& potential, const ScalarField& u,
                                  const std::vector<double>& t_list, const SdeConfig& cfg,
                                  const DeGiorgiOptions& opt) {
  const GaussianModel& model = potential.model();
  if (t_list.empty()) throw InvalidArgument("de_giorgi_curve needs a non-empty t list");
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    if (!(t_list[i] > 0.0)) throw InvalidArgument("t values must be positive");
    if (i > 0 && !(t_list[i] < t_list[i - 1])) throw InvalidArgument("t values must be strictly decreasing");
  }
  if (opt.outer_samples < 2 || opt.inner_paths < 1) throw InvalidArgument("de_giorgi_curve sample counts too small");
  cfg.validate();
  const NuSampler nu(potential, NuSampler::Target::Domain, cfg.seed ^ 0x5a5a5a5aULL);
  const ScalarField ut = zero_extension(u, model, potential.domain());
  std::vector<std::pair<double, Estimate>> curve;
  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    const double t = t_list[ti];
    const PathSimulator sim(potential, t, cfg);
    const std::uint32_t tag = kTagDeGiorgi ^ cfg.stream ^ static_cast<std::uint32_t>(ti << 8);
    const RunningStats s =
        reduce_blocks<RunningStats>(opt.outer_samples, [&](std::size_t b, std::size_t e, RunningStats& acc) {
          PathSimulator::Workspace ws;
          Point x;
          Vec mean(model.dim());
          for (std::size_t i = b; i < e; ++i) {
            nu.draw(i, x);
            mean.setZero();
            for (std::size_t j = 0; j < opt.inner_paths; ++j) {
              NormalStream rng(cfg.seed, tag, i, static_cast<std::uint32_t>(j));
              mean += gradient_sample(sim, ws, ut, x, rng, opt.gradient);
            }
            mean /= static_cast<double>(opt.inner_paths);
            // |Q m|_H^2 = sum lambda_i m_i^2.
            acc.add(std::sqrt((model.eigenvalues().array() * mean.array().square()).sum()));
          }
        });
    Estimate est = scale_by_mass(s.estimate(), nu.mass());
    est.meta = EstimateMeta{t, potential.epsilon(), sim.dt(), cfg.seed};
    curve.emplace_back(t, est);
  }
  return extrapolate_curve(std::move(curve), 1.0 / model.lambda_max());
}

Estimate smooth_variation_oracle(const PenalizedPotential& potential, const ScalarField& u, GradientNorm norm,
                                 const GaussianQuadrature& quad) {
  const GaussianModel& model = potential.model();
  const ConvexWeight& w = potential.weight();
  auto grad_norm = [&](const Point& x) {
    const Vec g = u.gradient(x);
    return norm == GradientNorm::H ? std::sqrt((model.eigenvalues().array() * g.array().square()).sum()) : g.norm();
  };
  if (potential.domain().is_whole_space() && model.dim() <= quad.max_tensor_dim) {
    return gaussian_expectation(
        model, [&](const Point& x) { return std::exp(-w.value(x)) * grad_norm(x); }, quad);
  }
  const NuSampler nu(potential, NuSampler::Target::Domain, quad.seed ^ kTagOracle);
  const RunningStats s = reduce_blocks<RunningStats>(quad.mc_samples, [&](std::size_t b, std::size_t e, RunningStats& acc) {
    Point x;
    for (std::size_t i = b; i < e; ++i) {
      nu.draw(i, x);
      acc.add(grad_norm(x));
    }
  });
  return scale_by_mass(s.estimate(), nu.mass());
}

Estimate halfspace_perimeter_oracle(const GaussianModel& model, const ConvexWeight& weight, const Vec& a, double c,
                                    const ConvexDomain& domain, const GaussianQuadrature& quad) {
  model.require_dim(a.size(), "halfspace_perimeter_oracle");
  if (!(a.norm() > 0.0)) throw InvalidArgument("half-space normal must be non-zero");
  const Vec qa = model.eigenvalues().cwiseProduct(a);
  const double sigma2 = a.dot(qa);
  const double sigma = std::sqrt(sigma2);
  const double z = c / sigma;
  const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  if (density == 0.0) return Estimate{0.0, 0.0, 0, {}};
  // X given <a, X> = c is Y + Q a (c - <a, Y>) / sigma^2 with Y ~ gamma.
  auto conditional = [&](const Point& y) {
    const Point x = y + qa * ((c - a.dot(y)) / sigma2);
    if (!domain.is_whole_space() && !domain.contains(model, x)) return 0.0;
    return std::exp(-weight.value(x));
  };
  if (weight.is_zero() && domain.is_whole_space()) return Estimate{density, 0.0, 1, {}};
  Estimate e;
  if (domain.is_whole_space()) {
    e = gaussian_expectation(model, conditional, quad);
  } else {
    GaussianQuadrature mc = quad;
    mc.max_tensor_dim = 0;
    e = gaussian_expectation(model, conditional, mc);
  }
  e.value *= density;
  e.stderr_ *= density;
  return e;
}

}  // namespace gaussbv
