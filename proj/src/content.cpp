#include "gaussbv/content.hpp"

#include <cmath>

#include "gaussbv/error.hpp"
#include "gaussbv/nu_sampler.hpp"
#include "gaussbv/parallel.hpp"

namespace gaussbv {

namespace {
constexpr std::uint32_t kTagContent = 0x43540000u;
constexpr std::uint32_t kTagHalfside = 0x48530000u;
constexpr std::uint32_t kTagLedoux = 0x4c440000u;

void require_positive_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("content needs t > 0");
}

NuSampler::Target target(const PenalizedPotential& potential, const ContentOptions& opt) {
  return opt.penalized_measure && potential.penalized() ? NuSampler::Target::Penalized : NuSampler::Target::Domain;
}

Estimate finish(const RunningStats& s, const NuSampler& nu, double scale, double t, double eps, double dt,
                std::uint64_t seed) {
  Estimate e = scale_by_mass(s.estimate(), nu.mass());
  e.value *= scale;
  e.stderr_ *= scale;
  e.meta = EstimateMeta{t, eps, dt, seed};
  return e;
}
}  // namespace

Estimate ou_content(const PenalizedPotential& potential, const ScalarField& u, double t, const SdeConfig& cfg,
                    const ContentOptions& opt) {
  require_positive_time(t);
  cfg.validate();
  if (opt.outer_samples < 2 || opt.inner_paths < 1) throw InvalidArgument("content sample counts too small");
  const GaussianModel& model = potential.model();
  const NuSampler nu(potential, target(potential, opt), cfg.seed ^ 0x5a5a5a5aULL);
  const ScalarField ut = zero_extension(u, model, potential.domain());
  const PathSimulator sim(potential, t, cfg);
  const RunningStats s =
      reduce_blocks<RunningStats>(opt.outer_samples, [&](std::size_t b, std::size_t e, RunningStats& acc) {
        PathSimulator::Workspace ws;
        Point x;
        for (std::size_t i = b; i < e; ++i) {
          nu.draw(i, x);
          double mean = 0.0;
          for (std::size_t j = 0; j < opt.inner_paths; ++j) {
            NormalStream rng(cfg.seed, kTagContent ^ cfg.stream, i, static_cast<std::uint32_t>(j));
            sim.run(x, rng, ws, false, false);
            mean += ut(ws.x);
          }
          acc.add(std::abs(mean / static_cast<double>(opt.inner_paths) - ut(x)));
        }
      });
  return finish(s, nu, 1.0 / std::sqrt(t), t, potential.epsilon(), sim.dt(), cfg.seed);
}

Estimate ou_content_halfside(const PenalizedPotential& potential, const ScalarField& chi_e, double t,
                             const SdeConfig& cfg, const ContentOptions& opt) {
  require_positive_time(t);
  cfg.validate();
  if (opt.outer_samples < 2) throw InvalidArgument("content sample counts too small");
  const GaussianModel& model = potential.model();
  const NuSampler nu(potential, target(potential, opt), cfg.seed ^ 0x5a5a5a5aULL);
  const ScalarField ct = zero_extension(chi_e, model, potential.domain());
  const PathSimulator sim(potential, t, cfg);
  const RunningStats s =
      reduce_blocks<RunningStats>(opt.outer_samples, [&](std::size_t b, std::size_t e, RunningStats& acc) {
        PathSimulator::Workspace ws;
        Point x;
        for (std::size_t i = b; i < e; ++i) {
          nu.draw(i, x);
          if (ct(x) != 0.0) {
            acc.add(0.0);
            continue;
          }
          NormalStream rng(cfg.seed, kTagHalfside ^ cfg.stream, i);
          sim.run(x, rng, ws, false, false);
          acc.add(ct(ws.x));
        }
      });
  return finish(s, nu, 2.0 / std::sqrt(t), t, potential.epsilon(), sim.dt(), cfg.seed);
}

Estimate ledoux_content(const GaussianModel& model, const ConvexWeight& weight, const ConvexDomain& domain,
                        const ScalarField& u, double t, const SdeConfig& cfg) {
  require_positive_time(t);
  cfg.validate();
  const PenalizedPotential pot(model, weight, domain);
  const NuSampler nu(pot, NuSampler::Target::Domain, cfg.seed ^ 0x5a5a5a5aULL);
  const double a = std::exp(-t);
  const double b = std::sqrt(-std::expm1(-2.0 * t));
  const RunningStats s = reduce_blocks<RunningStats>(cfg.paths, [&](std::size_t lo, std::size_t hi, RunningStats& acc) {
    Point x, y(model.dim());
    for (std::size_t i = lo; i < hi; ++i) {
      nu.draw(i, x);
      NormalStream rng(cfg.seed, kTagLedoux ^ cfg.stream, i);
      for (int k = 0; k < model.dim(); ++k) y[k] = model.sqrt_eigenvalues()[k] * rng.next();
      acc.add(std::abs(u(a * x + b * y) - u(x)));
    }
  });
  return finish(s, nu, 1.0 / std::sqrt(t), t, kInf, 0.0, cfg.seed);
}

}  // namespace gaussbv
