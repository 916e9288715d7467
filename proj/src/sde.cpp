#include "gaussbv/sde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gaussbv/error.hpp"
#include "gaussbv/parallel.hpp"

namespace gaussbv {

namespace {
constexpr std::uint32_t kTagApply = 0x41500000u;
constexpr std::uint32_t kTagGradient = 0x47520000u;
}  // namespace

void SdeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("sde.dt must be positive");
  if (paths < 1) throw InvalidArgument("sde.paths must be >= 1");
  if (scheme != "euler-maruyama") throw InvalidArgument("sde.scheme must be euler-maruyama");
  if (min_steps < 1) throw InvalidArgument("sde.min_steps must be >= 1");
}

const char* to_string(GradientMode m) {
  return m == GradientMode::JacobianFlow ? "jacobian-flow" : "mollified-bel";
}

GradientMode gradient_mode_from_string(const std::string& s) {
  if (s == "jacobian-flow") return GradientMode::JacobianFlow;
  if (s == "mollified-bel") return GradientMode::MollifiedBel;
  throw InvalidArgument("unknown gradient mode '" + s + "'");
}

double default_mollifier(const GaussianModel& model, double t) { return std::sqrt(model.lambda_max() * t) / 10.0; }

Vec sde_drift(const PenalizedPotential& potential, const Point& x) {
  potential.model().require_dim(x.size(), "sde_drift");
  Vec b(x.size());
  potential.drift(x, b);
  return b;
}

double effective_dt(const PenalizedPotential& potential, const SdeConfig& cfg, double t) {
  cfg.validate();
  if (!(t > 0.0)) return cfg.dt;
  double dt = std::min(cfg.dt, t / cfg.min_steps);
  if (potential.penalized()) dt = std::min(dt, std::min(potential.epsilon(), potential.model().lambda_min()) / 10.0);
  const double n = std::ceil(t / dt - 1e-9);
  return t / n;
}

PathSimulator::PathSimulator(const PenalizedPotential& potential, double t, const SdeConfig& cfg)
    : pot_(potential), t_(t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("time must be finite and non-negative");
  dt_ = effective_dt(potential, cfg, t);
  steps_ = t > 0.0 ? static_cast<int>(std::llround(t / dt_)) : 0;
  hessian_free_ = potential.weight().is_zero() && !potential.penalized();
  const Vec& l = potential.model().eigenvalues();
  diffusion_ = (2.0 * dt_ * l).cwiseSqrt();
  bel_scale_ = (2.0 * l).cwiseSqrt().cwiseInverse() * std::sqrt(dt_);
}

void PathSimulator::set_record_steps(std::vector<int> steps) {
  for (int s : steps)
    if (s < 0 || s > steps_) throw InvalidArgument("record step outside the path");
  record_ = std::move(steps);
}

void PathSimulator::run(const Point& x0, NormalStream& rng, Workspace& ws, bool jacobian, bool bel) const {
  const Eigen::Index d = x0.size();
  ws.x = x0;
  ws.b.resize(d);
  ws.noise.resize(d);
  if (jacobian || bel) {
    ws.jac.setIdentity(d, d);
    ws.a.resize(d, d);
    ws.tmp.resize(d, d);
  }
  if (bel) ws.bel.setZero(d);
  ws.rec_x.resize(record_.size());
  if (jacobian) ws.rec_jac.resize(record_.size());
  auto record = [&](int k) {
    for (std::size_t r = 0; r < record_.size(); ++r) {
      if (record_[r] == k) {
        ws.rec_x[r] = ws.x;
        if (jacobian) ws.rec_jac[r] = ws.jac;
      }
    }
  };
  if (!record_.empty()) record(0);
  for (int k = 0; k < steps_; ++k) {
    pot_.drift(ws.x, ws.b);
    for (Eigen::Index i = 0; i < d; ++i) ws.noise[i] = rng.next();
    if (bel) ws.bel.noalias() += ws.jac.transpose() * bel_scale_.cwiseProduct(ws.noise);
    if (jacobian || bel) {
      if (hessian_free_) {
        ws.jac *= (1.0 - dt_);
      } else {
        pot_.h_hessian(ws.x, ws.a);
        ws.tmp.noalias() = ws.a * ws.jac;
        ws.jac = (1.0 - dt_) * ws.jac - dt_ * ws.tmp;
      }
    }
    ws.x += dt_ * ws.b + diffusion_.cwiseProduct(ws.noise);
    if (!record_.empty()) record(k + 1);
  }
  if (!ws.x.allFinite() || ((jacobian || bel) && !ws.jac.allFinite()))
    throw NumericalError("non-finite path state (dt=" + std::to_string(dt_) + ")");
}

Vec gradient_sample(const PathSimulator& sim, PathSimulator::Workspace& ws, const ScalarField& f,
                    const Point& x, NormalStream& rng, const GradientOptions& opt) {
  const double t = sim.horizon();
  const double delta =
      f.is_indicator() ? (std::isnan(opt.delta) ? default_mollifier(sim.potential().model(), t) : opt.delta) : 0.0;
  if (opt.mode == GradientMode::JacobianFlow) {
    sim.run(x, rng, ws, true, false);
    const Vec g = f.is_indicator() ? f.mollified_gradient(ws.x, delta) : f.gradient(ws.x);
    return ws.jac.transpose() * g;
  }
  if (!(t > 0.0)) throw InvalidArgument("mollified-bel gradient needs t > 0");
  sim.run(x, rng, ws, false, true);
  const double fx = f.mollified_value(ws.x, delta) - f.mollified_value(x, delta);
  return ws.bel * (fx / t);
}

Estimate apply_semigroup(const PenalizedPotential& potential, const ScalarField& f, double t, const Point& x,
                         const SdeConfig& cfg) {
  potential.model().require_dim(x.size(), "apply_semigroup");
  cfg.validate();
  const double fx = f(x);
  EstimateMeta meta{t, potential.epsilon(), 0.0, cfg.seed};
  if (t == 0.0) return Estimate{fx, 0.0, 1, meta};
  const PathSimulator sim(potential, t, cfg);
  meta.dt = sim.dt();
  const RunningStats s =
      reduce_blocks<RunningStats>(cfg.paths, [&](std::size_t b, std::size_t e, RunningStats& acc) {
        PathSimulator::Workspace ws;
        for (std::size_t p = b; p < e; ++p) {
          NormalStream rng(cfg.seed, kTagApply ^ cfg.stream, p);
          sim.run(x, rng, ws, false, false);
          const double v = f(ws.x) - fx;
          if (!std::isfinite(v)) throw NumericalError("non-finite field value on path " + std::to_string(p));
          acc.add(v);
        }
      });
  Estimate est = s.estimate(meta);
  est.value += fx;
  return est;
}

VectorEstimate semigroup_gradient(const PenalizedPotential& potential, const ScalarField& f, double t,
                                  const Point& x, const SdeConfig& cfg, const GradientOptions& opt) {
  const GaussianModel& model = potential.model();
  model.require_dim(x.size(), "semigroup_gradient");
  cfg.validate();
  const PathSimulator sim(potential, t, cfg);
  const VectorStats s = reduce_blocks<VectorStats>(
      cfg.paths,
      [&](std::size_t b, std::size_t e, VectorStats& acc) {
        PathSimulator::Workspace ws;
        for (std::size_t p = b; p < e; ++p) {
          NormalStream rng(cfg.seed, kTagGradient ^ cfg.stream, p);
          acc.add(gradient_sample(sim, ws, f, x, rng, opt));
        }
      },
      VectorStats(model.dim()));
  VectorEstimate out;
  out.value = model.h_gradient_from(s.mean());
  out.stderr = model.eigenvalues().cwiseProduct(s.stderr());
  out.n = s.count();
  out.meta = EstimateMeta{t, potential.epsilon(), sim.dt(), cfg.seed};
  return out;
}

ScalarField zero_extension(const ScalarField& f, const GaussianModel& model, const ConvexDomain& domain) {
  if (domain.is_whole_space()) return f;
  ScalarField g([f, model, domain](const Point& x) { return domain.contains(model, x) ? f(x) : 0.0; });
  if (f.bounded()) g.set_bounded(f.sup_abs());
  g.set_name(f.name() + "-zero-extended");
  return g;
}

}  // namespace gaussbv
