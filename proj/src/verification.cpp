#include "gaussbv/verification.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "gaussbv/error.hpp"
#include "gaussbv/nu_sampler.hpp"
#include "gaussbv/parallel.hpp"
#include "gaussbv/quadrature.hpp"

namespace gaussbv {

namespace {
constexpr std::uint32_t kTagCommutation = 0x434d0000u;
constexpr std::uint32_t kTagSplit = 0x53500000u;
constexpr std::uint32_t kTagAdjoint = 0x41440000u;
constexpr std::uint32_t kTagVoc = 0x564f0000u;
constexpr std::uint32_t kTagEnvelope = 0x45560000u;
constexpr std::uint32_t kTagSymmetry = 0x53590000u;

void require_time(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument(std::string(what) + " needs t > 0");
}

CheckReport make_report(std::string name, const Estimate& lhs, const Estimate& rhs, double residual, double se,
                        double floor) {
  CheckReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = residual;
  r.tolerance = std::max(floor, 3.0 * se);
  r.verdict = std::abs(residual) <= r.tolerance ? Verdict::Pass : Verdict::Fail;
  r.seed = lhs.meta.seed;
  return r;
}

Estimate exact(double v, EstimateMeta meta = {}) { return Estimate{v, 0.0, 1, meta}; }

// Gauss-Legendre nodes of the time integral mapped to recorded step indices.
struct TimeNodes {
  std::vector<double> r;       // t - s at the node (time from start)
  std::vector<double> weight;  // ds weight
  std::vector<int> step;
};

TimeNodes time_nodes(int order, double t, double dt, int steps) {
  const QuadratureRule rule = gauss_legendre(order);
  TimeNodes n;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const int idx = std::clamp(static_cast<int>(std::lround((t - t * rule.nodes[k]) / dt)), 0, steps);
    n.step.push_back(idx);
    n.r.push_back(idx * dt);
    n.weight.push_back(t * rule.weights[k]);
  }
  return n;
}

// Per-path terms of the commutation identity. The recorded states start at
// slot `offset` of the workspace.
struct CommutationTerms {
  Vec lhs, first, integral;
};

Vec decay_factor(const GaussianModel& m, double r, bool per_axis) {
  if (!per_axis) return Vec::Constant(m.dim(), std::exp(-r));
  return (-r * m.eigenvalues().cwiseInverse()).array().exp().matrix();
}

class CommutationSampler {
 public:
  CommutationSampler(const PenalizedPotential& pot, double t, const SdeConfig& cfg, const TimeQuadrature& quad)
      : pot_(pot), sim_(pot, t, cfg), quad_(quad) {
    if (quad.order < 2) throw InvalidArgument("time quadrature order must be at least 2");
    hi_ = time_nodes(quad.order, t, sim_.dt(), sim_.steps());
    lo_ = time_nodes(quad.order / 2, t, sim_.dt(), sim_.steps());
    std::vector<int> rec = hi_.step;
    rec.insert(rec.end(), lo_.step.begin(), lo_.step.end());
    sim_.set_record_steps(rec);
    first_factor_ = decay_factor(pot.model(), t, quad.per_axis_factor);
  }

  const PathSimulator& sim() const { return sim_; }

  // Fills terms for the order-n rule (hi) and the integral of the order-n/2 rule.
  void sample(const ScalarField& f, const Point& x, NormalStream& rng, PathSimulator::Workspace& ws,
              CommutationTerms& hi, Vec& integral_lo) const {
    const GaussianModel& m = pot_.model();
    const Vec& lam = m.eigenvalues();
    sim_.run(x, rng, ws, true, false);
    const Vec g = f.gradient(ws.x);
    const Vec jt_g = ws.jac.transpose() * g;
    hi.lhs = lam.cwiseProduct(jt_g);
    hi.first = first_factor_.cwiseProduct(lam.cwiseProduct(g));
    hi.integral = accumulate(hi_, 0, jt_g, ws);
    integral_lo = accumulate(lo_, hi_.step.size(), jt_g, ws);
  }

 private:
  Vec accumulate(const TimeNodes& nodes, std::size_t offset, const Vec& jt_g, PathSimulator::Workspace& ws) const {
    const GaussianModel& m = pot_.model();
    Vec sum = Vec::Zero(m.dim());
    Mat a(m.dim(), m.dim());
    for (std::size_t k = 0; k < nodes.step.size(); ++k) {
      const Point& xr = ws.rec_x[offset + k];
      pot_.h_hessian(xr, a);
      if (a.isZero(0.0)) continue;
      // D_H T(s) f at X_r along this path: Q (J_t J_r^{-1})^T grad f(X_t).
      const Vec inner = m.eigenvalues().cwiseProduct(ws.rec_jac[offset + k].transpose().partialPivLu().solve(jt_g));
      sum += nodes.weight[k] * decay_factor(m, nodes.r[k], quad_.per_axis_factor).cwiseProduct(a * inner);
    }
    return sum;
  }

  const PenalizedPotential& pot_;
  PathSimulator sim_;
  TimeQuadrature quad_;
  TimeNodes hi_, lo_;
  Vec first_factor_;
};

Estimate h_norm_estimate(const GaussianModel& m, const Vec& mean, const Vec& se, EstimateMeta meta) {
  return Estimate{std::sqrt(m.h_norm_sq(mean)), std::sqrt(m.h_norm_sq(se)), 1, meta};
}

// sqrt of a mass-scaled mean, with delta-method error.
Estimate sqrt_estimate(const Estimate& e) {
  const double v = std::sqrt(std::max(e.value, 0.0));
  return Estimate{v, v > 0.0 ? e.stderr() / (2.0 * v) : 0.0, e.n, e.meta};
}

Estimate product(const Estimate& a, const Estimate& b) {
  const double v = a.value * b.value;
  const double se = std::sqrt(std::pow(a.stderr() * b.value, 2) + std::pow(b.stderr() * a.value, 2));
  return Estimate{v, se, std::min(a.n, b.n), a.meta};
}
}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Report: return "report";
  }
  return "fail";
}

CheckReport equality_report(std::string name, const Estimate& lhs, const Estimate& rhs, double floor) {
  return make_report(std::move(name), lhs, rhs, lhs.value - rhs.value, combined_stderr(lhs.stderr(), rhs.stderr()),
                     floor);
}

CheckReport inequality_report(std::string name, const Estimate& lhs, const Estimate& rhs, double floor) {
  return make_report(std::move(name), lhs, rhs, std::max(0.0, lhs.value - rhs.value),
                     combined_stderr(lhs.stderr(), rhs.stderr()), floor);
}

nlohmann::json to_json(const Estimate& e) {
  return {{"value", e.value}, {"stderr", e.stderr()}, {"n", e.n}, {"t", e.meta.t},
          {"eps", std::isfinite(e.meta.eps) ? nlohmann::json(e.meta.eps) : nlohmann::json("inf")},
          {"dt", e.meta.dt}};
}

nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json j = {{"name", r.name},           {"lhs", to_json(r.lhs)},    {"rhs", to_json(r.rhs)},
                      {"residual", r.residual},   {"tolerance", r.tolerance}, {"verdict", to_string(r.verdict)},
                      {"seed", r.seed},           {"digest", r.digest}};
  if (!r.extras.empty()) j["extras"] = r.extras;
  if (!r.flags.empty()) j["flags"] = r.flags;
  return j;
}

double gradient_rate(const GaussianModel& model) { return std::min(1.0, 1.0 / model.lambda_max()); }

CheckReport commutation_residual(const PenalizedPotential& potential, const ScalarField& f, double t,
                                 const Point& x, const TimeQuadrature& quad, const SdeConfig& cfg) {
  require_time(t, "commutation_residual");
  cfg.validate();
  const GaussianModel& m = potential.model();
  m.require_dim(x.size(), "commutation_residual");
  const CommutationSampler sampler(potential, t, cfg, quad);
  const int d = m.dim();
  struct Acc {
    VectorStats lhs, first, integral, res_hi, res_lo;
    void merge(const Acc& o) {
      lhs.merge(o.lhs);
      first.merge(o.first);
      integral.merge(o.integral);
      res_hi.merge(o.res_hi);
      res_lo.merge(o.res_lo);
    }
  };
  const Acc init{VectorStats(d), VectorStats(d), VectorStats(d), VectorStats(d), VectorStats(d)};
  const Acc acc = reduce_blocks<Acc>(
      cfg.paths,
      [&](std::size_t b, std::size_t e, Acc& a) {
        PathSimulator::Workspace ws;
        CommutationTerms terms;
        Vec lo;
        for (std::size_t p = b; p < e; ++p) {
          NormalStream rng(cfg.seed, kTagCommutation ^ cfg.stream, p);
          sampler.sample(f, x, rng, ws, terms, lo);
          a.lhs.add(terms.lhs);
          a.first.add(terms.first);
          a.integral.add(terms.integral);
          a.res_hi.add(terms.lhs - terms.first + terms.integral);
          a.res_lo.add(terms.lhs - terms.first + lo);
        }
      },
      init);
  const EstimateMeta meta{t, potential.epsilon(), sampler.sim().dt(), cfg.seed};
  const Estimate lhs = h_norm_estimate(m, acc.lhs.mean(), acc.lhs.stderr(), meta);
  const Vec rhs_mean = acc.first.mean() - acc.integral.mean();
  const Estimate rhs = h_norm_estimate(m, rhs_mean, (acc.first.stderr().array().square() +
                                                     acc.integral.stderr().array().square()).sqrt().matrix(),
                                       meta);
  const Vec res = acc.res_hi.mean();
  const double res_se = std::sqrt(m.h_norm_sq(acc.res_hi.stderr()));
  CheckReport r = make_report("commutation", lhs, rhs, std::sqrt(m.h_norm_sq(res)), res_se, kToleranceFloor);
  r.seed = cfg.seed;
  const double gap = std::sqrt(m.h_norm_sq(res - acc.res_lo.mean()));
  r.extras["quadrature_gap"] = gap;
  r.extras["residual_stderr"] = res_se;
  r.extras["dt"] = sampler.sim().dt();
  r.extras["paths"] = static_cast<double>(cfg.paths);
  for (int i = 0; i < d; ++i) {
    const std::string s = std::to_string(i);
    r.extras["lhs_" + s] = acc.lhs.mean()[i];
    r.extras["lhs_stderr_" + s] = acc.lhs.stderr()[i];
    r.extras["first_" + s] = acc.first.mean()[i];
    r.extras["integral_" + s] = acc.integral.mean()[i];
    r.extras["residual_" + s] = res[i];
  }
  if (gap > r.tolerance) r.flags.push_back("quadrature-order-insufficient");
  return r;
}

SplitReport operator_split_check(const PenalizedPotential& potential, const ScalarField& phi, double t, double k2,
                                 const SdeConfig& cfg, const SplitOptions& opt) {
  require_time(t, "operator_split_check");
  cfg.validate();
  if (opt.outer_samples < 2 || opt.inner_paths < 1) throw InvalidArgument("split sample counts too small");
  if (!(k2 > 0.0)) throw InvalidArgument("operator_split_check needs K2 > 0");
  const GaussianModel& m = potential.model();
  const int d = m.dim();
  const NuSampler nu(potential, NuSampler::Target::Domain, cfg.seed ^ 0x5a5a5a5aULL);
  const CommutationSampler sampler(potential, t, cfg, opt.quad);
  struct Acc {
    RunningStats res, s2, hess_sq, phi_sq;
    void merge(const Acc& o) {
      res.merge(o.res);
      s2.merge(o.s2);
      hess_sq.merge(o.hess_sq);
      phi_sq.merge(o.phi_sq);
    }
  };
  const Acc acc = reduce_blocks<Acc>(opt.outer_samples, [&](std::size_t b, std::size_t e, Acc& a) {
    PathSimulator::Workspace ws;
    CommutationTerms terms;
    Vec lo;
    Point x;
    Mat hu(d, d);
    for (std::size_t i = b; i < e; ++i) {
      nu.draw(i, x);
      Vec res = Vec::Zero(d), s2 = Vec::Zero(d);
      for (std::size_t j = 0; j < opt.inner_paths; ++j) {
        NormalStream rng(cfg.seed, kTagSplit ^ cfg.stream, i, static_cast<std::uint32_t>(j));
        sampler.sample(phi, x, rng, ws, terms, lo);
        res += terms.lhs - terms.first + terms.integral;
        s2 -= terms.integral;
      }
      const double inv = 1.0 / static_cast<double>(opt.inner_paths);
      a.res.add(std::sqrt(m.h_norm_sq(res * inv)));
      a.s2.add(std::sqrt(m.h_norm_sq(s2 * inv)));
      hu.setZero();
      potential.weight().add_h_hessian(m, x, hu);
      const double hs = m.hs_norm(hu);
      a.hess_sq.add(hs * hs);
      const double p = phi(x);
      a.phi_sq.add(p * p);
    }
  });
  const EstimateMeta meta{t, potential.epsilon(), sampler.sim().dt(), cfg.seed};
  auto mass_scaled = [&](const RunningStats& s) {
    Estimate e = scale_by_mass(s.estimate(meta), nu.mass());
    e.meta = meta;
    return e;
  };
  SplitReport out;
  out.s2_l1 = mass_scaled(acc.s2);
  out.split = make_report("operator-split", mass_scaled(acc.res), exact(0.0, meta), mass_scaled(acc.res).value,
                          mass_scaled(acc.res).stderr(), kToleranceFloor);
  const Estimate hess_l2 = sqrt_estimate(mass_scaled(acc.hess_sq));
  const Estimate phi_l2 = sqrt_estimate(mass_scaled(acc.phi_sq));
  const Estimate bound = scaled(product(hess_l2, phi_l2), 2.0 * std::sqrt(k2 * t));
  out.s2_bound = inequality_report("operator-split-s2-bound", out.s2_l1, bound);
  out.s2_bound.extras["k2"] = k2;
  out.s2_bound.extras["hessian_l2"] = hess_l2.value;
  out.s2_bound.extras["phi_l2"] = phi_l2.value;
  out.split.seed = out.s2_bound.seed = cfg.seed;
  return out;
}

CheckReport s1_adjoint_check(const PenalizedPotential& potential, const std::function<Vec(const Point&)>& f_e,
                             double sup_norm, double t, const Point& x, const SdeConfig& cfg) {
  require_time(t, "s1_adjoint_check");
  cfg.validate();
  const GaussianModel& m = potential.model();
  m.require_dim(x.size(), "s1_adjoint_check");
  const PathSimulator sim(potential, t, cfg);
  const VectorStats s = reduce_blocks<VectorStats>(
      cfg.paths,
      [&](std::size_t b, std::size_t e, VectorStats& acc) {
        PathSimulator::Workspace ws;
        for (std::size_t p = b; p < e; ++p) {
          NormalStream rng(cfg.seed, kTagAdjoint ^ cfg.stream, p);
          sim.run(x, rng, ws, false, false);
          acc.add(f_e(ws.x));
        }
      },
      VectorStats(m.dim()));
  const EstimateMeta meta{t, potential.epsilon(), sim.dt(), cfg.seed};
  const double c = std::exp(-t);
  const Estimate lhs{c * s.mean().norm(), c * s.stderr().norm(), s.count(), meta};
  CheckReport r = inequality_report("s1-adjoint-bound", lhs, exact(sup_norm, meta));
  r.seed = cfg.seed;
  return r;
}

CheckReport voc_residual(const PenalizedPotential& potential, const ScalarField& g, double t, const Point& x,
                         const SdeConfig& cfg, const VocOptions& opt) {
  require_time(t, "voc_residual");
  cfg.validate();
  if (!potential.domain().is_whole_space() || potential.penalized())
    throw InvalidArgument("voc_residual needs the whole space without penalty");
  if (opt.order < 2) throw InvalidArgument("sigma quadrature order must be at least 2");
  const GaussianModel& m = potential.model();
  m.require_dim(x.size(), "voc_residual");
  const ConvexWeight& w = potential.weight();
  const Estimate tg = apply_semigroup(potential, g, t, x, cfg);
  const Estimate sg = mehler_apply(m, g, t, x, opt.quad);

  // Integral_0^t S(t - sigma) h_sigma(x) d sigma with sigma = t w^2.
  auto integral = [&](int order, std::uint32_t salt, std::vector<double>* node_values) {
    const QuadratureRule rule = gauss_legendre(order);
    double value = 0.0, var = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double sigma = t * rule.nodes[k] * rule.nodes[k];
      const double weight = 2.0 * t * rule.nodes[k] * rule.weights[k];
      const double a = std::exp(-(t - sigma));
      const double b = std::sqrt(-std::expm1(-2.0 * (t - sigma)));
      const PathSimulator sim(potential, sigma, cfg);
      const std::uint32_t tag = kTagVoc ^ cfg.stream ^ salt ^ static_cast<std::uint32_t>(k << 8);
      const RunningStats s =
          reduce_blocks<RunningStats>(cfg.paths, [&](std::size_t lo, std::size_t hi, RunningStats& acc) {
            PathSimulator::Workspace ws;
            Point z(m.dim());
            for (std::size_t p = lo; p < hi; ++p) {
              NormalStream rng(cfg.seed, tag, p);
              for (int i = 0; i < m.dim(); ++i) z[i] = a * x[i] + b * m.sqrt_eigenvalues()[i] * rng.next();
              const Vec grad = gradient_sample(sim, ws, g, z, rng, opt.gradient);
              acc.add(w.gradient(z).dot(m.eigenvalues().cwiseProduct(grad)));
            }
          });
      if (node_values) node_values->push_back(s.mean());
      value += weight * s.mean();
      var += weight * weight * s.stderr() * s.stderr();
    }
    return Estimate{value, std::sqrt(var), cfg.paths, EstimateMeta{t, kInf, cfg.dt, cfg.seed}};
  };
  std::vector<double> nodes;
  const Estimate ihi = integral(opt.order, 0u, &nodes);
  const Estimate ilo = integral(opt.order / 2, 0x80u, nullptr);

  const Estimate rhs{sg.value - ihi.value, combined_stderr(sg.stderr(), ihi.stderr()), ihi.n, ihi.meta};
  CheckReport r = make_report("variation-of-constants", tg, rhs, tg.value - rhs.value,
                              combined_stderr(tg.stderr(), rhs.stderr()), kToleranceFloor);
  r.seed = cfg.seed;
  r.extras["semigroup"] = tg.value;
  r.extras["ou_semigroup"] = sg.value;
  r.extras["integral"] = ihi.value;
  r.extras["integral_stderr"] = ihi.stderr();
  r.extras["integral_low_order"] = ilo.value;
  const double gap = std::abs(ihi.value - ilo.value);
  r.extras["quadrature_gap"] = gap;
  if (gap > std::max(kToleranceFloor, 3.0 * combined_stderr(ihi.stderr(), ilo.stderr())))
    r.flags.push_back("sigma-quadrature-near-singular");
  return r;
}

CheckReport voc_envelope(const PenalizedPotential& potential, const ScalarField& g, double g_sup, double t,
                         double k2, const SdeConfig& cfg, const VocEnvelopeOptions& opt) {
  require_time(t, "voc_envelope");
  cfg.validate();
  if (!potential.domain().is_whole_space() || potential.penalized())
    throw InvalidArgument("voc_envelope needs the whole space without penalty");
  if (opt.outer_samples < 2 || opt.inner_paths < 1) throw InvalidArgument("envelope sample counts too small");
  if (!(k2 > 0.0) || !std::isfinite(g_sup)) throw InvalidArgument("voc_envelope needs K2 > 0 and bounded g");
  const GaussianModel& m = potential.model();
  const ConvexWeight& w = potential.weight();
  const NuSampler nu(potential, NuSampler::Target::Domain, cfg.seed ^ 0x5a5a5a5aULL);
  const PathSimulator sim(potential, t, cfg);
  const RunningStats s =
      reduce_blocks<RunningStats>(opt.outer_samples, [&](std::size_t b, std::size_t e, RunningStats& acc) {
        PathSimulator::Workspace ws;
        Point x;
        for (std::size_t i = b; i < e; ++i) {
          nu.draw(i, x);
          double mean = 0.0;
          for (std::size_t j = 0; j < opt.inner_paths; ++j) {
            NormalStream rng(cfg.seed, kTagEnvelope ^ cfg.stream, i, static_cast<std::uint32_t>(j));
            sim.run(x, rng, ws, false, false);
            mean += g(ws.x);
          }
          acc.add(std::abs(mehler_apply(m, g, t, x, opt.quad).value - mean / static_cast<double>(opt.inner_paths)));
        }
      });
  const EstimateMeta meta{t, kInf, sim.dt(), cfg.seed};
  Estimate lhs = scale_by_mass(s.estimate(meta), nu.mass());
  lhs.meta = meta;
  const Estimate e2u = gaussian_expectation(m, [&](const Point& y) { return std::exp(-2.0 * w.value(y)); }, opt.quad);
  const Estimate du2 = gaussian_expectation(
      m, [&](const Point& y) { return m.h_norm_sq(m.eigenvalues().cwiseProduct(w.gradient(y))); }, opt.quad);
  const Estimate bound = scaled(product(sqrt_estimate(e2u), sqrt_estimate(du2)), 2.0 * std::sqrt(k2 * t) * g_sup);
  CheckReport r = inequality_report("variation-of-constants-envelope", lhs, bound);
  r.seed = cfg.seed;
  r.extras["k2"] = k2;
  r.extras["exp_minus_u_l2"] = std::sqrt(e2u.value);
  r.extras["grad_u_l2"] = std::sqrt(du2.value);
  return r;
}

CheckReport symmetry_check(const PenalizedPotential& potential, const ScalarField& f, const ScalarField& g, double t,
                           const SdeConfig& cfg, std::size_t samples) {
  require_time(t, "symmetry_check");
  cfg.validate();
  if (samples < 2) throw InvalidArgument("symmetry_check needs at least 2 samples");
  const NuSampler nu(potential,
                     potential.penalized() ? NuSampler::Target::Penalized : NuSampler::Target::Domain,
                     cfg.seed ^ 0x5a5a5a5aULL);
  const PathSimulator sim(potential, t, cfg);
  struct Acc {
    RunningStats a, b, diff;
    void merge(const Acc& o) {
      a.merge(o.a);
      b.merge(o.b);
      diff.merge(o.diff);
    }
  };
  const Acc acc = reduce_blocks<Acc>(samples, [&](std::size_t lo, std::size_t hi, Acc& s) {
    PathSimulator::Workspace ws;
    Point x;
    for (std::size_t i = lo; i < hi; ++i) {
      nu.draw(i, x);
      NormalStream rng(cfg.seed, kTagSymmetry ^ cfg.stream, i);
      sim.run(x, rng, ws, false, false);
      const double a = f(x) * g(ws.x), b = g(x) * f(ws.x);
      s.a.add(a);
      s.b.add(b);
      s.diff.add(a - b);
    }
  });
  const EstimateMeta meta{t, potential.epsilon(), sim.dt(), cfg.seed};
  auto mass_scaled = [&](const RunningStats& s) {
    Estimate e = scale_by_mass(s.estimate(meta), nu.mass());
    e.meta = meta;
    return e;
  };
  const Estimate diff = mass_scaled(acc.diff);
  CheckReport r = make_report("invariance-symmetry", mass_scaled(acc.a), mass_scaled(acc.b), diff.value,
                              diff.stderr(), kToleranceFloor);
  r.seed = cfg.seed;
  return r;
}

CheckReport gradient_contraction_check(const PenalizedPotential& potential, const ScalarField& f, double t,
                                       const Point& x, double p, const SdeConfig& cfg) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("gradient_contraction_check needs t >= 0");
  if (!(p >= 1.0)) throw InvalidArgument("gradient_contraction_check needs p >= 1");
  const GaussianModel& m = potential.model();
  m.require_dim(x.size(), "gradient_contraction_check");
  const ScalarField grad_p([&m, f, p](const Point& y) { return std::pow(m.h_norm(h_gradient(m, f, y)), p); });
  const EstimateMeta meta{t, potential.epsilon(), 0.0, cfg.seed};
  CheckReport r;
  if (t == 0.0) {
    const double v = grad_p(x);
    r = inequality_report("gradient-contraction", exact(v, meta), exact(v, meta));
  } else {
    const VectorEstimate g = semigroup_gradient(potential, f, t, x, cfg);
    const double n = m.h_norm(g.value);
    const Estimate lhs{std::pow(n, p), p * std::pow(n, p - 1.0) * g.h_norm_stderr(m), g.n, g.meta};
    const Estimate rhs = scaled(apply_semigroup(potential, grad_p, t, x, cfg), std::exp(-p * gradient_rate(m) * t));
    r = inequality_report("gradient-contraction", lhs, rhs);
  }
  r.seed = cfg.seed;
  r.extras["p"] = p;
  r.extras["rate"] = gradient_rate(m);
  return r;
}

K2Result calibrate_k2(const PenalizedPotential& potential, const std::vector<K2Probe>& probes, const SdeConfig& cfg) {
  if (probes.empty()) throw InvalidArgument("calibrate_k2 needs at least one probe");
  const GaussianModel& m = potential.model();
  K2Result out;
  Estimate best;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const K2Probe& pr = probes[k];
    require_time(pr.t, "calibrate_k2");
    SdeConfig c = cfg;
    c.stream = cfg.stream ^ static_cast<std::uint32_t>(k << 12);
    const VectorEstimate g = semigroup_gradient(potential, pr.f, pr.t, pr.x, c);
    const ScalarField f = pr.f;
    const ScalarField sq([f](const Point& y) {
      const double v = f(y);
      return v * v;
    });
    const Estimate tsq = apply_semigroup(potential, sq, pr.t, pr.x, c);
    if (!(tsq.value > 0.0)) throw NumericalError("calibrate_k2: T f^2 vanished at a probe");
    const double n = m.h_norm(g.value);
    const double ratio = pr.t * n * n / tsq.value;
    // Delta method on t n^2 / s.
    const double se = ratio * std::sqrt(std::pow(2.0 * g.h_norm_stderr(m) / std::max(n, 1e-300), 2) +
                                        std::pow(tsq.stderr() / tsq.value, 2));
    out.ratios.push_back(ratio);
    if (k == 0 || ratio > best.value) best = Estimate{ratio, se, g.n, g.meta};
  }
  out.value = best.value;
  out.report.name = "gradient-bound-k2";
  out.report.lhs = best;
  out.report.rhs = exact(kNaN);
  out.report.residual = 0.0;
  out.report.tolerance = 0.0;
  out.report.verdict = Verdict::Report;
  out.report.seed = cfg.seed;
  for (std::size_t k = 0; k < out.ratios.size(); ++k) out.report.extras["ratio_" + std::to_string(k)] = out.ratios[k];
  return out;
}

}  // namespace gaussbv
