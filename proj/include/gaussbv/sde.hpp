#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaussbv/estimate.hpp"
#include "gaussbv/field.hpp"
#include "gaussbv/potential.hpp"
#include "gaussbv/rng.hpp"

namespace gaussbv {

struct SdeConfig {
  double dt = 1e-3;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  std::string scheme = "euler-maruyama";
  // Lower bound on the number of steps for a horizon t (dt <= t / min_steps).
  int min_steps = 1;
  // Separates random streams of experiments that share a seed.
  std::uint32_t stream = 0;

  void validate() const;
};

enum class GradientMode { JacobianFlow, MollifiedBel };

const char* to_string(GradientMode m);
GradientMode gradient_mode_from_string(const std::string& s);

struct GradientOptions {
  GradientMode mode = GradientMode::JacobianFlow;
  // Mollification width for indicator fields; NaN selects sqrt(lambda_1 t) / 10.
  double delta = kNaN;
};

double default_mollifier(const GaussianModel& model, double t);

// b(x) = -x - Q grad Phi_eps(x).
Vec sde_drift(const PenalizedPotential& potential, const Point& x);

// Effective step for horizon t: the configured dt capped by t / min_steps
// and, with an active penalty, by min(eps, lambda_d) / 10; then shrunk so
// that an integer number of steps lands exactly on t.
double effective_dt(const PenalizedPotential& potential, const SdeConfig& cfg, double t);

// Euler-Maruyama for dX = b(X) dt + sqrt(2 Q) dW with optional first
// variation J (dJ = -(I + Q hess Phi_eps) J dt) and the Bismut-Elworthy-Li
// accumulator sum_k J_k^T (2Q)^{-1/2} dW_k.
class PathSimulator {
 public:
  struct Workspace {
    Vec x, b, noise, bel;
    Mat jac, a, tmp;
    // States recorded at requested step indices.
    std::vector<Vec> rec_x;
    std::vector<Mat> rec_jac;
  };

  PathSimulator(const PenalizedPotential& potential, double t, const SdeConfig& cfg);

  int steps() const { return steps_; }
  double dt() const { return dt_; }
  double horizon() const { return t_; }
  const PenalizedPotential& potential() const { return pot_; }

  // Step indices (0..steps) at which x and J are stored in the workspace.
  void set_record_steps(std::vector<int> steps);
  const std::vector<int>& record_steps() const { return record_; }

  void run(const Point& x0, NormalStream& rng, Workspace& ws, bool jacobian, bool bel) const;

 private:
  const PenalizedPotential& pot_;
  double t_;
  double dt_;
  int steps_;
  bool hessian_free_;
  Vec diffusion_;  // sqrt(2 lambda dt)
  Vec bel_scale_;  // sqrt(dt) / sqrt(2 lambda)
  std::vector<int> record_;
};

// One path's contribution to the gradient estimator (Euclidean).
Vec gradient_sample(const PathSimulator& sim, PathSimulator::Workspace& ws, const ScalarField& f,
                    const Point& x, NormalStream& rng, const GradientOptions& opt);

// E[f(X_t^x)] with control variate f(x).
Estimate apply_semigroup(const PenalizedPotential& potential, const ScalarField& f, double t, const Point& x,
                         const SdeConfig& cfg);

// D_H T(t) f(x), returned as an HVector estimate.
VectorEstimate semigroup_gradient(const PenalizedPotential& potential, const ScalarField& f, double t,
                                  const Point& x, const SdeConfig& cfg, const GradientOptions& opt = {});

// Zero extension f 1_Omega.
ScalarField zero_extension(const ScalarField& f, const GaussianModel& model, const ConvexDomain& domain);

}  // namespace gaussbv
