#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaussbv/estimate.hpp"
#include "gaussbv/mehler.hpp"
#include "gaussbv/potential.hpp"
#include "gaussbv/sde.hpp"

namespace gaussbv {

inline constexpr double kToleranceFloor = 1e-3;

enum class Verdict { Pass, Fail, Report };

const char* to_string(Verdict v);

struct CheckReport {
  std::string name;
  Estimate lhs;
  Estimate rhs;
  double residual = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Fail;
  std::uint64_t seed = 0;
  std::string digest;
  // Auxiliary values (oracle comparisons, quadrature gaps).
  std::map<std::string, double> extras;
  std::vector<std::string> flags;

  bool passed() const { return verdict != Verdict::Fail; }
};

// residual = lhs - rhs; pass iff |residual| <= max(floor, 3 combined stderr).
CheckReport equality_report(std::string name, const Estimate& lhs, const Estimate& rhs,
                            double floor = kToleranceFloor);
// residual = max(0, lhs - rhs); pass iff residual <= max(floor, 3 combined stderr).
CheckReport inequality_report(std::string name, const Estimate& lhs, const Estimate& rhs,
                              double floor = kToleranceFloor);

nlohmann::json to_json(const CheckReport& r);
nlohmann::json to_json(const Estimate& e);

// Contraction rate of the H-gradient, min(1, 1 / lambda_1).
double gradient_rate(const GaussianModel& model);

struct TimeQuadrature {
  int order = 16;
  // Multiply the i-th H-coordinate by e^{-t / lambda_i} instead of e^{-t}.
  bool per_axis_factor = false;
};

// D_H T(t) f(x) - e^{-t} T(t) D_H f(x) + integral_0^t e^{-(t-s)} T(t-s)(D_H^2 Phi D_H T(s) f)(x) ds,
// all three terms carried along the same paths with the inner gradient
// D_H T(s) f(X_{t-s}) sampled by the Jacobian J_t J_{t-s}^{-1}. The residual is
// the H-norm of the mean residual vector. A gap above tolerance between the
// order-n and order-n/2 rules is flagged as "quadrature-order-insufficient".
CheckReport commutation_residual(const PenalizedPotential& potential, const ScalarField& f, double t,
                                 const Point& x, const TimeQuadrature& quad, const SdeConfig& cfg);

struct SplitOptions {
  std::size_t outer_samples = 20000;
  std::size_t inner_paths = 8;
  TimeQuadrature quad;
};

struct SplitReport {
  // L1(nu; H) norm of D_H T phi - S_1 D_H phi - S_2 phi, checked against 0.
  CheckReport split;
  // ||S_2(t) phi||_{L1} <= 2 sqrt(K2 t) ||D_H^2 U||_{L2} ||phi||_{L2}.
  CheckReport s2_bound;
  Estimate s2_l1;
};

SplitReport operator_split_check(const PenalizedPotential& potential, const ScalarField& phi, double t, double k2,
                                 const SdeConfig& cfg, const SplitOptions& opt = {});

// |S_1^*(t) F(x)|_H = e^{-t} |T(t) F(x)|_H <= sup |F|_H for an H-valued F
// given by its orthonormal coordinates.
CheckReport s1_adjoint_check(const PenalizedPotential& potential, const std::function<Vec(const Point&)>& f_e,
                             double sup_norm, double t, const Point& x, const SdeConfig& cfg);

struct VocOptions {
  // Gauss-Legendre order in w, sigma = t w^2.
  int order = 16;
  GradientOptions gradient;
  GaussianQuadrature quad;
};

// T(t) g(x) - S(t) g(x) + integral_0^t S(t - sigma) <D_H U, D_H T(sigma) g>_H (x) d sigma
// on the whole space. T(t) g by the SDE, S(t) g by Mehler quadrature, the
// integrand by Mehler points paired with one gradient path each.
CheckReport voc_residual(const PenalizedPotential& potential, const ScalarField& g, double t, const Point& x,
                         const SdeConfig& cfg, const VocOptions& opt = {});

struct VocEnvelopeOptions {
  std::size_t outer_samples = 20000;
  std::size_t inner_paths = 64;
  GaussianQuadrature quad;
};

// ||S(t) g - T(t) g||_{L1(nu)} <= 2 sqrt(K2 t) ||e^{-U}||_{L2(gamma)} ||g||_inf ||D_H U||_{L2(gamma; H)}.
CheckReport voc_envelope(const PenalizedPotential& potential, const ScalarField& g, double g_sup, double t,
                         double k2, const SdeConfig& cfg, const VocEnvelopeOptions& opt = {});

// integral f T g d nu_eps = integral g T f d nu_eps with common paths.
CheckReport symmetry_check(const PenalizedPotential& potential, const ScalarField& f, const ScalarField& g, double t,
                           const SdeConfig& cfg, std::size_t samples);

// |D_H T f(x)|_H^p <= e^{-p r t} T |D_H f|_H^p (x), r = gradient_rate.
CheckReport gradient_contraction_check(const PenalizedPotential& potential, const ScalarField& f, double t,
                                       const Point& x, double p, const SdeConfig& cfg);

struct K2Probe {
  ScalarField f;
  double t = 0.05;
  Point x;
};

struct K2Result {
  // Sup over probes of t |D_H T f(x)|_H^2 / T f^2 (x).
  double value = 0.0;
  std::vector<double> ratios;
  CheckReport report;
};

K2Result calibrate_k2(const PenalizedPotential& potential, const std::vector<K2Probe>& probes, const SdeConfig& cfg);

// Built-in probe configuration of the inequality suite.
struct ProbeConfig {
  std::string name;
  PenalizedPotential potential;
  // Field for the variation curve, 2.16 and the Ledoux chain.
  ScalarField u;
  // Total variation of u on Omega, or NaN to use the smooth oracle.
  double u_variation = kNaN;
  // Smooth pair for the symmetry and contraction checks.
  ScalarField f, g;
  // Half-space indicator for the content checks, and its perimeter.
  ScalarField chi;
  double chi_perimeter = kNaN;
  std::vector<Point> points;
  std::vector<K2Probe> k2_probes;
};

std::vector<ProbeConfig> builtin_probe_matrix();

struct SuiteOptions {
  std::vector<double> curve_t = {0.2, 0.1, 0.05};
  double probe_t = 0.1;
  double ledoux_t = 0.005;
  std::size_t outer_samples = 20000;
  std::size_t inner_paths = 8;
  std::size_t path_samples = 20000;
  std::size_t ledoux_samples = 400000;
  double k2_max_variation = 0.2;
};

// One report per check and probe; K2 entries carry Verdict::Report, and a
// final entry checks the spread of K2 across configurations.
std::vector<CheckReport> inequality_suite(const std::vector<ProbeConfig>& configs, const SdeConfig& cfg,
                                          const SuiteOptions& opt = {});

}  // namespace gaussbv
