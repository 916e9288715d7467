#include "gaussbv/pde1d.hpp"

#include <algorithm>
#include <cmath>

#include "gaussbv/error.hpp"

namespace gaussbv {

namespace {

// Solves a tridiagonal system with sub-diagonal l, diagonal d, super-diagonal r.
void thomas(const std::vector<double>& l, std::vector<double> d, const std::vector<double>& r,
            std::vector<double>& rhs) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = l[i] / d[i - 1];
    d[i] -= m * r[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - r[i] * rhs[i + 1]) / d[i];
}

}  // namespace

double PdeSolution::at(double xq) const {
  if (x.empty()) throw InvalidArgument("empty PDE solution");
  if (xq < x.front() - 1e-12 || xq > x.back() + 1e-12) throw InvalidArgument("query outside the PDE grid");
  const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  const double s = std::clamp((xq - x.front()) / h, 0.0, static_cast<double>(x.size() - 1));
  const std::size_t j = std::min(static_cast<std::size_t>(s), x.size() - 2);
  const double w = s - static_cast<double>(j);
  return (1.0 - w) * u[j] + w * u[j + 1];
}

double PdeSolution::relative_mass_drift() const {
  return std::abs(mass_final - mass_initial) / std::max(mass_scale, 1e-300);
}

PdeSolution pde_reference_1d(const PenalizedPotential& potential, const ScalarField& f, double t,
                             const PdeGridSpec& grid) {
  const GaussianModel& model = potential.model();
  if (model.dim() != 1) throw InvalidArgument("pde_reference_1d needs d = 1");
  if (!(t >= 0.0)) throw InvalidArgument("time must be non-negative");
  if (grid.nodes < 5 || !(grid.dt > 0.0) || !(grid.truncation > 0.0)) throw InvalidArgument("invalid PDE grid");
  const double lambda = model.lambda(0);
  const double cut = grid.truncation * std::sqrt(lambda);
  auto [lo, hi] = potential.domain().interval_1d(model);
  if (potential.penalized()) {
    // Beyond H-distance sqrt(1200 eps) the density carries e^{-600}.
    const double reach = std::sqrt(1200.0 * potential.epsilon() * lambda);
    lo = std::isfinite(lo) ? lo - reach : lo;
    hi = std::isfinite(hi) ? hi + reach : hi;
  }
  lo = std::max(lo, -cut);
  hi = std::min(hi, cut);
  if (!(lo < hi)) throw InvalidArgument("empty PDE interval");

  const int n = grid.nodes;
  const double h = (hi - lo) / (n - 1);
  PdeSolution sol;
  sol.t = t;
  sol.lo = lo;
  sol.hi = hi;
  sol.x.resize(n);
  for (int j = 0; j < n; ++j) sol.x[j] = lo + h * j;
  auto log_rho = [&](double x) {
    Point p(1);
    p[0] = x;
    return -x * x / (2.0 * lambda) - potential.value(p);
  };
  // Normalize densities by their maximum to keep the matrices well scaled.
  std::vector<double> lr(n), lf(n - 1);
  double top = -kInf;
  for (int j = 0; j < n; ++j) top = std::max(top, lr[j] = log_rho(sol.x[j]));
  for (int j = 0; j + 1 < n; ++j) lf[j] = log_rho(sol.x[j] + 0.5 * h);
  std::vector<double> mass(n), kappa(n - 1);
  for (int j = 0; j < n; ++j) mass[j] = h * std::exp(lr[j] - top) * ((j == 0 || j == n - 1) ? 0.5 : 1.0);
  for (int j = 0; j + 1 < n; ++j) kappa[j] = lambda * std::exp(lf[j] - top) / h;
  for (int j = 0; j < n; ++j) mass[j] = std::max(mass[j], 1e-290);

  sol.u.resize(n);
  for (int j = 0; j < n; ++j) {
    Point p(1);
    p[0] = sol.x[j];
    sol.u[j] = f(p);
  }
  auto total_mass = [&] {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += mass[j] * sol.u[j];
    return s;
  };
  sol.mass_initial = total_mass();
  for (int j = 0; j < n; ++j) sol.mass_scale += mass[j] * std::abs(sol.u[j]);

  // (K u)_j = kappa_{j-1/2}(u_{j-1} - u_j) + kappa_{j+1/2}(u_{j+1} - u_j).
  auto apply_k = [&](const std::vector<double>& u, std::vector<double>& out) {
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      if (j > 0) v += kappa[j - 1] * (u[j - 1] - u[j]);
      if (j + 1 < n) v += kappa[j] * (u[j + 1] - u[j]);
      out[j] = v;
    }
  };
  // One step of (M - theta tau K) u+ = (M + (1 - theta) tau K) u.
  std::vector<double> l(n), d(n), r(n), rhs(n), ku(n);
  auto step = [&](double tau, double theta) {
    apply_k(sol.u, ku);
    for (int j = 0; j < n; ++j) {
      rhs[j] = mass[j] * sol.u[j] + (1.0 - theta) * tau * ku[j];
      const double kl = j > 0 ? kappa[j - 1] : 0.0;
      const double kr = j + 1 < n ? kappa[j] : 0.0;
      l[j] = -theta * tau * kl;
      r[j] = -theta * tau * kr;
      d[j] = mass[j] + theta * tau * (kl + kr);
    }
    thomas(l, d, r, rhs);
    sol.u.swap(rhs);
    rhs.resize(n);
  };

  if (t > 0.0) {
    int steps = std::max(4, static_cast<int>(std::ceil(t / grid.dt)));
    double tau = t / steps;
    const int startup = std::min(grid.startup_steps, 2 * steps);
    for (int k = 0; k < startup; ++k) step(0.5 * tau, 1.0);
    const int cn_steps = steps - (startup + 1) / 2;
    // An odd number of startup half steps leaves a half step for CN.
    if (startup % 2 == 1) step(0.5 * tau, 0.5);
    for (int k = 0; k < cn_steps; ++k) step(tau, 0.5);
  }
  for (double v : sol.u)
    if (!std::isfinite(v)) throw NumericalError("non-finite PDE solution");
  sol.mass_final = total_mass();
  return sol;
}

}  // namespace gaussbv
