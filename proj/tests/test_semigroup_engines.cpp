#include <doctest.h>

#include <cmath>

#include "gaussbv/error.hpp"
#include "gaussbv/mehler.hpp"
#include "gaussbv/nu_sampler.hpp"
#include "gaussbv/parallel.hpp"
#include "gaussbv/pde1d.hpp"
#include "gaussbv/penalty.hpp"
#include "gaussbv/sde.hpp"

using namespace gaussbv;

namespace {
Vec v(std::initializer_list<double> xs) {
  Vec r(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) r[i++] = x;
  return r;
}

PenalizedPotential ou(std::vector<double> l) {
  const GaussianModel m(l);
  return PenalizedPotential(m, ConvexWeight::zero(m.dim()), ConvexDomain::whole_space(m.dim()));
}

PenalizedPotential quad1(double kappa) {
  return PenalizedPotential(GaussianModel({1}), ConvexWeight::quadratic(v({kappa})), ConvexDomain::whole_space(1));
}

SdeConfig cfg(double dt, std::size_t paths, std::uint64_t seed = 1) {
  SdeConfig c;
  c.dt = dt;
  c.paths = paths;
  c.seed = seed;
  return c;
}

ScalarField smooth1() {
  return ScalarField([](const Point& x) { return std::sin(x[0]) + 0.5 * std::tanh(2 * x[0]); },
                     [](const Point& x) {
                       const double s = 1.0 / std::cosh(2 * x[0]);
                       return v({std::cos(x[0]) + s * s});
                     })
      .set_bounded(1.5)
      .set_lipschitz();
}
}  // namespace

TEST_CASE("sde drift") {
  CHECK(sde_drift(ou({1}), v({2}))[0] == doctest::Approx(-2.0));
  CHECK(sde_drift(quad1(3.0), v({1}))[0] == doctest::Approx(-4.0));
  const PenalizedPotential hs(GaussianModel({1}), ConvexWeight::zero(1), ConvexDomain::half_space(v({1}), 0.0), 0.5);
  CHECK(sde_drift(hs, v({3}))[0] == doctest::Approx(-9.0));
  // Drift is -x - Q grad Phi_eps, with the gradient checked by differences.
  const PenalizedPotential p(GaussianModel({2, 0.5}), ConvexWeight::smoothed_norm(2, 0.4),
                             ConvexDomain::h_ball(v({0, 0}), 0.5), 0.2);
  const Point x = v({1.1, -0.4});
  const Vec fd = finite_difference_gradient([&](const Point& y) { return p.value(y); }, x);
  CHECK((sde_drift(p, x) - (-x - p.model().eigenvalues().cwiseProduct(fd))).norm() < 1e-6);
}

TEST_CASE("step size rules") {
  const PenalizedPotential hs(GaussianModel({1}), ConvexWeight::zero(1), ConvexDomain::half_space(v({1}), 0.0), 0.05);
  CHECK(effective_dt(hs, cfg(0.1, 1), 1.0) == doctest::Approx(0.005));
  CHECK(effective_dt(ou({1}), cfg(0.3, 1), 1.0) == doctest::Approx(0.25));
  SdeConfig c = cfg(0.1, 1);
  c.min_steps = 20;
  CHECK(effective_dt(ou({1}), c, 1.0) == doctest::Approx(0.05));
  CHECK_THROWS_AS(effective_dt(ou({1}), cfg(-1.0, 1), 1.0), InvalidArgument);
  CHECK_THROWS_AS(effective_dt(ou({1}), cfg(0.1, 0), 1.0), InvalidArgument);
}

TEST_CASE("apply_semigroup against closed forms") {
  const ScalarField id = ScalarField::linear(v({1.0}));
  const Estimate a = apply_semigroup(ou({1}), id, 0.3, v({1}), cfg(1e-3, 40000));
  CHECK(std::abs(a.value - std::exp(-0.3)) < 3 * a.stderr() + 1e-3 * 0.3);
  CHECK(a.meta.dt == doctest::Approx(1e-3));
  const Estimate b = apply_semigroup(quad1(1.0), id, 0.4, v({1.5}), cfg(1e-3, 40000));
  CHECK(std::abs(b.value - 1.5 * std::exp(-0.8)) < 3 * b.stderr() + 2e-3);

  const Estimate c = apply_semigroup(quad1(1.0), ScalarField::constant(2.5), 0.4, v({1.5}), cfg(1e-2, 1000));
  CHECK(c.value == 2.5);
  CHECK(c.stderr() == 0.0);
  const ScalarField s = smooth1();
  CHECK(apply_semigroup(ou({1}), s, 0.0, v({0.3}), cfg(1e-2, 10)).value == s(v({0.3})));
}

TEST_CASE("apply_semigroup agrees with Mehler for the OU case") {
  const ScalarField s = smooth1();
  for (double x : {-1.0, 0.2, 1.7}) {
    const Estimate mc = apply_semigroup(ou({1}), s, 0.25, v({x}), cfg(2e-3, 40000, 3));
    const Estimate ex = mehler_apply(GaussianModel({1}), s, 0.25, v({x}));
    CHECK(std::abs(mc.value - ex.value) < 3 * mc.stderr() + 1e-3);
    CHECK(mc.value <= 1.5 + 3 * mc.stderr());
    CHECK(mc.value >= -1.5 - 3 * mc.stderr());
  }
}

TEST_CASE("apply_semigroup is independent of the thread count") {
  const ScalarField s = smooth1();
  const PenalizedPotential p(GaussianModel({1}), ConvexWeight::quadratic(v({0.7})),
                             ConvexDomain::slab(v({1}), -1, 1), 0.1);
  set_thread_count(1);
  const Estimate a = apply_semigroup(p, s, 0.2, v({0.3}), cfg(5e-3, 5000, 8));
  set_thread_count(4);
  const Estimate b = apply_semigroup(p, s, 0.2, v({0.3}), cfg(5e-3, 5000, 8));
  set_thread_count(1);
  CHECK(a.value == b.value);
  CHECK(a.stderr() == b.stderr());
}

TEST_CASE("semigroup_gradient closed forms") {
  const VectorEstimate z = semigroup_gradient(ou({1}), ScalarField::constant(1.0), 0.3, v({0.5}), cfg(1e-2, 100));
  CHECK(z.value[0] == 0.0);
  for (double x : {-2.0, 0.0, 1.0}) {
    const VectorEstimate g = semigroup_gradient(ou({1}), ScalarField::linear(v({1})), 0.5, v({x}), cfg(1e-3, 100));
    CHECK(g.value[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-3));
  }
  // Two dimensions: D_H T(t) <a, x> = e^{-t} Q a.
  const VectorEstimate g2 =
      semigroup_gradient(ou({2, 0.5}), ScalarField::linear(v({1, 1})), 0.4, v({0.1, 0.3}), cfg(1e-3, 10));
  CHECK(g2.value[0] == doctest::Approx(2 * std::exp(-0.4)).epsilon(1e-3));
  CHECK(g2.value[1] == doctest::Approx(0.5 * std::exp(-0.4)).epsilon(1e-3));
  // Quadratic weight: the rate becomes 1 + lambda kappa.
  const VectorEstimate gq = semigroup_gradient(quad1(1.0), ScalarField::linear(v({1})), 0.3, v({0.7}), cfg(1e-3, 10));
  CHECK(gq.value[0] == doctest::Approx(std::exp(-0.6)).epsilon(1e-3));
}

TEST_CASE("jacobian-flow and BEL agree on smooth fields") {
  const ScalarField s = smooth1();
  for (const auto& pot : {ou({1}), quad1(1.0)}) {
    const VectorEstimate j = semigroup_gradient(pot, s, 0.3, v({0.4}), cfg(2e-3, 20000, 4));
    GradientOptions bel;
    bel.mode = GradientMode::MollifiedBel;
    const VectorEstimate b = semigroup_gradient(pot, s, 0.3, v({0.4}), cfg(2e-3, 20000, 5), bel);
    CHECK(std::abs(j.value[0] - b.value[0]) < 3 * combined_stderr(j.stderr[0], b.stderr[0]));
  }
}

TEST_CASE("gradient of an indicator in L1 of gamma") {
  // E_x |J f_delta'(X_t)|: the integrand has a fixed sign, so one inner path
  // per outer point estimates the L1 norm without bias.
  const PenalizedPotential pot = ou({1});
  const ScalarField chi = ScalarField::indicator({v({1}), 0.0});
  const double t = 0.25;
  const SdeConfig c = cfg(t / 25, 1, 0);
  const PathSimulator sim(pot, t, c);
  const NuSampler nu(pot, NuSampler::Target::Domain, 77);
  const RunningStats s = reduce_blocks<RunningStats>(200000, [&](std::size_t b, std::size_t e, RunningStats& acc) {
    PathSimulator::Workspace ws;
    Point x;
    for (std::size_t i = b; i < e; ++i) {
      nu.draw(i, x);
      NormalStream rng(11, 1, i);
      acc.add(std::abs(gradient_sample(sim, ws, chi, x, rng, {})[0]));
    }
  });
  const double delta2 = t / 100;
  const double exact = std::exp(-t) / std::sqrt(2 * M_PI);
  CHECK(exact == doctest::Approx(0.3107).epsilon(1e-3));
  CHECK(std::abs(s.mean() - exact) < 3 * s.stderr() + exact * (1 - 1 / std::sqrt(1 + delta2)));
}

TEST_CASE("gradient contraction at probe points") {
  const ScalarField s = smooth1();
  const PenalizedPotential pot = quad1(0.5);
  const double t = 0.3;
  const ScalarField abs_grad([&](const Point& x) { return std::abs(s.gradient(x)[0]); });
  for (double x : {-1.0, 0.0, 0.8}) {
    const VectorEstimate g = semigroup_gradient(pot, s, t, v({x}), cfg(2e-3, 20000, 6));
    const Estimate rhs = apply_semigroup(pot, abs_grad, t, v({x}), cfg(2e-3, 20000, 7));
    CHECK(std::abs(g.value[0]) <= std::exp(-t) * rhs.value + 3 * combined_stderr(g.stderr[0], rhs.stderr()));
  }
}

TEST_CASE("pde reference solver") {
  const PenalizedPotential whole = ou({1});
  const ScalarField one = ScalarField::constant(1.0);
  const PdeSolution s1 = pde_reference_1d(whole, one, 0.5);
  for (double u : s1.u) CHECK(u == doctest::Approx(1.0).epsilon(1e-12));
  const ScalarField id = ScalarField::linear(v({1}));
  const PdeSolution s0 = pde_reference_1d(whole, id, 0.0);
  CHECK(s0.at(1.234) == doctest::Approx(1.234).epsilon(1e-12));
  const PdeSolution s = pde_reference_1d(whole, id, 0.3);
  for (double x : {-2.0, -0.5, 0.0, 1.0, 3.0}) CHECK(std::abs(s.at(x) - std::exp(-0.3) * x) < 1e-4);
  CHECK(s.relative_mass_drift() < 1e-8);

  const PenalizedPotential slab(GaussianModel({1}), ConvexWeight::quadratic(v({1})),
                                ConvexDomain::slab(v({1}), -1, 1));
  const ScalarField step([](const Point& x) { return x[0] < 0.2 ? 1.0 : -0.5; });
  const PdeSolution n = pde_reference_1d(slab, step, 0.4);
  CHECK(n.lo == doctest::Approx(-1.0));
  CHECK(n.hi == doctest::Approx(1.0));
  CHECK(n.relative_mass_drift() < 1e-8);
  CHECK_THROWS_AS(pde_reference_1d(ou({1, 1}), id, 0.3), InvalidArgument);
}

TEST_CASE("penalized Monte Carlo matches the penalized PDE") {
  // Same T_eps on both sides; no eps -> 0 limit involved.
  const GaussianModel m({1});
  const ConvexDomain dom = ConvexDomain::slab(v({1}), -1, 1);
  const PenalizedPotential pot(m, ConvexWeight::zero(1), dom, 0.1);
  const ScalarField f = zero_extension(ScalarField::linear(v({1})), m, dom);
  const PdeSolution ref = pde_reference_1d(pot, f, 0.2);
  for (double x : {-0.8, 0.0, 0.4}) {
    const Estimate e = apply_semigroup(pot, f, 0.2, v({x}), cfg(1e-3, 30000, 21));
    CHECK(std::abs(e.value - ref.at(x)) < 3 * e.stderr() + 2e-3);
  }
}

TEST_CASE("penalty sweep") {
  const GaussianModel m({1});
  const ScalarField s = smooth1();
  const std::vector<double> eps = {0.2, 0.1, 0.05};
  const auto whole = penalty_sweep(m, ConvexWeight::zero(1), ConvexDomain::whole_space(1), s, 0.2, v({0.3}), eps,
                                   cfg(5e-3, 4000, 2));
  const Estimate direct = apply_semigroup(ou({1}), s, 0.2, v({0.3}), cfg(5e-3, 4000, 2));
  for (const auto& e : whole) CHECK(e.value == direct.value);

  // Deep inside a wide slab the penalty is almost never felt.
  const auto deep = penalty_sweep(m, ConvexWeight::zero(1), ConvexDomain::slab(v({1}), -3, 3), s, 0.05, v({0.0}),
                                  {0.05}, cfg(1e-3, 20000, 3));
  const Estimate free = apply_semigroup(ou({1}), s, 0.05, v({0.0}), cfg(1e-3, 20000, 3));
  CHECK(std::abs(deep[0].value - free.value) < 3 * combined_stderr(deep[0].stderr(), free.stderr()) + 1e-6);

  CHECK_THROWS_AS(penalty_sweep(m, ConvexWeight::zero(1), ConvexDomain::whole_space(1), s, 0.2, v({0.3}),
                                {0.1, 0.2}, cfg(5e-3, 10)),
                  InvalidArgument);
}

TEST_CASE("penalized estimates move toward the Neumann reference as eps shrinks") {
  const GaussianModel m({1});
  const ConvexDomain dom = ConvexDomain::slab(v({1}), -1, 1);
  const ScalarField f = ScalarField::linear(v({1}));
  const PdeSolution ref = pde_reference_1d(PenalizedPotential(m, ConvexWeight::zero(1), dom), f, 0.2);
  const auto sweep = penalty_sweep(m, ConvexWeight::zero(1), dom, f, 0.2, v({0.8}), {0.2, 0.1, 0.05, 0.025},
                                   cfg(1e-3, 20000, 4));
  for (std::size_t i = 1; i < sweep.size(); ++i)
    CHECK(std::abs(sweep[i].value - ref.at(0.8)) < std::abs(sweep[i - 1].value - ref.at(0.8)));
}
