#include <doctest.h>

#include <cmath>

#include "gaussbv/error.hpp"
#include "gaussbv/mehler.hpp"
#include "gaussbv/parallel.hpp"
#include "gaussbv/quadrature.hpp"
#include "gaussbv/rng.hpp"

using namespace gaussbv;

namespace {
Vec v(std::initializer_list<double> xs) {
  Vec r(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) r[i++] = x;
  return r;
}
}  // namespace

TEST_CASE("philox known answers") {
  const auto a = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  CHECK(a[0] == 0x6627e8d5u);
  CHECK(a[1] == 0xe169c58du);
  CHECK(a[2] == 0xbc57ac4cu);
  CHECK(a[3] == 0x9b00dbd8u);
  const auto b = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(b[0] == 0x408f276du);
  CHECK(b[1] == 0x41c83b0eu);
  CHECK(b[2] == 0xa20bc7c6u);
  CHECK(b[3] == 0x6d5451fdu);
}

TEST_CASE("normal streams are pure functions of their key") {
  NormalStream a(7, 3, 11, 2), b(7, 3, 11, 2), c(7, 3, 12, 2);
  for (int i = 0; i < 9; ++i) {
    const double x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
  }
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(GaussianModel({}), InvalidArgument);
  CHECK_THROWS_AS(GaussianModel({1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(GaussianModel({1.0, 2.0}), InvalidArgument);
  const GaussianModel m = GaussianModel::geometric(4, 1.0, 0.5);
  CHECK(m.lambda(3) == doctest::Approx(0.125));
  CHECK(m.trace() == doctest::Approx(1.875));
}

TEST_CASE("h_inner") {
  CHECK(GaussianModel({1, 1}).h_inner(HVector(v({1, 0})), HVector(v({1, 0}))) == doctest::Approx(1.0));
  CHECK(GaussianModel({4, 1}).h_inner(HVector(v({2, 0})), HVector(v({2, 0}))) == doctest::Approx(1.0));
  const GaussianModel m({2, 0.5});
  const HVector h(v({1, 1})), k(v({1, -1}));
  CHECK(m.h_inner(h, k) == doctest::Approx(-1.5));
  CHECK(m.h_inner(h, k) == doctest::Approx(m.h_inner(k, h)));
  CHECK_THROWS_AS(m.h_inner(h, HVector(v({1}))), InvalidArgument);
}

TEST_CASE("h_gradient") {
  const GaussianModel m({3, 1});
  const HVector g = h_gradient(m, ScalarField::linear(v({1, 0})), v({0.3, -2}));
  CHECK(g[0] == doctest::Approx(3.0));
  CHECK(g[1] == doctest::Approx(0.0));
  CHECK(m.h_norm(g) == doctest::Approx(std::sqrt(3.0)));
  CHECK(m.h_norm(h_gradient(m, ScalarField::constant(2.0), v({1, 1}))) == 0.0);

  const GaussianModel m1({2});
  const ScalarField sq([](const Point& x) { return x[0] * x[0]; });
  const HVector g1 = h_gradient(m1, sq, v({1}));
  CHECK(g1[0] == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(m1.h_norm(g1) == doctest::Approx(4.0 / std::sqrt(2.0)).epsilon(1e-8));
}

TEST_CASE("finite differences agree with analytic gradients") {
  const ScalarField analytic(
      [](const Point& x) { return std::sin(x[0]) * std::exp(0.3 * x[1]) + x[0] * x[1] * x[1]; },
      [](const Point& x) {
        Vec g(2);
        g[0] = std::cos(x[0]) * std::exp(0.3 * x[1]) + x[1] * x[1];
        g[1] = 0.3 * std::sin(x[0]) * std::exp(0.3 * x[1]) + 2 * x[0] * x[1];
        return g;
      });
  for (const Vec& x : {v({0.1, 0.2}), v({-1.3, 2.0}), v({4.0, -0.7}), v({12.0, 3.0})}) {
    const Vec fd = finite_difference_gradient([&](const Point& y) { return analytic(y); }, x);
    const Vec an = analytic.gradient(x);
    CHECK((fd - an).norm() <= 1e-6 * std::max(1.0, an.norm()));
  }
}

TEST_CASE("sample_gamma moments") {
  const GaussianModel m({4, 1});
  const std::size_t n = 1000000;
  const auto xs = sample_gamma(m, n, 2024);
  double s0 = 0, s1 = 0, q0 = 0;
  for (const auto& x : xs) {
    s0 += x[0];
    s1 += x[1];
    q0 += x[0] * x[0];
  }
  const double mean0 = s0 / n;
  CHECK(std::abs(s1 / n) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(mean0) < 4.0 * 2.0 / std::sqrt(double(n)));
  const double var0 = q0 / n - mean0 * mean0;
  CHECK(var0 > 3.97);
  CHECK(var0 < 4.03);
  CHECK(sample_gamma(m, 10, 5)[7] == sample_gamma(m, 10, 5)[7]);
  CHECK_THROWS_AS(sample_gamma(m, 0, 5), InvalidArgument);
}

TEST_CASE("gauss-hermite integrates Gaussian moments") {
  const QuadratureRule r = gauss_hermite(64);
  double w = 0, m2 = 0, m4 = 0, m10 = 0, m3 = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double x = r.nodes[i];
    w += r.weights[i];
    m2 += r.weights[i] * x * x;
    m3 += r.weights[i] * x * x * x;
    m4 += r.weights[i] * std::pow(x, 4);
    m10 += r.weights[i] * std::pow(x, 10);
  }
  CHECK(w == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(m3) < 1e-12);
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(m10 == doctest::Approx(945.0).epsilon(1e-10));
  CHECK_THROWS_AS(gauss_hermite(0), InvalidArgument);
}

TEST_CASE("gauss-legendre on the unit interval") {
  const QuadratureRule r = gauss_legendre(16);
  double s = 0, p = 0, e = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    s += r.weights[i];
    p += r.weights[i] * std::pow(r.nodes[i], 31);
    e += r.weights[i] * std::exp(r.nodes[i]);
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p == doctest::Approx(1.0 / 32.0).epsilon(1e-13));
  CHECK(e == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("mehler_apply") {
  const GaussianModel m({1});
  const ScalarField sq([](const Point& x) { return x[0] * x[0]; });
  for (double t : {0.1, 0.5, 2.0}) {
    for (double x : {-1.5, 0.0, 0.7}) {
      const double exact = std::exp(-2 * t) * x * x + (1 - std::exp(-2 * t));
      CHECK(mehler_apply(m, sq, t, v({x})).value == doctest::Approx(exact).epsilon(1e-12));
    }
  }
  const ScalarField one = ScalarField::constant(1.0);
  CHECK(mehler_apply(GaussianModel({2, 1, 0.5}), one, 0.3, v({1, 2, 3})).value == doctest::Approx(1.0).epsilon(1e-14));
  const ScalarField s([](const Point& x) { return std::sin(x[0]); });
  CHECK(mehler_apply(m, s, 0.0, v({0.4})).value == std::sin(0.4));
  CHECK_THROWS_AS(mehler_apply(m, s, -1.0, v({0.4})), InvalidArgument);
  CHECK_THROWS_AS(mehler_apply(m, s, 1.0, v({0.4}), GaussianQuadrature{0}), InvalidArgument);
}

TEST_CASE("mehler S(t) of a linear field in two dimensions") {
  const GaussianModel m({2, 1});
  const ScalarField f = ScalarField::linear(v({1, -2}));
  const Estimate e = mehler_apply(m, f, 0.4, v({0.5, 1.0}));
  CHECK(e.value == doctest::Approx(std::exp(-0.4) * (0.5 - 2.0)).epsilon(1e-12));
  CHECK(e.stderr() == 0.0);
}

TEST_CASE("mehler symmetry and contraction under quadrature") {
  const GaussianModel m({1});
  const ScalarField f([](const Point& x) { return std::tanh(x[0]); });
  const ScalarField g([](const Point& x) { return std::cos(2 * x[0]); });
  const double t = 0.35;
  GaussianQuadrature q;
  q.order = 48;
  const double fsg = gaussian_expectation(m, [&](const Point& x) { return f(x) * mehler_apply(m, g, t, x, q).value; }, q).value;
  const double gsf = gaussian_expectation(m, [&](const Point& x) { return g(x) * mehler_apply(m, f, t, x, q).value; }, q).value;
  CHECK(fsg == doctest::Approx(gsf).epsilon(1e-10));
  for (double x : {-6.0, -1.0, 0.0, 2.5}) CHECK(std::abs(mehler_apply(m, g, t, v({x}), q).value) <= 1.0);
}

TEST_CASE("mehler falls back to Monte Carlo above the tensor limit") {
  const GaussianModel m = GaussianModel::geometric(6, 1.0, 0.7);
  Vec a = Vec::Ones(6);
  const Estimate e = mehler_apply(m, ScalarField::linear(a), 0.2, Vec::Ones(6) * 0.5,
                                  GaussianQuadrature{64, 3, 100000, 9});
  CHECK(e.stderr() > 0.0);
  CHECK(std::abs(e.value - std::exp(-0.2) * 3.0) < 4 * e.stderr());
}

TEST_CASE("block reduction is independent of thread count") {
  auto run = [] {
    return reduce_blocks<RunningStats>(10000, [](std::size_t b, std::size_t e, RunningStats& acc) {
      for (std::size_t i = b; i < e; ++i) {
        NormalStream r(3, 1, i);
        acc.add(r.next());
      }
    });
  };
  set_thread_count(1);
  const RunningStats a = run();
  set_thread_count(3);
  const RunningStats b = run();
  set_thread_count(1);
  CHECK(a.mean() == b.mean());
  CHECK(a.variance() == b.variance());
}
