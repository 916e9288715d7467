#include <doctest.h>

#include <cmath>
#include <vector>

#include "gaussbv/error.hpp"
#include "gaussbv/field.hpp"
#include "gaussbv/hyp_check.hpp"
#include "gaussbv/potential.hpp"
#include "gaussbv/rng.hpp"

using namespace gaussbv;

namespace {
Vec v(std::initializer_list<double> xs) {
  Vec r(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) r[i++] = x;
  return r;
}

std::vector<Point> probes(int d, int n, std::uint64_t seed, double scale) {
  std::vector<Point> out;
  for (int i = 0; i < n; ++i) {
    NormalStream r(seed, 99, static_cast<std::uint64_t>(i));
    Point p(d);
    for (int k = 0; k < d; ++k) p[k] = scale * r.next();
    out.push_back(p);
  }
  return out;
}

// Brute-force H-distance to the boundary of a 2-d ellipsoid
// sum w_i (y_i - c_i)^2 = 1, by angle scan and golden refinement.
double ellipse_distance_oracle(const GaussianModel& m, const Vec& w, const Vec& c, const Vec& x) {
  auto dist2 = [&](double th) {
    const Vec y = c + v({std::cos(th) / std::sqrt(w[0]), std::sin(th) / std::sqrt(w[1])});
    return m.h_norm_sq(x - y);
  };
  const int n = 20000;
  int best = 0;
  double bv = 1e300;
  for (int i = 0; i < n; ++i) {
    const double d = dist2(2 * M_PI * i / n);
    if (d < bv) bv = d, best = i;
  }
  double a = 2 * M_PI * (best - 1) / n, b = 2 * M_PI * (best + 1) / n;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 100; ++it) {
    const double c1 = b - g * (b - a), c2 = a + g * (b - a);
    if (dist2(c1) < dist2(c2)) b = c2; else a = c1;
  }
  return std::sqrt(dist2(0.5 * (a + b)));
}

std::vector<ConvexDomain> builtin_domains() {
  return {ConvexDomain::whole_space(2),
          ConvexDomain::half_space(v({1, 0.5}), 0.3),
          ConvexDomain::slab(v({0.2, 1}), -0.5, 0.7),
          ConvexDomain::h_ball(v({0.1, -0.2}), 0.8),
          ConvexDomain::h_ellipsoid(v({0, 0.3}), v({1.2, 0.5})),
          ConvexDomain::euclidean_ball(v({0.4, 0}), 1.0)};
}
}  // namespace

TEST_CASE("half-space distances") {
  const ConvexDomain hs = ConvexDomain::half_space(v({1, 0}), 0.0);
  CHECK(hs.distance_h(GaussianModel({1, 1}), v({2, 0})) == doctest::Approx(2.0));
  CHECK(hs.distance_h(GaussianModel({4, 1}), v({2, 0})) == doctest::Approx(1.0));
  CHECK(hs.distance_h(GaussianModel({4, 1}), v({-2, 5})) == 0.0);
  // Replacing lambda_1 by 4 lambda_1 halves the distance along v_1.
  CHECK(hs.distance_h(GaussianModel({8, 1}), v({3, 0})) ==
        doctest::Approx(0.5 * hs.distance_h(GaussianModel({2, 1}), v({3, 0}))));
}

TEST_CASE("ellipsoid projections match a brute-force oracle") {
  const GaussianModel m({2, 0.5});
  const Vec c = v({0.4, -0.1});
  const ConvexDomain eb = ConvexDomain::euclidean_ball(c, 1.0);
  const ConvexDomain he = ConvexDomain::h_ellipsoid(c, v({0.9, 1.6}));
  const Vec w_eb = v({1.0, 1.0});
  const Vec w_he = v({1.0 / (2 * 0.81), 1.0 / (0.5 * 2.56)});
  for (const Vec& x : {v({2.5, 0.3}), v({-1.0, 2.0}), v({0.4, -3.0}), v({1.3, 1.1})}) {
    CHECK(eb.distance_h(m, x) == doctest::Approx(ellipse_distance_oracle(m, w_eb, c, x)).epsilon(1e-7));
    CHECK(he.distance_h(m, x) == doctest::Approx(ellipse_distance_oracle(m, w_he, c, x)).epsilon(1e-7));
  }
  const ConvexDomain hb = ConvexDomain::h_ball(c, 0.7);
  const Vec w_hb = v({1.0 / (2 * 0.49), 1.0 / (0.5 * 0.49)});
  CHECK(hb.distance_h(m, v({2, 2})) == doctest::Approx(ellipse_distance_oracle(m, w_hb, c, v({2, 2}))).epsilon(1e-7));
}

TEST_CASE("gradient and hessian of the squared distance") {
  const GaussianModel m({1});
  const ConvexDomain hs = ConvexDomain::half_space(v({1}), 0.0);
  CHECK(hs.grad_h_dist_sq(m, v({3}))[0] == doctest::Approx(6.0));
  CHECK(hs.grad_h_dist_sq(m, v({-3}))[0] == 0.0);
  const Mat h = hs.hess_h_dist_sq_orthonormal(m, v({3}));
  CHECK(h(0, 0) == doctest::Approx(2.0));
  CHECK(hs.hess_h_dist_sq(m, v({-1})).norm() == 0.0);

  // Finite differences of d^2 against the closed-form gradient.
  const GaussianModel m2({2, 0.5});
  for (const auto& dom : builtin_domains()) {
    for (const Point& x : probes(2, 20, 5, 2.0)) {
      const HVector g = dom.grad_h_dist_sq(m2, x);
      Vec fd(2);
      for (int i = 0; i < 2; ++i) {
        Point a = x, b = x;
        a[i] += 1e-6;
        b[i] -= 1e-6;
        const double da = dom.distance_h(m2, a), db = dom.distance_h(m2, b);
        fd[i] = (da * da - db * db) / 2e-6;
      }
      // D_H d^2 = Q grad d^2.
      CHECK((m2.eigenvalues().cwiseProduct(fd) - g.coords).norm() < 1e-5);
      const Mat hess = dom.hess_h_dist_sq_orthonormal(m2, x);
      CHECK(hess.norm() <= 2.0 * std::sqrt(2.0) + 1e-6);
      const Eigen::SelfAdjointEigenSolver<Mat> es(hess);
      CHECK(es.eigenvalues().minCoeff() >= -1e-6);
    }
  }
}

TEST_CASE("domain invariants on probe pairs") {
  const GaussianModel m({2, 0.5});
  const auto pts = probes(2, 200, 11, 1.5);
  for (const auto& dom : builtin_domains()) {
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      const Point& x = pts[i];
      const Point& y = pts[i + 1];
      if (dom.contains(m, x) && dom.contains(m, y)) CHECK(dom.contains(m, Point(0.5 * (x + y))));
      if (dom.contains(m, x)) CHECK(dom.distance_h(m, x) == 0.0);
      else CHECK(dom.distance_h(m, x) > 0.0);
      const double hxy = std::sqrt(m.h_norm_sq(x - y));
      CHECK(std::abs(dom.distance_h(m, x) - dom.distance_h(m, y)) <= hxy + 1e-10);
      const Vec dg = dom.grad_h_dist_sq(m, x).coords - dom.grad_h_dist_sq(m, y).coords;
      CHECK(std::sqrt(m.h_norm_sq(dg)) <= 2.0 * hxy + 1e-10);
    }
  }
}

TEST_CASE("weights") {
  const GaussianModel m({2, 0.5});
  const std::vector<ConvexWeight> ws = {ConvexWeight::zero(2), ConvexWeight::quadratic(v({1.0, 3.0})),
                                        ConvexWeight::smoothed_norm(2, 0.7)};
  const auto pts = probes(2, 100, 17, 2.0);
  for (const auto& w : ws) {
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      const Point& x = pts[i];
      const Eigen::SelfAdjointEigenSolver<Mat> es(w.hessian(x));
      CHECK(es.eigenvalues().minCoeff() >= -1e-12);
      const Vec fd = finite_difference_gradient([&](const Point& y) { return w.value(y); }, x);
      CHECK((fd - w.gradient(x)).norm() < 1e-6);
      const Point& y = pts[i + 1];
      const Vec diff = m.eigenvalues().cwiseProduct(w.gradient(x) - w.gradient(y));
      CHECK(std::sqrt(m.h_norm_sq(diff)) <= w.h_lip(m) * std::sqrt(m.h_norm_sq(x - y)) + 1e-12);
      CHECK(w.value(x) >= w.lower_bound());
    }
  }
  CHECK_THROWS_AS(ConvexWeight::quadratic(v({-1.0})), InvalidArgument);
}

TEST_CASE("penalized potential") {
  const GaussianModel m({1});
  const ConvexDomain hs = ConvexDomain::half_space(v({1}), 0.0);
  const ConvexWeight w = ConvexWeight::quadratic(v({0.5}));
  for (double x : {-2.0, -0.1, 0.5, 3.0}) {
    double prev = kInf;
    for (double eps : {0.01, 0.1, 1.0, 10.0}) {
      const PenalizedPotential p(m, w, hs, eps);
      const double phi = p.value(v({x}));
      CHECK(phi >= w.value(v({x})));
      if (x < 0) CHECK(phi == w.value(v({x})));
      else CHECK(phi < prev);
      prev = phi;
      const Vec fd = finite_difference_gradient([&](const Point& y) { return p.value(y); }, v({x}));
      CHECK(fd[0] == doctest::Approx(p.gradient(v({x}))[0]).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(PenalizedPotential(m, w, hs, 0.0), InvalidArgument);
  CHECK_THROWS_AS(PenalizedPotential(GaussianModel({1, 1}), w, hs), InvalidArgument);
}

TEST_CASE("hypothesis check on the integrability of d^{-4}") {
  const GaussianModel m1({1});
  const ConvexWeight w1 = ConvexWeight::zero(1);
  CHECK(check_hyp_d(m1, ConvexDomain::whole_space(1), w1, 100, 1).value == 0.0);
  CHECK_THROWS_AS(check_hyp_d(m1, ConvexDomain::whole_space(1), w1, 0, 1), InvalidArgument);

  const HypDReport half = hyp_d_doubling(m1, ConvexDomain::half_space(v({1}), 0.0), w1, 4000, 6, 3);
  CHECK(half.divergent);

  // Near the sphere the integrand behaves like 4 d^{-4} against a density
  // that does not vanish there, so the ball integral diverges as well.
  const GaussianModel m8 = GaussianModel::geometric(8, 1.0, 0.5);
  const HypDReport ball =
      hyp_d_doubling(m8, ConvexDomain::euclidean_ball(Vec::Zero(8), 1.0), ConvexWeight::zero(8), 4000, 6, 3);
  CHECK(ball.divergent);
}
