// Acceptance harness: one PASS/FAIL line per criterion.
#include <CLI11.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gaussbv/config.hpp"
#include "gaussbv/content.hpp"
#include "gaussbv/duality.hpp"
#include "gaussbv/experiments.hpp"
#include "gaussbv/pde1d.hpp"
#include "gaussbv/penalty.hpp"
#include "gaussbv/variation.hpp"
#include "gaussbv/verification.hpp"

using namespace gaussbv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Composite Simpson on [-12 sd, 12 sd] against N(m, sd^2).
double normal_expectation(const std::function<double(double)>& g, double m, double sd, int n = 20000) {
  const double a = m - 12.0 * sd, b = m + 12.0 * sd, h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = a + h * i;
    const double z = (x - m) / sd;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * g(x) * std::exp(-0.5 * z * z);
  }
  return s * h / 3.0 * kInvSqrt2Pi / sd;
}

// Integral of e^{-U} |D_H u|_H against a product Gaussian with variances lambda, by nested Simpson.
double smooth_oracle(const Vec& lambda, const Vec& k, const std::function<Vec(const Point&)>& grad) {
  auto h_norm = [&](const Point& x) {
    const Vec g = grad(x);
    double s = 0.0, u = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      s += lambda[i] * g[i] * g[i];
      u += 0.5 * k[i] * x[i] * x[i];
    }
    return std::exp(-u) * std::sqrt(s);
  };
  if (lambda.size() == 1)
    return normal_expectation([&](double a) { return h_norm(vec({a})); }, 0.0, std::sqrt(lambda[0]));
  return normal_expectation(
      [&](double a) {
        return normal_expectation([&](double b) { return h_norm(vec({a, b})); }, 0.0, std::sqrt(lambda[1]), 1200);
      },
      0.0, std::sqrt(lambda[0]), 1200);
}

PenalizedPotential potential(std::initializer_list<double> lambda, const Vec& k) {
  const GaussianModel m{std::vector<double>(lambda)};
  const ConvexWeight w = k.isZero() ? ConvexWeight::zero(m.dim()) : ConvexWeight::quadratic(k);
  return PenalizedPotential(m, w, ConvexDomain::whole_space(m.dim()));
}

SdeConfig sde(double dt, std::size_t paths, std::uint64_t seed, int min_steps = 1) {
  SdeConfig c;
  c.dt = dt;
  c.paths = paths;
  c.seed = seed;
  c.min_steps = min_steps;
  return c;
}

Outcome all_checks(const ExperimentOutput& out, std::size_t min_checks = 1) {
  Outcome o;
  std::size_t graded = 0, failed = 0;
  std::string first;
  for (const CheckReport& r : out.checks) {
    if (r.verdict == Verdict::Report) continue;
    ++graded;
    if (!r.passed()) {
      ++failed;
      if (first.empty()) first = " first failure " + r.name + fmt(" residual %.3g", r.residual) +
                                 fmt(" tolerance %.3g", r.tolerance);
    }
  }
  o.pass = failed == 0 && graded >= min_checks;
  o.detail = std::to_string(graded - failed) + "/" + std::to_string(graded) + " checks" + first;
  return o;
}

// Smooth de Giorgi limit against a Simpson oracle; d in {1, 2}, U = 0 and quadratic.
Outcome criterion1() {
  struct Case {
    std::string name;
    PenalizedPotential pot;
    Vec lambda, k;
    ScalarField u;
  };
  const ScalarField u1([](const Point& x) { return std::sin(2.0 * x[0]); },
                       [](const Point& x) { return vec({2.0 * std::cos(2.0 * x[0])}); });
  const ScalarField u2([](const Point& x) { return std::sin(x[0]) + 0.5 * x[1] * x[1]; },
                       [](const Point& x) { return vec({std::cos(x[0]), x[1]}); });
  std::vector<Case> cases;
  cases.push_back({"1d-ou", potential({1.0}, vec({0.0})), vec({1.0}), vec({0.0}), u1});
  cases.push_back({"1d-quadratic", potential({1.0}, vec({1.0})), vec({1.0}), vec({1.0}), u1});
  cases.push_back({"2d-ou", potential({2.0, 1.0}, vec({0.0, 0.0})), vec({2.0, 1.0}), vec({0.0, 0.0}), u2});
  cases.push_back({"2d-quadratic", potential({1.0, 0.5}, vec({0.5, 1.0})), vec({1.0, 0.5}), vec({0.5, 1.0}), u2});
  Outcome o;
  std::uint64_t seed = 101;
  for (const Case& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    DeGiorgiOptions opt;
    opt.outer_samples = 100000;
    opt.inner_paths = 4;
    const VariationEstimate v = de_giorgi_curve(c.pot, c.u, geometric_t_grid(0.02, 5), sde(0.002, 1, seed++, 10), opt);
    const double secs = seconds_since(t0);
    const double oracle = smooth_oracle(c.lambda, c.k, [&](const Point& x) { return c.u.gradient(x); });
    const double rel = v.extrapolated.value / oracle - 1.0;
    const bool ok = std::abs(rel) <= 0.02 && secs <= 300.0;
    o.pass = o.pass && ok;
    o.detail += (o.detail.empty() ? "" : "; ") + c.name + fmt(" rel %+.4f", rel) + fmt(" %.1fs", secs);
  }
  return o;
}

// Half-space perimeter: curve against e^{-t}/sqrt(2 pi) at 3 stderr, limit within 1%.
Outcome criterion2() {
  const PenalizedPotential pot = potential({1.0}, vec({0.0}));
  const ScalarField chi = ScalarField::indicator({vec({1.0}), 0.0});
  DeGiorgiOptions opt;
  opt.outer_samples = 1500000;
  const VariationEstimate v = de_giorgi_curve(pot, chi, geometric_t_grid(0.4, 6), sde(0.0025, 1, 202, 20), opt);
  Outcome o;
  double worst = 0.0;
  for (const auto& [t, e] : v.curve) {
    const double z = std::abs(e.value - std::exp(-t) * kInvSqrt2Pi) / e.stderr();
    worst = std::max(worst, z);
    o.pass = o.pass && z <= 3.0;
  }
  const double rel = v.extrapolated.value / kInvSqrt2Pi - 1.0;
  o.pass = o.pass && std::abs(rel) <= 0.01;
  o.detail = "max curve |z| " + fmt("%.2f", worst) + ", limit " + fmt("%.5f", v.extrapolated.value) +
             fmt(" rel %+.4f", rel);
  return o;
}

// Penalized semigroup at eps = 0.025 against the Neumann PDE on (-1, 1).
Outcome criterion3() {
  const GaussianModel m({1.0});
  const ConvexWeight w = ConvexWeight::zero(1);
  const ConvexDomain dom = ConvexDomain::slab(vec({1.0}), -1.0, 1.0);
  const ScalarField f = ScalarField::linear(vec({1.0}));
  const PenalizedPotential neumann(m, w, dom);
  const double eps = 0.025;
  const ScalarField ft = zero_extension(f, m, dom);
  Outcome o;
  int agree = 0, engine = 0, total = 0;
  double worst = 0.0;
  for (double t : {0.05, 0.1, 0.2}) {
    const PdeSolution ref = pde_reference_1d(neumann, f, t);
    const PdeSolution pen = pde_reference_1d(neumann.with_epsilon(eps), ft, t);
    for (double x : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
      const Estimate e = penalty_sweep(m, w, dom, f, t, vec({x}), {eps}, sde(0.0025, 100000, 303))[0];
      const double tol = std::max(kToleranceFloor, 3.0 * e.stderr());
      const double gap = std::abs(e.value - ref.at(x));
      worst = std::max(worst, gap);
      agree += gap <= tol;
      engine += std::abs(e.value - pen.at(x)) <= tol;
      ++total;
    }
  }
  o.pass = agree == total;
  o.detail = std::to_string(agree) + "/" + std::to_string(total) + " within tolerance of the Neumann PDE, max gap " +
             fmt("%.4f", worst) + "; " + std::to_string(engine) + "/" + std::to_string(total) +
             " within tolerance of the penalized PDE";
  return o;
}

// Commutation residual: U = 0 exact, quadratic U against the closed form, halving under refinement.
Outcome criterion4() {
  auto bump = [](double x) { return std::sin(x) * std::exp(-0.25 * x * x); };
  auto bump_d = [](double x) { return (std::cos(x) - 0.5 * x * std::sin(x)) * std::exp(-0.25 * x * x); };
  const ScalarField f1([=](const Point& x) { return bump(x[0]); }, [=](const Point& x) { return vec({bump_d(x[0])}); });
  const ScalarField f2([=](const Point& x) { return bump(x[0]) * std::exp(-0.25 * x[1] * x[1]); },
                       [=](const Point& x) {
                         const double g = std::exp(-0.25 * x[1] * x[1]);
                         return vec({bump_d(x[0]) * g, -0.5 * x[1] * bump(x[0]) * g});
                       });
  Outcome o;
  int residual_ok = 0, oracle_ok = 0, halving_ok = 0, total = 0, oracle_total = 0;
  std::uint64_t seed = 404;
  auto run = [&](const PenalizedPotential& pot, const ScalarField& f, double t, const Point& x, bool quadratic) {
    const CheckReport r1 = commutation_residual(pot, f, t, x, {}, sde(0.0025, 20000, seed));
    const CheckReport r2 = commutation_residual(pot, f, t, x, {}, sde(0.00125, 80000, seed + 1));
    seed += 2;
    ++total;
    residual_ok += r1.passed() && r2.passed();
    const double s1 = r1.extras.at("residual_stderr"), s2 = r2.extras.at("residual_stderr");
    halving_ok += r2.residual <= 0.5 * r1.residual + 3.0 * std::sqrt(0.25 * s1 * s1 + s2 * s2);
    if (quadratic) {
      // kappa = lambda = 1: X_t = e^{-2t} x + s Z with s^2 = (1 - e^{-4t}) / 2.
      const double s = std::sqrt(0.5 * -std::expm1(-4.0 * t));
      const double mf = normal_expectation(bump_d, std::exp(-2.0 * t) * x[0], s);
      for (const CheckReport* r : {&r1, &r2}) {
        const double tol = std::max(kToleranceFloor, 3.0 * r->extras.at("lhs_stderr_0"));
        ++oracle_total;
        oracle_ok += std::abs(r->extras.at("lhs_0") - std::exp(-2.0 * t) * mf) <= tol &&
                     std::abs(r->extras.at("first_0") - std::exp(-t) * mf) <= tol;
      }
    }
  };
  for (double t : {0.2, 0.4})
    for (double x : {0.3, -0.7}) {
      run(potential({1.0}, vec({0.0})), f1, t, vec({x}), false);
      run(potential({2.0, 1.0}, vec({0.0, 0.0})), f2, t, vec({x, 0.5}), false);
      run(potential({1.0}, vec({1.0})), f1, t, vec({x}), true);
    }
  o.pass = residual_ok == total && halving_ok == total && oracle_ok == oracle_total;
  o.detail = "residual " + std::to_string(residual_ok) + "/" + std::to_string(total) + ", halving " +
             std::to_string(halving_ok) + "/" + std::to_string(total) + ", closed form " +
             std::to_string(oracle_ok) + "/" + std::to_string(oracle_total);
  return o;
}

json voc_config(const json& field, std::uint64_t seed) {
  return json{{"experiment", "voc"},
              {"seed", seed},
              {"model", {{"eigenvalues", {1.0}}}},
              {"weight", {{"kind", "quadratic"}, {"k", {1.0}}}},
              {"field", field},
              {"t_grid", {0.1, 0.2}},
              {"points", {{0.0}, {0.8}, {-0.5}}},
              {"sde", {{"dt", 0.0005}, {"paths", 20000}}},
              {"estimator", {{"quadrature_order", 8}, {"outer_samples", 20000}, {"inner_paths", 64}}}};
}

// Variation-of-constants residual on quadratic 1d configurations and the correction envelope.
Outcome criterion5() {
  const ExperimentOutput lin = execute_experiment(parse_config(voc_config({{"kind", "linear"}, {"coeffs", {1.0}}}, 505)));
  const ExperimentOutput th = execute_experiment(parse_config(voc_config({{"kind", "tanh"}, {"coeffs", {1.0}}}, 506)));
  int envelopes = 0;
  for (const CheckReport& r : th.checks) envelopes += r.name == "variation-of-constants-envelope";
  const Outcome a = all_checks(lin, 6), b = all_checks(th, 8);
  return {a.pass && b.pass && envelopes >= 2,
          "linear " + a.detail + "; tanh " + b.detail + ", " + std::to_string(envelopes) + " envelope checks"};
}

// Full inequality suite over the built-in probe matrix.
Outcome criterion6() {
  const ExperimentOutput out = execute_experiment(parse_config(json{{"experiment", "inequalities"}, {"seed", 606}}));
  Outcome o = all_checks(out, 30);
  double lo = kNaN, hi = kNaN;
  for (const CheckReport& r : out.checks)
    if (r.name == "gradient-bound-k2-spread") {
      lo = r.extras.at("k2_min");
      hi = r.extras.at("k2_max");
    }
  const bool finite = std::isfinite(lo) && std::isfinite(hi) && lo > 0.0;
  const double spread = hi / lo - 1.0;
  o.pass = o.pass && finite && spread <= 0.2;
  o.detail += ", K2 in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "] spread " + fmt("%.3f", spread);
  return o;
}

// Ledoux content of a smooth ramp against (2/sqrt pi) |Dv|_{L1}.
Outcome criterion7() {
  const GaussianModel m({1.0});
  const ScalarField v([](const Point& x) { return std::tanh(4.0 * x[0]); });
  const double oracle =
      2.0 / std::sqrt(M_PI) *
      normal_expectation([](double x) { return 4.0 / std::pow(std::cosh(4.0 * x), 2); }, 0.0, 1.0);
  Outcome o;
  const std::vector<double> ts = geometric_t_grid(0.04, 6);
  for (std::size_t k = ts.size() - 3; k < ts.size(); ++k) {
    const Estimate e = ledoux_content(m, ConvexWeight::zero(1), ConvexDomain::whole_space(1), v, ts[k],
                                      sde(1e-3, 400000, 707 + k));
    const double z = (e.value - oracle) / e.stderr();
    o.pass = o.pass && std::abs(z) <= 3.0;
    o.detail += (o.detail.empty() ? "" : ", ") + fmt("t=%.5f", ts[k]) + fmt(" z %+.2f", z);
  }
  o.detail += ", oracle " + fmt("%.5f", oracle);
  return o;
}

// Duality lower bounds for the 1d half-space below the de Giorgi value and within 5% of the perimeter.
Outcome criterion8() {
  const PenalizedPotential pot = potential({1.0}, vec({0.0}));
  const ScalarField chi = ScalarField::indicator({vec({1.0}), 0.0});
  DeGiorgiOptions opt;
  opt.outer_samples = 400000;
  const VariationEstimate dg = de_giorgi_curve(pot, chi, geometric_t_grid(0.4, 6), sde(0.0025, 1, 808, 20), opt);
  const double cap = dg.extrapolated.value + 3.0 * dg.extrapolated.stderr();
  Outcome o;
  double best = -kInf;
  for (double w : {1.0, 0.5, 0.25, 0.1, 0.05}) {
    const double b = duality_lower_bound(pot, chi, bump_field(1, 0.0, w)).value;
    best = std::max(best, b);
    o.pass = o.pass && b <= cap;
  }
  o.pass = o.pass && best >= 0.95 * kInvSqrt2Pi;
  o.detail = "best " + fmt("%.5f", best) + fmt(" = %.4f of the perimeter", best / kInvSqrt2Pi) +
             ", de Giorgi + 3se " + fmt("%.5f", cap);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Every shipped config, rerun with a different thread count, reproduces its CSV byte for byte.
Outcome criterion9() {
  const fs::path root = fs::temp_directory_path() / ("gaussbv_acceptance_" + std::to_string(::getpid()));
  Outcome o;
  int same = 0, total = 0;
  for (const auto& e : fs::directory_iterator(GAUSSBV_CONFIG_DIR)) {
    if (e.path().extension() != ".json") continue;
    const ExperimentConfig c = load_config(e.path().string());
    std::string csv[2];
    for (int r = 0; r < 2; ++r) {
      const fs::path dir = root / std::to_string(r);
      const std::string cmd = std::string("'") + GAUSSBV_CLI_PATH + "' run '" + e.path().string() + "' --threads " +
                              std::to_string(r + 1) + " --out '" + dir.string() + "' >/dev/null 2>&1";
      const int raw = std::system(cmd.c_str());
      const int status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
      if (status != kExitOk && status != kExitCheckFailed) o.pass = false;
      csv[r] = slurp(dir / (c.output_prefix + ".csv"));
    }
    ++total;
    same += !csv[0].empty() && csv[0] == csv[1];
  }
  fs::remove_all(root);
  o.pass = o.pass && total > 0 && same == total;
  o.detail = std::to_string(same) + "/" + std::to_string(total) + " configs byte-identical";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaussbv acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, Outcome (*)()>> criteria = {
      {"de Giorgi limit, smooth case", criterion1},   {"de Giorgi limit, perimeter case", criterion2},
      {"penalization consistency", criterion3},       {"commutation formula", criterion4},
      {"variation of constants", criterion5},         {"inequality suite", criterion6},
      {"Ledoux constant", criterion7},                {"duality sandwich", criterion8},
      {"determinism", criterion9}};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail << fmt(" [%.1fs]", seconds_since(t0)) << std::endl;
  }
  return all ? 0 : 1;
}
