#include "gaussbv/experiments.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaussbv/content.hpp"
#include "gaussbv/duality.hpp"
#include "gaussbv/error.hpp"
#include "gaussbv/hyp_check.hpp"
#include "gaussbv/parallel.hpp"
#include "gaussbv/pde1d.hpp"
#include "gaussbv/penalty.hpp"
#include "gaussbv/variation.hpp"

namespace gaussbv {

using nlohmann::json;

namespace {
std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string point_label(const Point& x) {
  std::string s;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += (i ? ";" : "") + fmt(x[i]);
  return s;
}

json estimate_json(const Estimate& e) { return to_json(e); }

// Provenance columns appended to every table.
const std::vector<std::string> kProvenance = {"seed", "block_size", "eps", "digest"};

std::vector<std::string> with_provenance(std::vector<std::string> cols) {
  cols.insert(cols.end(), kProvenance.begin(), kProvenance.end());
  return cols;
}

void provenance(CsvTable& t, const ExperimentConfig& c, double eps) {
  t.add(fmt(static_cast<double>(c.seed))).add(kBlockSize).add(eps).add(c.digest);
}

Estimate exact(double v) { return Estimate{v, 0.0, 1, {}}; }

Estimate variation_oracle(const ExperimentConfig& c, const PenalizedPotential& pot, const ScalarField& u) {
  if (u.is_indicator()) {
    const auto& e = *u.indicator_info();
    return halfspace_perimeter_oracle(pot.model(), pot.weight(), e.a, e.c, pot.domain());
  }
  (void)c;
  return smooth_variation_oracle(pot, u, GradientNorm::H);
}

DeGiorgiOptions degiorgi_options(const ExperimentConfig& c) {
  DeGiorgiOptions o;
  o.outer_samples = c.estimator.outer_samples;
  o.inner_paths = c.estimator.inner_paths;
  o.gradient = c.gradient;
  return o;
}

ExperimentOutput run_degiorgi(const ExperimentConfig& c) {
  const PenalizedPotential pot = build_potential(c);
  const ScalarField u = build_field(c);
  const VariationEstimate v = de_giorgi_curve(pot, u, c.t_grid, c.sde, degiorgi_options(c));
  const Estimate oracle = variation_oracle(c, pot, u);
  const double rate = gradient_rate(pot.model());
  ExperimentOutput out{CsvTable(with_provenance({"t", "value", "stderr", "n", "dt", "decay_bound"})), {}, json::object()};
  for (const auto& [t, e] : v.curve) {
    out.table.row().add(t).add(e.value).add(e.stderr()).add(e.n).add(e.meta.dt).add(std::exp(-rate * t) * oracle.value);
    provenance(out.table, c, pot.epsilon());
    CheckReport r = inequality_report("variation-decay", e, scaled(oracle, std::exp(-rate * t)));
    r.extras["t"] = t;
    out.checks.push_back(r);
  }
  out.checks.push_back(
      equality_report("degiorgi-limit", v.extrapolated, oracle, c.estimator.relative_tolerance * oracle.value));
  out.results["limit"] = estimate_json(v.extrapolated);
  out.results["extrapolation_model"] = to_string(v.model);
  out.results["oracle"] = estimate_json(oracle);
  out.results["relative_error"] = oracle.value != 0.0 ? v.extrapolated.value / oracle.value - 1.0 : kNaN;
  return out;
}

ExperimentOutput run_perimeter(const ExperimentConfig& c) {
  const PenalizedPotential pot = build_potential(c);
  const ScalarField u = build_field(c);
  if (!u.is_indicator()) throw ConfigError("field.kind: perimeter needs an indicator");
  const Vec& a = u.indicator_info()->a;
  if (a.tail(a.size() - 1).norm() != 0.0 || a[0] == 0.0)
    throw ConfigError("field.coeffs: perimeter bumps need a normal along the first axis");
  const double center = u.indicator_info()->c / a[0];
  const Estimate oracle = variation_oracle(c, pot, u);
  const VariationEstimate dg = de_giorgi_curve(pot, u, c.t_grid, c.sde, degiorgi_options(c));
  ExperimentOutput out{CsvTable(with_provenance({"width", "value", "stderr", "n", "oracle", "ratio"})), {}, json::object()};
  double best = -kInf;
  for (double w : c.estimator.widths) {
    const Estimate b = duality_lower_bound(pot, u, bump_field(pot.model().dim(), center, w));
    best = std::max(best, b.value);
    out.table.row().add(w).add(b.value).add(b.stderr()).add(b.n).add(oracle.value).add(b.value / oracle.value);
    provenance(out.table, c, pot.epsilon());
    CheckReport r = inequality_report("duality-below-degiorgi", b, dg.extrapolated);
    r.extras["width"] = w;
    out.checks.push_back(r);
  }
  out.checks.push_back(inequality_report("duality-sharpness", scaled(oracle, 0.95), exact(best)));
  out.results["oracle"] = estimate_json(oracle);
  out.results["degiorgi_limit"] = estimate_json(dg.extrapolated);
  out.results["best_lower_bound"] = best;
  return out;
}

ExperimentOutput run_penalty_sweep(const ExperimentConfig& c) {
  const GaussianModel model = build_model(c);
  const ConvexWeight weight = build_weight(c);
  const ConvexDomain domain = build_domain(c);
  const ScalarField f = build_field(c);
  const PenalizedPotential neumann(model, weight, domain);
  ExperimentOutput out{CsvTable(with_provenance({"t", "x", "value", "stderr", "n", "dt", "pde_penalized",
                                                 "pde_neumann"})),
                       {}, json::object()};
  for (double t : c.t_grid) {
    const PdeSolution ref = pde_reference_1d(neumann, f, t);
    std::vector<PdeSolution> pen;
    // The penalized engine acts on the zero extension of f.
    const ScalarField ft = zero_extension(f, model, domain);
    for (double eps : c.eps_grid) pen.push_back(pde_reference_1d(neumann.with_epsilon(eps), ft, t));
    for (const Point& x : build_points(c)) {
      const std::vector<Estimate> est = penalty_sweep(model, weight, domain, f, t, x, c.eps_grid, c.sde);
      for (std::size_t k = 0; k < est.size(); ++k) {
        const double eps = c.eps_grid[k];
        out.table.row().add(t).add(point_label(x)).add(est[k].value).add(est[k].stderr()).add(est[k].n)
            .add(est[k].meta.dt).add(pen[k].at(x[0])).add(ref.at(x[0]));
        provenance(out.table, c, eps);
      }
      const std::size_t last = est.size() - 1;
      CheckReport r = equality_report("penalty-vs-neumann", est[last], exact(ref.at(x[0])));
      r.extras["t"] = t;
      r.extras["x"] = x[0];
      r.extras["eps"] = c.eps_grid[last];
      out.checks.push_back(r);
      CheckReport e = equality_report("penalty-vs-penalized-pde", est[last], exact(pen[last].at(x[0])));
      e.extras = r.extras;
      out.checks.push_back(e);
    }
  }
  out.results["eps_min"] = c.eps_grid.back();
  return out;
}

ExperimentOutput run_commutation(const ExperimentConfig& c) {
  const PenalizedPotential pot = build_potential(c);
  const ScalarField f = build_field(c);
  TimeQuadrature q;
  q.order = c.estimator.quadrature_order;
  ExperimentOutput out{CsvTable(with_provenance({"t", "x", "residual", "residual_stderr", "tolerance", "lhs", "rhs",
                                                 "quadrature_gap", "dt", "paths"})),
                       {}, json::object()};
  auto emit = [&](double t, const Point& x, const CheckReport& r) {
    out.table.row().add(t).add(point_label(x)).add(r.residual).add(r.extras.at("residual_stderr")).add(r.tolerance)
        .add(r.lhs.value).add(r.rhs.value).add(r.extras.at("quadrature_gap")).add(r.extras.at("dt"))
        .add(static_cast<std::size_t>(r.extras.at("paths")));
    provenance(out.table, c, pot.epsilon());
  };
  for (double t : c.t_grid) {
    for (const Point& x : build_points(c)) {
      const CheckReport r1 = commutation_residual(pot, f, t, x, q, c.sde);
      emit(t, x, r1);
      out.checks.push_back(r1);
      if (!c.estimator.refine) continue;
      SdeConfig fine = c.sde;
      fine.dt = r1.extras.at("dt") / 2.0;
      fine.paths = c.sde.paths * 4;
      const CheckReport r2 = commutation_residual(pot, f, t, x, q, fine);
      emit(t, x, r2);
      out.checks.push_back(r2);
      const double s1 = r1.extras.at("residual_stderr"), s2 = r2.extras.at("residual_stderr");
      CheckReport h = inequality_report("commutation-refinement", exact(r2.residual),
                                        Estimate{0.5 * r1.residual, std::sqrt(s1 * s1 / 4 + s2 * s2), 1, {}}, 0.0);
      h.extras["coarse"] = r1.residual;
      h.extras["fine"] = r2.residual;
      out.checks.push_back(h);
    }
  }
  return out;
}

ExperimentOutput run_voc(const ExperimentConfig& c) {
  const PenalizedPotential pot = build_potential(c);
  const ScalarField g = build_field(c);
  VocOptions vo;
  vo.order = c.estimator.quadrature_order;
  vo.gradient = c.gradient;
  ExperimentOutput out{CsvTable(with_provenance({"kind", "t", "x", "lhs", "lhs_stderr", "rhs", "rhs_stderr",
                                                 "residual", "tolerance", "dt"})),
                       {}, json::object()};
  auto emit = [&](const std::string& kind, double t, const std::string& x, const CheckReport& r) {
    out.table.row().add(kind).add(t).add(x).add(r.lhs.value).add(r.lhs.stderr()).add(r.rhs.value)
        .add(r.rhs.stderr()).add(r.residual).add(r.tolerance).add(r.lhs.meta.dt);
    provenance(out.table, c, pot.epsilon());
  };
  for (double t : c.t_grid)
    for (const Point& x : build_points(c)) {
      const CheckReport r = voc_residual(pot, g, t, x, c.sde, vo);
      emit("residual", t, point_label(x), r);
      out.checks.push_back(r);
    }
  if (g.bounded()) {
    double k2 = c.estimator.k2;
    if (!std::isfinite(k2)) {
      const int d = pot.model().dim();
      Vec e1 = Vec::Zero(d);
      e1[0] = 1.0;
      SdeConfig kc = c.sde;
      kc.stream ^= 0x4b32u;
      k2 = calibrate_k2(pot, {{ScalarField::linear(e1), 0.02, Point::Zero(d)}}, kc).value;
    }
    VocEnvelopeOptions eo;
    eo.outer_samples = c.estimator.outer_samples;
    eo.inner_paths = c.estimator.inner_paths;
    for (double t : c.t_grid) {
      const CheckReport r = voc_envelope(pot, g, g.sup_abs(), t, k2, c.sde, eo);
      emit("envelope", t, "", r);
      out.checks.push_back(r);
    }
    out.results["k2"] = k2;
  }
  return out;
}

ExperimentOutput run_inequalities(const ExperimentConfig& c) {
  std::vector<ProbeConfig> configs;
  for (ProbeConfig& p : builtin_probe_matrix()) {
    bool keep = c.estimator.configs.empty();
    for (const auto& n : c.estimator.configs) keep = keep || n == p.name;
    if (keep) configs.push_back(std::move(p));
  }
  if (configs.empty()) throw ConfigError("estimator.configs: no built-in configuration matches");
  SuiteOptions so;
  so.curve_t = c.t_grid;
  so.outer_samples = c.estimator.outer_samples;
  so.inner_paths = c.estimator.inner_paths;
  so.path_samples = c.sde.paths;
  so.ledoux_samples = c.estimator.ledoux_samples;
  ExperimentOutput out{CsvTable(with_provenance({"name", "lhs", "lhs_stderr", "rhs", "rhs_stderr", "residual",
                                                 "tolerance", "verdict"})),
                       inequality_suite(configs, c.sde, so), json::object()};
  for (const CheckReport& r : out.checks) {
    out.table.row().add(r.name).add(r.lhs.value).add(r.lhs.stderr()).add(r.rhs.value).add(r.rhs.stderr())
        .add(r.residual).add(r.tolerance).add(std::string(to_string(r.verdict)));
    provenance(out.table, c, kInf);
  }
  return out;
}

ExperimentOutput run_ledoux(const ExperimentConfig& c) {
  const PenalizedPotential pot = build_potential(c);
  const GaussianModel& m = pot.model();
  const ScalarField u = build_field(c);
  const Estimate oracle = scaled(variation_oracle(c, pot, u), 2.0 / std::sqrt(M_PI));
  SdeConfig lc = c.sde;
  lc.paths = c.estimator.ledoux_samples;
  ExperimentOutput out{CsvTable(with_provenance({"t", "value", "stderr", "n", "oracle"})), {}, json::object()};
  const ScalarField ue = zero_extension(u, m, pot.domain());
  for (std::size_t k = 0; k < c.t_grid.size(); ++k) {
    const double t = c.t_grid[k];
    const Estimate e = ledoux_content(m, pot.weight(), pot.domain(), ue, t, lc);
    out.table.row().add(t).add(e.value).add(e.stderr()).add(e.n).add(oracle.value);
    provenance(out.table, c, kInf);
    if (k + 3 >= c.t_grid.size()) {
      CheckReport r = equality_report("ledoux-limit", e, oracle);
      r.extras["t"] = t;
      out.checks.push_back(r);
    }
  }
  out.results["oracle"] = estimate_json(oracle);
  return out;
}

ExperimentOutput run_hyp_d(const ExperimentConfig& c) {
  const HypDReport rep = hyp_d_doubling(build_model(c), build_domain(c), build_weight(c),
                                        c.estimator.outer_samples, c.estimator.doublings, c.seed);
  ExperimentOutput out{CsvTable(with_provenance({"n", "value", "stderr"})), {}, json::object()};
  for (std::size_t k = 0; k < rep.sizes.size(); ++k) {
    out.table.row().add(rep.sizes[k]).add(rep.estimates[k].value).add(rep.estimates[k].stderr());
    provenance(out.table, c, kInf);
  }
  CheckReport r;
  r.name = "hyp-d-integrability";
  r.lhs = rep.estimates.back();
  r.rhs = exact(kNaN);
  r.verdict = Verdict::Report;
  r.seed = c.seed;
  if (rep.divergent) r.flags.push_back("divergent");
  out.checks.push_back(r);
  out.results["divergent"] = rep.divergent;
  return out;
}
}  // namespace

const std::vector<std::pair<std::string, std::string>>& experiment_catalog() {
  static const std::vector<std::pair<std::string, std::string>> c = {
      {"degiorgi", "variation curve t -> |D_H T(t) u|_{L1} and its t -> 0 limit against the oracle"},
      {"perimeter", "half-space perimeter: oracle, variation limit and duality lower bounds"},
      {"penalty-sweep", "penalized semigroup over an eps grid against 1-d PDE references"},
      {"commutation", "commutation residual of D_H T(t) with T(t) D_H along common paths"},
      {"voc", "variation-of-constants residual and correction envelope on the whole space"},
      {"inequalities", "inequality suite over the built-in probe matrix"},
      {"ledoux", "Ledoux content over a t grid against (2/sqrt(pi)) |D_H u|_{L1}"},
      {"hyp-d-check", "integrability of d^{-4} |D_H^2 d^2|^2 under sample doubling"},
  };
  return c;
}

CsvTable& CsvTable::row() {
  if (!rows_.empty() && rows_.back().size() != columns_.size()) throw InvalidArgument("csv row is incomplete");
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::add(double v) { return add(fmt(v)); }
CsvTable& CsvTable::add(std::size_t v) { return add(std::to_string(v)); }
CsvTable& CsvTable::add(const std::string& v) {
  if (rows_.empty() || rows_.back().size() >= columns_.size()) throw InvalidArgument("csv row overflow");
  if (v.find_first_of(",\"\n") != std::string::npos) throw InvalidArgument("csv cell needs quoting: " + v);
  rows_.back().push_back(v);
  return *this;
}

std::string CsvTable::render(const std::string& experiment, const std::string& digest) const {
  std::ostringstream os;
  os << "# gaussbv csv v" << kCsvVersion << " experiment=" << experiment << " digest=" << digest << "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
  os << "\n";
  for (const auto& r : rows_) {
    if (r.size() != columns_.size()) throw InvalidArgument("csv row is incomplete");
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
  return os.str();
}

ExperimentOutput execute_experiment(const ExperimentConfig& c) {
  ExperimentOutput out;
  if (c.experiment == "degiorgi") out = run_degiorgi(c);
  else if (c.experiment == "perimeter") out = run_perimeter(c);
  else if (c.experiment == "penalty-sweep") out = run_penalty_sweep(c);
  else if (c.experiment == "commutation") out = run_commutation(c);
  else if (c.experiment == "voc") out = run_voc(c);
  else if (c.experiment == "inequalities") out = run_inequalities(c);
  else if (c.experiment == "ledoux") out = run_ledoux(c);
  else if (c.experiment == "hyp-d-check") out = run_hyp_d(c);
  else throw ConfigError("experiment: unknown experiment '" + c.experiment + "'");
  for (CheckReport& r : out.checks) r.digest = c.digest;
  return out;
}

std::string resolve_output_dir(const ExperimentConfig& c, const RunOptions& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv("GAUSSBV_OUT_DIR"); env && *env) return env;
  if (!c.output_dir.empty()) return c.output_dir;
  return "out";
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, p);
}

RunResult run_experiment(const ExperimentConfig& c, const RunOptions& opt) {
  RunResult res;
  const auto start = std::chrono::steady_clock::now();
  if (opt.threads > 0) set_thread_count(opt.threads);
  ExperimentOutput out;
  try {
    out = execute_experiment(c);
  } catch (const ConfigError& e) {
    res.status = kExitConfig;
    res.message = e.what();
    return res;
  } catch (const InvalidArgument& e) {
    res.status = kExitConfig;
    res.message = std::string("invalid argument: ") + e.what();
    return res;
  } catch (const NumericalError& e) {
    res.status = kExitNumerical;
    res.message = std::string("numerical breakdown: ") + e.what();
    return res;
  } catch (const std::exception& e) {
    res.status = kExitNumerical;
    res.message = std::string("error: ") + e.what();
    return res;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  int failed = 0;
  json checks = json::array();
  for (const CheckReport& r : out.checks) {
    failed += !r.passed();
    checks.push_back(to_json(r));
  }
  res.status = failed ? kExitCheckFailed : kExitOk;
  res.checks = out.checks;
  json summary = {{"experiment", c.experiment},
                  {"digest", c.digest},
                  {"seed", c.seed},
                  {"status", res.status},
                  {"checks_total", out.checks.size()},
                  {"checks_failed", failed},
                  {"wall_time_s", wall},
                  {"threads", thread_count()},
                  {"csv_version", kCsvVersion},
                  {"config", c.canonical},
                  {"results", out.results},
                  {"checks", checks}};
  const std::string dir = resolve_output_dir(c, opt);
  res.csv_path = (std::filesystem::path(dir) / (c.output_prefix + ".csv")).string();
  res.summary_path = (std::filesystem::path(dir) / (c.output_prefix + ".summary.json")).string();
  try {
    write_atomic(res.csv_path, out.table.render(c.experiment, c.digest));
    write_atomic(res.summary_path, summary.dump(2) + "\n");
  } catch (const std::exception& e) {
    res.status = kExitNumerical;
    res.message = std::string("output error: ") + e.what();
    return res;
  }
  res.message = std::to_string(out.checks.size() - static_cast<std::size_t>(failed)) + "/" +
                std::to_string(out.checks.size()) + " checks passed";
  return res;
}

}  // namespace gaussbv
