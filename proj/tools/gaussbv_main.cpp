#include <CLI11.hpp>

#include <iostream>

#include "gaussbv/config.hpp"
#include "gaussbv/error.hpp"
#include "gaussbv/experiments.hpp"

using namespace gaussbv;

namespace {
int cmd_list() {
  for (const auto& [name, desc] : experiment_catalog()) std::cout << name << "\t" << desc << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  try {
    const ExperimentConfig c = load_config(path);
    std::cout << "ok experiment=" << c.experiment << " digest=" << c.digest << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "gaussbv: config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_run(const std::string& path, int threads, const std::string& out) {
  ExperimentConfig c;
  try {
    c = load_config(path);
  } catch (const ConfigError& e) {
    std::cerr << "gaussbv: config error: " << e.what() << "\n";
    return kExitConfig;
  }
  RunOptions opt;
  opt.threads = threads;
  opt.out_dir = out;
  const RunResult r = run_experiment(c, opt);
  switch (r.status) {
    case kExitConfig: std::cerr << "gaussbv: config error: " << r.message << "\n"; return r.status;
    case kExitNumerical: std::cerr << "gaussbv: " << r.message << "\n"; return r.status;
    default: break;
  }
  for (const CheckReport& k : r.checks)
    if (!k.passed())
      std::cerr << "FAIL " << k.name << " residual=" << k.residual << " tolerance=" << k.tolerance << "\n";
  std::cout << "wrote " << r.csv_path << "\n"
            << "wrote " << r.summary_path << "\n"
            << r.message << " (digest " << c.digest << ")\n";
  return r.status;
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaussbv: semigroup estimators of variation for weighted Gaussian measures"};
  app.require_subcommand(1);

  std::string run_path, validate_path, out_dir;
  int threads = 0;
  CLI::App* run = app.add_subcommand("run", "run one experiment from a config file");
  run->add_option("config", run_path, "config path (JSON)")->required();
  run->add_option("--threads", threads, "worker thread cap")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "output directory (overrides GAUSSBV_OUT_DIR and output.dir)");
  CLI::App* list = app.add_subcommand("list-experiments", "list the built-in experiments");
  CLI::App* validate = app.add_subcommand("validate", "parse and validate a config file");
  validate->add_option("config", validate_path, "config path (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (*list) return cmd_list();
  if (*validate) return cmd_validate(validate_path);
  return cmd_run(run_path, threads, out_dir);
}
