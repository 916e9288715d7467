#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gaussbv/config.hpp"
#include "gaussbv/verification.hpp"

namespace gaussbv {

inline constexpr int kCsvVersion = 1;

enum ExitStatus { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitNumerical = 3 };

// (name, one-line description) for every experiment.
const std::vector<std::pair<std::string, std::string>>& experiment_catalog();

// Fixed-column table; cells are formatted when added.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  CsvTable& row();
  CsvTable& add(double v);
  CsvTable& add(std::size_t v);
  CsvTable& add(const std::string& v);
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  // Header comment, column line and rows; every row must be complete.
  std::string render(const std::string& experiment, const std::string& digest) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct ExperimentOutput {
  CsvTable table{{}};
  std::vector<CheckReport> checks;
  nlohmann::json results = nlohmann::json::object();
};

// Runs one experiment without touching the file system.
ExperimentOutput execute_experiment(const ExperimentConfig& config);

struct RunOptions {
  int threads = 0;
  // Overrides GAUSSBV_OUT_DIR and the config's output.dir when nonempty.
  std::string out_dir;
};

struct RunResult {
  int status = kExitOk;
  std::string csv_path;
  std::string summary_path;
  std::vector<CheckReport> checks;
  std::string message;
};

std::string resolve_output_dir(const ExperimentConfig& config, const RunOptions& opt);

// Writes <dir>/<prefix>.csv and <dir>/<prefix>.summary.json atomically.
// Never throws; failures map to the exit status with a diagnostic message.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& opt);

// Writes content to path through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace gaussbv
