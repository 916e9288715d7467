#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaussbv/potential.hpp"
#include "gaussbv/sde.hpp"

namespace gaussbv {

struct WeightSpec {
  std::string kind = "zero";  // zero | quadratic | smoothed-norm
  std::vector<double> k;
  double kappa = 0.0;
};

struct DomainSpec {
  std::string kind = "whole";  // whole | half-space | slab | h-ball | h-ellipsoid | ball
  std::vector<double> normal;
  double offset = 0.0;
  double lo = 0.0, hi = 0.0;
  std::vector<double> center;
  double radius = 0.0;
  std::vector<double> semi_axes;
};

struct FieldSpec {
  std::string kind = "indicator";  // indicator | linear | sine | tanh | sin-bump | constant | profile
  std::vector<double> coeffs;
  double offset = 0.0;
};

struct EstimatorSpec {
  std::size_t outer_samples = 100000;
  std::size_t inner_paths = 1;
  std::size_t ledoux_samples = 400000;
  int quadrature_order = 16;
  int doublings = 4;
  bool refine = false;
  double k2 = kNaN;
  double relative_tolerance = 0.02;
  std::vector<double> widths;
  std::vector<std::string> configs;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  std::vector<double> eigenvalues;
  WeightSpec weight;
  DomainSpec domain;
  double epsilon = kInf;
  FieldSpec field;
  std::vector<double> t_grid;
  std::vector<double> eps_grid;
  SdeConfig sde;
  GradientOptions gradient;
  EstimatorSpec estimator;
  std::vector<std::vector<double>> points;
  std::string output_dir;
  std::string output_prefix;
  // Canonical form without the output block and its digest.
  nlohmann::json canonical;
  std::string digest;

  bool has_model() const { return !eigenvalues.empty(); }
  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

const std::vector<std::string>& experiment_names();

// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_digest(const nlohmann::json& canonical);

GaussianModel build_model(const ExperimentConfig& c);
ConvexWeight build_weight(const ExperimentConfig& c);
ConvexDomain build_domain(const ExperimentConfig& c);
ScalarField build_field(const ExperimentConfig& c);
PenalizedPotential build_potential(const ExperimentConfig& c);
std::vector<Point> build_points(const ExperimentConfig& c);

}  // namespace gaussbv
