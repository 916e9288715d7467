#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>

#include "gaussbv/model.hpp"

namespace gaussbv {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Provenance attached to every estimate.
struct EstimateMeta {
  double t = kNaN;
  double eps = kInf;
  double dt = kNaN;
  std::uint64_t seed = 0;
};

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
  EstimateMeta meta;

  double stderr() const { return stderr_; }
};

struct VectorEstimate {
  HVector value;
  Vec stderr;  // per v-coordinate
  std::size_t n = 0;
  EstimateMeta meta;

  // Standard error of the H norm of the mean, sqrt(sum se_i^2 / lambda_i).
  double h_norm_stderr(const GaussianModel& model) const { return std::sqrt(model.h_norm_sq(stderr)); }
};

// Running mean and variance with an order-dependent but deterministic merge.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningStats& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double delta = o.mean_ - mean_;
    mean_ += delta * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stderr() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

  Estimate estimate(EstimateMeta meta = {}) const { return Estimate{mean_, stderr(), n_, meta}; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Per-coordinate running statistics of a vector-valued sample.
class VectorStats {
 public:
  explicit VectorStats(Eigen::Index d = 0) : s_(static_cast<std::size_t>(d)) {}

  void add(const Vec& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) s_[static_cast<std::size_t>(i)].add(x[i]);
  }
  void merge(const VectorStats& o) {
    if (s_.empty()) s_.resize(o.s_.size());
    for (std::size_t i = 0; i < s_.size(); ++i) s_[i].merge(o.s_[i]);
  }
  std::size_t count() const { return s_.empty() ? 0 : s_[0].count(); }
  Vec mean() const {
    Vec m(static_cast<Eigen::Index>(s_.size()));
    for (std::size_t i = 0; i < s_.size(); ++i) m[static_cast<Eigen::Index>(i)] = s_[i].mean();
    return m;
  }
  Vec stderr() const {
    Vec m(static_cast<Eigen::Index>(s_.size()));
    for (std::size_t i = 0; i < s_.size(); ++i) m[static_cast<Eigen::Index>(i)] = s_[i].stderr();
    return m;
  }
  const RunningStats& operator[](std::size_t i) const { return s_[i]; }

 private:
  std::vector<RunningStats> s_;
};

// Error-propagated combinations.
inline double combined_stderr(double a, double b) { return std::sqrt(a * a + b * b); }

inline Estimate scaled(Estimate e, double c) {
  e.value *= c;
  e.stderr_ *= std::abs(c);
  return e;
}

inline Estimate difference(const Estimate& a, const Estimate& b) {
  return Estimate{a.value - b.value, combined_stderr(a.stderr(), b.stderr()), std::min(a.n, b.n), a.meta};
}

}  // namespace gaussbv
