#include "gaussbv/nu_sampler.hpp"

#include <cmath>
#include <string>

#include "gaussbv/error.hpp"
#include "gaussbv/rng.hpp"

namespace gaussbv {

namespace {
constexpr std::uint32_t kTagNu = 0x4e550000u;
constexpr std::uint32_t kTagNuMass = 0x4e554d00u;
constexpr std::size_t kMassTrials = 200000;
constexpr int kMaxProposals = 100000;
}  // namespace

NuSampler::NuSampler(const PenalizedPotential& potential, Target target, std::uint64_t seed,
                     double min_acceptance)
    : pot_(potential), target_(target), seed_(seed) {
  const GaussianModel& m = pot_.model();
  const ConvexWeight& w = pot_.weight();
  const bool no_restriction =
      pot_.domain().is_whole_space() || (target_ == Target::Penalized && !pot_.penalized());
  if (no_restriction && (w.kind() == ConvexWeight::Kind::Zero || w.kind() == ConvexWeight::Kind::Quadratic)) {
    exact_ = true;
    Vec k = w.kind() == ConvexWeight::Kind::Zero ? Vec::Zero(m.dim()) : w.quadratic_coefficients();
    const Vec lk = m.eigenvalues().cwiseProduct(k);
    exact_sd_ = m.eigenvalues().cwiseQuotient(lk + Vec::Ones(m.dim())).cwiseSqrt();
    mass_ = Estimate{1.0 / (lk + Vec::Ones(m.dim())).array().sqrt().prod(), 0.0, 0, {}};
    return;
  }
  // Acceptance rate from a fixed block of proposals.
  std::size_t accepted = 0;
  Point y(m.dim());
  for (std::size_t i = 0; i < kMassTrials; ++i) {
    NormalStream rng(seed_, kTagNuMass, i);
    for (int k = 0; k < m.dim(); ++k) y[k] = m.sqrt_eigenvalues()[k] * rng.next();
    if (accept(y, rng.uniform())) ++accepted;
  }
  const double n = static_cast<double>(kMassTrials);
  acceptance_ = static_cast<double>(accepted) / n;
  if (acceptance_ < min_acceptance)
    throw NumericalError("rejection acceptance " + std::to_string(acceptance_) + " below floor " +
                         std::to_string(min_acceptance) + ": domain too small under nu");
  const double scale = std::exp(-pot_.lower_bound());
  mass_ = Estimate{scale * acceptance_, scale * std::sqrt(acceptance_ * (1.0 - acceptance_) / n), kMassTrials, {}};
  mass_.meta.seed = seed_;
}

bool NuSampler::accept(const Point& y, double u) const {
  double phi;
  if (target_ == Target::Domain) {
    if (!pot_.domain().contains(pot_.model(), y)) return false;
    phi = pot_.weight().value(y);
  } else {
    phi = pot_.value(y);
  }
  return u < std::exp(-(phi - pot_.lower_bound()));
}

int NuSampler::draw(std::uint64_t i, Point& out) const {
  const GaussianModel& m = pot_.model();
  out.resize(m.dim());
  NormalStream rng(seed_, kTagNu, i);
  if (exact_) {
    for (int k = 0; k < m.dim(); ++k) out[k] = exact_sd_[k] * rng.next();
    return 1;
  }
  for (int attempt = 1; attempt <= kMaxProposals; ++attempt) {
    for (int k = 0; k < m.dim(); ++k) out[k] = m.sqrt_eigenvalues()[k] * rng.next();
    if (accept(out, rng.uniform())) return attempt;
  }
  throw NumericalError("rejection sampler exhausted proposals at draw " + std::to_string(i));
}

Estimate scale_by_mass(const Estimate& c, const Estimate& mass) {
  Estimate e = c;
  e.value = c.value * mass.value;
  e.stderr_ = std::sqrt(std::pow(mass.value * c.stderr(), 2) + std::pow(c.value * mass.stderr(), 2));
  return e;
}

}  // namespace gaussbv
