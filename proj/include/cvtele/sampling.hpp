#pragma once

// Reproducible Monte Carlo over phase space.
//
// Every item i of a batch draws from its own engine seeded by
// derive_seed(master, i), so results do not depend on thread scheduling.

#include <cstdint>
#include <functional>
#include <random>

#include "cvtele/fock.hpp"
#include "cvtele/grid.hpp"

namespace cvtele {

/// splitmix64 mix of (master, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

std::mt19937_64 stream_engine(std::uint64_t master, std::uint64_t index);

/// Rejection sampler for a non-negative density on the plane.
///
/// The envelope is an axis-aligned Gaussian with the density's grid mean and
/// twice its grid variance, scaled by 1.5 times the largest density/envelope
/// ratio seen on the grid. A draw where the density exceeds the scaled
/// envelope throws SamplingError naming the point.
///
/// Truncated Fock kernels keep vacuum-width tails (~exp(-(x^2+p^2)/2)) far
/// above a narrow Gaussian, so a kTailWeight share of the envelope has
/// per-axis variance at least kTailVariance. Points below kTailFloor times the
/// peak density are left out of the ratio and never raise.
class RejectionSampler {
 public:
  RejectionSampler(std::function<double(PhasePoint)> density, const PhaseGrid& grid);

  PhasePoint sample(std::mt19937_64& engine) const;

  double envelope_scale() const { return scale_; }
  PhasePoint mean() const { return mean_; }
  double sigma_x() const { return sigma_x_; }
  double sigma_p() const { return sigma_p_; }

  static constexpr int kMaxAttempts = 1'000'000;
  static constexpr double kTailFloor = 1e-12;
  static constexpr double kTailWeight = 0.1;
  static constexpr double kTailVariance = 2.0;

 private:
  double envelope(PhasePoint pt) const;

  std::function<double(PhasePoint)> density_;
  PhasePoint mean_;
  double sigma_x_ = 1.0;
  double sigma_p_ = 1.0;
  double scale_ = 1.0;
  double wide_x_ = 1.0;
  double wide_p_ = 1.0;
  double peak_ = 0.0;
};

}  // namespace cvtele
