#pragma once

// Direct evaluation of the standard teleportation protocol: Alice projects the
// input mode and her half of W onto the displaced EPR vector |Phi(x,p)>, Bob
// applies D(x,p). Used as the independent oracle for the channel map.
//
// For outcome (x, p) Bob's unnormalized operator before correction is
//
//   M = (1/2pi) sum_{mn} X_mn <m|_A W |n>_A,   X = D^dagger rho D,
//
// and the outcome density is Tr M. The three-mode state is never formed.

#include <cstdint>
#include <optional>
#include <vector>

#include "cvtele/epr.hpp"
#include "cvtele/fock.hpp"
#include "cvtele/grid.hpp"

namespace cvtele {

/// Densities below this are reported as degenerate outcomes.
inline constexpr double kDegenerateDensity = 1e-300;

struct ConditionalOutcome {
  PhasePoint pt;
  std::optional<DensityMatrix> state;  // empty when degenerate
  double density = 0.0;
  bool degenerate = false;
};

/// Corrected unnormalized operator D M D^dagger together with Tr M.
struct BobOperator {
  Matrix corrected;
  double density = 0.0;
};

/// Factored evaluation: rank-one terms from the spectra of rho and W, O(n_max^2)
/// per term.
BobOperator bob_operator(const Ensemble& rho, const Resource& w, PhasePoint pt);

/// Full index contraction of X with W, O(n_max^4). Reference for small n_max.
BobOperator bob_operator_dense(const DensityMatrix& rho, const TwoModeState& w, PhasePoint pt);

double outcome_density(const Ensemble& rho, const Resource& w, PhasePoint pt);

ConditionalOutcome conditional_output(const DensityMatrix& rho, const TwoModeState& w,
                                      PhasePoint pt);
ConditionalOutcome conditional_output(const DensityMatrix& rho, const Ensemble& ens,
                                      const Resource& w, PhasePoint pt);

/// Grid shared by the oracle and the channel for one (rho, W) pair: the extent
/// rule with the resource photon number added, and the resolution fixed after
/// refinement against the kernel of W. The result has adaptive = false.
ChannelConfig protocol_config(const DensityMatrix& rho, const TwoModeState& w,
                              const ChannelConfig& cfg = {});

struct AveragedOutput {
  DensityMatrix state;
  /// Quadrature integral of the outcome density; 1 up to grid error.
  double outcome_mass = 0.0;
  ChannelConfig config;
};

/// Quadrature average of D M D^dagger. Throws NumericalError when the outcome
/// mass is more than 1e-2 away from 1 and TruncationError when the output trace
/// deficit exceeds cfg.leakage_bound.
AveragedOutput average_output(const DensityMatrix& rho, const TwoModeState& w,
                              const ChannelConfig& cfg = {});

/// Draws `count` outcomes from the outcome density by rejection sampling.
/// Outcome i uses stream_engine(seed, i).
std::vector<ConditionalOutcome> sample_outcomes(const DensityMatrix& rho, const TwoModeState& w,
                                                std::size_t count, std::uint64_t seed,
                                                const ChannelConfig& cfg = {});

namespace serial {

AveragedOutput average_output(const DensityMatrix& rho, const TwoModeState& w,
                              const ChannelConfig& cfg = {});

}  // namespace serial

}  // namespace cvtele
