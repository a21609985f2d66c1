#pragma once

// Experiment routines shared by the CLI commands and the acceptance checks.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvtele/fock.hpp"
#include "cvtele/grid.hpp"

namespace cvtele::cli {

/// Smallest cutoff >= floor with tanh(r)^n_max <= 1e-6, i.e. a TMSV
/// coefficient tail below 1e-12 in probability.
int oracle_n_max(double r, int floor);

struct FidelityPoint {
  double r = 0.0;
  double nbar = 0.0;
  int n_max = 0;         // channel paths
  int n_max_oracle = 0;  // protocol oracle
  double f_kernel = 0.0;
  double f_channel = 0.0;
  double f_oracle = 0.0;
  std::optional<double> f_gaussian;  // coherent inputs only
  std::optional<double> f_analytic;  // coherent inputs only: 1/(1+nbar)

  /// Largest pairwise difference among the computed paths (and the analytic value).
  double spread() const;
};

/// Fidelity of `input` with its teleported output at squeezing r by every
/// available path. When auto_size is set the oracle cutoff is oracle_n_max(r, n_max).
FidelityPoint fidelity_point(const std::string& input, double r, int n_max, bool auto_size,
                             const ChannelConfig& base = {});

/// Random rank-`rank` density matrix on the first `support` levels of `dim`.
DensityMatrix random_density_matrix(FockDim dim, int support, int rank, std::uint64_t seed);

/// Random two-mode density matrix (dense) of the given rank over all n_max^2 levels.
TwoModeState random_two_mode_state(FockDim dim, int rank, std::uint64_t seed);

/// Sample covariance of 2-D points.
Eigen::Matrix2d sample_covariance(const std::vector<PhasePoint>& pts);

}  // namespace cvtele::cli
