#pragma once

#include <functional>
#include <vector>

#include "cvtele/fock.hpp"

namespace cvtele {

enum class Quadrature { Trapezoid, GaussHermite };

/// Phase-space quadrature and leakage policy shared by the channel and the
/// direct protocol, so both integrate on identical points.
struct ChannelConfig {
  /// Half-width L of the square [-L, L]^2. Zero selects the default rule.
  double extent = 0.0;
  /// Points per axis; odd so the origin is a node.
  int resolution = 121;
  bool renormalize = false;
  double leakage_bound = kDefaultLeakageBound;
  Quadrature quadrature = Quadrature::Trapezoid;
  /// Gauss-Hermite nodes per axis (Gaussian closed-form kernels only).
  int hermite_order = 40;
  /// Double the resolution until the kernel normalization moves by < 1e-5.
  bool adaptive = true;
  /// Allowed |sum(weight * value) - 1| for kernel grids.
  double kernel_tolerance = 1e-3;

  /// Throws ConfigError.
  void validate() const;
};

struct GridPoint {
  PhasePoint pt;
  double weight = 0.0;
};

struct PhaseGrid {
  double extent = 0.0;
  int resolution = 0;
  double spacing = 0.0;
  std::vector<GridPoint> points;
};

/// Uniform tensor-product trapezoidal rule on [-extent, extent]^2, row-major in p then x.
PhaseGrid trapezoid_grid(double extent, int resolution);

/// Physicists' Gauss-Hermite rule (weight e^{-t^2}) via Golub-Welsch.
struct HermiteRule {
  RealVector nodes;
  RealVector weights;
};
HermiteRule gauss_hermite_rule(int order);

/// Tensor-product nodes whose weights already include the Gaussian density
/// (1/2 pi nbar) exp(-(x^2+p^2)/2 nbar); they sum to 1.
std::vector<GridPoint> gauss_hermite_points(double nbar, int order);

/// L = 5 sqrt(max(nbar, 1) + <n>_input + <n>_resource + 1).
double default_extent(double nbar, double input_photons, double resource_photons = 0.0);

/// Fills in extent from the default rule when it is zero.
ChannelConfig with_extent(ChannelConfig cfg, double nbar, double input_photons,
                          double resource_photons = 0.0);

inline int refined_resolution(int resolution) { return 2 * (resolution - 1) + 1; }

/// Starting from cfg.resolution, doubles the grid until the quadrature of
/// `density` moves by less than 1e-5 (or max_doublings is hit) and returns the
/// coarsest converged resolution. Non-adaptive configs return cfg.resolution.
int converged_resolution(const std::function<double(PhasePoint)>& density,
                         const ChannelConfig& cfg, int max_doublings = 3);

}  // namespace cvtele
