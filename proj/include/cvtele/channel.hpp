#pragma once

// The generalized thermalizing channel
//
//   L(rho) = \int dx dp  P(x,p) D(x,p) rho D(x,p)^dagger
//
// evaluated as a quadrature-weighted sum of displaced copies of rho.

#include <utility>
#include <variant>
#include <vector>

#include "cvtele/epr.hpp"
#include "cvtele/fock.hpp"
#include "cvtele/grid.hpp"

namespace cvtele {

struct KernelSample {
  PhasePoint pt;
  double weight = 0.0;  // quadrature weight
  double value = 0.0;   // P(x, p)
};

/// Either the closed-form Gaussian (1/2 pi nbar) exp(-(x^2+p^2)/2 nbar), with
/// nbar = 0 meaning the identity channel, or a kernel sampled on a grid.
class Kernel {
 public:
  static Kernel gaussian(double nbar);
  static Kernel sampled(std::vector<KernelSample> samples, double extent, int resolution);

  bool is_gaussian() const { return std::holds_alternative<GaussianClosed>(rep_); }
  bool is_identity() const { return is_gaussian() && nbar() == 0.0; }
  /// Gaussian variance per quadrature (Gaussian kernels only).
  double nbar() const;
  const std::vector<KernelSample>& samples() const;
  double extent() const;
  int resolution() const;

  /// Closed-form value (Gaussian kernels only).
  double value(PhasePoint pt) const;
  /// Sum of weight * value; exactly 1 for the Gaussian variant.
  double normalization() const;
  /// <x^2> and <p^2> under the kernel.
  std::pair<double, double> second_moments() const;

 private:
  struct GaussianClosed {
    double nbar;
  };
  struct SampledGrid {
    std::vector<KernelSample> samples;
    double extent;
    int resolution;
  };
  explicit Kernel(std::variant<GaussianClosed, SampledGrid> rep) : rep_(std::move(rep)) {}

  std::variant<GaussianClosed, SampledGrid> rep_;
};

double gaussian_kernel_value(double nbar, PhasePoint pt);

/// Throws DomainError for nbar < 0.
Kernel gaussian_kernel(double nbar);

/// 1 - (1 - e^{-2r}) T. Throws DomainError for r < 0 or T outside [0, 1].
double noisy_nbar(double r, double transmission);

/// Samples P(x,p) of W on the trapezoid grid of `cfg` (extent from the default
/// rule when unset, resolution refined when cfg.adaptive).
Kernel kernel_from(const TwoModeState& w, const ChannelConfig& cfg = {});
Kernel kernel_from(const Resource& w, const ChannelConfig& cfg);

/// Quadrature nodes with weight = quadrature weight * kernel value, after
/// checking the kernel normalization against cfg.kernel_tolerance.
std::vector<GridPoint> channel_points(const Kernel& k, const ChannelConfig& cfg,
                                      double input_photons);

/// Output leakage() is 1 - Tr(out). Throws TruncationError when the channel
/// itself loses more than cfg.leakage_bound of the trace.
DensityMatrix apply_channel(const Kernel& k, const DensityMatrix& rho,
                            const ChannelConfig& cfg = {});

/// sum_i w_i D(alpha_i) rho_th D(alpha_i)^dagger for a classical mixture of
/// coherent P-function atoms.
DensityMatrix apply_thermal_form(const std::vector<std::pair<double, Complex>>& mixture,
                                 double nbar, FockDim dim);

/// \int P(x,p) |<psi|D(x,p)|psi>|^2 on the same nodes apply_channel uses.
double fidelity_via_kernel(const Kernel& k, const DensityMatrix& psi,
                           const ChannelConfig& cfg = {});

namespace serial {

/// Reference loop for apply_channel: one thread, points in order.
DensityMatrix apply_channel(const Kernel& k, const DensityMatrix& rho,
                            const ChannelConfig& cfg = {});

}  // namespace serial

}  // namespace cvtele
