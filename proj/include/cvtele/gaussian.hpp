#pragma once

// Single-mode Gaussian states by first and second moments (vacuum covariance
// I/2), and the thermalizing channel acting on them in closed form.

#include <Eigen/Dense>

#include "cvtele/fock.hpp"

namespace cvtele {

class GaussianState {
 public:
  /// Throws DomainError unless cov is symmetric and satisfies the uncertainty
  /// relation V + (i/2) Omega >= 0, i.e. V_xx > 0 and det V >= 1/4 - 1e-12.
  /// Squeezed states (one eigenvalue below 1/2) are valid.
  GaussianState(Eigen::Vector2d mean, Eigen::Matrix2d cov);

  static GaussianState vacuum();
  static GaussianState coherent(Complex alpha);
  static GaussianState thermal(double nbar);
  /// Quadrature-squeezed vacuum with cov diag(e^{-2s}/2, e^{2s}/2).
  static GaussianState squeezed(double s);

  const Eigen::Vector2d& mean() const { return mean_; }
  const Eigen::Matrix2d& cov() const { return cov_; }

 private:
  Eigen::Vector2d mean_;
  Eigen::Matrix2d cov_;
};

/// Mean unchanged, cov + nbar * I. Throws DomainError for nbar < 0.
GaussianState apply_gaussian_channel(const GaussianState& s, double nbar);

/// Tr(rho_a rho_b) for a coherent `a`; equals the fidelity since `a` is pure.
/// Throws DomainError when `a` is not coherent.
double gaussian_fidelity(const GaussianState& a, const GaussianState& b);

/// Quadrature moments of a Fock-basis state. No Gaussianity is implied; the
/// covariance is not validated against the uncertainty bound beyond 1e-6.
GaussianState fock_to_gaussian_moments(const DensityMatrix& rho);

}  // namespace cvtele
