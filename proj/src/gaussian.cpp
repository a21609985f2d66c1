#include "cvtele/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace cvtele {

namespace {

void validate_cov(const Eigen::Matrix2d& cov, double slack) {
  if (!cov.allFinite()) throw DomainError("GaussianState: non-finite covariance");
  if (std::abs(cov(0, 1) - cov(1, 0)) > 1e-12) throw DomainError("GaussianState: covariance not symmetric");
  // V + (i/2) Omega >= 0, which for one mode is V > 0 and det V >= 1/4.
  // Squeezed states have an eigenvalue below 1/2 and are valid.
  if (!(cov(0, 0) > 0.0) || cov.determinant() < 0.25 - slack) {
    throw DomainError("GaussianState: covariance violates the uncertainty bound");
  }
}

}  // namespace

GaussianState::GaussianState(Eigen::Vector2d mean, Eigen::Matrix2d cov) : mean_(mean), cov_(cov) {
  if (!mean_.allFinite()) throw DomainError("GaussianState: non-finite mean");
  validate_cov(cov_, 1e-12);
}

GaussianState GaussianState::vacuum() { return {Eigen::Vector2d::Zero(), 0.5 * Eigen::Matrix2d::Identity()}; }

GaussianState GaussianState::coherent(Complex alpha) {
  return {std::numbers::sqrt2 * Eigen::Vector2d(alpha.real(), alpha.imag()),
          0.5 * Eigen::Matrix2d::Identity()};
}

GaussianState GaussianState::thermal(double nbar) {
  if (!(nbar >= 0.0)) throw DomainError("GaussianState::thermal: nbar must be >= 0");
  return {Eigen::Vector2d::Zero(), (nbar + 0.5) * Eigen::Matrix2d::Identity()};
}

GaussianState GaussianState::squeezed(double s) {
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  cov(0, 0) = 0.5 * std::exp(-2.0 * s);
  cov(1, 1) = 0.5 * std::exp(2.0 * s);
  return {Eigen::Vector2d::Zero(), cov};
}

GaussianState apply_gaussian_channel(const GaussianState& s, double nbar) {
  if (!(nbar >= 0.0)) throw DomainError("apply_gaussian_channel: nbar must be >= 0");
  return {s.mean(), s.cov() + nbar * Eigen::Matrix2d::Identity()};
}

double gaussian_fidelity(const GaussianState& a, const GaussianState& b) {
  if ((a.cov() - 0.5 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
    throw DomainError("gaussian_fidelity: first argument must be a coherent state");
  }
  const Eigen::Matrix2d sum = a.cov() + b.cov();
  const Eigen::Vector2d d = a.mean() - b.mean();
  return std::exp(-0.5 * d.dot(sum.inverse() * d)) / std::sqrt(sum.determinant());
}

GaussianState fock_to_gaussian_moments(const DensityMatrix& rho) {
  const FockDim dim = rho.dim();
  const double tr = rho.trace();
  const Matrix a = annihilation(dim);
  const Complex a1 = rho.expectation(a) / tr;
  const Complex a2 = rho.expectation(a * a) / tr;
  const double n = rho.mean_photon() / tr;

  Eigen::Vector2d mean(std::numbers::sqrt2 * a1.real(), std::numbers::sqrt2 * a1.imag());
  Eigen::Matrix2d cov;
  cov(0, 0) = a2.real() + n + 0.5 - mean(0) * mean(0);
  cov(1, 1) = n + 0.5 - a2.real() - mean(1) * mean(1);
  cov(0, 1) = cov(1, 0) = a2.imag() - mean(0) * mean(1);
  validate_cov(cov, 1e-6);
  // Round-off just under det V = 1/4 (pure states) is scaled back onto the bound.
  const double det = cov.determinant();
  if (det < 0.25) cov *= std::sqrt(0.25 / det);
  return {mean, cov};
}

}  // namespace cvtele
