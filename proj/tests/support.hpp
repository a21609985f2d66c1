#pragma once

// Independent oracles shared by the unit tests. Nothing here calls into the
// library's own formulas for the quantity under test.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "cvtele/fock.hpp"

namespace cvtele::test {

inline constexpr double kPi = std::numbers::pi;

/// Coherent amplitudes built by the ladder recurrence c_{n+1} = alpha c_n / sqrt(n+1).
inline Vector coherent_oracle(Complex alpha, int dim) {
  Vector v(dim);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(double(n));
  return v;
}

/// Columns D|n> for n < cols, computed in a larger space from
/// D|n> = (a^dag - conj(alpha))^n D|0> / sqrt(n!), which follows from
/// D a^dag D^dag = a^dag - conj(alpha). Rows are cut back to `rows`.
inline Matrix displacement_oracle(Complex alpha, int rows, int cols, int big = 160) {
  Matrix out(rows, cols);
  Vector col = coherent_oracle(alpha, big);
  for (int n = 0; n < cols; ++n) {
    out.col(n) = col.head(rows);
    Vector next = Vector::Zero(big);
    for (int k = 0; k + 1 < big; ++k) next(k + 1) += std::sqrt(double(k + 1)) * col(k);
    next -= std::conj(alpha) * col;
    col = next / std::sqrt(double(n + 1));
  }
  return out;
}

/// Thermal occupation built directly from the geometric law.
inline Eigen::VectorXd geometric_weights(double nbar, int dim) {
  Eigen::VectorXd w(dim);
  for (int n = 0; n < dim; ++n) w(n) = std::pow(nbar, n) / std::pow(1.0 + nbar, n + 1);
  return w;
}

/// (1 / 2 pi nbar) exp(-(x^2 + p^2) / 2 nbar), written out independently.
inline double gaussian_density(double nbar, double x, double p) {
  return std::exp(-(x * x + p * p) / (2.0 * nbar)) / (2.0 * kPi * nbar);
}

/// Random mixed two-mode state of the given rank with Gaussian amplitudes that
/// fall off with photon number, so truncation plays no role.
inline TwoModeState random_two_mode(FockDim dim, int rank, unsigned seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> g;
  const int n = dim.n();
  Matrix rho = Matrix::Zero(n * n, n * n);
  for (int k = 0; k < rank; ++k) {
    Vector v(n * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        v(a * n + b) = Complex(g(eng), g(eng)) * std::pow(0.5, a + b);
    v.normalize();
    rho += (k + 1.0) * v * v.adjoint();
  }
  rho /= rho.trace().real();
  return TwoModeState::from_dense(dim, 0.5 * (rho + rho.adjoint()));
}

/// Dense |Psi(x,p)> = [1 (x) D(x,p)] sum_n |n,n> / sqrt(2 pi) from the ladder oracle.
inline Vector psi_oracle(PhasePoint pt, int n) {
  const Complex alpha((pt.x) / std::sqrt(2.0), (pt.p) / std::sqrt(2.0));
  const Matrix d = displacement_oracle(alpha, n, n);
  Vector v = Vector::Zero(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) v(a * n + b) = d(b, a) / std::sqrt(2.0 * kPi);
  return v;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace cvtele::test
