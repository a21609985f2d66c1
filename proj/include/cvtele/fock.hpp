#pragma once

// Truncated Fock-space substrate.
//
// Conventions, fixed for the whole library:
//   hbar = 1, [x, p] = i, a = (x + i p) / sqrt(2), alpha = (x + i p) / sqrt(2),
//   vacuum quadrature variance 1/2.
// Two-mode states are flattened with row = a * n_max + b for |a>_A (x) |b>_B.

#include <complex>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cvtele/errors.hpp"

namespace cvtele {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr int kDefaultNMax = 40;
inline constexpr double kDefaultLeakageBound = 1e-3;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kPositivityFloor = -1e-10;

/// Number of retained Fock levels |0>..|n_max-1>.
class FockDim {
 public:
  explicit FockDim(int n_max = kDefaultNMax);

  int n() const { return n_; }
  int two_mode() const { return n_ * n_; }

  friend bool operator==(FockDim, FockDim) = default;

 private:
  int n_;
};

/// Phase-space label (x, p); also the displacement argument alpha = (x + i p)/sqrt(2).
struct PhasePoint {
  double x = 0.0;
  double p = 0.0;

  Complex alpha() const;
  bool finite() const;
  static PhasePoint from_alpha(Complex alpha);

  friend PhasePoint operator+(PhasePoint a, PhasePoint b) { return {a.x + b.x, a.p + b.p}; }
  friend PhasePoint operator-(PhasePoint a, PhasePoint b) { return {a.x - b.x, a.p - b.p}; }
  friend PhasePoint operator-(PhasePoint a) { return {-a.x, -a.p}; }
  friend bool operator==(PhasePoint, PhasePoint) = default;
};

/// Single-mode state. Immutable; the stored matrix is exactly Hermitian.
class DensityMatrix {
 public:
  /// Throws NumericalError when `data` deviates from Hermitian by more than 1e-12.
  DensityMatrix(FockDim dim, Matrix data, double leakage = 0.0);

  static DensityMatrix pure(FockDim dim, const Vector& amplitudes, double leakage = 0.0);

  FockDim dim() const { return dim_; }
  const Matrix& data() const { return data_; }
  Complex operator()(int m, int n) const { return data_(m, n); }

  double trace() const;
  /// Probability weight known to be missing from the truncated representation.
  double leakage() const { return leakage_; }
  double purity() const;
  double min_eigenvalue() const;
  double mean_photon() const;
  Complex expectation(const Matrix& op) const;
  bool is_rank_one(double tol = 1e-10) const;

  DensityMatrix normalized() const;
  DensityMatrix with_leakage(double leakage) const;

 private:
  FockDim dim_;
  Matrix data_;
  double leakage_;
};

/// Spectral ensemble of a density matrix: rho = sum_k weights[k] |states[k]><states[k]|.
struct Ensemble {
  std::vector<double> weights;
  std::vector<Vector> states;
};

/// Eigen-decomposition keeping eigenvalues above `cutoff` times the largest one.
Ensemble ensemble_of(const DensityMatrix& rho, double cutoff = 1e-14);

/// Two-mode state over A (x) B.
///
/// Held either densely (n_max^2 x n_max^2) or in pair-diagonal form, a matrix
/// over span{|n,n>} that covers Schmidt-form pure states and their mixtures.
/// `dense()` always materializes the full matrix under the row = a*n_max + b rule.
class TwoModeState {
 public:
  static TwoModeState from_dense(FockDim dim, Matrix data, double leakage = 0.0);
  static TwoModeState from_pair_matrix(FockDim dim, Matrix pair, double leakage = 0.0);
  static TwoModeState from_schmidt(FockDim dim, const RealVector& coefficients,
                                   double leakage = 0.0);
  static TwoModeState from_vector(FockDim dim, const Vector& amplitudes, double leakage = 0.0);

  FockDim dim() const { return dim_; }
  double leakage() const { return leakage_; }
  double trace() const;

  bool is_pair_diagonal() const { return std::holds_alternative<PairForm>(rep_); }
  bool has_schmidt() const { return schmidt_.has_value(); }
  const RealVector& schmidt() const;
  /// Pair-diagonal block (only valid when is_pair_diagonal()).
  const Matrix& pair_matrix() const;
  Matrix dense() const;

  static int index(FockDim dim, int a, int b) { return a * dim.n() + b; }

 private:
  struct DenseForm {
    Matrix data;
  };
  struct PairForm {
    Matrix pair;
  };

  TwoModeState(FockDim dim, std::variant<DenseForm, PairForm> rep, double leakage);

  FockDim dim_;
  std::variant<DenseForm, PairForm> rep_;
  std::optional<RealVector> schmidt_;
  double leakage_;
};

Matrix annihilation(FockDim dim);
Matrix creation(FockDim dim);
Matrix number_operator(FockDim dim);
/// x = (a + a^dagger)/sqrt(2), truncated.
Matrix position_operator(FockDim dim);
/// p = (a - a^dagger)/(i sqrt(2)), truncated.
Matrix momentum_operator(FockDim dim);

Vector coherent_amplitudes(Complex alpha, FockDim dim);

/// Not renormalized; the missing tail is reported as leakage and warned about above 1e-8.
DensityMatrix coherent_state(Complex alpha, FockDim dim);
DensityMatrix vacuum(FockDim dim);
DensityMatrix fock_state(int n, FockDim dim);
/// (|alpha> + e^{i phase} |-alpha>) normalized. Throws DegenerateInputError for zero norm.
DensityMatrix cat_state(Complex alpha, double phase, FockDim dim);
/// Geometric weights nbar^n/(1+nbar)^{n+1}, renormalized over the kept levels.
DensityMatrix thermal_state(double nbar, FockDim dim);

TwoModeState tensor(const DensityMatrix& a, const DensityMatrix& b);

enum class Mode { A, B };

/// Reduced state of the `keep` mode.
DensityMatrix partial_trace(const TwoModeState& state, Mode keep);

/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2; rank-one inputs take the
/// <psi|b|psi> shortcut.
double fidelity(const DensityMatrix& a, const DensityMatrix& b);
/// Uhlmann fidelity through matrix square roots, never the pure-state shortcut.
double fidelity_uhlmann(const DensityMatrix& a, const DensityMatrix& b);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Largest |m - m^dagger| entry.
double hermiticity_defect(const Matrix& m);
/// (m + m^dagger)/2.
Matrix hermitian_part(const Matrix& m);

}  // namespace cvtele
