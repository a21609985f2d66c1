#include "cvtele/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace cvtele {

namespace {

void require_same_dim(FockDim a, FockDim b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a.n() << " vs " << b.n() << ")";
    throw DimensionError(os.str());
  }
}

void require_normalized(const DensityMatrix& rho, const char* what) {
  const double tol = std::max(kDefaultLeakageBound, rho.leakage() + 1e-12);
  if (std::abs(rho.trace() - 1.0) > tol) {
    std::ostringstream os;
    os << what << ": state not normalized (trace " << rho.trace() << ")";
    throw NumericalError(os.str());
  }
}

void require_positive(const DensityMatrix& rho, const char* what) {
  const double floor = rho.min_eigenvalue();
  if (floor < kPositivityFloor) {
    std::ostringstream os;
    os << what << ": state not positive semidefinite (min eigenvalue " << floor << ")";
    throw NumericalError(os.str());
  }
}

// Eigenvalues below this fraction of the largest are round-off; their square
// roots (~1e-8) would otherwise leak into fidelities.
constexpr double kSpectralFloor = 1e-14;

RealVector clipped_roots(const RealVector& ev) {
  const double cut = kSpectralFloor * std::max(ev.maxCoeff(), 0.0);
  return ev.unaryExpr([cut](double v) { return v > cut ? std::sqrt(v) : 0.0; });
}

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const RealVector ev = clipped_roots(es.eigenvalues());
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

FockDim::FockDim(int n_max) : n_(n_max) {
  if (n_max < 2) throw DomainError("FockDim: n_max must be >= 2");
}

Complex PhasePoint::alpha() const { return Complex(x, p) / std::numbers::sqrt2; }

bool PhasePoint::finite() const { return std::isfinite(x) && std::isfinite(p); }

PhasePoint PhasePoint::from_alpha(Complex alpha) {
  return {std::numbers::sqrt2 * alpha.real(), std::numbers::sqrt2 * alpha.imag()};
}

double hermiticity_defect(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(FockDim dim, Matrix data, double leakage)
    : dim_(dim), leakage_(leakage) {
  if (data.rows() != dim.n() || data.cols() != dim.n()) {
    throw DimensionError("DensityMatrix: matrix shape does not match n_max");
  }
  const double defect = hermiticity_defect(data);
  if (!(defect <= kHermitianTolerance)) {
    std::ostringstream os;
    os << "DensityMatrix: not Hermitian (defect " << defect << ")";
    throw NumericalError(os.str());
  }
  data_ = hermitian_part(data);
}

DensityMatrix DensityMatrix::pure(FockDim dim, const Vector& amplitudes, double leakage) {
  if (amplitudes.size() != dim.n()) {
    throw DimensionError("DensityMatrix::pure: amplitude vector length does not match n_max");
  }
  return DensityMatrix(dim, amplitudes * amplitudes.adjoint(), leakage);
}

double DensityMatrix::trace() const { return data_.trace().real(); }

double DensityMatrix::purity() const { return (data_ * data_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(data_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::mean_photon() const {
  double n = 0.0;
  for (int k = 0; k < dim_.n(); ++k) n += k * data_(k, k).real();
  return n;
}

Complex DensityMatrix::expectation(const Matrix& op) const { return (data_ * op).trace(); }

bool DensityMatrix::is_rank_one(double tol) const {
  const double tr = trace();
  return std::abs(purity() - tr * tr) <= tol * std::max(1.0, tr * tr);
}

DensityMatrix DensityMatrix::normalized() const {
  const double tr = trace();
  if (!(tr > 0.0)) throw DegenerateInputError("DensityMatrix::normalized: zero trace");
  return DensityMatrix(dim_, data_ / tr, leakage_);
}

DensityMatrix DensityMatrix::with_leakage(double leakage) const {
  DensityMatrix out = *this;
  out.leakage_ = leakage;
  return out;
}

Ensemble ensemble_of(const DensityMatrix& rho, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.data());
  const RealVector& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  Ensemble out;
  for (int k = static_cast<int>(ev.size()) - 1; k >= 0; --k) {
    if (ev(k) > cutoff * top && ev(k) > 0.0) {
      out.weights.push_back(ev(k));
      out.states.push_back(es.eigenvectors().col(k));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// TwoModeState

TwoModeState::TwoModeState(FockDim dim, std::variant<DenseForm, PairForm> rep, double leakage)
    : dim_(dim), rep_(std::move(rep)), leakage_(leakage) {}

TwoModeState TwoModeState::from_dense(FockDim dim, Matrix data, double leakage) {
  if (data.rows() != dim.two_mode() || data.cols() != dim.two_mode()) {
    throw DimensionError("TwoModeState: matrix shape does not match n_max^2");
  }
  const double defect = hermiticity_defect(data);
  if (!(defect <= kHermitianTolerance)) {
    std::ostringstream os;
    os << "TwoModeState: not Hermitian (defect " << defect << ")";
    throw NumericalError(os.str());
  }
  return TwoModeState(dim, DenseForm{hermitian_part(data)}, leakage);
}

TwoModeState TwoModeState::from_pair_matrix(FockDim dim, Matrix pair, double leakage) {
  if (pair.rows() != dim.n() || pair.cols() != dim.n()) {
    throw DimensionError("TwoModeState: pair matrix shape does not match n_max");
  }
  const double defect = hermiticity_defect(pair);
  if (!(defect <= kHermitianTolerance)) {
    throw NumericalError("TwoModeState: pair matrix not Hermitian");
  }
  return TwoModeState(dim, PairForm{hermitian_part(pair)}, leakage);
}

TwoModeState TwoModeState::from_schmidt(FockDim dim, const RealVector& coefficients,
                                        double leakage) {
  if (coefficients.size() != dim.n()) {
    throw DimensionError("TwoModeState: Schmidt vector length does not match n_max");
  }
  Vector c = coefficients.cast<Complex>();
  TwoModeState s(dim, PairForm{c * c.adjoint()}, leakage);
  s.schmidt_ = coefficients;
  return s;
}

TwoModeState TwoModeState::from_vector(FockDim dim, const Vector& amplitudes, double leakage) {
  if (amplitudes.size() != dim.two_mode()) {
    throw DimensionError("TwoModeState: vector length does not match n_max^2");
  }
  return TwoModeState(dim, DenseForm{amplitudes * amplitudes.adjoint()}, leakage);
}

double TwoModeState::trace() const {
  return std::visit([](const auto& r) -> double {
    if constexpr (std::is_same_v<std::decay_t<decltype(r)>, DenseForm>) {
      return r.data.trace().real();
    } else {
      return r.pair.trace().real();
    }
  }, rep_);
}

const RealVector& TwoModeState::schmidt() const {
  if (!schmidt_) throw DomainError("TwoModeState: no Schmidt form available");
  return *schmidt_;
}

const Matrix& TwoModeState::pair_matrix() const {
  const auto* p = std::get_if<PairForm>(&rep_);
  if (!p) throw DomainError("TwoModeState: state is not pair-diagonal");
  return p->pair;
}

Matrix TwoModeState::dense() const {
  if (const auto* d = std::get_if<DenseForm>(&rep_)) return d->data;
  const Matrix& pair = std::get<PairForm>(rep_).pair;
  const int n = dim_.n();
  Matrix out = Matrix::Zero(dim_.two_mode(), dim_.two_mode());
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) out(index(dim_, m, m), index(dim_, k, k)) = pair(m, k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Operators and states

Matrix annihilation(FockDim dim) {
  Matrix a = Matrix::Zero(dim.n(), dim.n());
  for (int n = 1; n < dim.n(); ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix creation(FockDim dim) { return annihilation(dim).adjoint(); }

Matrix number_operator(FockDim dim) {
  Matrix n = Matrix::Zero(dim.n(), dim.n());
  for (int k = 0; k < dim.n(); ++k) n(k, k) = static_cast<double>(k);
  return n;
}

Matrix position_operator(FockDim dim) {
  const Matrix a = annihilation(dim);
  return (a + a.adjoint()) / std::numbers::sqrt2;
}

Matrix momentum_operator(FockDim dim) {
  const Matrix a = annihilation(dim);
  return (a - a.adjoint()) / Complex(0.0, std::numbers::sqrt2);
}

Vector coherent_amplitudes(Complex alpha, FockDim dim) {
  Vector v(dim.n());
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim.n(); ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return v;
}

DensityMatrix coherent_state(Complex alpha, FockDim dim) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw DomainError("coherent_state: non-finite amplitude");
  }
  const Vector v = coherent_amplitudes(alpha, dim);
  const double leakage = std::max(0.0, 1.0 - v.squaredNorm());
  if (std::norm(alpha) > dim.n() / 4.0 || leakage > 1e-8) {
    std::ostringstream os;
    os << "coherent_state: |alpha|^2 = " << std::norm(alpha) << " at n_max = " << dim.n()
       << " loses " << leakage << " of the norm";
    warn(os.str());
  }
  return DensityMatrix::pure(dim, v, leakage);
}

DensityMatrix vacuum(FockDim dim) { return fock_state(0, dim); }

DensityMatrix fock_state(int n, FockDim dim) {
  if (n < 0 || n >= dim.n()) throw DomainError("fock_state: level outside the truncated space");
  Vector v = Vector::Zero(dim.n());
  v(n) = 1.0;
  return DensityMatrix::pure(dim, v);
}

DensityMatrix cat_state(Complex alpha, double phase, FockDim dim) {
  const Vector plus = coherent_amplitudes(alpha, dim);
  const Vector minus = coherent_amplitudes(-alpha, dim);
  const Vector v = plus + std::polar(1.0, phase) * minus;
  // Untruncated norm^2 = 2 + 2 cos(phase) exp(-2|alpha|^2).
  const double full = 2.0 + 2.0 * std::cos(phase) * std::exp(-2.0 * std::norm(alpha));
  const double kept = v.squaredNorm();
  if (!(full > 1e-12) || !(kept > 1e-12)) {
    throw DegenerateInputError("cat_state: superposition has (near) zero norm");
  }
  const double leakage = std::max(0.0, 1.0 - kept / full);
  if (leakage > 1e-8) warn("cat_state: truncation leakage above 1e-8");
  return DensityMatrix::pure(dim, v / std::sqrt(kept), leakage);
}

DensityMatrix thermal_state(double nbar, FockDim dim) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw DegenerateInputError("thermal_state: nbar must be finite and >= 0");
  }
  Matrix rho = Matrix::Zero(dim.n(), dim.n());
  const double q = nbar / (1.0 + nbar);
  double w = 1.0 / (1.0 + nbar);
  double kept = 0.0;
  for (int n = 0; n < dim.n(); ++n) {
    rho(n, n) = w;
    kept += w;
    w *= q;
  }
  const double leakage = std::max(0.0, 1.0 - kept);
  if (leakage > 1e-8) warn("thermal_state: truncation leakage above 1e-8");
  return DensityMatrix(dim, rho / kept, leakage);
}

TwoModeState tensor(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "tensor");
  const int n = a.dim().n();
  Matrix out(n * n, n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out.block(i * n, j * n, n, n) = a(i, j) * b.data();
  }
  return TwoModeState::from_dense(a.dim(), std::move(out),
                                  1.0 - (1.0 - a.leakage()) * (1.0 - b.leakage()));
}

DensityMatrix partial_trace(const TwoModeState& state, Mode keep) {
  const FockDim dim = state.dim();
  const int n = dim.n();
  if (state.is_pair_diagonal()) {
    // Off-diagonal pairs |m,m><k,k| (m != k) vanish under either partial trace.
    Matrix out = state.pair_matrix().diagonal().asDiagonal();
    return DensityMatrix(dim, std::move(out), state.leakage());
  }
  const Matrix w = state.dense();
  Matrix out = Matrix::Zero(n, n);
  if (keep == Mode::B) {
    for (int a = 0; a < n; ++a) out += w.block(a * n, a * n, n, n);
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Complex s = 0.0;
        for (int b = 0; b < n; ++b) s += w(i * n + b, j * n + b);
        out(i, j) = s;
      }
    }
  }
  return DensityMatrix(dim, hermitian_part(out), state.leakage());
}

double fidelity_uhlmann(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "fidelity");
  require_positive(a, "fidelity");
  require_positive(b, "fidelity");
  // Tr|sqrt(a) sqrt(b)| via singular values, so no square root is taken of the
  // (squared-scale) spectrum of sqrt(a) b sqrt(a).
  const Matrix prod = psd_sqrt(a.data()) * psd_sqrt(b.data());
  const double root = Eigen::BDCSVD<Matrix>(prod).singularValues().sum();
  return std::clamp(root * root, 0.0, 1.0);
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "fidelity");
  require_normalized(a, "fidelity");
  require_normalized(b, "fidelity");
  // For rank-one a = |v><v| (v unnormalized), Uhlmann reduces to <v|b|v> = Tr(a b).
  if (a.is_rank_one()) {
    require_positive(b, "fidelity");
    return std::clamp((a.data() * b.data()).trace().real(), 0.0, 1.0);
  }
  if (b.is_rank_one()) {
    require_positive(a, "fidelity");
    return std::clamp((a.data() * b.data()).trace().real(), 0.0, 1.0);
  }
  return fidelity_uhlmann(a, b);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "trace_distance");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a.data() - b.data()),
                                           Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace cvtele
