#include "cvtele/epr.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cvtele/displacement.hpp"

namespace cvtele {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

bool dense_is_pair_diagonal(const Matrix& w, int n) {
  for (int col = 0; col < n * n; ++col) {
    const bool col_pair = (col / n) == (col % n);
    for (int row = 0; row < n * n; ++row) {
      const bool row_pair = (row / n) == (row % n);
      if ((!col_pair || !row_pair) && w(row, col) != Complex(0.0)) return false;
    }
  }
  return true;
}

Matrix pair_block(const Matrix& w, int n) {
  Matrix out(n, n);
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) out(m, k) = w(m * n + m, k * n + k);
  }
  return out;
}

void check_spectrum(const RealVector& ev, const char* what) {
  if (ev.size() > 0 && ev.minCoeff() < kPositivityFloor) {
    std::ostringstream os;
    os << what << ": resource state has eigenvalue " << ev.minCoeff();
    throw NumericalError(os.str());
  }
}

// <Psi(x,p)|v> without the 1/sqrt(2pi): sum_ab conj(D_ba) v_ab = sum_ab (D^dagger)_ab v_ab.
Complex psi_amplitude(const Resource::Component& c, const RealVector* diag, const Matrix* full) {
  if (c.pair_diagonal) return (diag->cast<Complex>().array() * c.diagonal.array()).sum();
  return (full->adjoint().array() * c.amplitudes.array()).sum();
}

// <Phi(x,p)|v> = e^{ipx/2} <Psi(-x,p)|v>, again without 1/sqrt(2pi).
Complex phi_amplitude(const Resource::Component& c, PhasePoint pt, const RealVector* diag,
                      const Matrix* full_at_pt) {
  const Complex phase = std::polar(1.0, 0.5 * pt.p * pt.x);
  if (c.pair_diagonal) {
    return phase * (diag->cast<Complex>().array() * c.diagonal.array()).sum();
  }
  // <Phi(x,p)| has components e^{+ipx/2} conj(D(x,p)_mn).
  return phase * (full_at_pt->conjugate().array() * c.amplitudes.array()).sum();
}

}  // namespace

RealVector tmsv_schmidt(double r, FockDim dim) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("tmsv: r must be finite and >= 0");
  RealVector c(dim.n());
  const double t = std::tanh(r);
  c(0) = 1.0 / std::cosh(r);
  for (int n = 1; n < dim.n(); ++n) c(n) = c(n - 1) * t;
  return c;
}

TwoModeState tmsv(double r, FockDim dim, double leakage_warning) {
  const RealVector c = tmsv_schmidt(r, dim);
  const double leakage = std::pow(std::tanh(r), 2.0 * dim.n());
  if (leakage > leakage_warning) {
    std::ostringstream os;
    os << "tmsv: r = " << r << " at n_max = " << dim.n() << " loses " << leakage
       << " of the norm";
    warn(os.str());
  }
  return TwoModeState::from_schmidt(dim, c, leakage);
}

TwoModeState tmsv_mixture(const std::vector<std::pair<double, double>>& weight_and_r,
                          FockDim dim) {
  if (weight_and_r.empty()) throw DomainError("tmsv_mixture: empty mixture");
  Matrix pair = Matrix::Zero(dim.n(), dim.n());
  double total = 0.0;
  double leakage = 0.0;
  for (const auto& [w, r] : weight_and_r) {
    if (!(w >= 0.0)) throw DomainError("tmsv_mixture: negative weight");
    const Vector c = tmsv_schmidt(r, dim).cast<Complex>();
    pair += w * c * c.adjoint();
    total += w;
    leakage += w * std::pow(std::tanh(r), 2.0 * dim.n());
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("tmsv_mixture: weights must sum to 1");
  return TwoModeState::from_pair_matrix(dim, pair, leakage);
}

// ---------------------------------------------------------------------------

Resource::Resource(const TwoModeState& w, double cutoff) : dim_(w.dim()) {
  const int n = dim_.n();
  if (w.has_schmidt()) {
    components_.push_back({1.0, true, w.schmidt().cast<Complex>(), {}});
    return;
  }
  auto add_pair_components = [&](const Matrix& pair) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(pair);
    check_spectrum(es.eigenvalues(), "Resource");
    const double top = es.eigenvalues().maxCoeff();
    for (int k = n - 1; k >= 0; --k) {
      const double ev = es.eigenvalues()(k);
      if (ev > cutoff * top && ev > 0.0) components_.push_back({ev, true, es.eigenvectors().col(k), {}});
    }
  };
  if (w.is_pair_diagonal()) {
    add_pair_components(w.pair_matrix());
    return;
  }
  const Matrix dense = w.dense();
  if (dense_is_pair_diagonal(dense, n)) {
    add_pair_components(pair_block(dense, n));
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense);
  check_spectrum(es.eigenvalues(), "Resource");
  const double top = es.eigenvalues().maxCoeff();
  for (int k = dim_.two_mode() - 1; k >= 0; --k) {
    const double ev = es.eigenvalues()(k);
    if (!(ev > cutoff * top && ev > 0.0)) continue;
    Component c;
    c.weight = ev;
    c.amplitudes.resize(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) c.amplitudes(a, b) = es.eigenvectors()(a * n + b, k);
    }
    components_.push_back(std::move(c));
  }
}

bool Resource::all_pair_diagonal() const {
  for (const auto& c : components_) {
    if (!c.pair_diagonal) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

EprMoments epr_moments(const TwoModeState& w) {
  const FockDim dim = w.dim();
  const int n = dim.n();
  const bool pair = w.is_pair_diagonal();
  const Matrix dense = pair ? Matrix() : w.dense();
  const Matrix* pm = pair ? &w.pair_matrix() : nullptr;
  auto rho = [&](int i, int j, int k, int l) -> Complex {
    if (pair) return (i == j && k == l) ? (*pm)(i, k) : Complex(0.0);
    return dense(i * n + j, k * n + l);
  };
  // Tr(rho O) = sum_{u,v} rho_{vu} O_{uv}.
  Complex a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0, ab = 0.0, abd = 0.0;
  double na = 0.0, nb = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double diag = rho(i, j, i, j).real();
      na += i * diag;
      nb += j * diag;
      if (i >= 1) a1 += rho(i, j, i - 1, j) * std::sqrt(double(i));
      if (j >= 1) b1 += rho(i, j, i, j - 1) * std::sqrt(double(j));
      if (i >= 2) a2 += rho(i, j, i - 2, j) * std::sqrt(double(i) * (i - 1));
      if (j >= 2) b2 += rho(i, j, i, j - 2) * std::sqrt(double(j) * (j - 1));
      if (i >= 1 && j >= 1) ab += rho(i, j, i - 1, j - 1) * std::sqrt(double(i) * j);
      if (i >= 1 && j + 1 < n) abd += rho(i, j, i - 1, j + 1) * std::sqrt(double(i) * (j + 1));
    }
  }
  const double tr = w.trace();
  a1 /= tr; b1 /= tr; a2 /= tr; b2 /= tr; ab /= tr; abd /= tr;
  na /= tr; nb /= tr;

  const double xa = std::numbers::sqrt2 * a1.real();
  const double xb = std::numbers::sqrt2 * b1.real();
  const double pa = std::numbers::sqrt2 * a1.imag();
  const double pb = std::numbers::sqrt2 * b1.imag();
  const double xa2 = a2.real() + na + 0.5;
  const double xb2 = b2.real() + nb + 0.5;
  const double pa2 = na + 0.5 - a2.real();
  const double pb2 = nb + 0.5 - b2.real();
  const double xaxb = ab.real() + abd.real();
  const double papb = -ab.real() + abd.real();

  EprMoments m;
  m.mean_x_diff = xb - xa;
  m.mean_p_sum = pa + pb;
  m.var_x_diff = xa2 + xb2 - 2.0 * xaxb - m.mean_x_diff * m.mean_x_diff;
  m.var_p_sum = pa2 + pb2 + 2.0 * papb - m.mean_p_sum * m.mean_p_sum;
  m.photons_a = na;
  m.photons_b = nb;
  return m;
}

// ---------------------------------------------------------------------------

Vector phi_vector(PhasePoint pt, FockDim dim) {
  const int n = dim.n();
  const Matrix d = displacement(pt, dim);
  const Complex phase = std::polar(kInvSqrt2Pi, -0.5 * pt.p * pt.x);
  Vector v(dim.two_mode());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) v(a * n + b) = phase * d(a, b);
  }
  return v;
}

Vector psi_vector(PhasePoint pt, FockDim dim) {
  const int n = dim.n();
  const Matrix d = displacement(pt, dim);
  Vector v(dim.two_mode());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) v(a * n + b) = kInvSqrt2Pi * d(b, a);
  }
  return v;
}

Complex epr_overlap(const Vector& amplitudes, FockDim dim, PhasePoint pt) {
  if (amplitudes.size() != dim.two_mode()) {
    throw DimensionError("epr_overlap: vector length does not match n_max^2");
  }
  return phi_vector(pt, dim).dot(amplitudes);
}

Complex epr_overlap(const TwoModeState& state, PhasePoint pt) {
  if (state.has_schmidt()) {
    const RealVector d = displacement_diagonal(pt, state.dim());
    const Complex phase = std::polar(kInvSqrt2Pi, 0.5 * pt.p * pt.x);
    return phase * state.schmidt().dot(d);
  }
  const Matrix dense = state.dense();
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense);
  const int top = static_cast<int>(es.eigenvalues().size()) - 1;
  const double lead = es.eigenvalues()(top);
  if (std::abs(lead - state.trace()) > 1e-10 * std::max(1.0, state.trace())) {
    throw DomainError("epr_overlap: state is not pure");
  }
  Vector v = es.eigenvectors().col(top) * std::sqrt(lead);
  // Fix the global phase: largest component real and positive.
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  v *= std::conj(v(imax)) / std::abs(v(imax));
  return epr_overlap(v, state.dim(), pt);
}

double kernel_value(const Resource& w, PhasePoint pt) {
  if (!pt.finite()) throw DomainError("kernel_value: non-finite phase point");
  RealVector diag;
  Matrix full;
  if (w.all_pair_diagonal()) {
    diag = displacement_diagonal(pt, w.dim());
  } else {
    full = displacement(pt, w.dim());
    diag = full.diagonal().real();
  }
  double total = 0.0;
  for (const auto& c : w.components()) total += c.weight * std::norm(psi_amplitude(c, &diag, &full));
  return total / (2.0 * std::numbers::pi);
}

double kernel_value(const TwoModeState& w, PhasePoint pt) { return kernel_value(Resource(w), pt); }

double kernel_value_dense(const TwoModeState& w, PhasePoint pt) {
  const Vector v = psi_vector(pt, w.dim());
  const double value = v.dot(w.dense() * v).real();
  if (value < -1e-10) {
    std::ostringstream os;
    os << "kernel_value: negative kernel " << value << " at (" << pt.x << ", " << pt.p << ")";
    throw NumericalError(os.str());
  }
  return std::max(value, 0.0);
}

Complex f_w_element(const Resource& w, PhasePoint left, PhasePoint right) {
  RealVector dl, dr;
  Matrix fl, fr;
  if (w.all_pair_diagonal()) {
    dl = displacement_diagonal(left, w.dim());
    dr = displacement_diagonal(right, w.dim());
  } else {
    fl = displacement(left, w.dim());
    fr = displacement(right, w.dim());
    dl = fl.diagonal().real();
    dr = fr.diagonal().real();
  }
  Complex total = 0.0;
  for (const auto& c : w.components()) {
    total += c.weight * phi_amplitude(c, left, &dl, &fl) * std::conj(phi_amplitude(c, right, &dr, &fr));
  }
  return total / (2.0 * std::numbers::pi);
}

Complex f_w_element(const TwoModeState& w, PhasePoint left, PhasePoint right) {
  return f_w_element(Resource(w), left, right);
}

Complex f_w_element_dense(const TwoModeState& w, PhasePoint left, PhasePoint right) {
  return phi_vector(left, w.dim()).dot(w.dense() * phi_vector(right, w.dim()));
}

Matrix epr_reduced_projector(FockDim dim) {
  const int n = dim.n();
  Vector phi = Vector::Zero(dim.two_mode());
  for (int k = 0; k < n; ++k) phi(k * n + k) = kInvSqrt2Pi;
  const Matrix proj = phi * phi.adjoint();
  return partial_trace(TwoModeState::from_dense(dim, proj), Mode::B).data();
}

}  // namespace cvtele
