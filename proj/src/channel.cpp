#include "cvtele/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cvtele/displacement.hpp"
#include "cvtele/parallel.hpp"

namespace cvtele {

// ---------------------------------------------------------------------------
// Kernel

Kernel Kernel::gaussian(double nbar) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw DomainError("gaussian_kernel: nbar must be finite and >= 0");
  }
  return Kernel(GaussianClosed{nbar});
}

Kernel Kernel::sampled(std::vector<KernelSample> samples, double extent, int resolution) {
  for (const auto& s : samples) {
    if (!(s.value >= 0.0)) throw NumericalError("sampled kernel: negative or NaN value");
  }
  return Kernel(SampledGrid{std::move(samples), extent, resolution});
}

double Kernel::nbar() const {
  const auto* g = std::get_if<GaussianClosed>(&rep_);
  if (!g) throw DomainError("Kernel::nbar: not a Gaussian kernel");
  return g->nbar;
}

const std::vector<KernelSample>& Kernel::samples() const {
  const auto* s = std::get_if<SampledGrid>(&rep_);
  if (!s) throw DomainError("Kernel::samples: not a sampled kernel");
  return s->samples;
}

double Kernel::extent() const {
  const auto* s = std::get_if<SampledGrid>(&rep_);
  return s ? s->extent : 0.0;
}

int Kernel::resolution() const {
  const auto* s = std::get_if<SampledGrid>(&rep_);
  return s ? s->resolution : 0;
}

double Kernel::value(PhasePoint pt) const { return gaussian_kernel_value(nbar(), pt); }

double Kernel::normalization() const {
  if (is_gaussian()) return 1.0;
  const auto& s = samples();
  return parallel_sum(s.size(), [&](std::size_t i) { return s[i].weight * s[i].value; });
}

std::pair<double, double> Kernel::second_moments() const {
  if (is_gaussian()) return {nbar(), nbar()};
  const auto& s = samples();
  const double xx = serial_sum(s.size(), [&](std::size_t i) {
    return s[i].weight * s[i].value * s[i].pt.x * s[i].pt.x;
  });
  const double pp = serial_sum(s.size(), [&](std::size_t i) {
    return s[i].weight * s[i].value * s[i].pt.p * s[i].pt.p;
  });
  return {xx, pp};
}

double gaussian_kernel_value(double nbar, PhasePoint pt) {
  return std::exp(-(pt.x * pt.x + pt.p * pt.p) / (2.0 * nbar)) / (2.0 * std::numbers::pi * nbar);
}

Kernel gaussian_kernel(double nbar) { return Kernel::gaussian(nbar); }

double noisy_nbar(double r, double transmission) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("noisy_nbar: r must be finite and >= 0");
  if (!(transmission >= 0.0 && transmission <= 1.0)) {
    throw DomainError("noisy_nbar: transmission must lie in [0, 1]");
  }
  return 1.0 - (1.0 - std::exp(-2.0 * r)) * transmission;
}

Kernel kernel_from(const Resource& w, const ChannelConfig& cfg) {
  cfg.validate();
  if (!(cfg.extent > 0.0)) throw ConfigError("kernel_from: extent must be resolved");
  auto density = [&](PhasePoint pt) { return kernel_value(w, pt); };
  const int res = converged_resolution(density, cfg);
  const PhaseGrid grid = trapezoid_grid(cfg.extent, res);
  std::vector<KernelSample> samples(grid.points.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(samples.size()); ++i) {
    samples[i] = {grid.points[i].pt, grid.points[i].weight, kernel_value(w, grid.points[i].pt)};
  }
  return Kernel::sampled(std::move(samples), cfg.extent, res);
}

Kernel kernel_from(const TwoModeState& w, const ChannelConfig& cfg) {
  ChannelConfig resolved = cfg;
  if (resolved.extent == 0.0) {
    const EprMoments m = epr_moments(w);
    resolved = with_extent(cfg, std::max(m.var_x_diff, m.var_p_sum), 0.0);
  }
  return kernel_from(Resource(w), resolved);
}

// ---------------------------------------------------------------------------
// Channel application

std::vector<GridPoint> channel_points(const Kernel& k, const ChannelConfig& cfg,
                                      double input_photons) {
  cfg.validate();
  std::vector<GridPoint> pts;
  if (k.is_gaussian()) {
    const double nbar = k.nbar();
    if (cfg.quadrature == Quadrature::GaussHermite) return gauss_hermite_points(nbar, cfg.hermite_order);
    const ChannelConfig resolved = with_extent(cfg, nbar, input_photons);
    pts = trapezoid_grid(resolved.extent, resolved.resolution).points;
    for (auto& g : pts) g.weight *= gaussian_kernel_value(nbar, g.pt);
  } else {
    const auto& s = k.samples();
    pts.reserve(s.size());
    for (const auto& ks : s) pts.push_back({ks.pt, ks.weight * ks.value});
  }
  const double norm = serial_sum(pts.size(), [&](std::size_t i) { return pts[i].weight; });
  if (std::abs(norm - 1.0) > cfg.kernel_tolerance) {
    std::ostringstream os;
    os << "kernel normalization " << norm << " outside 1 +/- " << cfg.kernel_tolerance
       << " (grid extent too small or too coarse)";
    throw NumericalError(os.str());
  }
  return pts;
}

namespace {

void require_input_normalized(const DensityMatrix& rho, const ChannelConfig& cfg, const char* what) {
  if (std::abs(rho.trace() - 1.0) > cfg.leakage_bound) {
    std::ostringstream os;
    os << what << ": input trace " << rho.trace() << " outside the leakage bound";
    throw NumericalError(os.str());
  }
}

template <bool Parallel>
DensityMatrix apply_channel_impl(const Kernel& k, const DensityMatrix& rho,
                                 const ChannelConfig& cfg) {
  cfg.validate();
  require_input_normalized(rho, cfg, "apply_channel");
  if (k.is_identity()) return rho;

  const FockDim dim = rho.dim();
  const std::vector<GridPoint> pts = channel_points(k, cfg, rho.mean_photon());
  const Ensemble ens = ensemble_of(rho);
  auto accumulate = [&](std::size_t i, Matrix& acc) {
    const Matrix d = displacement(pts[i].pt, dim);
    for (std::size_t j = 0; j < ens.states.size(); ++j) {
      const Vector v = d * ens.states[j];
      acc.noalias() += (pts[i].weight * ens.weights[j]) * v * v.adjoint();
    }
  };
  Matrix sum;
  if constexpr (Parallel) {
    sum = parallel_matrix_sum<Matrix>(pts.size(), dim.n(), dim.n(), accumulate);
  } else {
    sum = serial_matrix_sum<Matrix>(pts.size(), dim.n(), dim.n(), accumulate);
  }
  sum = hermitian_part(sum);

  const double out_trace = sum.trace().real();
  const double deficit = rho.trace() - out_trace;
  if (deficit > cfg.leakage_bound) {
    std::ostringstream os;
    os << "apply_channel: trace deficit " << deficit << " exceeds leakage bound "
       << cfg.leakage_bound << " at n_max = " << dim.n() << " (truncation too small)";
    throw TruncationError(os.str());
  }
  const double leakage = std::max(0.0, 1.0 - out_trace);
  if (cfg.renormalize) sum /= out_trace;
  return DensityMatrix(dim, std::move(sum), leakage);
}

}  // namespace

DensityMatrix apply_channel(const Kernel& k, const DensityMatrix& rho, const ChannelConfig& cfg) {
  return apply_channel_impl<true>(k, rho, cfg);
}

namespace serial {

DensityMatrix apply_channel(const Kernel& k, const DensityMatrix& rho, const ChannelConfig& cfg) {
  return apply_channel_impl<false>(k, rho, cfg);
}

}  // namespace serial

DensityMatrix apply_thermal_form(const std::vector<std::pair<double, Complex>>& mixture,
                                 double nbar, FockDim dim) {
  if (mixture.empty()) throw DomainError("apply_thermal_form: empty mixture");
  double total = 0.0;
  for (const auto& [w, alpha] : mixture) {
    if (!(w >= 0.0)) throw DomainError("apply_thermal_form: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("apply_thermal_form: weights must sum to 1");

  const DensityMatrix th = thermal_state(nbar, dim);
  Matrix out = Matrix::Zero(dim.n(), dim.n());
  for (const auto& [w, alpha] : mixture) {
    const Matrix d = displacement(PhasePoint::from_alpha(alpha), dim);
    out += w * d * th.data() * d.adjoint();
  }
  out = hermitian_part(out);
  const double leakage = std::max(0.0, 1.0 - out.trace().real());
  return DensityMatrix(dim, std::move(out), leakage);
}

double fidelity_via_kernel(const Kernel& k, const DensityMatrix& psi, const ChannelConfig& cfg) {
  const double tr = psi.trace();
  if (psi.purity() < (1.0 - 1e-8) * tr * tr) {
    throw DomainError("fidelity_via_kernel: input state is not pure");
  }
  if (k.is_identity()) return 1.0;
  const Ensemble ens = ensemble_of(psi);
  const Vector v = ens.states.front() * std::sqrt(ens.weights.front());
  const std::vector<GridPoint> pts = channel_points(k, cfg, psi.mean_photon());
  const FockDim dim = psi.dim();
  const double f = parallel_sum(pts.size(), [&](std::size_t i) {
    const Vector dv = displacement(pts[i].pt, dim) * v;
    return pts[i].weight * std::norm(v.dot(dv));
  });
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace cvtele
