#include "cvtele/teleport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cvtele/displacement.hpp"
#include "cvtele/parallel.hpp"
#include "cvtele/sampling.hpp"

namespace cvtele {

namespace {

constexpr double kInv2Pi = 0.5 / std::numbers::pi;

void check_dims(const DensityMatrix& rho, const TwoModeState& w) {
  if (rho.dim() != w.dim()) throw DimensionError("teleport: input and resource n_max differ");
}

void check_normalized(double trace, double bound, const char* what) {
  if (std::abs(trace - 1.0) > bound) {
    std::ostringstream os;
    os << "teleport: " << what << " trace " << trace << " outside the leakage bound";
    throw NumericalError(os.str());
  }
}

// Calls visit(weight, s) for every rank-one term of M = sum weight * s s^dagger,
// where s = Psi^T D^dagger phi for each eigenvector phi of rho and each W
// component with amplitude matrix Psi.
template <class Visit>
void for_each_term(const Ensemble& rho, const Resource& w, const Matrix& d, Visit&& visit) {
  const Matrix dh = d.adjoint();
  for (std::size_t j = 0; j < rho.states.size(); ++j) {
    const Vector t = dh * rho.states[j];
    for (const auto& c : w.components()) {
      const double weight = kInv2Pi * c.weight * rho.weights[j];
      if (c.pair_diagonal) {
        visit(weight, Vector(c.diagonal.cwiseProduct(t)));
      } else {
        visit(weight, Vector(c.amplitudes.transpose() * t));
      }
    }
  }
}

}  // namespace

BobOperator bob_operator(const Ensemble& rho, const Resource& w, PhasePoint pt) {
  const FockDim dim = w.dim();
  const Matrix d = displacement(pt, dim);
  BobOperator out{Matrix::Zero(dim.n(), dim.n()), 0.0};
  for_each_term(rho, w, d, [&](double weight, const Vector& s) {
    out.density += weight * s.squaredNorm();
    const Vector u = d * s;
    out.corrected.noalias() += weight * u * u.adjoint();
  });
  return out;
}

BobOperator bob_operator_dense(const DensityMatrix& rho, const TwoModeState& w, PhasePoint pt) {
  check_dims(rho, w);
  const int n = rho.dim().n();
  const Matrix d = displacement(pt, rho.dim());
  const Matrix x = d.adjoint() * rho.data() * d;
  const Matrix wd = w.dense();
  Matrix m = Matrix::Zero(n, n);
  for (int b = 0; b < n; ++b) {
    for (int bp = 0; bp < n; ++bp) {
      Complex acc = 0.0;
      for (int a = 0; a < n; ++a) {
        for (int ap = 0; ap < n; ++ap) acc += x(a, ap) * wd(a * n + b, ap * n + bp);
      }
      m(b, bp) = kInv2Pi * acc;
    }
  }
  return {d * m * d.adjoint(), m.trace().real()};
}

double outcome_density(const Ensemble& rho, const Resource& w, PhasePoint pt) {
  const Matrix d = displacement(pt, w.dim());
  double density = 0.0;
  for_each_term(rho, w, d, [&](double weight, const Vector& s) { density += weight * s.squaredNorm(); });
  return density;
}

ConditionalOutcome conditional_output(const DensityMatrix& rho, const Ensemble& ens,
                                      const Resource& w, PhasePoint pt) {
  if (!pt.finite()) throw DomainError("conditional_output: non-finite outcome");
  if (rho.dim() != w.dim()) throw DimensionError("teleport: input and resource n_max differ");
  BobOperator op = bob_operator(ens, w, pt);
  ConditionalOutcome out;
  out.pt = pt;
  if (!(op.density >= kDegenerateDensity)) {
    out.degenerate = true;
    return out;
  }
  out.density = op.density;
  const double corrected_trace = op.corrected.trace().real();
  Matrix normalized = hermitian_part(op.corrected) / corrected_trace;
  out.state = DensityMatrix(rho.dim(), std::move(normalized),
                            std::max(0.0, 1.0 - corrected_trace / op.density));
  return out;
}

ConditionalOutcome conditional_output(const DensityMatrix& rho, const TwoModeState& w,
                                      PhasePoint pt) {
  check_dims(rho, w);
  check_normalized(rho.trace(), kDefaultLeakageBound, "input");
  check_normalized(w.trace(), kDefaultLeakageBound, "resource");
  return conditional_output(rho, ensemble_of(rho), Resource(w), pt);
}

ChannelConfig protocol_config(const DensityMatrix& rho, const TwoModeState& w,
                              const ChannelConfig& cfg) {
  check_dims(rho, w);
  cfg.validate();
  ChannelConfig out = cfg;
  const EprMoments m = epr_moments(w);
  const double nbar = std::max(m.var_x_diff, m.var_p_sum);
  out = with_extent(out, nbar, rho.mean_photon(), std::max(m.photons_a, m.photons_b));
  const Resource res(w);
  out.resolution = converged_resolution([&](PhasePoint pt) { return kernel_value(res, pt); }, out);
  out.adaptive = false;
  return out;
}

namespace {

template <bool Parallel>
AveragedOutput average_output_impl(const DensityMatrix& rho, const TwoModeState& w,
                                   const ChannelConfig& cfg) {
  check_dims(rho, w);
  check_normalized(rho.trace(), cfg.leakage_bound, "input");
  check_normalized(w.trace(), cfg.leakage_bound, "resource");
  const ChannelConfig resolved = cfg.adaptive || cfg.extent == 0.0 ? protocol_config(rho, w, cfg) : cfg;
  const PhaseGrid grid = trapezoid_grid(resolved.extent, resolved.resolution);
  const Ensemble ens = ensemble_of(rho);
  const Resource res(w);
  const int n = rho.dim().n();

  // Row n, column 0 of the accumulator carries the outcome density so one
  // reduction yields both the averaged operator and its mass.
  auto accumulate = [&](std::size_t i, Matrix& acc) {
    const BobOperator op = bob_operator(ens, res, grid.points[i].pt);
    const double wt = grid.points[i].weight;
    acc.topRows(n) += wt * op.corrected;
    acc(n, 0) += wt * op.density;
  };
  Matrix sum;
  if constexpr (Parallel) {
    sum = parallel_matrix_sum<Matrix>(grid.points.size(), n + 1, n, accumulate);
  } else {
    sum = serial_matrix_sum<Matrix>(grid.points.size(), n + 1, n, accumulate);
  }
  const double mass = sum(n, 0).real();
  if (std::abs(mass - 1.0) > 1e-2) {
    std::ostringstream os;
    os << "average_output: outcome density integrates to " << mass << " on extent "
       << resolved.extent << " (grid too small)";
    throw NumericalError(os.str());
  }
  Matrix out = hermitian_part(sum.topRows(n));
  const double tr = out.trace().real();
  if (rho.trace() - tr > resolved.leakage_bound) {
    std::ostringstream os;
    os << "average_output: trace deficit " << rho.trace() - tr << " exceeds leakage bound "
       << resolved.leakage_bound << " at n_max = " << n << " (truncation too small)";
    throw TruncationError(os.str());
  }
  const double leakage = std::max(0.0, 1.0 - tr);
  if (resolved.renormalize) out /= tr;
  return {DensityMatrix(rho.dim(), std::move(out), leakage), mass, resolved};
}

}  // namespace

AveragedOutput average_output(const DensityMatrix& rho, const TwoModeState& w,
                              const ChannelConfig& cfg) {
  return average_output_impl<true>(rho, w, cfg);
}

namespace serial {

AveragedOutput average_output(const DensityMatrix& rho, const TwoModeState& w,
                              const ChannelConfig& cfg) {
  return average_output_impl<false>(rho, w, cfg);
}

}  // namespace serial

std::vector<ConditionalOutcome> sample_outcomes(const DensityMatrix& rho, const TwoModeState& w,
                                                std::size_t count, std::uint64_t seed,
                                                const ChannelConfig& cfg) {
  if (count < 1) throw DomainError("sample_outcomes: count must be >= 1");
  check_dims(rho, w);
  const ChannelConfig resolved = cfg.adaptive || cfg.extent == 0.0 ? protocol_config(rho, w, cfg) : cfg;
  const Ensemble ens = ensemble_of(rho);
  const Resource res(w);
  const RejectionSampler sampler([&](PhasePoint pt) { return outcome_density(ens, res, pt); },
                                 trapezoid_grid(resolved.extent, resolved.resolution));

  std::vector<ConditionalOutcome> out(count);
  std::vector<std::string> failures(count);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
    try {
      auto engine = stream_engine(seed, static_cast<std::uint64_t>(i));
      out[i] = conditional_output(rho, ens, res, sampler.sample(engine));
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw SamplingError(f);
  }
  return out;
}

}  // namespace cvtele
