#include "cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cli/state_spec.hpp"
#include "cvtele/channel.hpp"
#include "cvtele/epr.hpp"
#include "cvtele/gaussian.hpp"
#include "cvtele/sampling.hpp"
#include "cvtele/teleport.hpp"

namespace cvtele::cli {

int oracle_n_max(double r, int floor) {
  if (r <= 0.0) return floor;
  const double t = std::tanh(r);
  const int needed = static_cast<int>(std::ceil(std::log(1e-6) / std::log(t)));
  return std::max(floor, needed);
}

double FidelityPoint::spread() const {
  std::vector<double> v{f_kernel, f_channel, f_oracle};
  if (f_gaussian) v.push_back(*f_gaussian);
  if (f_analytic) v.push_back(*f_analytic);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

FidelityPoint fidelity_point(const std::string& input, double r, int n_max, bool auto_size,
                             const ChannelConfig& base) {
  FidelityPoint out;
  out.r = r;
  out.nbar = std::exp(-2.0 * r);
  out.n_max = n_max;
  out.n_max_oracle = auto_size ? oracle_n_max(r, n_max) : n_max;

  const FockDim dim(n_max);
  const DensityMatrix psi = parse_state(input, dim);
  const Kernel k = gaussian_kernel(out.nbar);
  out.f_kernel = fidelity_via_kernel(k, psi, base);
  out.f_channel = fidelity(psi, apply_channel(k, psi, base));

  const FockDim odim(out.n_max_oracle);
  const DensityMatrix psi_o = parse_state(input, odim);
  const AveragedOutput avg = average_output(psi_o, tmsv(r, odim), base);
  out.f_oracle = fidelity(psi_o, avg.state);

  if (is_coherent_spec(input)) {
    const GaussianState g = GaussianState::coherent(coherent_amplitude(input));
    out.f_gaussian = gaussian_fidelity(g, apply_gaussian_channel(g, out.nbar));
    out.f_analytic = 1.0 / (1.0 + out.nbar);
  }
  return out;
}

namespace {

Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed) {
  auto engine = stream_engine(seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double re = normal(engine);
      const double im = normal(engine);
      g(i, j) = {re, im};
    }
  }
  return g;
}

}  // namespace

DensityMatrix random_density_matrix(FockDim dim, int support, int rank, std::uint64_t seed) {
  if (support < 1 || support > dim.n()) throw DomainError("random_density_matrix: bad support");
  const Matrix g = gaussian_matrix(support, rank, seed);
  Matrix rho = Matrix::Zero(dim.n(), dim.n());
  rho.topLeftCorner(support, support) = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(dim, hermitian_part(rho));
}

TwoModeState random_two_mode_state(FockDim dim, int rank, std::uint64_t seed) {
  const Matrix g = gaussian_matrix(dim.two_mode(), rank, seed);
  Matrix w = g * g.adjoint();
  w /= w.trace().real();
  return TwoModeState::from_dense(dim, hermitian_part(w));
}

Eigen::Matrix2d sample_covariance(const std::vector<PhasePoint>& pts) {
  const double n = static_cast<double>(pts.size());
  double mx = 0.0, mp = 0.0;
  for (const auto& q : pts) {
    mx += q.x;
    mp += q.p;
  }
  mx /= n;
  mp /= n;
  Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
  for (const auto& q : pts) {
    const double dx = q.x - mx, dp = q.p - mp;
    c(0, 0) += dx * dx;
    c(1, 1) += dp * dp;
    c(0, 1) += dx * dp;
  }
  c /= (n - 1.0);
  c(1, 0) = c(0, 1);
  return c;
}

}  // namespace cvtele::cli
