#include "cvtele/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cvtele/parallel.hpp"

namespace cvtele {

void ChannelConfig::validate() const {
  if (!(extent >= 0.0) || !std::isfinite(extent)) throw ConfigError("extent must be finite and >= 0");
  if (resolution < 41 || resolution % 2 == 0) {
    throw ConfigError("resolution must be odd and >= 41");
  }
  if (!(leakage_bound > 0.0)) throw ConfigError("leakage_bound must be > 0");
  if (hermite_order < 2) throw ConfigError("hermite_order must be >= 2");
  if (!(kernel_tolerance > 0.0)) throw ConfigError("kernel_tolerance must be > 0");
}

PhaseGrid trapezoid_grid(double extent, int resolution) {
  if (!(extent > 0.0)) throw ConfigError("trapezoid_grid: extent must be > 0");
  if (resolution < 3 || resolution % 2 == 0) throw ConfigError("trapezoid_grid: resolution must be odd");
  PhaseGrid g;
  g.extent = extent;
  g.resolution = resolution;
  g.spacing = 2.0 * extent / (resolution - 1);
  std::vector<double> axis(resolution), w(resolution, g.spacing);
  for (int i = 0; i < resolution; ++i) axis[i] = -extent + i * g.spacing;
  axis[(resolution - 1) / 2] = 0.0;
  w.front() = w.back() = 0.5 * g.spacing;
  g.points.reserve(static_cast<std::size_t>(resolution) * resolution);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) g.points.push_back({{axis[j], axis[i]}, w[i] * w[j]});
  }
  return g;
}

HermiteRule gauss_hermite_rule(int order) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int i = 1; i < order; ++i) {
    jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(i / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  HermiteRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights = std::sqrt(std::numbers::pi) * es.eigenvectors().row(0).transpose().array().square();
  return rule;
}

std::vector<GridPoint> gauss_hermite_points(double nbar, int order) {
  const HermiteRule rule = gauss_hermite_rule(order);
  const double scale = std::sqrt(2.0 * nbar);
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  std::vector<GridPoint> pts;
  pts.reserve(static_cast<std::size_t>(order) * order);
  for (int i = 0; i < order; ++i) {
    for (int j = 0; j < order; ++j) {
      pts.push_back({{scale * rule.nodes(j), scale * rule.nodes(i)},
                     norm * rule.weights(i) * norm * rule.weights(j)});
    }
  }
  return pts;
}

double default_extent(double nbar, double input_photons, double resource_photons) {
  return 5.0 * std::sqrt(std::max(nbar, 1.0) + std::max(input_photons, 0.0) +
                         std::max(resource_photons, 0.0) + 1.0);
}

ChannelConfig with_extent(ChannelConfig cfg, double nbar, double input_photons,
                          double resource_photons) {
  if (cfg.extent == 0.0) cfg.extent = default_extent(nbar, input_photons, resource_photons);
  return cfg;
}

int converged_resolution(const std::function<double(PhasePoint)>& density,
                         const ChannelConfig& cfg, int max_doublings) {
  if (!cfg.adaptive) return cfg.resolution;
  auto integrate = [&](int res) {
    const PhaseGrid g = trapezoid_grid(cfg.extent, res);
    return parallel_sum(g.points.size(), [&](std::size_t i) {
      return g.points[i].weight * density(g.points[i].pt);
    });
  };
  int res = cfg.resolution;
  double current = integrate(res);
  for (int k = 0; k < max_doublings; ++k) {
    const int finer = refined_resolution(res);
    const double next = integrate(finer);
    if (std::abs(next - current) < 1e-5) return res;
    res = finer;
    current = next;
  }
  std::ostringstream os;
  os << "grid refinement did not converge below 1e-5 by resolution " << res;
  warn(os.str());
  return res;
}

}  // namespace cvtele
