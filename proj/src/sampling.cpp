#include "cvtele/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cvtele/parallel.hpp"

namespace cvtele {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ index);
}

std::mt19937_64 stream_engine(std::uint64_t master, std::uint64_t index) {
  return std::mt19937_64(derive_seed(master, index));
}

RejectionSampler::RejectionSampler(std::function<double(PhasePoint)> density, const PhaseGrid& grid)
    : density_(std::move(density)) {
  const auto& pts = grid.points;
  std::vector<double> values(pts.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pts.size()); ++i) {
    values[i] = density_(pts[i].pt);
  }
  for (double v : values) {
    if (!(v >= 0.0)) throw SamplingError("RejectionSampler: negative or NaN density");
  }
  auto moment = [&](auto f) {
    return serial_sum(pts.size(), [&](std::size_t i) { return pts[i].weight * values[i] * f(pts[i].pt); });
  };
  const double mass = moment([](PhasePoint) { return 1.0; });
  if (!(mass > 0.0)) throw SamplingError("RejectionSampler: density vanishes on the grid");
  mean_ = {moment([](PhasePoint q) { return q.x; }) / mass, moment([](PhasePoint q) { return q.p; }) / mass};
  const double vx = moment([&](PhasePoint q) { return (q.x - mean_.x) * (q.x - mean_.x); }) / mass;
  const double vp = moment([&](PhasePoint q) { return (q.p - mean_.p) * (q.p - mean_.p); }) / mass;
  // Envelope variance is twice the measured variance per axis.
  sigma_x_ = std::sqrt(2.0 * std::max(vx, grid.spacing * grid.spacing));
  sigma_p_ = std::sqrt(2.0 * std::max(vp, grid.spacing * grid.spacing));
  wide_x_ = std::max(sigma_x_, std::sqrt(kTailVariance));
  wide_p_ = std::max(sigma_p_, std::sqrt(kTailVariance));

  peak_ = *std::max_element(values.begin(), values.end());
  double ratio = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double g = envelope(pts[i].pt);
    if (g > 0.0 && values[i] >= kTailFloor * peak_) ratio = std::max(ratio, values[i] / g);
  }
  scale_ = 1.5 * ratio;
  if (!(scale_ > 0.0)) throw SamplingError("RejectionSampler: degenerate envelope");
}

namespace {

double normal2(PhasePoint pt, PhasePoint mean, double sx, double sp) {
  const double zx = (pt.x - mean.x) / sx;
  const double zp = (pt.p - mean.p) / sp;
  return std::exp(-0.5 * (zx * zx + zp * zp)) / (2.0 * std::numbers::pi * sx * sp);
}

}  // namespace

double RejectionSampler::envelope(PhasePoint pt) const {
  return (1.0 - kTailWeight) * normal2(pt, mean_, sigma_x_, sigma_p_) +
         kTailWeight * normal2(pt, mean_, wide_x_, wide_p_);
}

PhasePoint RejectionSampler::sample(std::mt19937_64& engine) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const bool wide = unit(engine) < kTailWeight;
    const double zx = normal(engine);
    const double zp = normal(engine);
    const PhasePoint pt{mean_.x + zx * (wide ? wide_x_ : sigma_x_), mean_.p + zp * (wide ? wide_p_ : sigma_p_)};
    const double bound = scale_ * envelope(pt);
    const double f = density_(pt);
    if (f > bound && f >= kTailFloor * peak_) {
      std::ostringstream os;
      os << "rejection envelope exceeded at (" << pt.x << ", " << pt.p << "): density " << f
         << " > envelope " << bound;
      throw SamplingError(os.str());
    }
    if (unit(engine) * bound < f) return pt;
  }
  throw SamplingError("rejection sampler: no acceptance within the attempt limit");
}

}  // namespace cvtele
