#include "cvtele/displacement.hpp"

#include <cmath>
#include <vector>

namespace cvtele {

namespace {

constexpr double kRescaleAt = 1e150;
const double kLogRescale = std::log(kRescaleAt);

const std::vector<double>& log_factorials(int upto) {
  thread_local std::vector<double> table{0.0};
  while (static_cast<int>(table.size()) <= upto) {
    const auto n = static_cast<double>(table.size());
    table.push_back(table.back() + std::log(n));
  }
  return table;
}

}  // namespace

ScaledLaguerre laguerre_sequence(int k, double y, int count) {
  ScaledLaguerre out{RealVector::Zero(count), RealVector::Zero(count)};
  if (count <= 0) return out;
  double prev = 0.0;
  double cur = 1.0;
  double scale = 0.0;
  out.mantissa(0) = cur;
  for (int n = 0; n + 1 < count; ++n) {
    // (n+1) L_{n+1} = (2n+1+k-y) L_n - (n+k) L_{n-1}
    const double next = ((2.0 * n + 1.0 + k - y) * cur - (n + k) * prev) / (n + 1.0);
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescaleAt) {
      cur /= kRescaleAt;
      prev /= kRescaleAt;
      scale += kLogRescale;
    }
    out.mantissa(n + 1) = cur;
    out.log_scale(n + 1) = scale;
  }
  return out;
}

Matrix displacement(PhasePoint pt, FockDim dim) {
  const int N = dim.n();
  const Complex alpha = pt.alpha();
  const double y = std::norm(alpha);
  Matrix d = Matrix::Zero(N, N);
  if (y == 0.0) {
    d.setIdentity();
    return d;
  }
  const auto& lf = log_factorials(N);
  const double log_abs = 0.5 * std::log(y);
  const Complex unit = alpha / std::sqrt(y);
  const Complex unit_up = -std::conj(unit);
  Complex phase_low = 1.0;
  Complex phase_up = 1.0;
  for (int k = 0; k < N; ++k) {
    const int count = N - k;
    const ScaledLaguerre lag = laguerre_sequence(k, y, count);
    for (int n = 0; n < count; ++n) {
      const double log_mag = 0.5 * (lf[n] - lf[n + k]) + k * log_abs - 0.5 * y + lag.log_scale(n);
      const double mag = std::exp(log_mag) * lag.mantissa(n);
      d(n + k, n) = mag * phase_low;
      if (k > 0) d(n, n + k) = mag * phase_up;
    }
    phase_low *= unit;
    phase_up *= unit_up;
  }
  return d;
}

RealVector displacement_diagonal(PhasePoint pt, FockDim dim) {
  const double y = std::norm(pt.alpha());
  const ScaledLaguerre lag = laguerre_sequence(0, y, dim.n());
  RealVector out(dim.n());
  for (int n = 0; n < dim.n(); ++n) {
    out(n) = std::exp(-0.5 * y + lag.log_scale(n)) * lag.mantissa(n);
  }
  return out;
}

}  // namespace cvtele
