#pragma once

#include "cvtele/fock.hpp"

namespace cvtele {

/// Matrix of D(x,p) = exp(i(p x - x p)) = exp(alpha a^dagger - alpha* a) on the
/// kept levels, built element by element from
///
///   <m|D|n> = sqrt(n!/m!) alpha^(m-n)   e^{-|alpha|^2/2} L_n^(m-n)(|alpha|^2),  m >= n
///   <m|D|n> = sqrt(m!/n!) (-alpha*)^(n-m) e^{-|alpha|^2/2} L_m^(n-m)(|alpha|^2), m <  n
///
/// with log-factorial prefactors and a rescaled Laguerre recurrence. Each entry
/// equals the untruncated operator's entry; only the rows beyond n_max are missing.
Matrix displacement(PhasePoint pt, FockDim dim);

/// Diagonal <n|D|n> = e^{-|alpha|^2/2} L_n(|alpha|^2), n < n_max. Real and
/// rotation invariant.
RealVector displacement_diagonal(PhasePoint pt, FockDim dim);

/// Generalized Laguerre L_n^(k)(y) for n = 0..count-1, as (mantissa, log-scale) pairs
/// so that the value is mantissa * exp(log_scale). Exposed for testing.
struct ScaledLaguerre {
  RealVector mantissa;
  RealVector log_scale;
};
ScaledLaguerre laguerre_sequence(int k, double y, int count);

}  // namespace cvtele
