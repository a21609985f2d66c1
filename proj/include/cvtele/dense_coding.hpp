#pragma once

// Dense coding over a shared two-mode resource. Alice encodes (x, p) with
// D(x, p) on her half; Bob's joint measurement returns (x', p') with
//
//   P(x', p' | x, p) = P_W(x - x', p' - p).
//
// The x and p differences carry opposite signs. For even kernels (every TMSV)
// this is invisible; an asymmetric W makes it observable.

#include <cstdint>
#include <memory>
#include <vector>

#include "cvtele/channel.hpp"
#include "cvtele/epr.hpp"
#include "cvtele/fock.hpp"
#include "cvtele/sampling.hpp"

namespace cvtele {

class DenseCodingChannel {
 public:
  /// Gaussian kernel with variance nbar per quadrature; nbar = 0 is noiseless.
  static DenseCodingChannel gaussian(double nbar);
  /// Kernel of a general resource; cfg sets the grid for the sampling envelope.
  static DenseCodingChannel from_resource(const TwoModeState& w, const ChannelConfig& cfg = {});

  bool is_gaussian() const { return kernel_.is_gaussian(); }
  const Kernel& kernel() const { return kernel_; }
  double nbar() const { return kernel_.nbar(); }

  /// P(measured | encoded).
  double probability(PhasePoint encoded, PhasePoint measured) const;

  /// Draws one kernel error e ~ P_W, i.e. (x - x', p' - p).
  PhasePoint sample_error(std::mt19937_64& engine) const;

 private:
  DenseCodingChannel(Kernel kernel, std::shared_ptr<const Resource> resource,
                     std::shared_ptr<const RejectionSampler> sampler);

  Kernel kernel_;
  std::shared_ptr<const Resource> resource_;
  std::shared_ptr<const RejectionSampler> sampler_;
};

/// P_W(encoded.x - measured.x, measured.p - encoded.p) through kernel_value.
double channel_matrix(const TwoModeState& w, PhasePoint encoded, PhasePoint measured);
double channel_matrix(const Resource& w, PhasePoint encoded, PhasePoint measured);

/// Measured point for each message; message i uses stream_engine(seed, i).
std::vector<PhasePoint> simulate_transmission(const DenseCodingChannel& channel,
                                              const std::vector<PhasePoint>& messages,
                                              std::uint64_t seed);
std::vector<PhasePoint> simulate_transmission(const TwoModeState& w,
                                              const std::vector<PhasePoint>& messages,
                                              std::uint64_t seed, const ChannelConfig& cfg = {});

/// Messages with independent N(0, signal_var) quadratures, drawn from
/// stream_engine(seed, i).
std::vector<PhasePoint> gaussian_messages(std::size_t count, double signal_var, std::uint64_t seed);

/// log2(1 + signal_var / nbar) bits: half a log per quadrature, two quadratures.
double mutual_information_gaussian(double signal_var, double nbar);

/// Plug-in estimate with Freedman-Diaconis bins, computed per quadrature from
/// the (sent, received) pairs and summed over x and p.
double mutual_information_histogram(const std::vector<PhasePoint>& sent,
                                    const std::vector<PhasePoint>& received);

/// Gaussian channel with nbar = noisy_nbar(r, T).
DenseCodingChannel noisy_dense_coding(double r, double transmission);

}  // namespace cvtele
