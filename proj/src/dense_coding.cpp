#include "cvtele/dense_coding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "cvtele/grid.hpp"

namespace cvtele {

DenseCodingChannel::DenseCodingChannel(Kernel kernel, std::shared_ptr<const Resource> resource,
                                       std::shared_ptr<const RejectionSampler> sampler)
    : kernel_(std::move(kernel)), resource_(std::move(resource)), sampler_(std::move(sampler)) {}

DenseCodingChannel DenseCodingChannel::gaussian(double nbar) {
  return DenseCodingChannel(gaussian_kernel(nbar), nullptr, nullptr);
}

DenseCodingChannel DenseCodingChannel::from_resource(const TwoModeState& w, const ChannelConfig& cfg) {
  ChannelConfig resolved = cfg;
  if (resolved.extent == 0.0) {
    const EprMoments m = epr_moments(w);
    resolved = with_extent(cfg, std::max(m.var_x_diff, m.var_p_sum), 0.0);
  }
  auto res = std::make_shared<const Resource>(w);
  Kernel k = kernel_from(*res, resolved);
  const std::shared_ptr<const Resource> held = res;
  auto sampler = std::make_shared<const RejectionSampler>(
      [held](PhasePoint e) { return kernel_value(*held, e); },
      trapezoid_grid(k.extent(), k.resolution()));
  return DenseCodingChannel(std::move(k), std::move(res), std::move(sampler));
}

double DenseCodingChannel::probability(PhasePoint encoded, PhasePoint measured) const {
  if (resource_) return channel_matrix(*resource_, encoded, measured);
  if (kernel_.is_identity()) {
    throw DomainError("DenseCodingChannel::probability: noiseless channel has no density");
  }
  return kernel_.value({encoded.x - measured.x, measured.p - encoded.p});
}

PhasePoint DenseCodingChannel::sample_error(std::mt19937_64& engine) const {
  if (sampler_) return sampler_->sample(engine);
  if (kernel_.is_identity()) return {0.0, 0.0};
  std::normal_distribution<double> normal(0.0, std::sqrt(kernel_.nbar()));
  const double ex = normal(engine);
  const double ep = normal(engine);
  return {ex, ep};
}

double channel_matrix(const Resource& w, PhasePoint encoded, PhasePoint measured) {
  return kernel_value(w, {encoded.x - measured.x, measured.p - encoded.p});
}

double channel_matrix(const TwoModeState& w, PhasePoint encoded, PhasePoint measured) {
  return kernel_value(w, {encoded.x - measured.x, measured.p - encoded.p});
}

std::vector<PhasePoint> simulate_transmission(const DenseCodingChannel& channel,
                                              const std::vector<PhasePoint>& messages,
                                              std::uint64_t seed) {
  std::vector<PhasePoint> out(messages.size());
  std::vector<std::string> failures(messages.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(messages.size()); ++i) {
    try {
      auto engine = stream_engine(seed, static_cast<std::uint64_t>(i));
      const PhasePoint e = channel.sample_error(engine);
      // e = (x - x', p' - p)
      out[i] = {messages[i].x - e.x, messages[i].p + e.p};
    } catch (const std::exception& ex) {
      failures[i] = ex.what();
    }
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw SamplingError(f);
  }
  return out;
}

std::vector<PhasePoint> simulate_transmission(const TwoModeState& w,
                                              const std::vector<PhasePoint>& messages,
                                              std::uint64_t seed, const ChannelConfig& cfg) {
  return simulate_transmission(DenseCodingChannel::from_resource(w, cfg), messages, seed);
}

std::vector<PhasePoint> gaussian_messages(std::size_t count, double signal_var, std::uint64_t seed) {
  if (!(signal_var > 0.0)) throw DomainError("gaussian_messages: signal_var must be > 0");
  std::vector<PhasePoint> out(count);
  // Message streams are offset from the transmission streams of the same seed.
  const std::uint64_t master = derive_seed(seed, 0x6d657373616765ULL);
  for (std::size_t i = 0; i < count; ++i) {
    auto engine = stream_engine(master, i);
    std::normal_distribution<double> normal(0.0, std::sqrt(signal_var));
    const double x = normal(engine);
    const double p = normal(engine);
    out[i] = {x, p};
  }
  return out;
}

double mutual_information_gaussian(double signal_var, double nbar) {
  if (!(signal_var > 0.0) || !(nbar > 0.0)) {
    throw DomainError("mutual_information_gaussian: signal_var and nbar must be > 0");
  }
  return std::log2(1.0 + signal_var / nbar);
}

namespace {

struct Binning {
  double lo = 0.0;
  double width = 1.0;
  long bins = 1;

  long index(double v) const { return std::clamp(static_cast<long>((v - lo) / width), 0L, bins - 1); }
};

double quantile(std::vector<double> v, double q) {
  const std::size_t k = static_cast<std::size_t>(q * (v.size() - 1));
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[k];
}

Binning freedman_diaconis(const std::vector<double>& v) {
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  Binning b;
  b.lo = *mn;
  const double range = *mx - *mn;
  const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
  const double h = 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(v.size()));
  if (!(h > 0.0) || !(range > 0.0)) return b;
  b.bins = std::max(1L, static_cast<long>(std::ceil(range / h)));
  b.width = range / static_cast<double>(b.bins);
  return b;
}

double plug_in_mi(const std::vector<double>& a, const std::vector<double>& b) {
  const Binning ba = freedman_diaconis(a), bb = freedman_diaconis(b);
  std::map<std::pair<long, long>, double> joint;
  std::vector<double> pa(ba.bins, 0.0), pb(bb.bins, 0.0);
  const double unit = 1.0 / static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long ia = ba.index(a[i]), ib = bb.index(b[i]);
    joint[{ia, ib}] += unit;
    pa[ia] += unit;
    pb[ib] += unit;
  }
  double mi = 0.0;
  for (const auto& [key, p] : joint) mi += p * std::log2(p / (pa[key.first] * pb[key.second]));
  return mi;
}

}  // namespace

double mutual_information_histogram(const std::vector<PhasePoint>& sent,
                                    const std::vector<PhasePoint>& received) {
  if (sent.size() != received.size()) throw DimensionError("mutual_information_histogram: size mismatch");
  if (sent.size() < 2) throw DomainError("mutual_information_histogram: need at least two samples");
  std::vector<double> sx(sent.size()), sp(sent.size()), rx(sent.size()), rp(sent.size());
  for (std::size_t i = 0; i < sent.size(); ++i) {
    sx[i] = sent[i].x;
    sp[i] = sent[i].p;
    rx[i] = received[i].x;
    rp[i] = received[i].p;
  }
  return plug_in_mi(sx, rx) + plug_in_mi(sp, rp);
}

DenseCodingChannel noisy_dense_coding(double r, double transmission) {
  return DenseCodingChannel::gaussian(noisy_nbar(r, transmission));
}

}  // namespace cvtele
