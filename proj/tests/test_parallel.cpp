#include <doctest.h>

#include <omp.h>

#include "cvtele/channel.hpp"
#include "cvtele/parallel.hpp"
#include "cvtele/teleport.hpp"
#include "support.hpp"

using namespace cvtele;
using cvtele::test::max_abs;

namespace {

// Runs f with a given OpenMP thread count and restores the previous one.
template <class F>
auto with_threads(int n, F&& f) {
  const int prev = omp_get_max_threads();
  omp_set_num_threads(n);
  auto out = f();
  omp_set_num_threads(prev);
  return out;
}

}  // namespace

TEST_CASE("reductions match the serial sum") {
  const std::size_t count = 100003;
  auto term = [](std::size_t i) { return 1.0 / double((i + 1) * (i + 1)); };
  CHECK(std::abs(parallel_sum(count, term) - serial_sum(count, term)) < 1e-12);
  const double one = with_threads(1, [&] { return parallel_sum(count, term); });
  const double four = with_threads(4, [&] { return parallel_sum(count, term); });
  CHECK(one == four);
  CHECK(parallel_sum(0, term) == 0.0);
  CHECK(parallel_sum(3, term) == doctest::Approx(1.0 + 0.25 + 1.0 / 9));
}

TEST_CASE("apply_channel: parallel vs serial") {
  const FockDim d(30);
  const auto rho = cat_state(0.9, 0.0, d);
  const Kernel k = gaussian_kernel(0.4);
  const auto par = apply_channel(k, rho);
  const auto ser = serial::apply_channel(k, rho);
  CHECK(max_abs(par.data() - ser.data()) <= 1e-12);

  const auto t1 = with_threads(1, [&] { return apply_channel(k, rho); });
  const auto t3 = with_threads(3, [&] { return apply_channel(k, rho); });
  CHECK(t1.data() == t3.data());
}

TEST_CASE("average_output: parallel vs serial") {
  const FockDim d(20);
  const auto rho = coherent_state(Complex(0.3, 0.4), d);
  const TwoModeState w = tmsv_mixture({{0.5, 0.2}, {0.5, 0.5}}, d);
  const auto par = average_output(rho, w);
  const auto ser = serial::average_output(rho, w);
  CHECK(max_abs(par.state.data() - ser.state.data()) <= 1e-12);
  CHECK(std::abs(par.outcome_mass - ser.outcome_mass) <= 1e-12);

  const auto t1 = with_threads(1, [&] { return average_output(rho, w); });
  const auto t4 = with_threads(4, [&] { return average_output(rho, w); });
  CHECK(t1.state.data() == t4.state.data());
}

TEST_CASE("sampling is independent of the thread count") {
  const FockDim d(20);
  const auto rho = vacuum(d);
  const TwoModeState w = tmsv(0.4, d);
  const auto a = with_threads(1, [&] { return sample_outcomes(rho, w, 200, 9); });
  const auto b = with_threads(4, [&] { return sample_outcomes(rho, w, 200, 9); });
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].pt == b[i].pt);
    REQUIRE(a[i].density == b[i].density);
  }
}
