#include <doctest.h>

#include <cmath>

#include "cvtele/channel.hpp"
#include "cvtele/epr.hpp"
#include "cvtele/errors.hpp"
#include "support.hpp"

using namespace cvtele;
using cvtele::test::kPi;

namespace {

DensityMatrix thermal_oracle(double nbar, FockDim d) {
  const Eigen::VectorXd w = test::geometric_weights(nbar, d.n());
  return DensityMatrix(d, w.cast<Complex>().asDiagonal().toDenseMatrix());
}

DensityMatrix displaced_thermal_oracle(Complex alpha, double nbar, FockDim d) {
  const Matrix dm = test::displacement_oracle(alpha, d.n(), d.n());
  const Eigen::VectorXd w = test::geometric_weights(nbar, d.n());
  const Matrix out = dm * w.cast<Complex>().asDiagonal() * dm.adjoint();
  return DensityMatrix(d, 0.5 * (out + out.adjoint()));
}

double quadrature_variance(const DensityMatrix& rho, const Matrix& q) {
  const double m1 = rho.expectation(q).real();
  return rho.expectation(q * q).real() - m1 * m1;
}

}  // namespace

TEST_CASE("Gaussian kernel") {
  const Kernel k = gaussian_kernel(1.0);
  CHECK(k.value({0, 0}) == doctest::Approx(1.0 / (2 * kPi)).epsilon(1e-15));
  CHECK(k.value({0.3, -0.4}) == doctest::Approx(test::gaussian_density(1.0, 0.3, -0.4)));
  const auto [sx, sp] = gaussian_kernel(0.37).second_moments();
  CHECK(sx == doctest::Approx(0.37));
  CHECK(sp == doctest::Approx(0.37));
  CHECK(gaussian_kernel(0.0).is_identity());
  CHECK_THROWS_AS(gaussian_kernel(-0.1), DomainError);
}

TEST_CASE("noisy substitution") {
  for (double r : {0.0, 0.4, 1.3}) {
    CHECK(noisy_nbar(r, 1.0) == doctest::Approx(std::exp(-2 * r)));
    CHECK(noisy_nbar(r, 0.0) == 1.0);
  }
  CHECK(noisy_nbar(0.0, 0.37) == doctest::Approx(1.0));
  CHECK(noisy_nbar(1.0, 0.5) == doctest::Approx(1.0 - (1.0 - std::exp(-2.0)) * 0.5));
  CHECK_THROWS_AS(noisy_nbar(0.5, 1.2), DomainError);
  CHECK_THROWS_AS(noisy_nbar(0.5, -0.1), DomainError);
  CHECK_THROWS_AS(noisy_nbar(-0.5, 0.5), DomainError);
}

TEST_CASE("nbar = 0 is an exact identity") {
  const FockDim d(20);
  const auto rho = cat_state(1.1, 0.3, d);
  const auto out = apply_channel(gaussian_kernel(0.0), rho);
  CHECK(out.data() == rho.data());
  CHECK(fidelity_via_kernel(gaussian_kernel(0.0), rho) == 1.0);
}

TEST_CASE("vacuum becomes thermal") {
  const FockDim d(40);
  for (double nbar : {0.1, 0.5, 1.0}) {
    const auto out = apply_channel(gaussian_kernel(nbar), vacuum(d));
    CAPTURE(nbar);
    CHECK(trace_distance(out, thermal_oracle(nbar, d)) <= 1e-3);
    CHECK(1.0 - out.trace() <= 1e-3);
  }
}

TEST_CASE("coherent input becomes displaced thermal") {
  const FockDim d(40);
  const Complex alpha(0.8, -0.3);
  const double nbar = 0.4;
  const auto out = apply_channel(gaussian_kernel(nbar), coherent_state(alpha, d));
  CHECK(trace_distance(out, displaced_thermal_oracle(alpha, nbar, d)) <= 1e-3);
}

TEST_CASE("quadrature variances grow by nbar") {
  const FockDim d(40);
  const Matrix x = position_operator(d);
  const Matrix p = momentum_operator(d);
  for (const auto& rho : {coherent_state(Complex(0.5, 0.2), d), fock_state(1, d)}) {
    for (double nbar : {0.2, 0.8}) {
      const auto out = apply_channel(gaussian_kernel(nbar), rho);
      CHECK(std::abs(quadrature_variance(out, x) - quadrature_variance(rho, x) - nbar) < 1e-4);
      CHECK(std::abs(quadrature_variance(out, p) - quadrature_variance(rho, p) - nbar) < 1e-4);
    }
  }
}

TEST_CASE("kernel fidelity for coherent inputs") {
  const FockDim d(40);
  const auto psi = coherent_state(Complex(0.6, 0.4), d);
  for (double nbar : {0.0, 0.2, 0.5, 1.0}) {
    const double f = fidelity_via_kernel(gaussian_kernel(nbar), psi);
    CAPTURE(nbar);
    CHECK(std::abs(f - 1.0 / (1.0 + nbar)) < 1e-6);
    if (nbar > 0) {
      const double via_state = fidelity(psi, apply_channel(gaussian_kernel(nbar), psi));
      CHECK(std::abs(f - via_state) < 1e-6);
    }
  }
  CHECK_THROWS_AS(fidelity_via_kernel(gaussian_kernel(0.3), thermal_state(0.2, d)), DomainError);
}

TEST_CASE("coherent fidelity decreases with nbar") {
  const FockDim d(30);
  const auto psi = coherent_state(0.5, d);
  double prev = 2.0;
  for (double nbar = 0.05; nbar <= 1.0; nbar += 0.1) {
    const double f = fidelity_via_kernel(gaussian_kernel(nbar), psi);
    CHECK(f < prev);
    prev = f;
  }
}

TEST_CASE("thermal form") {
  const FockDim d(40);
  const double nbar = 0.3;
  const auto single = apply_thermal_form({{1.0, 0.0}}, nbar, d);
  CHECK(trace_distance(single, thermal_oracle(nbar, d)) < 1e-12);

  const Complex alpha(0.7, 0.2);
  const auto via_form = apply_thermal_form({{1.0, alpha}}, nbar, d);
  const auto via_kernel = apply_channel(gaussian_kernel(nbar), coherent_state(alpha, d));
  CHECK(trace_distance(via_form, via_kernel) <= 1e-3);

  // <n> of displaced thermals adds |alpha|^2
  const auto two = apply_thermal_form({{0.5, 1.0}, {0.5, -1.0}}, nbar, d);
  CHECK(two.mean_photon() == doctest::Approx(nbar + 1.0).epsilon(1e-8));

  // the same mixture through the kernel
  const auto mix_in = DensityMatrix(d, 0.5 * (coherent_state(1.0, d).data() +
                                              coherent_state(-1.0, d).data()));
  CHECK(trace_distance(two, apply_channel(gaussian_kernel(nbar), mix_in)) <= 1e-3);

  CHECK_THROWS_AS(apply_thermal_form({}, nbar, d), DomainError);
  CHECK_THROWS_AS(apply_thermal_form({{0.5, 0.0}}, nbar, d), DomainError);
}

TEST_CASE("sampled TMSV kernel") {
  const FockDim d(40);
  const double r = 0.5;
  const Kernel k = kernel_from(tmsv(r, d));
  CHECK_FALSE(k.is_gaussian());
  CHECK(std::abs(k.normalization() - 1.0) < 1e-4);
  const auto [sx, sp] = k.second_moments();
  CHECK(sx == doctest::Approx(std::exp(-2 * r)).epsilon(1e-4));
  CHECK(sp == doctest::Approx(std::exp(-2 * r)).epsilon(1e-4));
  const auto out = apply_channel(k, vacuum(d));
  CHECK(trace_distance(out, thermal_oracle(std::exp(-2 * r), d)) <= 1e-3);
}

TEST_CASE("Gauss-Hermite quadrature agrees with the trapezoid rule") {
  const FockDim d(40);
  ChannelConfig gh;
  gh.quadrature = Quadrature::GaussHermite;
  const auto rho = coherent_state(Complex(0.3, 0.5), d);
  const auto a = apply_channel(gaussian_kernel(0.5), rho);
  const auto b = apply_channel(gaussian_kernel(0.5), rho, gh);
  CHECK(trace_distance(a, b) < 1e-8);
}

TEST_CASE("outputs stay positive") {
  const FockDim d(30);
  const Kernel k = gaussian_kernel(0.3);
  std::mt19937_64 eng(99);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    // random mixed state on the first six levels
    Matrix m = Matrix::Zero(d.n(), d.n());
    for (int j = 0; j < 3; ++j) {
      Vector v = Vector::Zero(d.n());
      for (int i = 0; i < 6; ++i) v(i) = Complex(g(eng), g(eng));
      v.normalize();
      m += (j + 1.0) * v * v.adjoint();
    }
    m /= m.trace().real();
    const auto out = apply_channel(k, DensityMatrix(d, 0.5 * (m + m.adjoint())));
    CHECK(out.min_eigenvalue() >= -1e-9);
    CHECK(hermiticity_defect(out.data()) == 0.0);
  }
}

TEST_CASE("truncation loss beyond the bound is an error") {
  // nbar = 1 on six levels pushes much of the weight out of the kept space
  CHECK_THROWS_AS(apply_channel(gaussian_kernel(1.0), vacuum(FockDim(6))), TruncationError);

  ChannelConfig loose;
  loose.leakage_bound = 0.5;
  loose.renormalize = true;
  const auto out = apply_channel(gaussian_kernel(0.3), vacuum(FockDim(6)), loose);
  CHECK(out.trace() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.leakage() > 0.0);
}

TEST_CASE("config validation") {
  ChannelConfig bad;
  bad.resolution = 40;
  CHECK_THROWS_AS(apply_channel(gaussian_kernel(0.3), vacuum(FockDim(10)), bad), ConfigError);
  bad.resolution = 21;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
