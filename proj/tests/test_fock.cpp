#include <doctest.h>

#include <cmath>

#include "cvtele/displacement.hpp"
#include "cvtele/epr.hpp"
#include "cvtele/errors.hpp"
#include "cvtele/fock.hpp"
#include "support.hpp"

using namespace cvtele;
using cvtele::test::max_abs;

TEST_CASE("ladder operators") {
  const Matrix a2 = annihilation(FockDim(2));
  CHECK(a2(0, 1).real() == doctest::Approx(1.0));
  CHECK(std::abs(a2(0, 0)) == 0.0);
  CHECK(std::abs(a2(1, 0)) == 0.0);
  CHECK(std::abs(a2(1, 1)) == 0.0);

  CHECK(annihilation(FockDim(3))(1, 2).real() == doctest::Approx(std::sqrt(2.0)));

  const FockDim d(12);
  const Matrix a = annihilation(d);
  const Matrix comm = a * creation(d) - creation(d) * a;
  for (int n = 0; n < d.n() - 1; ++n) CHECK(comm(n, n).real() == doctest::Approx(1.0));
  CHECK(comm(d.n() - 1, d.n() - 1).real() == doctest::Approx(-(d.n() - 1)));

  // [x, p] = i away from the truncation edge
  const Matrix xp = position_operator(d) * momentum_operator(d) -
                    momentum_operator(d) * position_operator(d);
  for (int n = 0; n < d.n() - 1; ++n) {
    CHECK(xp(n, n).real() == doctest::Approx(0.0));
    CHECK(xp(n, n).imag() == doctest::Approx(1.0));
  }
}

TEST_CASE("FockDim rejects n_max < 2") {
  CHECK_THROWS_AS(FockDim(1), DomainError);
}

TEST_CASE("coherent states") {
  const FockDim d(40);
  CHECK(max_abs(coherent_state(0.0, d).data() - vacuum(d).data()) < 1e-15);

  const auto c1 = coherent_state(1.0, d);
  CHECK(std::abs(c1.mean_photon() - 1.0) < 1e-10);
  CHECK(std::abs(c1.trace() - 1.0) < 1e-12);

  const Complex alpha(0.7, -0.4);
  CHECK((coherent_amplitudes(alpha, d) - test::coherent_oracle(alpha, d.n())).norm() < 1e-13);

  const Complex beta(-0.3, 0.5);
  const Complex ov = coherent_amplitudes(alpha, d).dot(coherent_amplitudes(beta, d));
  CHECK(std::norm(ov) == doctest::Approx(std::exp(-std::norm(alpha - beta))).epsilon(1e-10));
  CHECK(fidelity(coherent_state(alpha, d), coherent_state(beta, d)) ==
        doctest::Approx(std::exp(-std::norm(alpha - beta))).epsilon(1e-10));
}

TEST_CASE("fock, cat and thermal states") {
  const FockDim d(20);
  CHECK(fock_state(3, d)(3, 3).real() == 1.0);
  CHECK_THROWS_AS(fock_state(20, d), DomainError);
  CHECK_THROWS_AS(fock_state(-1, d), DomainError);

  CHECK(max_abs(thermal_state(0.0, d).data() - vacuum(d).data()) < 1e-15);
  const auto th1 = thermal_state(1.0, FockDim(40));
  CHECK(th1(0, 0).real() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(th1(1, 1).real() == doctest::Approx(0.25).epsilon(1e-10));
  CHECK_THROWS_AS(thermal_state(-0.1, d), DegenerateInputError);

  CHECK_THROWS_AS(cat_state(0.0, std::numbers::pi, d), DegenerateInputError);
  const auto even = cat_state(1.0, 0.0, d);
  CHECK(std::abs(even.trace() - 1.0) < 1e-12);
  for (int n = 1; n < d.n(); n += 2) CHECK(std::abs(even(n, n)) < 1e-14);
}

TEST_CASE("two-mode flattening is row = a * n_max + b") {
  const FockDim d(3);
  const TwoModeState s = tensor(fock_state(1, d), fock_state(2, d));
  const Matrix dense = s.dense();
  CHECK(TwoModeState::index(d, 1, 2) == 5);
  CHECK(dense(5, 5).real() == 1.0);
  CHECK(std::abs(dense.trace() - 1.0) < 1e-15);
}

TEST_CASE("tensor and partial trace") {
  const FockDim d(6);
  const auto rho = coherent_state(Complex(0.4, 0.2), d);
  auto sigma = thermal_state(0.3, d);
  sigma = DensityMatrix(d, 0.5 * sigma.data());  // trace 1/2

  const TwoModeState s = tensor(sigma, rho);
  CHECK(s.trace() == doctest::Approx(sigma.trace() * rho.trace()));
  CHECK(hermiticity_defect(s.dense()) < 1e-15);

  // keep B: Tr_A(sigma x rho) = rho Tr(sigma)
  CHECK(max_abs(partial_trace(s, Mode::B).data() - rho.data() * sigma.trace()) < 1e-12);
  CHECK(max_abs(partial_trace(s, Mode::A).data() - sigma.data() * rho.trace()) < 1e-12);
  CHECK(partial_trace(s, Mode::A).min_eigenvalue() > -1e-12);

  CHECK_THROWS_AS(tensor(vacuum(FockDim(4)), vacuum(FockDim(5))), DimensionError);
}

TEST_CASE("reduced TMSV is thermal with nbar = sinh^2 r") {
  const FockDim d(40);
  for (double r : {0.3, 0.5, 0.9}) {
    const auto reduced = partial_trace(tmsv(r, d), Mode::B);
    const double nbar = std::sinh(r) * std::sinh(r);
    const Eigen::VectorXd geo = test::geometric_weights(nbar, d.n());
    for (int n = 0; n < d.n(); ++n) CHECK(std::abs(reduced(n, n).real() - geo(n)) < 1e-12);
    CHECK(max_abs(reduced.data() - Matrix(reduced.data().diagonal().asDiagonal())) < 1e-15);
  }
}

TEST_CASE("fidelity") {
  const FockDim d(30);
  const auto th = thermal_state(0.4, d);
  CHECK(fidelity(th, th) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fidelity(vacuum(d), thermal_state(0.7, d)) == doctest::Approx(1.0 / 1.7).epsilon(1e-10));

  // pure-state shortcut vs general Uhlmann path
  const auto psi = coherent_state(Complex(0.5, 0.3), d);
  const auto mixed = thermal_state(0.2, d);
  CHECK(std::abs(fidelity(psi, mixed) - fidelity_uhlmann(psi, mixed)) < 1e-10);
  const auto cat = cat_state(0.9, 0.0, d);
  CHECK(std::abs(fidelity(cat, th) - fidelity_uhlmann(cat, th)) < 1e-10);
}

TEST_CASE("trace distance") {
  const FockDim d(10);
  CHECK(trace_distance(vacuum(d), vacuum(d)) < 1e-15);
  CHECK(trace_distance(fock_state(0, d), fock_state(1, d)) == doctest::Approx(1.0));
}

TEST_CASE("DensityMatrix validates Hermiticity") {
  const FockDim d(3);
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 1.0;
  m(0, 1) = 0.5;
  CHECK_THROWS_AS(DensityMatrix(d, m), NumericalError);
  CHECK_THROWS_AS(DensityMatrix(FockDim(4), m), DimensionError);
}
