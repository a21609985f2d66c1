#include <doctest.h>

#include <cmath>

#include "cvtele/displacement.hpp"
#include "support.hpp"

using namespace cvtele;
using cvtele::test::max_abs;

TEST_CASE("displacement at the origin is the identity") {
  const FockDim d(15);
  CHECK(max_abs(displacement({0.0, 0.0}, d) - Matrix::Identity(15, 15)) == 0.0);
}

TEST_CASE("vacuum element") {
  const Matrix m = displacement({std::sqrt(2.0), 0.0}, FockDim(10));
  CHECK(m(0, 0).real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(std::abs(m(0, 0).imag()) < 1e-16);
}

TEST_CASE("Laguerre elements match the ladder recurrence") {
  // The recurrence loses digits as |alpha| grows, so it is only an oracle here.
  for (PhasePoint pt : {PhasePoint{0.3, -0.8}, PhasePoint{1.7, 1.1}}) {
    const FockDim d(40);
    const Matrix lib = displacement(pt, d);
    const Matrix ref = test::displacement_oracle(Complex(pt.x, pt.p) / std::sqrt(2.0), 40, 40);
    CAPTURE(pt.x);
    CHECK(max_abs(lib - ref) < 1e-10);
  }
}

TEST_CASE("elements at |alpha|^2 = 11.125 against 50-digit values") {
  const Matrix m = displacement({-4.0, 2.5}, FockDim(40));
  struct Ref {
    int row, col;
    double re, im;
  };
  for (Ref r : {Ref{39, 39, -0.12298035032790033, 0.0},
                Ref{30, 10, -0.023084894874805533, -0.12949752565841607},
                Ref{5, 35, -0.0321168551061219, -0.055991905823725696},
                Ref{0, 0, 0.0038391664740261634, 0.0},
                Ref{12, 13, -0.057729651159386508, -0.036081031974616568}}) {
    CAPTURE(r.row);
    CAPTURE(r.col);
    CHECK(std::abs(m(r.row, r.col) - Complex(r.re, r.im)) < 1e-13);
  }
}

TEST_CASE("diagonal agrees with the full matrix") {
  const FockDim d(30);
  const PhasePoint pt{0.9, -1.3};
  const Matrix full = displacement(pt, d);
  const RealVector diag = displacement_diagonal(pt, d);
  for (int n = 0; n < d.n(); ++n) CHECK(std::abs(full(n, n) - diag(n)) < 1e-13);
}

TEST_CASE("diagonal generating function") {
  // sum_n t^n <n|D(alpha)|n> = exp(-|alpha|^2 (1+t) / 2(1-t)) / (1-t)
  const double t = 0.3;
  const double a = 0.7;
  const RealVector diag = displacement_diagonal({a * std::sqrt(2.0), 0.0}, FockDim(60));
  double sum = 0.0;
  for (int n = 59; n >= 0; --n) sum = sum * t + diag(n);
  const double expected = std::exp(-a * a * (1 + t) / (2 * (1 - t))) / (1 - t);
  CHECK(sum == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("unitarity on the low block") {
  const int n = 40;
  const Matrix dm = displacement({std::sqrt(2.0), 0.0}, FockDim(n));  // alpha = 1
  const Matrix prod = (dm.adjoint() * dm).topLeftCorner(n / 2, n / 2);
  CHECK(max_abs(prod - Matrix::Identity(n / 2, n / 2)) <= 1e-8);

  // D(pt) D(-pt) = 1 on the same block
  const PhasePoint pt{0.8, -0.6};
  const Matrix back = (displacement(pt, FockDim(n)) * displacement(-pt, FockDim(n)))
                          .topLeftCorner(n / 2, n / 2);
  CHECK(max_abs(back - Matrix::Identity(n / 2, n / 2)) <= 1e-8);
}

TEST_CASE("large arguments stay finite") {
  const Matrix m = displacement({12.0, -9.0}, FockDim(80));
  CHECK(m.allFinite());
  CHECK(max_abs(m) <= 1.0 + 1e-12);
}
