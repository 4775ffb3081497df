#include <complex>

#include "doctest.h"

#include "linalg.hpp"

using namespace mamimo;
using std::complex;

TEST_CASE("solve_hermitian_positive solves a known system") {
  CMatrix m(2, 2);
  m << complex<double>(4.0, 0.0), complex<double>(1.0, 1.0),
      complex<double>(1.0, -1.0), complex<double>(3.0, 0.0);
  Rng rng(11);
  const CMatrix x_true = sample_cn(rng, 2, 3);
  const CMatrix b = m * x_true;
  const CMatrix x = solve_hermitian_positive(m, b);
  CHECK(frobenius_norm(x - x_true) < 1e-10);
}

TEST_CASE("solve_hermitian_positive rejects an indefinite matrix") {
  CMatrix m(2, 2);
  m << complex<double>(1.0, 0.0), complex<double>(0.0, 0.0),
      complex<double>(0.0, 0.0), complex<double>(-2.0, 0.0);
  const CMatrix b = CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(solve_hermitian_positive(m, b), Error);
  try {
    solve_hermitian_positive(m, b);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotPositiveDefinite);
  }
}

TEST_CASE("sqrt_psd squares back to the input") {
  Rng rng(17);
  for (int t = 0; t < 5; ++t) {
    const CMatrix g = sample_cn(rng, 3, 3);
    const CMatrix m = g * g.adjoint();
    const CMatrix s = sqrt_psd(m);
    CHECK(frobenius_norm(s * s.adjoint() - m) < 1e-10 * (1.0 + frobenius_norm(m)));
    // The root itself is Hermitian, so s * s == m as well.
    CHECK(frobenius_norm(s - s.adjoint()) < 1e-10);
  }
}

TEST_CASE("real_quadratic_form matches the explicit sum") {
  CMatrix m(2, 2);
  m << complex<double>(2.0, 0.0), complex<double>(0.5, 0.25),
      complex<double>(0.5, -0.25), complex<double>(1.0, 0.0);
  CVector w(2);
  w << complex<double>(1.0, -2.0), complex<double>(0.5, 0.75);
  const complex<double> direct = (w.adjoint() * m * w)(0, 0);
  CHECK(real_quadratic_form(w, m) == doctest::Approx(direct.real()).epsilon(1e-12));
  CHECK(std::abs(direct.imag()) < 1e-12);
}

TEST_CASE("sample_cn has unit-variance entries and zero mean") {
  Rng rng(23);
  const int n = 40000;
  complex<double> mean = 0.0;
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    const CMatrix z = sample_cn(rng, 1, 1);
    mean += z(0, 0);
    var += std::norm(z(0, 0));
  }
  CHECK(std::abs(mean) / n < 0.02);
  CHECK(var / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("hermitian is the conjugate transpose") {
  Rng rng(29);
  const CMatrix m = sample_cn(rng, 2, 3);
  const CMatrix h = hermitian(m);
  REQUIRE(h.rows() == 3);
  REQUIRE(h.cols() == 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) CHECK(h(j, i) == std::conj(m(i, j)));
}
