#pragma once

#include <Eigen/Dense>
#include <complex>

#include "error.hpp"
#include "rng.hpp"

namespace mamimo {

// Dense complex matrices are small throughout (at most N x M_k with a handful
// of antennas), so everything sits on Eigen's dynamic types.
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Conjugate transpose.
CMatrix hermitian(const CMatrix& m);

// Solves M X = B for Hermitian positive definite M via Cholesky.
// Throws Error(kNotPositiveDefinite) when a pivot fails.
CMatrix solve_hermitian_positive(const CMatrix& m, const CMatrix& b);

// rows x cols matrix of iid CN(0,1) entries.
CMatrix sample_cn(Rng& rng, Eigen::Index rows, Eigen::Index cols);

// w^H M w for Hermitian M, clamped to its real part. The imaginary residue is
// numerical noise only; callers may assert |imag| <= 1e-9 * |real|.
double real_quadratic_form(const CVector& w, const CMatrix& m);

// Hermitian PSD square root (eigendecomposition, negative eigenvalues from
// roundoff clamped to zero).
CMatrix sqrt_psd(const CMatrix& m);

double frobenius_norm(const CMatrix& m);

}  // namespace mamimo
