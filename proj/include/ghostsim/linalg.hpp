#ifndef GHOSTSIM_LINALG_HPP
#define GHOSTSIM_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace ghostsim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Maximum absolute deviation from Hermitian symmetry, relative to the
/// largest-magnitude entry. Zero matrices report 0.
double hermiticity_defect(const CMatrix& m);

/// Maximum absolute deviation from (plain, non-conjugated) symmetry,
/// relative to the largest-magnitude entry.
double symmetry_defect(const CMatrix& m);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMatrix& m);

/// Largest eigenvalue magnitude of a Hermitian matrix.
double max_abs_eigenvalue(const CMatrix& m);

/// True if the Hermitian matrix has min eigenvalue >= -tol_rel * max |eigenvalue|.
bool is_positive_semidefinite(const CMatrix& m, double tol_rel = 1e-10);

struct SvdResult {
    CMatrix u;              // columns are left singular vectors
    RVector sigma;          // descending, non-negative
    CMatrix v;              // columns are right singular vectors, A = U S V^H
};

/// Full complex SVD, singular values sorted descending.
SvdResult svd(const CMatrix& a);

struct HermitianEigen {
    RVector values;         // ascending
    CMatrix vectors;        // columns
};

/// Eigendecomposition of a Hermitian matrix (values ascending).
HermitianEigen hermitian_eigen(const CMatrix& m);

/// Direct evaluation of the continuous-convention Fourier sum
///   F(k_m) = sum_j f(x_j) exp(sign * i k_m x_j) dx
/// at caller-supplied sample positions and frequencies. O(N*M), no FFT
/// index conventions to trip over.
std::vector<Complex> fourier_sum(const std::vector<Complex>& f,
                                 const std::vector<double>& x, double dx,
                                 const std::vector<double>& k, int sign);

} // namespace ghostsim

#endif // GHOSTSIM_LINALG_HPP
