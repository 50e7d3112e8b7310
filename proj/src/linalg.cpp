#include "ghostsim/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace ghostsim {

double hermiticity_defect(const CMatrix& m) {
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0)
        return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double symmetry_defect(const CMatrix& m) {
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0)
        return 0.0;
    return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

double min_eigenvalue(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_abs_eigenvalue(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_positive_semidefinite(const CMatrix& m, double tol_rel) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    return lo >= -tol_rel * hi;
}

SvdResult svd(const CMatrix& a) {
    Eigen::JacobiSVD<CMatrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return SvdResult{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

HermitianEigen hermitian_eigen(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    return HermitianEigen{es.eigenvalues(), es.eigenvectors()};
}

std::vector<Complex> fourier_sum(const std::vector<Complex>& f,
                                 const std::vector<double>& x, double dx,
                                 const std::vector<double>& k, int sign) {
    std::vector<Complex> out(k.size());
    const double s = sign >= 0 ? 1.0 : -1.0;
    for (std::size_t m = 0; m < k.size(); ++m) {
        Complex acc(0.0, 0.0);
        for (std::size_t j = 0; j < f.size(); ++j)
            acc += f[j] * std::polar(1.0, s * k[m] * x[j]);
        out[m] = acc * dx;
    }
    return out;
}

} // namespace ghostsim
