#include "ghostsim/kernel.hpp"

namespace ghostsim {

void CorrelationKernel::check_invariants(double tol) const {
    if (values.rows() != grid.n || values.cols() != grid.n)
        throw GridMismatch("kernel matrix does not match its grid");
    if (flavor == KernelFlavor::phase_insensitive) {
        if (hermiticity_defect(values) > tol)
            throw InvalidParams("phase-insensitive kernel is not Hermitian");
        const double scale = peak_abs();
        for (int i = 0; i < grid.n; ++i) {
            const Complex d = values(i, i);
            if (d.real() < -tol * scale || std::abs(d.imag()) > tol * scale)
                throw InvalidParams("phase-insensitive kernel diagonal must be real and >= 0");
        }
        if (!is_positive_semidefinite(values, 1e-10))
            throw InvalidParams("phase-insensitive kernel is not positive semidefinite");
    } else {
        if (symmetry_defect(values) > tol)
            throw InvalidParams("phase-sensitive kernel is not symmetric");
    }
}

} // namespace ghostsim
