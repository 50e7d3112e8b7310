#ifndef GHOSTSIM_KERNEL_HPP
#define GHOSTSIM_KERNEL_HPP

#include "ghostsim/grid.hpp"
#include "ghostsim/linalg.hpp"

namespace ghostsim {

enum class KernelFlavor {
    phase_insensitive,   // <E^dag(x1) E(x2)>, Hermitian PSD
    phase_sensitive      // <E(x1) E(x2)>, symmetric for Schell forms with even G
};

/// Discretized two-point spatial correlation K(x1, x2) on a transverse grid.
/// values(i, j) = K(x_i, x_j).
struct CorrelationKernel {
    TransverseGrid grid;
    CMatrix values;
    KernelFlavor flavor = KernelFlavor::phase_insensitive;

    int n() const { return grid.n; }

    /// Photon flux carried by the diagonal, sum_i Re K(x_i, x_i) dx.
    /// Physically meaningful for phase-insensitive kernels.
    double diagonal_flux() const {
        return values.diagonal().real().sum() * grid.spacing;
    }

    double peak_abs() const { return values.cwiseAbs().maxCoeff(); }

    /// Structural invariants for the declared flavor:
    /// phase-insensitive kernels must be Hermitian with a real non-negative
    /// diagonal and PSD spectrum; phase-sensitive ones must be symmetric.
    void check_invariants(double tol = 1e-9) const;
};

enum class TemporalFlavor {
    pi_auto,    // R^(n)
    pi_cross,   // R^(n)_{S,R}
    ps_cross    // R^(p)_{S,R}
};

/// Normalized Gaussian temporal correlation R(tau) = exp(-(tau/width)^2),
/// so R(0) = 1 holds by construction and R(width) = 1/e.
struct TemporalCorrelation {
    double width = 0.0;     // s
    TemporalFlavor flavor = TemporalFlavor::pi_auto;

    TemporalCorrelation() = default;
    TemporalCorrelation(double w, TemporalFlavor fl) : width(w), flavor(fl) {
        if (w <= 0.0)
            throw InvalidParams("temporal correlation width must be > 0");
    }

    double value(double tau) const {
        const double u = tau / width;
        return std::exp(-u * u);
    }
};

} // namespace ghostsim

#endif // GHOSTSIM_KERNEL_HPP
