#ifndef GHOSTSIM_PROPAGATION_HPP
#define GHOSTSIM_PROPAGATION_HPP

#include <optional>

#include "ghostsim/source.hpp"

namespace ghostsim {

struct PropagationGeometry {
    double distance = 0.0;     // m
    double wavenumber = 0.0;   // rad/m, k0 = w0 / c

    void validate() const {
        if (distance <= 0.0 || wavenumber <= 0.0)
            throw InvalidParams("propagation geometry needs distance > 0 and wavenumber > 0");
    }
};

enum class Regime { near, far, intermediate };

const char* to_string(Regime r);

/// Fresnel numbers and derived far-field scales for a Gaussian-Schell
/// source over a free-space path. d0 = k0 rho0 a0 / 2L governs
/// phase-insensitive propagation; dn = k0 rho0^2 / 2L and
/// df = k0 a0^2 / 2L jointly govern phase-sensitive propagation.
struct FresnelReport {
    double d0 = 0.0;
    double d_coh = 0.0;     // equals df
    double dn = 0.0;
    double df = 0.0;
    double a_far = 0.0;     // aL = 2L / k0 rho0
    double rho_far = 0.0;   // rhoL = 2L / k0 a0
    Regime regime_pi = Regime::intermediate;
    Regime regime_ps = Regime::intermediate;
};

FresnelReport fresnel_report(const GaussianSchellParams& params,
                             const PropagationGeometry& geom);

/// 1D Huygens-Fresnel Green's function
///   h(x) = sqrt(k0 / (i 2 pi L)) exp(i k0 (L + x^2 / 2L)),
/// whose squared modulus k0 / (2 pi L) is independent of x.
Complex greens_function_1d(const PropagationGeometry& geom, double x);

/// Propagate a phase-insensitive kernel L meters:
///   K_out(x1,x2) = int int K(x1',x2') h*(x1-x1') h(x2-x2') dx1' dx2'.
/// Hermiticity and positivity are preserved and checked; the diagonal flux
/// is conserved within quadrature error. Throws GridTooSmall if more than
/// 0.5% of the kernel mass diffracts past the output grid.
CorrelationKernel propagate_pi(const CorrelationKernel& kernel, const PropagationGeometry& geom,
                               const std::optional<TransverseGrid>& out_grid = std::nullopt);

/// Phase-sensitive counterpart; no conjugation in the propagation kernel:
///   K_out(x1,x2) = int int K(x1',x2') h(x1-x1') h(x2-x2') dx1' dx2'.
CorrelationKernel propagate_ps(const CorrelationKernel& kernel, const PropagationGeometry& geom,
                               const std::optional<TransverseGrid>& out_grid = std::nullopt);

enum class DetectionKernelKind { classical_pi, classical_ps, quantum_ps };

/// Closed-form detection-plane kernel on the given grid. Near field returns
/// the source-plane form unchanged; far field returns the Gaussian-Schell
/// far-field forms with aL, rhoL (phase-sensitive ones peak on the
/// anti-diagonal x2 = -x1). Throws IntermediateRegime when neither limit
/// applies for the relevant Fresnel numbers.
CorrelationKernel analytic_detection_kernel(const GaussianSchellParams& params,
                                            const PropagationGeometry& geom,
                                            DetectionKernelKind kind,
                                            const TransverseGrid& grid);

} // namespace ghostsim

#endif // GHOSTSIM_PROPAGATION_HPP
