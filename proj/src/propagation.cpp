#include "ghostsim/propagation.hpp"

#include <cmath>

namespace ghostsim {

namespace {

constexpr double kNearThreshold = 10.0;
constexpr double kFarThreshold = 0.1;
constexpr double kMassLossLimit = 5e-3;

Regime regime_from(double fresnel_number) {
    if (fresnel_number >= kNearThreshold)
        return Regime::near;
    if (fresnel_number <= kFarThreshold)
        return Regime::far;
    return Regime::intermediate;
}

/// e^-2 half-width of |K| along the central anti-diagonal, i.e. in the
/// difference coordinate x2 - x1. Gives the kernel's effective coherence
/// radius as half that width.
double effective_coherence_radius(const CorrelationKernel& k) {
    const int c = k.grid.n / 2;
    const double peak = std::abs(k.values(c, c));
    if (peak == 0.0)
        return 4.0 * k.grid.spacing;
    const double target = peak * std::exp(-2.0);
    const int mmax = std::min(c, k.grid.n - 1 - c);
    double prev = peak;
    for (int m = 1; m <= mmax; ++m) {
        const double v = std::abs(k.values(c - m, c + m));
        if (v < target) {
            // interpolate the crossing between m-1 and m; d = 2 m dx
            const double frac = (prev - target) / (prev - v);
            const double d = 2.0 * (m - 1 + frac) * k.grid.spacing;
            return std::max(d / 2.0, k.grid.spacing);
        }
        prev = v;
    }
    return 4.0 * k.grid.spacing;   // no crossing found: effectively incoherent grid-scale
}

TransverseGrid default_output_grid(const CorrelationKernel& k, const PropagationGeometry& geom) {
    const double rho_eff = effective_coherence_radius(k);
    const double a_far = 2.0 * geom.distance / (geom.wavenumber * rho_eff);
    const double extent = std::max(k.grid.extent(), 4.0 * a_far);
    return TransverseGrid(k.grid.n, extent / k.grid.n);
}

CMatrix direct_transfer_matrix(const PropagationGeometry& geom, const TransverseGrid& in,
                               const TransverseGrid& out) {
    CMatrix h(out.n, in.n);
    for (int i = 0; i < out.n; ++i) {
        const double xo = out.position(i);
        for (int j = 0; j < in.n; ++j)
            h(i, j) = greens_function_1d(geom, xo - in.position(j)) * in.spacing;
    }
    return h;
}

/// Exactly unitary angular-spectrum propagator on a fixed grid: the
/// paraxial transfer function exp(i k0 L - i k^2 L / 2 k0) applied on the
/// conjugate grid. Toeplitz in (i - j), so assembled from one O(N^2) sum.
CMatrix angular_spectrum_matrix(const PropagationGeometry& geom, const TransverseGrid& grid) {
    const int n = grid.n;
    const double dk = 2.0 * M_PI / (n * grid.spacing);
    std::vector<Complex> u(static_cast<std::size_t>(2 * n - 1));
    for (int d = -(n - 1); d <= n - 1; ++d) {
        Complex acc(0.0, 0.0);
        for (int m = 0; m < n; ++m) {
            const double k = (m - n / 2) * dk;
            const double phase = geom.wavenumber * geom.distance -
                                 k * k * geom.distance / (2.0 * geom.wavenumber) +
                                 k * d * grid.spacing;
            acc += std::polar(1.0, phase);
        }
        u[static_cast<std::size_t>(d + n - 1)] = acc / static_cast<double>(n);
    }
    CMatrix h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            h(i, j) = u[static_cast<std::size_t>(i - j + n - 1)];
    return h;
}

/// Pick the propagator whose sampling criterion holds: the direct Fresnel
/// matrix needs the quadratic chirp resolved on the spatial grid (long
/// paths), the angular-spectrum matrix needs the quadratic spectral phase
/// resolved on the conjugate grid (short paths). The two windows overlap.
CMatrix propagator_matrix(const PropagationGeometry& geom, const TransverseGrid& in,
                          const TransverseGrid& out) {
    const double x_in = in.extent() / 2.0;
    const double x_out = out.extent() / 2.0;
    const double direct_step =
        geom.wavenumber * in.spacing * (x_in + x_out) / geom.distance;
    if (direct_step <= 0.8 * M_PI)
        return direct_transfer_matrix(geom, in, out);

    const double spectral_step = 2.0 * M_PI * M_PI * geom.distance /
                                 (in.n * in.spacing * in.spacing * geom.wavenumber);
    if (!(in == out))
        throw GridMismatch(
            "short-path propagation uses the angular-spectrum method, which needs "
            "matching input and output grids");
    if (spectral_step > 0.8 * M_PI)
        throw SamplingTooCoarse(
            "path length falls between the validity windows of the direct and "
            "angular-spectrum propagators on this grid");
    return angular_spectrum_matrix(geom, in);
}

void check_mass_retained(double in_mass, double out_mass, const char* what) {
    if (out_mass < (1.0 - kMassLossLimit) * in_mass)
        throw GridTooSmall(std::string(what) +
                           ": output grid does not cover the diffracted kernel");
}

} // namespace

const char* to_string(Regime r) {
    switch (r) {
    case Regime::near: return "near";
    case Regime::far: return "far";
    case Regime::intermediate: return "intermediate";
    }
    return "?";
}

FresnelReport fresnel_report(const GaussianSchellParams& params,
                             const PropagationGeometry& geom) {
    params.validate();
    geom.validate();
    const double k0 = geom.wavenumber;
    const double l = geom.distance;
    const double a0 = params.intensity_radius;
    const double rho0 = params.coherence_radius;

    FresnelReport r;
    r.d0 = k0 * rho0 * a0 / (2.0 * l);
    r.dn = k0 * rho0 * rho0 / (2.0 * l);
    r.df = k0 * a0 * a0 / (2.0 * l);
    r.d_coh = r.df;
    r.a_far = 2.0 * l / (k0 * rho0);
    r.rho_far = 2.0 * l / (k0 * a0);
    r.regime_pi = regime_from(r.d0);
    // Phase-sensitive propagation: near field needs dn >> 1, far field df << 1.
    if (r.dn >= kNearThreshold)
        r.regime_ps = Regime::near;
    else if (r.df <= kFarThreshold)
        r.regime_ps = Regime::far;
    else
        r.regime_ps = Regime::intermediate;
    return r;
}

Complex greens_function_1d(const PropagationGeometry& geom, double x) {
    geom.validate();
    const double k0 = geom.wavenumber;
    const double l = geom.distance;
    const double mod = std::sqrt(k0 / (2.0 * M_PI * l));
    const double phase = k0 * (l + x * x / (2.0 * l)) - M_PI / 4.0;   // 1/sqrt(i) = e^{-i pi/4}
    return std::polar(mod, phase);
}

CorrelationKernel propagate_pi(const CorrelationKernel& kernel, const PropagationGeometry& geom,
                               const std::optional<TransverseGrid>& out_grid) {
    geom.validate();
    if (kernel.flavor != KernelFlavor::phase_insensitive)
        throw InvalidParams("propagate_pi requires a phase-insensitive kernel");

    const TransverseGrid out = out_grid ? *out_grid : default_output_grid(kernel, geom);
    const CMatrix h = propagator_matrix(geom, kernel.grid, out);

    CorrelationKernel result;
    result.grid = out;
    result.flavor = KernelFlavor::phase_insensitive;
    result.values = h.conjugate() * kernel.values * h.transpose();

    check_mass_retained(kernel.diagonal_flux(), result.diagonal_flux(), "propagate_pi");
    result.check_invariants();
    return result;
}

CorrelationKernel propagate_ps(const CorrelationKernel& kernel, const PropagationGeometry& geom,
                               const std::optional<TransverseGrid>& out_grid) {
    geom.validate();
    if (kernel.flavor != KernelFlavor::phase_sensitive)
        throw InvalidParams("propagate_ps requires a phase-sensitive kernel");

    const TransverseGrid out = out_grid ? *out_grid : default_output_grid(kernel, geom);
    const CMatrix h = propagator_matrix(geom, kernel.grid, out);

    CorrelationKernel result;
    result.grid = out;
    result.flavor = KernelFlavor::phase_sensitive;
    result.values = h * kernel.values * h.transpose();

    // The two-sided Fresnel map is unitary, so the Frobenius mass is the
    // flux-like conserved quantity for phase-sensitive kernels.
    const double in_mass = kernel.values.norm() * kernel.grid.spacing;
    const double out_mass = result.values.norm() * out.spacing;
    check_mass_retained(in_mass, out_mass, "propagate_ps");
    result.check_invariants();
    return result;
}

CorrelationKernel analytic_detection_kernel(const GaussianSchellParams& params,
                                            const PropagationGeometry& geom,
                                            DetectionKernelKind kind,
                                            const TransverseGrid& grid) {
    const FresnelReport fr = fresnel_report(params, geom);
    const Regime regime =
        kind == DetectionKernelKind::classical_pi ? fr.regime_pi : fr.regime_ps;
    if (regime == Regime::intermediate)
        throw IntermediateRegime("no closed-form detection kernel between near and far field");

    if (regime == Regime::near) {
        switch (kind) {
        case DetectionKernelKind::classical_pi:
            return make_gaussian_schell_kernel(params, grid, KernelFlavor::phase_insensitive);
        case DetectionKernelKind::classical_ps:
            return make_gaussian_schell_kernel(params, grid, KernelFlavor::phase_sensitive);
        case DetectionKernelKind::quantum_ps: {
            const double b = params.brightness();
            if (b >= kBrightnessLowGate && b <= kBrightnessHighGate)
                throw BrightnessRegimeAmbiguous(
                    "quantum detection kernel needs the low- or high-brightness limit");
            if (b > kBrightnessHighGate)
                return make_gaussian_schell_kernel(params, grid, KernelFlavor::phase_sensitive);
            return low_brightness_ps_kernel(params, grid).kernel;
        }
        }
    }

    // Far field.
    const double al = fr.a_far;
    const double rl = fr.rho_far;
    if (grid.spacing > rl / 4.0)
        throw SamplingTooCoarse("far-field grid must resolve rhoL / 4");

    CorrelationKernel k;
    k.grid = grid;
    k.values.resize(grid.n, grid.n);

    switch (kind) {
    case DetectionKernelKind::classical_pi: {
        k.flavor = KernelFlavor::phase_insensitive;
        const double amp = params.amplitude_1d() * fr.d0;
        for (int i = 0; i < grid.n; ++i) {
            const double x1 = grid.position(i);
            for (int j = 0; j < grid.n; ++j) {
                const double x2 = grid.position(j);
                const double d = x2 - x1;
                k.values(i, j) = amp * std::exp(-(x1 * x1 + x2 * x2) / (al * al) -
                                                d * d / (2.0 * rl * rl));
            }
        }
        break;
    }
    case DetectionKernelKind::classical_ps: {
        k.flavor = KernelFlavor::phase_sensitive;
        const double amp = params.amplitude_1d() * fr.d0;
        for (int i = 0; i < grid.n; ++i) {
            const double x1 = grid.position(i);
            for (int j = 0; j < grid.n; ++j) {
                const double x2 = grid.position(j);
                const double s = x2 + x1;
                k.values(i, j) = amp * std::exp(-(x1 * x1 + x2 * x2) / (al * al) -
                                                s * s / (2.0 * rl * rl));
            }
        }
        break;
    }
    case DetectionKernelKind::quantum_ps: {
        const double b = params.brightness();
        if (b >= kBrightnessLowGate && b <= kBrightnessHighGate)
            throw BrightnessRegimeAmbiguous(
                "quantum detection kernel needs the low- or high-brightness limit");
        if (b > kBrightnessHighGate)
            // High-brightness limit: the classical phase-sensitive form.
            return analytic_detection_kernel(params, geom, DetectionKernelKind::classical_ps,
                                             grid);
        k.flavor = KernelFlavor::phase_sensitive;
        // Far field of the low-brightness kernel: envelope widens to
        // sqrt(2) aL, anti-diagonal width stays rhoL.
        const double amp = low_brightness_amplitude_1d(params) * fr.d0 / std::sqrt(2.0);
        for (int i = 0; i < grid.n; ++i) {
            const double x1 = grid.position(i);
            for (int j = 0; j < grid.n; ++j) {
                const double x2 = grid.position(j);
                const double s = x2 + x1;
                k.values(i, j) = amp * std::exp(-(x1 * x1 + x2 * x2) / (2.0 * al * al) -
                                                s * s / (2.0 * rl * rl));
            }
        }
        break;
    }
    }
    return k;
}

} // namespace ghostsim
