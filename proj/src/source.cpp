#include "ghostsim/source.hpp"

#include <cmath>

namespace ghostsim {

namespace {

void require_sampling(const TransverseGrid& grid, double coherence_radius) {
    if (grid.spacing > coherence_radius / 4.0)
        throw SamplingTooCoarse("grid spacing must be <= coherence radius / 4");
}

/// Time grid for spectral work: +-8 widths of the widest temporal
/// correlation in play, so truncation sidelobes stay below the
/// classification tolerance.
TimeGrid spectral_time_grid(double width) {
    const int n = 128;
    return TimeGrid(n, 16.0 * width / n);
}

} // namespace

CorrelationKernel make_gaussian_schell_kernel(const GaussianSchellParams& params,
                                              const TransverseGrid& grid, KernelFlavor flavor) {
    params.validate();
    require_sampling(grid, params.coherence_radius);

    const double a0 = params.intensity_radius;
    const double rho0 = params.coherence_radius;
    const double s = params.amplitude_1d();

    CorrelationKernel k;
    k.grid = grid;
    k.flavor = flavor;
    k.values.resize(grid.n, grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double x1 = grid.position(i);
        for (int j = 0; j < grid.n; ++j) {
            const double x2 = grid.position(j);
            const double d = x2 - x1;
            k.values(i, j) =
                s * std::exp(-(x1 * x1 + x2 * x2) / (a0 * a0) - d * d / (2.0 * rho0 * rho0));
        }
    }
    return k;
}

Complex gaussian_schell_kernel_2d(const GaussianSchellParams& params,
                                  const std::array<double, 2>& rho1,
                                  const std::array<double, 2>& rho2) {
    params.validate();
    const double a0 = params.intensity_radius;
    const double rho0 = params.coherence_radius;
    const double r1 = rho1[0] * rho1[0] + rho1[1] * rho1[1];
    const double r2 = rho2[0] * rho2[0] + rho2[1] * rho2[1];
    const double dx = rho2[0] - rho1[0];
    const double dy = rho2[1] - rho1[1];
    const double d2 = dx * dx + dy * dy;
    const double peak = 2.0 * params.photon_flux / (M_PI * a0 * a0);
    return peak * std::exp(-(r1 + r2) / (a0 * a0) - d2 / (2.0 * rho0 * rho0));
}

double low_brightness_amplitude_1d(const GaussianSchellParams& params) {
    return std::sqrt(2.0 * params.amplitude_1d() /
                     (M_PI * params.coherence_radius * params.coherence_time));
}

LowBrightnessPsKernel low_brightness_ps_kernel(const GaussianSchellParams& params,
                                               const TransverseGrid& grid) {
    params.validate();
    if (params.brightness() >= kBrightnessLowGate)
        throw NotLowBrightness("P T0 rho0^2 / a0^2 must be < 0.1 for the low-brightness form");
    // Coherence factor exp(-(x2-x1)^2/rho0^2) has e^-2 radius sqrt(2) rho0,
    // i.e. effective coherence radius rho0/sqrt(2) for the sampling rule.
    require_sampling(grid, params.coherence_radius / std::sqrt(2.0));

    const double a0 = params.intensity_radius;
    const double rho0 = params.coherence_radius;
    const double amp = low_brightness_amplitude_1d(params);

    LowBrightnessPsKernel out{
        CorrelationKernel{grid, CMatrix(grid.n, grid.n), KernelFlavor::phase_sensitive},
        TemporalCorrelation(params.coherence_time, TemporalFlavor::ps_cross), 0.0};
    for (int i = 0; i < grid.n; ++i) {
        const double x1 = grid.position(i);
        for (int j = 0; j < grid.n; ++j) {
            const double x2 = grid.position(j);
            const double d = x2 - x1;
            out.kernel.values(i, j) =
                amp * std::exp(-(x1 * x1 + x2 * x2) / (a0 * a0) - d * d / (rho0 * rho0));
        }
    }
    out.amplitude_gain =
        std::pow(2.0 / M_PI, 0.25) * std::sqrt(a0 * a0 /
                                               (params.photon_flux * params.coherence_time *
                                                rho0 * rho0));
    return out;
}

TemporalCorrelation classical_temporal(const GaussianSchellParams& params,
                                       TemporalFlavor flavor) {
    // R(tau) = exp(-tau^2 / 2 T0^2) -> width sqrt(2) T0 in the
    // exp(-(tau/width)^2) parametrization.
    return TemporalCorrelation(std::sqrt(2.0) * params.coherence_time, flavor);
}

SourceSpectra source_spectra(const GaussianSchellParams& params, SourcePreset preset) {
    params.validate();
    const double s = params.amplitude_1d();
    const double rho0 = params.coherence_radius;
    const TransverseGrid grid(128, rho0 / 6.0);

    // Homogeneous profiles G(x); the pupil envelope drops out of the
    // stationary-part spectra.
    std::vector<Complex> gn_profile(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.position(i);
        gn_profile[static_cast<std::size_t>(i)] = s * std::exp(-x * x / (2.0 * rho0 * rho0));
    }

    const TemporalCorrelation rn = classical_temporal(params, TemporalFlavor::pi_auto);
    const TimeGrid tg = spectral_time_grid(rn.width);

    SourceSpectra out;
    out.gn = correlation_spectrum(gn_profile, grid, rn, tg, SpectrumKind::pi_auto);

    switch (preset) {
    case SourcePreset::thermal_max:
        out.gn_cross = correlation_spectrum(
            gn_profile, grid, classical_temporal(params, TemporalFlavor::pi_cross), tg,
            SpectrumKind::pi_cross);
        break;
    case SourcePreset::classical_ps_max:
        out.gp_cross = correlation_spectrum(
            gn_profile, grid, classical_temporal(params, TemporalFlavor::ps_cross), tg,
            SpectrumKind::ps_cross);
        break;
    case SourcePreset::quantum_ps_max: {
        const double b = params.brightness();
        if (b < kBrightnessLowGate) {
            const double amp = low_brightness_amplitude_1d(params);
            std::vector<Complex> gp_profile(static_cast<std::size_t>(grid.n));
            for (int i = 0; i < grid.n; ++i) {
                const double x = grid.position(i);
                gp_profile[static_cast<std::size_t>(i)] =
                    amp * std::exp(-x * x / (rho0 * rho0));
            }
            out.gp_cross = correlation_spectrum(
                gp_profile, grid,
                TemporalCorrelation(params.coherence_time, TemporalFlavor::ps_cross), tg,
                SpectrumKind::ps_cross);
        } else {
            out.gp_cross = correlation_spectrum(
                gn_profile, grid, classical_temporal(params, TemporalFlavor::ps_cross), tg,
                SpectrumKind::ps_cross);
        }
        break;
    }
    }
    return out;
}

SourceState make_source(SourcePreset preset, const GaussianSchellParams& params,
                        const TransverseGrid& grid) {
    params.validate();

    SourceState st;
    st.params = params;
    st.preset = preset;
    st.auto_kernel = make_gaussian_schell_kernel(params, grid, KernelFlavor::phase_insensitive);
    st.temporal_auto = classical_temporal(params, TemporalFlavor::pi_auto);

    switch (preset) {
    case SourcePreset::thermal_max:
        // Saturates |g_n_cross| <= g_n with equality.
        st.pi_cross = st.auto_kernel;
        st.temporal_pi_cross = classical_temporal(params, TemporalFlavor::pi_cross);
        break;
    case SourcePreset::classical_ps_max: {
        // Same Gaussian-Schell spatial form, declared phase-sensitive;
        // saturates the classical bound |g_p| <= g_n with equality.
        CorrelationKernel ps =
            make_gaussian_schell_kernel(params, grid, KernelFlavor::phase_sensitive);
        st.ps_cross = std::move(ps);
        st.temporal_ps_cross = classical_temporal(params, TemporalFlavor::ps_cross);
        break;
    }
    case SourcePreset::quantum_ps_max: {
        const double b = params.brightness();
        if (b >= kBrightnessLowGate && b <= kBrightnessHighGate)
            throw BrightnessRegimeAmbiguous(
                "neither the low- nor the high-brightness limit applies");
        if (b < kBrightnessLowGate) {
            auto lb = low_brightness_ps_kernel(params, grid);
            st.ps_cross = std::move(lb.kernel);
            st.temporal_ps_cross = lb.temporal;
            st.note = "low-brightness quantum limit";
        } else {
            CorrelationKernel ps =
                make_gaussian_schell_kernel(params, grid, KernelFlavor::phase_sensitive);
            st.ps_cross = std::move(ps);
            st.temporal_ps_cross = classical_temporal(params, TemporalFlavor::ps_cross);
            st.note = "high brightness: classical phase-sensitive form is an excellent "
                      "approximation to the quantum maximum";
        }
        break;
    }
    }

    const SourceSpectra sp = source_spectra(params, preset);
    st.classification = classify_state(sp.gn, sp.gn_cross ? &*sp.gn_cross : nullptr,
                                       sp.gp_cross ? &*sp.gp_cross : nullptr);
    return st;
}

} // namespace ghostsim
