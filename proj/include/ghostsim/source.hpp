#ifndef GHOSTSIM_SOURCE_HPP
#define GHOSTSIM_SOURCE_HPP

#include <array>
#include <optional>
#include <string>

#include "ghostsim/kernel.hpp"
#include "ghostsim/spectrum.hpp"

namespace ghostsim {

/// Gaussian-Schell source description: photon flux, e^-2 intensity radius,
/// coherence radius and coherence time.
struct GaussianSchellParams {
    double photon_flux = 0.0;       // photons/s
    double intensity_radius = 0.0;  // m, a0
    double coherence_radius = 0.0;  // m, rho0
    double coherence_time = 0.0;    // s, T0

    void validate() const {
        if (photon_flux <= 0.0 || intensity_radius <= 0.0 || coherence_radius <= 0.0 ||
            coherence_time <= 0.0)
            throw InvalidParams("Gaussian-Schell parameters must all be > 0");
    }

    /// Low-coherence condition rho0/a0 below threshold; the closed-form
    /// near/far image expressions assume this.
    bool low_coherence(double threshold = 0.2) const {
        return coherence_radius / intensity_radius < threshold;
    }

    /// Dimensionless source brightness P T0 rho0^2 / a0^2.
    double brightness() const {
        const double r = coherence_radius / intensity_radius;
        return photon_flux * coherence_time * r * r;
    }

    /// Per-dimension flux amplitude sqrt(2P / (pi a0^2)); the 2D kernel
    /// peak 2P / (pi a0^2) is the product of two of these.
    double amplitude_1d() const {
        return std::sqrt(2.0 * photon_flux / (M_PI * intensity_radius * intensity_radius));
    }
};

/// 1D Gaussian-Schell correlation kernel
///   K(x1, x2) = sqrt(2P/pi a0^2) exp(-(x1^2+x2^2)/a0^2) exp(-(x2-x1)^2 / 2 rho0^2)
/// on the given grid. The same spatial form serves as phase-insensitive or
/// (maximally classical) phase-sensitive cross-correlation.
CorrelationKernel make_gaussian_schell_kernel(const GaussianSchellParams& params,
                                              const TransverseGrid& grid, KernelFlavor flavor);

/// 2D closed-form value of the same kernel at transverse points rho1, rho2.
Complex gaussian_schell_kernel_2d(const GaussianSchellParams& params,
                                  const std::array<double, 2>& rho1,
                                  const std::array<double, 2>& rho2);

struct LowBrightnessPsKernel {
    CorrelationKernel kernel;       // coherence radius rho0/sqrt(2), see below
    TemporalCorrelation temporal;   // R^(p)(tau) = exp(-tau^2 / T0^2)
    double amplitude_gain = 0.0;    // (2/pi)^(1/4) sqrt(a0^2 / (P T0 rho0^2))
};

/// Maximum quantum-permitted phase-sensitive cross-correlation in the
/// low-brightness limit. The spatial coherence factor is exp(-(x2-x1)^2/rho0^2)
/// (a factor sqrt(2) narrower than the classical kernel) and the temporal
/// factor is exp(-tau^2/T0^2). The 1D amplitude is fixed by requiring the
/// spectra to saturate |g_p(k,W)| = sqrt(g_n(k,W)) exactly in 1D; the
/// dimensionless 2D gain from the corresponding 2D expression is reported
/// separately as amplitude_gain.
LowBrightnessPsKernel low_brightness_ps_kernel(const GaussianSchellParams& params,
                                               const TransverseGrid& grid);

/// 1D amplitude of the low-brightness phase-sensitive kernel,
/// sqrt(2 s / (pi rho0 T0)) with s the per-dimension flux amplitude.
double low_brightness_amplitude_1d(const GaussianSchellParams& params);

/// Classical temporal cross/auto correlation R(tau) = exp(-tau^2 / 2 T0^2).
TemporalCorrelation classical_temporal(const GaussianSchellParams& params, TemporalFlavor flavor);

enum class SourcePreset {
    thermal_max,        // maximum phase-insensitive cross-correlation
    classical_ps_max,   // maximum classical phase-sensitive cross-correlation
    quantum_ps_max      // maximum quantum phase-sensitive cross-correlation
};

/// Second-moment description of the joint signal/reference state: shared
/// auto-correlation, optional cross-correlations, and the classification
/// obtained from the correlation-spectrum bounds. Phase-sensitive
/// auto-correlations are identically zero throughout.
struct SourceState {
    GaussianSchellParams params;
    SourcePreset preset = SourcePreset::thermal_max;
    CorrelationKernel auto_kernel;
    std::optional<CorrelationKernel> pi_cross;
    std::optional<CorrelationKernel> ps_cross;
    TemporalCorrelation temporal_auto;
    std::optional<TemporalCorrelation> temporal_pi_cross;
    std::optional<TemporalCorrelation> temporal_ps_cross;
    Classification classification = Classification::Invalid;
    std::string note;   // e.g. high-brightness classical approximation
};

/// Brightness gate for quantum_ps_max (outside it the paper's two limits
/// apply; inside neither does and the preset refuses).
inline constexpr double kBrightnessLowGate = 0.1;
inline constexpr double kBrightnessHighGate = 10.0;

/// Construct one of the three canonical sources. The classification is
/// recomputed from the constructed spectra rather than assumed.
SourceState make_source(SourcePreset preset, const GaussianSchellParams& params,
                        const TransverseGrid& grid);

/// Spectra of the state's auto and cross correlations on a conjugate
/// frequency grid (used for classification; exposed for tests). The
/// profiles are sampled on an internal grid wide enough that truncation
/// sidelobes stay below the classification tolerance, independent of the
/// kernel grid in use.
struct SourceSpectra {
    CorrelationSpectrum gn;
    std::optional<CorrelationSpectrum> gn_cross;
    std::optional<CorrelationSpectrum> gp_cross;
};

SourceSpectra source_spectra(const GaussianSchellParams& params, SourcePreset preset);

} // namespace ghostsim

#endif // GHOSTSIM_SOURCE_HPP
