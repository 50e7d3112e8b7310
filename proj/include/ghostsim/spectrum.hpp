#ifndef GHOSTSIM_SPECTRUM_HPP
#define GHOSTSIM_SPECTRUM_HPP

#include <optional>
#include <vector>

#include "ghostsim/grid.hpp"
#include "ghostsim/kernel.hpp"
#include "ghostsim/linalg.hpp"

namespace ghostsim {

enum class Classification {
    ClassicalPI,     // phase-insensitive only, within Cauchy-Schwarz
    ClassicalPS,     // |g_p| <= g_n everywhere
    NonclassicalPS,  // g_n < |g_p| <= sqrt(g_n (1 + g_n)) somewhere
    Invalid          // violates the quantum bound (or the PI bound)
};

const char* to_string(Classification c);

/// Correlation spectrum g(k, Omega) on the conjugate frequency grids of a
/// spatial grid and a time grid: values(m, l) = g(k[m], omega[l]).
struct CorrelationSpectrum {
    std::vector<double> k;        // rad/m, FFT-conjugate grid of the spatial grid
    std::vector<double> omega;    // rad/s
    CMatrix values;

    double peak_abs() const { return values.cwiseAbs().maxCoeff(); }

    bool same_grid(const CorrelationSpectrum& o) const {
        return k == o.k && omega == o.omega;
    }
};

enum class SpectrumKind { pi_auto, pi_cross, ps_cross };

/// Conjugate frequency grid of a centered uniform grid: n values spaced
/// 2 pi / (n dx), centered like the grid itself.
std::vector<double> conjugate_grid(int n, double dx);

/// Fourier transform of the cross-spectrally pure correlation
/// G(x) R(tau): g(k, Omega) = [sum_j G(x_j) e^{-i k x_j} dx]
///                          * [sum_l R(t_l) e^{+i Omega t_l} dt].
/// For kind pi_auto, throws NonPositiveSpectrum if the result has a real
/// part below -tol_rel * peak or a significant imaginary part anywhere.
CorrelationSpectrum correlation_spectrum(const std::vector<Complex>& g_profile,
                                         const TransverseGrid& grid,
                                         const TemporalCorrelation& temporal,
                                         const TimeGrid& time_grid, SpectrumKind kind,
                                         double tol_rel = 1e-9);

/// Classify a state from its correlation spectra against the
/// Cauchy-Schwarz bounds: |g_n_cross| <= g_n, classical |g_p| <= g_n,
/// quantum |g_p| <= sqrt(g_n (1 + g_n)). Bound violations smaller than
/// tol_rel * max(g_n) are ignored as spectral noise.
Classification classify_state(const CorrelationSpectrum& gn,
                              const CorrelationSpectrum* gn_cross,
                              const CorrelationSpectrum* gp_cross,
                              double tol_rel = 1e-9);

} // namespace ghostsim

#endif // GHOSTSIM_SPECTRUM_HPP
