#include "ghostsim/spectrum.hpp"

namespace ghostsim {

const char* to_string(Classification c) {
    switch (c) {
    case Classification::ClassicalPI: return "ClassicalPI";
    case Classification::ClassicalPS: return "ClassicalPS";
    case Classification::NonclassicalPS: return "NonclassicalPS";
    case Classification::Invalid: return "Invalid";
    }
    return "?";
}

std::vector<double> conjugate_grid(int n, double dx) {
    std::vector<double> k(static_cast<std::size_t>(n));
    const double dk = 2.0 * M_PI / (n * dx);
    for (int m = 0; m < n; ++m)
        k[static_cast<std::size_t>(m)] = (m - n / 2) * dk;
    return k;
}

CorrelationSpectrum correlation_spectrum(const std::vector<Complex>& g_profile,
                                         const TransverseGrid& grid,
                                         const TemporalCorrelation& temporal,
                                         const TimeGrid& time_grid, SpectrumKind kind,
                                         double tol_rel) {
    if (static_cast<int>(g_profile.size()) != grid.n)
        throw GridMismatch("profile length does not match grid");

    CorrelationSpectrum s;
    s.k = conjugate_grid(grid.n, grid.spacing);
    s.omega = conjugate_grid(time_grid.n, time_grid.step);

    const auto gk = fourier_sum(g_profile, grid.positions(), grid.spacing, s.k, -1);

    std::vector<Complex> r_samples(static_cast<std::size_t>(time_grid.n));
    for (int l = 0; l < time_grid.n; ++l)
        r_samples[static_cast<std::size_t>(l)] = temporal.value(time_grid.time(l));
    const auto rw = fourier_sum(r_samples, time_grid.times(), time_grid.step, s.omega, +1);

    s.values.resize(grid.n, time_grid.n);
    for (int m = 0; m < grid.n; ++m)
        for (int l = 0; l < time_grid.n; ++l)
            s.values(m, l) = gk[static_cast<std::size_t>(m)] * rw[static_cast<std::size_t>(l)];

    if (kind == SpectrumKind::pi_auto) {
        const double peak = s.peak_abs();
        const double tol = tol_rel * peak;
        for (int m = 0; m < grid.n; ++m)
            for (int l = 0; l < time_grid.n; ++l) {
                const Complex v = s.values(m, l);
                if (v.real() < -tol || std::abs(v.imag()) > tol)
                    throw NonPositiveSpectrum(
                        "phase-insensitive auto-spectrum must be real and non-negative");
            }
    }
    return s;
}

Classification classify_state(const CorrelationSpectrum& gn,
                              const CorrelationSpectrum* gn_cross,
                              const CorrelationSpectrum* gp_cross, double tol_rel) {
    if (gn_cross && !gn.same_grid(*gn_cross))
        throw GridMismatch("g_n cross spectrum grid differs from g_n");
    if (gp_cross && !gn.same_grid(*gp_cross))
        throw GridMismatch("g_p cross spectrum grid differs from g_n");

    if (gn_cross) {
        const double tol_n = tol_rel * std::max(gn.peak_abs(), gn_cross->peak_abs());
        const double worst = (gn_cross->values.cwiseAbs() - gn.values.real()).maxCoeff();
        if (worst > tol_n)
            return Classification::Invalid;
    }

    if (!gp_cross)
        return Classification::ClassicalPI;

    const double tol = tol_rel * std::max(gn.peak_abs(), gp_cross->peak_abs());

    // The quantum bound is checked in squares, |g_p|^2 <= g_n (1 + g_n),
    // which is algebraically identical but robust where g_n has underflowed
    // to roundoff noise while |g_p| ~ sqrt(g_n) is still finite.
    double worst_classical = -1.0;     // max of |g_p| - g_n
    double worst_quantum_sq = -1.0;    // max of |g_p|^2 - g_n (1 + g_n)
    double bound_sq_peak = 0.0;
    for (int m = 0; m < gn.values.rows(); ++m)
        for (int l = 0; l < gn.values.cols(); ++l) {
            const double n = std::max(gn.values(m, l).real(), 0.0);
            const double p = std::abs(gp_cross->values(m, l));
            const double bound_sq = n * (1.0 + n);
            bound_sq_peak = std::max(bound_sq_peak, bound_sq);
            worst_classical = std::max(worst_classical, p - n);
            worst_quantum_sq = std::max(worst_quantum_sq, p * p - bound_sq);
        }

    if (worst_quantum_sq > tol_rel * bound_sq_peak)
        return Classification::Invalid;
    if (worst_classical > tol)
        return Classification::NonclassicalPS;
    return Classification::ClassicalPS;
}

} // namespace ghostsim
