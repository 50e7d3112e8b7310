// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Each criterion pins its tolerance in code; the runtime limits are part
// of the criteria and are enforced.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ghostsim/construction.hpp"
#include "ghostsim/montecarlo.hpp"
#include "ghostsim/relay.hpp"

using namespace ghostsim;

namespace {

struct Reporter {
    int failures = 0;
    int index = 0;

    void report(const std::string& what, bool ok, const std::string& detail,
                double seconds, double limit_seconds) {
        ++index;
        const bool time_ok = limit_seconds <= 0.0 || seconds < limit_seconds;
        const bool pass = ok && time_ok;
        if (!pass)
            ++failures;
        std::printf("%s  criterion %2d: %s (%s; %.2f s%s)\n", pass ? "PASS" : "FAIL", index,
                    what.c_str(), detail.c_str(), seconds,
                    time_ok ? "" : " OVER TIME LIMIT");
        std::fflush(stdout);
    }
};

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

constexpr double kWavenumber = 1e7;

GaussianSchellParams classical_params() {
    GaussianSchellParams p;
    p.photon_flux = 1e5;
    p.intensity_radius = 1e-3;
    p.coherence_radius = 1e-4;
    p.coherence_time = 1e-6;
    return p;
}

GaussianSchellParams quantum_params() {
    GaussianSchellParams p = classical_params();
    p.photon_flux = 1e4;   // brightness P T0 rho0^2 / a0^2 = 1e-4
    return p;
}

DetectionSetup standard_setup(double td) {
    DetectionSetup s;
    s.filter_width = td;
    return s;
}

std::string pct(double ratio) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f%% off", 100.0 * std::abs(ratio - 1.0));
    return buf;
}

double near_field_psf_radius(const GaussianSchellParams& p, bool quantum,
                             const TransverseGrid& grid) {
    const DetectionSetup setup = standard_setup(5e-7);
    const auto auto_k = make_gaussian_schell_kernel(p, grid, KernelFlavor::phase_insensitive);
    const auto mask = mask_point(grid, 0.0);
    ImageScan scan;
    if (quantum) {
        const auto lb = low_brightness_ps_kernel(p, grid);
        const auto constants = temporal_constants(nullptr, &lb.temporal, setup);
        scan = ghost_image(nullptr, &lb.kernel, auto_k, mask, BucketRegion::full(), setup,
                           constants);
    } else {
        const TemporalCorrelation rc = classical_temporal(p, TemporalFlavor::pi_cross);
        const auto constants = temporal_constants(&rc, nullptr, setup);
        scan = ghost_image(&auto_k, nullptr, auto_k, mask, BucketRegion::full(), setup,
                           constants);
    }
    return measure_psf(scan).e2_radius;
}

/// Worst local relative error between two kernels over entries where the
/// reference magnitude exceeds floor_rel of its peak.
double worst_kernel_error(const CorrelationKernel& numeric, const CorrelationKernel& reference,
                          double floor_rel) {
    const double peak = reference.peak_abs();
    double worst = 0.0;
    for (int i = 0; i < reference.n(); ++i)
        for (int j = 0; j < reference.n(); ++j) {
            const double ref = std::abs(reference.values(i, j));
            if (ref < floor_rel * peak)
                continue;
            worst = std::max(worst,
                             std::abs(std::abs(numeric.values(i, j)) - ref) / ref);
        }
    return worst;
}

} // namespace

int main() {
    Reporter rep;

    // ---- 1. Near-field classical resolution: sqrt(2) rho0 within 5% ----
    double classical_radius = 0.0;
    {
        Timer t;
        const GaussianSchellParams p = classical_params();
        const TransverseGrid grid(256, p.coherence_radius / 6.0);
        classical_radius = near_field_psf_radius(p, false, grid);
        const double expected = std::sqrt(2.0) * p.coherence_radius;
        const double ratio = classical_radius / expected;
        rep.report("near-field classical PSF e^-2 radius = sqrt(2) rho0 within 5%",
                   std::abs(ratio - 1.0) <= 0.05, pct(ratio), t.seconds(), 10.0);
    }

    // ---- 2. Quantum near-field enhancement: ratio 1/sqrt(2) within 5% ----
    {
        Timer t;
        const GaussianSchellParams q = quantum_params();
        const TransverseGrid grid(256, q.coherence_radius / 6.0);
        const double quantum_radius = near_field_psf_radius(q, true, grid);
        const double ratio = (quantum_radius / classical_radius) * std::sqrt(2.0);
        rep.report("quantum/classical near-field PSF ratio = 1/sqrt(2) within 5%",
                   std::abs(ratio - 1.0) <= 0.05, pct(ratio), t.seconds(), 10.0);
    }

    // ---- 3. Far-field FOV aL, resolution sqrt(2) rhoL, quantum FOV x sqrt(2) ----
    {
        Timer t;
        const GaussianSchellParams p = classical_params();
        const PropagationGeometry geom{500.0, kWavenumber};
        const FresnelReport fr = fresnel_report(p, geom);
        const DetectionSetup setup = standard_setup(5e-7);

        const TransverseGrid wide(512, 4.5 * fr.a_far / 512);
        const auto uniform = mask_uniform(wide);
        const auto cls = analytic_image(Regime::far, SourcePreset::thermal_max, p, geom,
                                        uniform, BucketRegion::full(), setup);
        const double env_cls = measure_envelope_radius(cls);

        const TransverseGrid fine(256, fr.rho_far / 5.0);
        const auto point = mask_point(fine, 0.0);
        const auto psf_scan = analytic_image(Regime::far, SourcePreset::thermal_max, p, geom,
                                             point, BucketRegion::full(), setup);
        const double psf = measure_psf(psf_scan).e2_radius;

        const GaussianSchellParams q = quantum_params();
        const auto qscan = analytic_image(Regime::far, SourcePreset::quantum_ps_max, q, geom,
                                          uniform, BucketRegion::full(), setup);
        const double env_qtm = measure_envelope_radius(qscan);

        const double r_env = env_cls / fr.a_far;
        const double r_psf = psf / (std::sqrt(2.0) * fr.rho_far);
        const double r_ratio = env_qtm / env_cls / std::sqrt(2.0);
        const bool ok = std::abs(r_env - 1.0) <= 0.05 && std::abs(r_psf - 1.0) <= 0.05 &&
                        std::abs(r_ratio - 1.0) <= 0.05;
        rep.report("far-field FOV = aL, PSF = sqrt(2) rhoL, quantum FOV x sqrt(2), each 5%",
                   ok,
                   "FOV " + pct(r_env) + ", PSF " + pct(r_psf) + ", quantum ratio " +
                       pct(r_ratio),
                   t.seconds(), 0.0);
    }

    // ---- 4. Far-field phase-sensitive inversion within one grid cell ----
    {
        Timer t;
        const GaussianSchellParams p = classical_params();
        const PropagationGeometry geom{500.0, kWavenumber};
        const FresnelReport fr = fresnel_report(p, geom);
        const TransverseGrid grid(256, fr.rho_far / 5.0);
        const double xc = 20.0 * grid.spacing;
        const auto mask = mask_point(grid, xc);
        const auto scan = analytic_image(Regime::far, SourcePreset::classical_ps_max, p, geom,
                                         mask, BucketRegion::full(), standard_setup(5e-7));
        const double peak = measure_psf(scan).peak_position;
        const double err_cells = std::abs(peak + xc) / grid.spacing;
        char buf[64];
        std::snprintf(buf, sizeof buf, "peak off mirror by %.3f cells", err_cells);
        rep.report("far-field classical-PS image of an off-center point is inverted",
                   err_cells <= 1.0, buf, t.seconds(), 0.0);
    }

    // ---- 5. Near-field PI/PS image identity within 1e-10 relative ----
    {
        Timer t;
        const GaussianSchellParams p = classical_params();
        const TransverseGrid grid(256, p.coherence_radius / 4.0);
        const auto kn = make_gaussian_schell_kernel(p, grid, KernelFlavor::phase_insensitive);
        const auto kp = make_gaussian_schell_kernel(p, grid, KernelFlavor::phase_sensitive);
        const DetectionSetup setup = standard_setup(5e-7);
        const TemporalCorrelation rc = classical_temporal(p, TemporalFlavor::pi_cross);
        const TemporalCorrelation rp = classical_temporal(p, TemporalFlavor::ps_cross);
        const auto mask =
            mask_double_slit(grid, 16.0 * p.coherence_radius, 4.0 * p.coherence_radius);
        const auto thermal = ghost_image(&kn, nullptr, kn, mask, BucketRegion::full(), setup,
                                         temporal_constants(&rc, nullptr, setup));
        const auto ps = ghost_image(nullptr, &kp, kn, mask, BucketRegion::full(), setup,
                                    temporal_constants(nullptr, &rp, setup));
        double worst = 0.0;
        for (std::size_t i = 0; i < thermal.size(); ++i)
            worst = std::max(worst, std::abs(thermal.total[i] - ps.total[i]) /
                                        std::max(thermal.total[i], 1e-300));
        char buf[64];
        std::snprintf(buf, sizeof buf, "max relative difference %.2e", worst);
        rep.report("near-field thermal and classical-PS images identical to 1e-10", worst <= 1e-10,
                   buf, t.seconds(), 0.0);
    }

    // ---- 6. Numeric vs analytic far-field propagation at N = 512 ----
    {
        Timer t;
        GaussianSchellParams p = classical_params();
        p.intensity_radius = 2.8e-3;   // a0 / rho0 = 28
        const TransverseGrid in(512, p.coherence_radius / 4.0);

        // Phase-insensitive: d0 = 0.005.
        const PropagationGeometry geom_pi{280.0, kWavenumber};
        const FresnelReport fr_pi = fresnel_report(p, geom_pi);
        const TransverseGrid out_pi(512, 4.0 * fr_pi.a_far / 512);
        const auto num_pi = propagate_pi(
            make_gaussian_schell_kernel(p, in, KernelFlavor::phase_insensitive), geom_pi,
            out_pi);
        const auto ana_pi =
            analytic_detection_kernel(p, geom_pi, DetectionKernelKind::classical_pi, out_pi);
        const double err_pi = worst_kernel_error(num_pi, ana_pi, 5e-3);

        // Phase-sensitive: df = 0.005.
        const PropagationGeometry geom_ps{7840.0, kWavenumber};
        const FresnelReport fr_ps = fresnel_report(p, geom_ps);
        const TransverseGrid out_ps(512, 4.0 * fr_ps.a_far / 512);
        const auto num_ps = propagate_ps(
            make_gaussian_schell_kernel(p, in, KernelFlavor::phase_sensitive), geom_ps, out_ps);
        const auto ana_ps =
            analytic_detection_kernel(p, geom_ps, DetectionKernelKind::classical_ps, out_ps);
        const double err_ps = worst_kernel_error(num_ps, ana_ps, 5e-3);

        char buf[96];
        std::snprintf(buf, sizeof buf, "d0 = %.0e: PI worst %.2f%%, PS worst %.2f%%", fr_pi.d0,
                      100.0 * err_pi, 100.0 * err_ps);
        rep.report("numeric far-field kernels match Gaussian-Schell closed forms within 1%",
                   err_pi <= 0.01 && err_ps <= 0.01 && fr_pi.d0 <= 0.01 && fr_ps.d0 <= 0.01,
                   buf, t.seconds(), 60.0);
    }

    // ---- 7. Contrast formulas ----
    {
        Timer t;
        const GaussianSchellParams p = classical_params();
        const DetectionSetup setup = standard_setup(2.0 * p.coherence_time);
        const TemporalCorrelation rc = classical_temporal(p, TemporalFlavor::pi_cross);
        const TemporalCorrelation rq(p.coherence_time, TemporalFlavor::ps_cross);

        const double ct_c_closed = ct_classical(setup.filter_width, p.coherence_time);
        const double ct_q_closed = ct_quantum(setup.filter_width, p.coherence_time);
        const double ct_c_num = temporal_constant_numeric(rc, setup) / setup.current_scale();
        const double ct_q_num = temporal_constant_numeric(rq, setup) / setup.current_scale();
        const double err_c = std::abs(ct_c_num - ct_c_closed);
        const double err_q = std::abs(ct_q_num - ct_q_closed);

        const TransverseGrid grid(256, p.coherence_radius / 6.0);
        const auto mask = mask_slit(grid, 0.0, 10.0 * p.coherence_radius);
        const DetectionSetup narrow = standard_setup(p.coherence_time / 100.0);
        const auto scan = analytic_image(Regime::near, SourcePreset::thermal_max, p,
                                         {1e-4, kWavenumber}, mask, BucketRegion::full(),
                                         narrow);
        const auto crep = contrast(scan, mask, p, narrow, ContrastKind::classical);

        char buf[96];
        std::snprintf(buf, sizeof buf, "|dCt_c| = %.1e, |dCt_q| = %.1e, Cs approx %.4f", err_c,
                      err_q, crep.cs_binary_approx);
        rep.report("temporal contrast factors match to 1e-6; binary-mask Cs = 0.01 within 10%",
                   err_c <= 1e-6 && err_q <= 1e-6 && crep.binary_approximation_applied &&
                       std::abs(crep.cs_binary_approx - 0.01) <= 0.001,
                   buf, t.seconds(), 0.0);
    }

    // ---- 8. Relay identity with d1 = d2 = 2f and a large bucket ----
    {
        Timer t;
        const GaussianSchellParams p = classical_params();
        const TransverseGrid grid(192, p.coherence_radius / 8.0);
        const auto k = make_gaussian_schell_kernel(p, grid, KernelFlavor::phase_insensitive);
        const auto mask = mask_gaussian(grid, 4.0 * p.coherence_radius);
        const DetectionSetup setup = standard_setup(5e-7);
        const TemporalCorrelation rc = classical_temporal(p, TemporalFlavor::pi_cross);
        const auto constants = temporal_constants(&rc, nullptr, setup);
        const RelayConfig cfg{30.0, 0.2, 0.2, 0.1};   // d1 = d2 = 2f, M = -1

        const auto reference =
            ghost_image(&k, nullptr, k, mask, BucketRegion::full(), setup, constants);
        const auto relayed =
            relay_image(k, &k, nullptr, mask, cfg, kWavenumber, setup, constants, {});

        double peak = 0.0;
        for (double v : reference.pi_term)
            peak = std::max(peak, v);
        double worst = 0.0;
        for (std::size_t i = 0; i < relayed.size(); ++i) {
            const int j = grid.nearest_index(-relayed.positions[i]);
            const double want = reference.pi_term[static_cast<std::size_t>(j)];
            if (want < 1e-3 * peak)
                continue;
            worst = std::max(worst, std::abs(relayed.pi_term[i] - want) / want);
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "worst relative deviation %.3f%%", 100.0 * worst);
        rep.report("relay with d1 = d2 = 2f reproduces M^2 C(M x1) within 1%", worst <= 0.01,
                   buf, t.seconds(), 0.0);
    }

    // ---- 9. Appendix-A construction end to end ----
    {
        Timer t;
        std::mt19937 rng(2024);
        std::normal_distribution<double> g;
        bool ok = true;
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            PrescribedKernels pk;
            pk.kn.resize(16, 16);
            pk.kp.resize(16, 16);
            for (int i = 0; i < 16; ++i)
                for (int j = 0; j < 16; ++j) {
                    pk.kn(i, j) = Complex(g(rng), g(rng));
                    pk.kp(i, j) = Complex(g(rng), g(rng));
                }
            const auto d = svd_decompose(pk, 1e-8);
            const auto st = build_classical_state(d);
            const auto [kn_rec, kp_rec] = reconstruct_cross_correlations(st, d);
            const double err = std::max((kn_rec - pk.kn).norm() / pk.kn.norm(),
                                        (kp_rec - pk.kp).norm() / pk.kp.norm());
            worst = std::max(worst, err);
            ok = ok && err <= 1e-8 && verify_classical(st).classical;
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "worst reconstruction error %.2e", worst);
        rep.report("20 random 16x16 prescriptions reconstruct classically to 1e-8", ok, buf,
                   t.seconds(), 5.0);
    }

    // ---- 10. Monte Carlo equivalence on a 32-point grid, 2000 samples ----
    {
        Timer t;
        GaussianSchellParams p;
        p.photon_flux = 2.5e14;
        p.intensity_radius = 2.5e-4;
        p.coherence_radius = 1e-4;
        p.coherence_time = 1e-6;
        const TransverseGrid grid(32, p.coherence_radius / 4.0);
        DetectionSetup setup;
        setup.filter_width = 8e-7;
        setup.pinhole_area = grid.spacing;
        const TimeGrid tg(160, 1e-7);
        const auto mask = mask_double_slit(grid, 3.0 * p.coherence_radius, p.coherence_radius);

        const auto run_preset = [&](SourcePreset preset, std::uint64_t seed, double& frac) {
            const SourceState state = make_source(preset, p, grid);
            const TemporalCorrelation rc = classical_temporal(
                p, preset == SourcePreset::thermal_max ? TemporalFlavor::pi_cross
                                                       : TemporalFlavor::ps_cross);
            const TemporalConstants constants =
                preset == SourcePreset::thermal_max
                    ? temporal_constants(&rc, nullptr, setup)
                    : temporal_constants(nullptr, &rc, setup);
            const auto expected = ghost_image(
                state.pi_cross ? &*state.pi_cross : nullptr,
                state.ps_cross ? &*state.ps_cross : nullptr, state.auto_kernel, mask,
                BucketRegion::full(), setup, constants);
            const FieldEnsemble ens = sample_fields(state, tg, 2000, seed);
            const auto est = estimate_image(ens, mask, BucketRegion::full(), setup);
            int within = 0;
            for (std::size_t i = 0; i < est.positions.size(); ++i)
                if (std::abs(est.estimate[i] - expected.total[i]) <= 3.0 * est.std_error[i])
                    ++within;
            frac = static_cast<double>(within) / static_cast<double>(est.positions.size());
        };

        double frac_thermal = 0.0, frac_ps = 0.0;
        run_preset(SourcePreset::thermal_max, 11, frac_thermal);
        run_preset(SourcePreset::classical_ps_max, 12, frac_ps);

        bool refused = false;
        try {
            GaussianSchellParams q = p;
            q.photon_flux = 1e-3 * q.intensity_radius * q.intensity_radius /
                            (q.coherence_time * q.coherence_radius * q.coherence_radius);
            const TransverseGrid qgrid(32, q.coherence_radius / 6.0);
            const auto qstate = make_source(SourcePreset::quantum_ps_max, q, qgrid);
            sample_fields(qstate, tg, 2000, 1);
        } catch (const NonclassicalState&) {
            refused = true;
        }

        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "thermal %.1f%%, classical-PS %.1f%% within 3 SE; refusal %s",
                      100.0 * frac_thermal, 100.0 * frac_ps, refused ? "yes" : "NO");
        rep.report("Monte Carlo images match the moment-factored law at >= 95% of points",
                   frac_thermal >= 0.95 && frac_ps >= 0.95 && refused, buf, t.seconds(),
                   300.0);
    }

    // ---- 11. Classification of the three canonical spectra ----
    {
        Timer t;
        const TransverseGrid grid(64, 0.25);
        const TimeGrid tg(48, 0.1);
        CorrelationSpectrum gn;
        gn.k = conjugate_grid(grid.n, grid.spacing);
        gn.omega = conjugate_grid(tg.n, tg.step);
        gn.values.resize(grid.n, tg.n);
        for (int m = 0; m < grid.n; ++m)
            for (int l = 0; l < tg.n; ++l)
                gn.values(m, l) =
                    2.0 * std::exp(-0.1 * gn.k[static_cast<std::size_t>(m)] *
                                       gn.k[static_cast<std::size_t>(m)] -
                                   0.2 * gn.omega[static_cast<std::size_t>(l)] *
                                       gn.omega[static_cast<std::size_t>(l)]);

        CorrelationSpectrum boundary = gn;
        CorrelationSpectrum quantum = gn;
        CorrelationSpectrum super = gn;
        for (int m = 0; m < grid.n; ++m)
            for (int l = 0; l < tg.n; ++l) {
                const double n = gn.values(m, l).real();
                quantum.values(m, l) = std::sqrt(n * (1.0 + n));
                super.values(m, l) = 1.5 * std::sqrt(n * (1.0 + n));
            }

        const Classification c1 = classify_state(gn, nullptr, &boundary);
        const Classification c2 = classify_state(gn, nullptr, &quantum);
        const Classification c3 = classify_state(gn, nullptr, &super);
        const bool ok = c1 == Classification::ClassicalPS &&
                        c2 == Classification::NonclassicalPS &&
                        c3 == Classification::Invalid;
        rep.report("canonical spectra classify as ClassicalPS / NonclassicalPS / Invalid", ok,
                   std::string(to_string(c1)) + " / " + to_string(c2) + " / " + to_string(c3),
                   t.seconds(), 0.0);
    }

    if (rep.failures == 0)
        std::printf("all %d acceptance criteria passed\n", rep.index);
    else
        std::printf("%d of %d acceptance criteria FAILED\n", rep.failures, rep.index);
    return rep.failures == 0 ? 0 : 1;
}
