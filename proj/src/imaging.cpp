#include "ghostsim/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ghostsim {

double baseband_filter(double t, double filter_width) {
    const double td2 = filter_width * filter_width;
    return std::sqrt(8.0 / (M_PI * td2)) * std::exp(-8.0 * t * t / td2);
}

double MaskSpec::effective_area() const {
    double a = 0.0;
    for (int i = 0; i < grid.n; ++i)
        a += abs2(i);
    return a * grid.spacing;
}

void MaskSpec::validate() const {
    if (static_cast<int>(transmittance.size()) != grid.n)
        throw GridMismatch("mask length does not match its grid");
    for (const Complex& t : transmittance)
        if (std::abs(t) > 1.0 + 1e-12)
            throw InvalidParams("mask transmittance must satisfy |T| <= 1");
}

MaskSpec mask_uniform(const TransverseGrid& grid) {
    return MaskSpec{grid,
                    std::vector<Complex>(static_cast<std::size_t>(grid.n), Complex(1.0, 0.0)),
                    true};
}

MaskSpec mask_point(const TransverseGrid& grid, double center) {
    MaskSpec m{grid, std::vector<Complex>(static_cast<std::size_t>(grid.n), Complex(0.0, 0.0)),
               true};
    m.transmittance[static_cast<std::size_t>(grid.nearest_index(center))] = Complex(1.0, 0.0);
    return m;
}

MaskSpec mask_slit(const TransverseGrid& grid, double center, double width) {
    if (width <= 0.0)
        throw InvalidParams("slit width must be > 0");
    MaskSpec m{grid, std::vector<Complex>(static_cast<std::size_t>(grid.n), Complex(0.0, 0.0)),
               true};
    for (int i = 0; i < grid.n; ++i)
        if (std::abs(grid.position(i) - center) <= width / 2.0)
            m.transmittance[static_cast<std::size_t>(i)] = Complex(1.0, 0.0);
    return m;
}

MaskSpec mask_double_slit(const TransverseGrid& grid, double separation, double slit_width) {
    if (separation <= 0.0 || slit_width <= 0.0)
        throw InvalidParams("double slit needs separation > 0 and slit width > 0");
    MaskSpec m{grid, std::vector<Complex>(static_cast<std::size_t>(grid.n), Complex(0.0, 0.0)),
               true};
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.position(i);
        if (std::abs(x - separation / 2.0) <= slit_width / 2.0 ||
            std::abs(x + separation / 2.0) <= slit_width / 2.0)
            m.transmittance[static_cast<std::size_t>(i)] = Complex(1.0, 0.0);
    }
    return m;
}

MaskSpec mask_gaussian(const TransverseGrid& grid, double width) {
    if (width <= 0.0)
        throw InvalidParams("gaussian mask width must be > 0");
    MaskSpec m{grid, std::vector<Complex>(static_cast<std::size_t>(grid.n)), false};
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.position(i);
        m.transmittance[static_cast<std::size_t>(i)] =
            std::exp(-x * x / (2.0 * width * width));
    }
    return m;
}

MaskSpec mask_from_values(const TransverseGrid& grid, std::vector<Complex> values) {
    MaskSpec m{grid, std::move(values), false};
    m.validate();
    return m;
}

namespace {

/// Closed form of [ |R(t)|^2 * h_B(t) * h_B(-t) ]_{t=0} for
/// R(t) = exp(-(t/w)^2): equals 1 / sqrt(1 + Td^2 / (2 w^2)).
double temporal_factor(const TemporalCorrelation& temporal, double filter_width) {
    const double w = temporal.width;
    return 1.0 / std::sqrt(1.0 + filter_width * filter_width / (2.0 * w * w));
}

} // namespace

double ct_classical(double filter_width, double coherence_time) {
    const double r = filter_width / (2.0 * coherence_time);
    return 1.0 / std::sqrt(1.0 + r * r);
}

double ct_quantum(double filter_width, double coherence_time) {
    const double r2 = filter_width * filter_width / (2.0 * coherence_time * coherence_time);
    return 1.0 / std::sqrt(1.0 + r2);
}

TemporalConstants temporal_constants(const TemporalCorrelation* pi_cross,
                                     const TemporalCorrelation* ps_cross,
                                     const DetectionSetup& setup) {
    setup.validate();
    TemporalConstants c;
    if (pi_cross)
        c.cn = setup.current_scale() * temporal_factor(*pi_cross, setup.filter_width);
    if (ps_cross)
        c.cp = setup.current_scale() * temporal_factor(*ps_cross, setup.filter_width);
    return c;
}

double temporal_constant_numeric(const TemporalCorrelation& temporal,
                                 const DetectionSetup& setup) {
    setup.validate();
    const double td = setup.filter_width;
    const double span = 6.0 * std::max(temporal.width, td);
    const double dt = std::min(temporal.width, td) / 16.0;
    const int n = 2 * static_cast<int>(std::ceil(span / dt)) + 1;
    const auto t_of = [&](int i) { return (i - n / 2) * dt; };

    std::vector<double> hb(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        hb[static_cast<std::size_t>(i)] = baseband_filter(t_of(i), td);

    // g(t) = (h_B star h_B(-.))(t), then C = int |R|^2 g dt.
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = temporal.value(t_of(i));
        double g = 0.0;
        for (int j = 0; j < n; ++j) {
            const int k = j - (i - n / 2);
            if (k >= 0 && k < n)
                g += hb[static_cast<std::size_t>(j)] * hb[static_cast<std::size_t>(k)];
        }
        acc += r * r * g * dt;
    }
    return setup.current_scale() * acc * dt;
}

std::vector<double> background(const CorrelationKernel& auto_det, const MaskSpec& mask,
                               const BucketRegion& bucket, const DetectionSetup& setup) {
    setup.validate();
    mask.validate();
    if (!(mask.grid == auto_det.grid))
        throw GridMismatch("mask grid differs from kernel grid");
    if (auto_det.flavor != KernelFlavor::phase_insensitive)
        throw InvalidParams("background needs the phase-insensitive auto kernel");

    const int n = auto_det.n();
    const double dx = auto_det.grid.spacing;

    double bucket_sum = 0.0;
    for (int j = 0; j < n; ++j)
        if (bucket.contains(auto_det.grid.position(j)))
            bucket_sum += auto_det.values(j, j).real() * mask.abs2(j) * dx;

    // R(0) = 1 and int h_B = 1, so only the current scale remains.
    std::vector<double> c0(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        c0[static_cast<std::size_t>(i)] =
            setup.current_scale() * auto_det.values(i, i).real() * bucket_sum;
    return c0;
}

ImageScan ghost_image(const CorrelationKernel* pi_cross_det,
                      const CorrelationKernel* ps_cross_det,
                      const CorrelationKernel& auto_det, const MaskSpec& mask,
                      const BucketRegion& bucket, const DetectionSetup& setup,
                      const TemporalConstants& constants) {
    if (pi_cross_det && !(pi_cross_det->grid == auto_det.grid))
        throw GridMismatch("phase-insensitive cross kernel grid differs");
    if (ps_cross_det && !(ps_cross_det->grid == auto_det.grid))
        throw GridMismatch("phase-sensitive cross kernel grid differs");

    const int n = auto_det.n();
    const double dx = auto_det.grid.spacing;

    ImageScan scan;
    scan.cn = constants.cn;
    scan.cp = constants.cp;
    scan.positions = auto_det.grid.positions();
    scan.background = background(auto_det, mask, bucket, setup);
    scan.pi_term.assign(static_cast<std::size_t>(n), 0.0);
    scan.ps_term.assign(static_cast<std::size_t>(n), 0.0);
    scan.total.resize(static_cast<std::size_t>(n));

    std::vector<int> bucket_idx;
    for (int j = 0; j < n; ++j)
        if (bucket.contains(auto_det.grid.position(j)) && mask.abs2(j) > 0.0)
            bucket_idx.push_back(j);

    for (int i = 0; i < n; ++i) {
        double pi_acc = 0.0;
        double ps_acc = 0.0;
        for (int j : bucket_idx) {
            const double w = mask.abs2(j) * dx;
            if (pi_cross_det)
                pi_acc += std::norm(pi_cross_det->values(i, j)) * w;
            if (ps_cross_det)
                ps_acc += std::norm(ps_cross_det->values(i, j)) * w;
        }
        const auto ui = static_cast<std::size_t>(i);
        scan.pi_term[ui] = constants.cn * pi_acc;
        scan.ps_term[ui] = constants.cp * ps_acc;
        scan.total[ui] = scan.background[ui] + scan.pi_term[ui] + scan.ps_term[ui];
    }
    return scan;
}

ImageScan analytic_image(Regime regime, SourcePreset preset, const GaussianSchellParams& params,
                         const PropagationGeometry& geom, const MaskSpec& mask,
                         const BucketRegion& bucket, const DetectionSetup& setup) {
    params.validate();
    setup.validate();
    mask.validate();
    if (regime == Regime::intermediate)
        throw IntermediateRegime("no closed-form image between near and far field");

    const FresnelReport fr = fresnel_report(params, geom);
    const Regime actual = preset == SourcePreset::thermal_max ? fr.regime_pi : fr.regime_ps;
    if (actual == Regime::intermediate)
        throw IntermediateRegime("geometry sits between the near- and far-field limits");
    if (actual != regime)
        throw InvalidParams("requested regime disagrees with the Fresnel report");

    const bool far = regime == Regime::far;
    // The quantum preset has closed forms only in its two brightness limits;
    // at high brightness the classical phase-sensitive forms take over.
    bool quantum = preset == SourcePreset::quantum_ps_max;
    if (quantum) {
        const double b = params.brightness();
        if (b >= kBrightnessLowGate && b <= kBrightnessHighGate)
            throw BrightnessRegimeAmbiguous(
                "closed-form quantum image needs the low- or high-brightness limit");
        if (b > kBrightnessHighGate)
            quantum = false;
    }

    // Detection-plane scales.
    const double a = far ? fr.a_far : params.intensity_radius;
    const double rho = far ? fr.rho_far : params.coherence_radius;
    const double s_auto = far ? params.amplitude_1d() * fr.d0 : params.amplitude_1d();

    // Image-bearing kernel: |K(x1,x)|^2 = amp^2 e^{-env_c (x1^2+x^2)} e^{-psf_c (x1 -+ x)^2}.
    double amp = s_auto;
    double env_c = 2.0 / (a * a);
    double psf_c = 1.0 / (rho * rho);
    if (quantum) {
        if (far) {
            amp = low_brightness_amplitude_1d(params) * fr.d0 / std::sqrt(2.0);
            env_c = 1.0 / (a * a);
        } else {
            amp = low_brightness_amplitude_1d(params);
            psf_c = 2.0 / (rho * rho);
        }
    }
    const bool mirrored = preset != SourcePreset::thermal_max && far;

    const TemporalCorrelation r_classical = classical_temporal(params, TemporalFlavor::pi_cross);
    const TemporalCorrelation r_quantum(params.coherence_time, TemporalFlavor::ps_cross);
    TemporalConstants constants;
    if (preset == SourcePreset::thermal_max)
        constants = temporal_constants(&r_classical, nullptr, setup);
    else if (quantum)
        constants = temporal_constants(nullptr, &r_quantum, setup);
    else
        constants = temporal_constants(nullptr, &r_classical, setup);
    const double cm = preset == SourcePreset::thermal_max ? constants.cn : constants.cp;

    const TransverseGrid& grid = mask.grid;
    const int n = grid.n;
    const double dx = grid.spacing;

    // Background from the (always classical, phase-insensitive) autos.
    double bucket_sum = 0.0;
    for (int j = 0; j < n; ++j) {
        const double x = grid.position(j);
        if (bucket.contains(x))
            bucket_sum += s_auto * std::exp(-2.0 * x * x / (a * a)) * mask.abs2(j) * dx;
    }

    ImageScan scan;
    scan.cn = constants.cn;
    scan.cp = constants.cp;
    scan.positions = grid.positions();
    scan.background.resize(static_cast<std::size_t>(n));
    scan.pi_term.assign(static_cast<std::size_t>(n), 0.0);
    scan.ps_term.assign(static_cast<std::size_t>(n), 0.0);
    scan.total.resize(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
        const double x1 = grid.position(i);
        const auto ui = static_cast<std::size_t>(i);
        scan.background[ui] = setup.current_scale() * s_auto *
                              std::exp(-2.0 * x1 * x1 / (a * a)) * bucket_sum;

        double integral = 0.0;
        for (int j = 0; j < n; ++j) {
            const double x = grid.position(j);
            if (!bucket.contains(x) || mask.abs2(j) == 0.0)
                continue;
            const double u = mirrored ? x1 + x : x1 - x;
            integral += std::exp(-psf_c * u * u - env_c * x * x) * mask.abs2(j) * dx;
        }
        const double term = cm * amp * amp * std::exp(-env_c * x1 * x1) * integral;
        if (preset == SourcePreset::thermal_max)
            scan.pi_term[ui] = term;
        else
            scan.ps_term[ui] = term;
        scan.total[ui] = scan.background[ui] + scan.pi_term[ui] + scan.ps_term[ui];
    }
    return scan;
}

ContrastReport contrast(const ImageScan& scan, const MaskSpec& mask,
                        const GaussianSchellParams& params, const DetectionSetup& setup,
                        ContrastKind kind, std::optional<double> region_half_width) {
    params.validate();
    setup.validate();
    const double limit = params.intensity_radius / 4.0;
    const double region = region_half_width.value_or(limit);
    if (region > limit * (1.0 + 1e-12))
        throw RegionTooLarge("observation region must stay within |x1| < a0/4");

    double c0_center = 0.0;
    double best_center = std::numeric_limits<double>::max();
    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    bool any = false;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        const double x = scan.positions[i];
        if (std::abs(x) < best_center) {
            best_center = std::abs(x);
            c0_center = scan.background[i];
        }
        if (std::abs(x) <= region) {
            lo = std::min(lo, scan.total[i]);
            hi = std::max(hi, scan.total[i]);
            any = true;
        }
    }
    if (!any || c0_center <= 0.0)
        throw InvalidParams("contrast needs scan points inside the region and C0(0) > 0");

    ContrastReport rep;
    rep.kind = kind;
    rep.contrast = (hi - lo) / c0_center;
    rep.ct = kind == ContrastKind::classical
                 ? ct_classical(setup.filter_width, params.coherence_time)
                 : ct_quantum(setup.filter_width, params.coherence_time);
    rep.cs = rep.contrast / rep.ct;

    if (mask.binary && kind == ContrastKind::classical) {
        // Resolution-cell approximation for the separable square binary mask
        // whose per-axis factor is this 1D mask: Cs ~ rho0^2 / A_T.
        const double at1 = mask.effective_area();
        rep.mask_area_2d = at1 * at1;
        rep.cs_binary_approx =
            params.coherence_radius * params.coherence_radius / rep.mask_area_2d;
        rep.binary_approximation_applied = true;
    }
    return rep;
}

namespace {

std::vector<double> image_term(const ImageScan& scan) {
    std::vector<double> img(scan.size());
    for (std::size_t i = 0; i < scan.size(); ++i)
        img[i] = scan.pi_term[i] + scan.ps_term[i];
    return img;
}

} // namespace

PsfMeasurement measure_psf(const ImageScan& scan) {
    const std::vector<double> img = image_term(scan);
    const auto it = std::max_element(img.begin(), img.end());
    if (img.empty() || *it <= 0.0)
        throw NoPeak("image term carries no signal");
    const std::size_t im = static_cast<std::size_t>(it - img.begin());

    PsfMeasurement m;
    m.peak_value = *it;
    m.peak_position = scan.positions[im];
    if (im > 0 && im + 1 < img.size()) {
        const double ym = img[im - 1];
        const double y0 = img[im];
        const double yp = img[im + 1];
        const double denom = ym - 2.0 * y0 + yp;
        if (denom < 0.0) {
            const double delta = 0.5 * (ym - yp) / denom;
            const double dx = scan.positions[im + 1] - scan.positions[im];
            m.peak_position += delta * dx;
            m.peak_value = y0 - 0.25 * (ym - yp) * delta;
        }
    }

    const double target = m.peak_value * std::exp(-2.0);
    const auto cross_right = [&]() -> double {
        for (std::size_t j = im + 1; j < img.size(); ++j)
            if (img[j] < target) {
                const double frac = (img[j - 1] - target) / (img[j - 1] - img[j]);
                return scan.positions[j - 1] +
                       frac * (scan.positions[j] - scan.positions[j - 1]);
            }
        throw GridTooSmall("e^-2 crossing lies beyond the scan on the right");
    };
    const auto cross_left = [&]() -> double {
        for (std::size_t k = im; k-- > 0;)
            if (img[k] < target) {
                const double frac = (img[k + 1] - target) / (img[k + 1] - img[k]);
                return scan.positions[k + 1] +
                       frac * (scan.positions[k] - scan.positions[k + 1]);
            }
        throw GridTooSmall("e^-2 crossing lies beyond the scan on the left");
    };
    m.e2_radius = (cross_right() - cross_left()) / 2.0;
    return m;
}

double measure_envelope_radius(const ImageScan& scan) {
    return std::sqrt(2.0) * measure_psf(scan).e2_radius;
}

} // namespace ghostsim
