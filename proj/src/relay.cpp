#include "ghostsim/relay.hpp"

#include <algorithm>
#include <cmath>

namespace ghostsim {

namespace {

bool row_available(const TransverseGrid& grid, double xa) {
    const double pos = xa / grid.spacing + grid.n / 2;
    const double rounded = std::round(pos);
    if (std::abs(pos - rounded) < 1e-9)
        return rounded >= 0.0 && rounded <= grid.n - 1.0;
    const double f = std::floor(pos);
    return f >= 1.0 && f + 2.0 <= grid.n - 1.0;
}

/// Kernel row K(xa, x_j) for all j, with xa possibly off-grid. Exact row
/// copy on grid hits, Catmull-Rom interpolation across rows otherwise.
std::vector<Complex> kernel_row_at(const CorrelationKernel& k, double xa) {
    const int n = k.grid.n;
    const double pos = xa / k.grid.spacing + n / 2;
    const double rounded = std::round(pos);
    std::vector<Complex> row(static_cast<std::size_t>(n));
    if (std::abs(pos - rounded) < 1e-9) {
        const int i = static_cast<int>(rounded);
        if (i < 0 || i >= n)
            throw GridTooSmall("relay scan position falls outside the object kernel grid");
        for (int j = 0; j < n; ++j)
            row[static_cast<std::size_t>(j)] = k.values(i, j);
        return row;
    }
    const int i1 = static_cast<int>(std::floor(pos));
    if (i1 < 1 || i1 + 2 >= n)
        throw GridTooSmall("relay scan position falls outside the object kernel grid");
    const double t = pos - i1;
    // Catmull-Rom weights over rows i1-1 .. i1+2.
    const double w0 = 0.5 * (-t + 2.0 * t * t - t * t * t);
    const double w1 = 0.5 * (2.0 - 5.0 * t * t + 3.0 * t * t * t);
    const double w2 = 0.5 * (t + 4.0 * t * t - 3.0 * t * t * t);
    const double w3 = 0.5 * (-t * t + t * t * t);
    for (int j = 0; j < n; ++j)
        row[static_cast<std::size_t>(j)] = w0 * k.values(i1 - 1, j) + w1 * k.values(i1, j) +
                                           w2 * k.values(i1 + 1, j) + w3 * k.values(i1 + 2, j);
    return row;
}

struct BucketGrid {
    std::vector<double> x2;
    double dx2 = 0.0;
};

/// Masked object-plane integrand for one scan row: f_j = K(Mx1, x_j) T_j
/// e^{i k0 x_j^2 / 2 L_R} dx.
std::vector<Complex> masked_row(const CorrelationKernel& cross, const MaskSpec& mask,
                                double m_x1, double k0, double lr) {
    const auto row = kernel_row_at(cross, m_x1);
    const int n = cross.grid.n;
    std::vector<Complex> f(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double x = cross.grid.position(j);
        const Complex chirp = std::polar(1.0, k0 * x * x / (2.0 * lr));
        f[static_cast<std::size_t>(j)] = row[static_cast<std::size_t>(j)] *
                                         mask.transmittance[static_cast<std::size_t>(j)] *
                                         chirp * cross.grid.spacing;
    }
    return f;
}

Complex fresnel_sum(const std::vector<Complex>& f, const TransverseGrid& grid, double k0,
                    double lr, double x2) {
    Complex acc(0.0, 0.0);
    for (int j = 0; j < grid.n; ++j) {
        if (f[static_cast<std::size_t>(j)] == Complex(0.0, 0.0))
            continue;
        acc += f[static_cast<std::size_t>(j)] *
               std::polar(1.0, -k0 * x2 * grid.position(j) / lr);
    }
    return acc;
}

BucketGrid build_bucket_grid(const CorrelationKernel& cross, const MaskSpec& mask,
                             const RelayConfig& config, double k0, const RelayBucket& spec) {
    const double lr = config.object_to_bucket;
    const double m = config.magnification();

    // Masked object support for the Nyquist rate.
    double x_obj = 0.0;
    for (int j = 0; j < cross.grid.n; ++j)
        if (mask.abs2(j) > 0.0)
            x_obj = std::max(x_obj, std::abs(cross.grid.position(j)));
    if (x_obj == 0.0)
        x_obj = cross.grid.extent() / 2.0;

    const double alias_half_period = M_PI * lr / (k0 * cross.grid.spacing);
    const double dx2 = spec.spacing.value_or(M_PI * lr / (2.0 * k0 * x_obj));

    double half_width = 0.0;
    if (spec.half_width) {
        half_width = *spec.half_width;
    } else {
        // Probe |K'(0, x2)| out to the alias half-period, take 8x its e^-2 extent.
        const auto f = masked_row(cross, mask, m * 0.0, k0, lr);
        double peak = 0.0;
        std::vector<double> probe;
        for (double x2 = 0.0; x2 <= alias_half_period; x2 += dx2) {
            probe.push_back(std::abs(fresnel_sum(f, cross.grid, k0, lr, x2)));
            peak = std::max(peak, probe.back());
        }
        const double target = peak * std::exp(-2.0);
        double e2 = alias_half_period;
        for (std::size_t i = probe.size(); i-- > 0;) {
            if (probe[i] >= target) {
                e2 = static_cast<double>(i) * dx2;
                break;
            }
        }
        half_width = std::min(8.0 * std::max(e2, dx2), alias_half_period);
    }

    BucketGrid bg;
    bg.dx2 = dx2;
    const int half_count = static_cast<int>(std::ceil(half_width / dx2));
    for (int i = -half_count; i <= half_count; ++i)
        bg.x2.push_back(i * dx2);
    return bg;
}

/// Trapezoid end weights: exact for one full alias period of the bucket
/// integrand and harmless for decaying tails.
double bucket_weight(std::size_t i, std::size_t count) {
    return (i == 0 || i + 1 == count) ? 0.5 : 1.0;
}

void check_relay_inputs(const CorrelationKernel& cross, const MaskSpec& mask,
                        const RelayConfig& config, double k0) {
    config.validate();
    mask.validate();
    if (k0 <= 0.0)
        throw InvalidParams("wavenumber must be > 0");
    if (!(mask.grid == cross.grid))
        throw GridMismatch("mask and object kernel must share a grid");
    const double chirp_step =
        k0 * cross.grid.spacing * cross.grid.spacing / (2.0 * config.object_to_bucket);
    if (chirp_step > M_PI / 4.0)
        throw SamplingTooCoarse("object grid does not resolve the relay Fresnel chirp");
}

} // namespace

RelayCorrelation relay_detection_correlation(const CorrelationKernel& object_cross,
                                             const MaskSpec& mask, const RelayConfig& config,
                                             double wavenumber, const RelayBucket& bucket) {
    check_relay_inputs(object_cross, mask, config, wavenumber);
    const double lr = config.object_to_bucket;
    const double m = config.magnification();
    const double c_abs =
        std::sqrt(std::abs(m) * wavenumber / (2.0 * M_PI * lr));

    const BucketGrid bg = build_bucket_grid(object_cross, mask, config, wavenumber, bucket);

    RelayCorrelation out;
    out.x2 = bg.x2;
    const int n = object_cross.grid.n;
    std::vector<double> x1;
    for (int i = 0; i < n; ++i) {
        const double x = object_cross.grid.position(i);
        if (row_available(object_cross.grid, m * x))
            x1.push_back(x);
    }
    out.x1 = x1;
    out.magnitude.resize(static_cast<Eigen::Index>(x1.size()),
                         static_cast<Eigen::Index>(bg.x2.size()));

    for (std::size_t i = 0; i < x1.size(); ++i) {
        const auto f = masked_row(object_cross, mask, m * x1[i], wavenumber, lr);
        for (std::size_t j = 0; j < bg.x2.size(); ++j)
            out.magnitude(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                c_abs * std::abs(fresnel_sum(f, object_cross.grid, wavenumber, lr, bg.x2[j]));
    }
    return out;
}

ImageScan relay_image(const CorrelationKernel& auto_object,
                      const CorrelationKernel* pi_cross_object,
                      const CorrelationKernel* ps_cross_object, const MaskSpec& mask,
                      const RelayConfig& config, double wavenumber,
                      const DetectionSetup& setup, const TemporalConstants& constants,
                      const RelayBucket& bucket) {
    setup.validate();
    const CorrelationKernel* any_cross = pi_cross_object ? pi_cross_object : ps_cross_object;
    if (!any_cross)
        throw InvalidParams("relay_image needs at least one cross-correlation kernel");
    check_relay_inputs(*any_cross, mask, config, wavenumber);
    if (!(auto_object.grid == any_cross->grid))
        throw GridMismatch("auto and cross kernels must share a grid");

    const double lr = config.object_to_bucket;
    const double m = config.magnification();
    const double k0 = wavenumber;
    const double c_sq = std::abs(m) * k0 / (2.0 * M_PI * lr);

    const BucketGrid bg = build_bucket_grid(*any_cross, mask, config, k0, bucket);

    // Background: the signal arm images the object-plane intensity
    // (1D scaling 1/|M|); the reference-arm bucket power is the masked
    // intensity Fresnel-propagated over L_R and integrated over the bucket.
    const int n = auto_object.grid.n;
    CorrelationKernel masked = auto_object;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            masked.values(i, j) *= std::conj(mask.transmittance[static_cast<std::size_t>(i)]) *
                                   mask.transmittance[static_cast<std::size_t>(j)];
    const PropagationGeometry to_bucket{lr, k0};
    double bucket_power = 0.0;
    {
        const double dx2 = bg.dx2;
        CMatrix h(static_cast<Eigen::Index>(bg.x2.size()), n);
        for (std::size_t i = 0; i < bg.x2.size(); ++i)
            for (int j = 0; j < n; ++j)
                h(static_cast<Eigen::Index>(i), j) =
                    greens_function_1d(to_bucket, bg.x2[i] - auto_object.grid.position(j)) *
                    auto_object.grid.spacing;
        const CVector diag =
            ((h.conjugate() * masked.values).cwiseProduct(h)).rowwise().sum();
        for (Eigen::Index i = 0; i < diag.size(); ++i)
            bucket_power += bucket_weight(static_cast<std::size_t>(i), bg.x2.size()) *
                            diag(i).real() * dx2;
    }

    ImageScan scan;
    scan.cn = constants.cn;
    scan.cp = constants.cp;

    for (int i = 0; i < n; ++i) {
        const double x1 = auto_object.grid.position(i);
        if (!row_available(auto_object.grid, m * x1))
            continue;   // magnified coordinate must stay on the object grid
        scan.positions.push_back(x1);

        // K11'(x1,x1) = K11(Mx1, Mx1) / |M| from perfect-imaging theory.
        const auto signal_row = kernel_row_at(auto_object, m * x1);
        double i1 = 0.0;
        {
            const double colpos = m * x1 / auto_object.grid.spacing + n / 2;
            const int j0 = std::clamp(static_cast<int>(std::floor(colpos)), 0, n - 2);
            const double t = colpos - j0;
            const Complex v = (1.0 - t) * signal_row[static_cast<std::size_t>(j0)] +
                              t * signal_row[static_cast<std::size_t>(j0 + 1)];
            i1 = v.real() / std::abs(m);
        }
        scan.background.push_back(setup.current_scale() * i1 * bucket_power);

        double pi_acc = 0.0;
        double ps_acc = 0.0;
        if (pi_cross_object) {
            const auto f = masked_row(*pi_cross_object, mask, m * x1, k0, lr);
            for (std::size_t b = 0; b < bg.x2.size(); ++b)
                pi_acc += bucket_weight(b, bg.x2.size()) * c_sq *
                          std::norm(fresnel_sum(f, pi_cross_object->grid, k0, lr, bg.x2[b])) *
                          bg.dx2;
        }
        if (ps_cross_object) {
            const auto f = masked_row(*ps_cross_object, mask, m * x1, k0, lr);
            for (std::size_t b = 0; b < bg.x2.size(); ++b)
                ps_acc += bucket_weight(b, bg.x2.size()) * c_sq *
                          std::norm(fresnel_sum(f, ps_cross_object->grid, k0, lr, bg.x2[b])) *
                          bg.dx2;
        }
        scan.pi_term.push_back(constants.cn * pi_acc);
        scan.ps_term.push_back(constants.cp * ps_acc);
        scan.total.push_back(scan.background.back() + scan.pi_term.back() +
                             scan.ps_term.back());
    }
    if (scan.positions.empty())
        throw GridTooSmall("no scan positions map onto the object grid under M");
    return scan;
}

} // namespace ghostsim
