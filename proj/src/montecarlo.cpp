#include "ghostsim/montecarlo.hpp"

#include <cmath>

namespace ghostsim {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index & 0xffffffffu),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

namespace {

double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa uniform in (0, 1].
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double normal_draw(std::mt19937_64& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace

Complex complex_normal(std::mt19937_64& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-std::log(u1));   // so <|z|^2> = 1
    return std::polar(r, 2.0 * M_PI * u2);
}

std::int64_t poisson_draw(double mean, std::mt19937_64& rng) {
    if (mean < 0.0 || !std::isfinite(mean))
        throw InvalidParams("Poisson mean must be finite and >= 0");
    if (mean > 1e6)
        throw RateOverflow("expected counts per time bin exceed 1e6");
    if (mean == 0.0)
        return 0;
    if (mean < 30.0) {
        // Inversion by sequential search.
        const double l = std::exp(-mean);
        double p = 1.0;
        std::int64_t k = -1;
        do {
            ++k;
            p *= uniform01(rng);
        } while (p > l);
        return k;
    }
    // Rounded-normal approximation; exact mean at these counts and the
    // relative skew error is O(1/sqrt(mean)).
    const double v = mean + std::sqrt(mean) * normal_draw(rng);
    return v < 0.0 ? 0 : static_cast<std::int64_t>(std::llround(v));
}

namespace {

/// Synthesis operator B with B B^H = conj(M) for Hermitian PSD M, modes
/// below tol * lambda_max truncated.
CMatrix synthesis_operator(const CMatrix& m, double tol, const char* what) {
    const HermitianEigen eig = hermitian_eigen(m);
    const double lmax = eig.values.cwiseAbs().maxCoeff();
    if (lmax == 0.0)
        return CMatrix::Zero(m.rows(), 0);
    if (eig.values.minCoeff() < -1e-9 * lmax)
        throw InvalidParams(std::string(what) + ": covariance is not positive semidefinite");

    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
        if (eig.values(i) > tol * lmax)
            kept.push_back(i);

    CMatrix b(m.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c)
        b.col(static_cast<Eigen::Index>(c)) =
            eig.vectors.col(kept[c]).conjugate() * std::sqrt(eig.values(kept[c]));
    return b;
}

} // namespace

FieldEnsemble::FieldEnsemble(const CorrelationKernel& spatial_kernel,
                             const TemporalCorrelation& temporal, const TimeGrid& time_grid,
                             ReferenceMode mode, int n_samples, std::uint64_t seed)
    : grid_(spatial_kernel.grid), time_grid_(time_grid), mode_(mode), n_samples_(n_samples),
      seed_(seed) {
    if (n_samples <= 0)
        throw InvalidParams("ensemble needs n_samples > 0");
    if (spatial_kernel.flavor != KernelFlavor::phase_insensitive)
        throw InvalidParams("field synthesis needs the phase-insensitive auto kernel");

    synth_x_ = synthesis_operator(spatial_kernel.values, 1e-12, "spatial kernel");

    CMatrix r(time_grid.n, time_grid.n);
    for (int i = 0; i < time_grid.n; ++i)
        for (int j = 0; j < time_grid.n; ++j)
            r(i, j) = temporal.value(time_grid.time(j) - time_grid.time(i));
    synth_t_ = synthesis_operator(r, 1e-12, "temporal covariance");
}

CMatrix FieldEnsemble::signal_sample(int index) const {
    if (index < 0 || index >= n_samples_)
        throw InvalidParams("sample index out of range");
    std::mt19937_64 rng = substream(seed_, static_cast<std::uint64_t>(index));
    CMatrix g(synth_x_.cols(), synth_t_.cols());
    for (Eigen::Index a = 0; a < g.rows(); ++a)
        for (Eigen::Index b = 0; b < g.cols(); ++b)
            g(a, b) = complex_normal(rng);
    return synth_x_ * g * synth_t_.transpose();
}

CMatrix FieldEnsemble::reference_sample(const CMatrix& signal) const {
    return mode_ == ReferenceMode::identical ? signal : signal.conjugate();
}

FieldEnsemble sample_fields(const SourceState& state, const TimeGrid& time_grid, int n_samples,
                            std::uint64_t seed) {
    if (state.classification == Classification::NonclassicalPS ||
        state.classification == Classification::Invalid)
        throw NonclassicalState(
            "cannot sample a state without a proper P-representation");

    ReferenceMode mode;
    if (state.pi_cross && !state.ps_cross)
        mode = ReferenceMode::identical;
    else if (state.ps_cross && !state.pi_cross)
        mode = ReferenceMode::conjugate;
    else
        throw InvalidParams("sampling requires exactly one cross-correlation preset");

    return FieldEnsemble(state.auto_kernel, state.temporal_auto, time_grid, mode, n_samples,
                         seed);
}

std::vector<double> simulate_photocurrent(const std::vector<double>& rate,
                                          const TimeGrid& time_grid,
                                          const DetectionSetup& setup, std::mt19937_64& rng) {
    setup.validate();
    if (static_cast<int>(rate.size()) != time_grid.n)
        throw GridMismatch("rate length does not match the time grid");
    if (time_grid.step > setup.filter_width / 8.0)
        throw InvalidParams("time step must be <= Td / 8");

    const int n = time_grid.n;
    const double dt = time_grid.step;

    std::vector<std::int64_t> counts(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double mean = rate[static_cast<std::size_t>(j)] * dt;
        counts[static_cast<std::size_t>(j)] = poisson_draw(mean, rng);
    }

    // Convolve the impulse train with h_B; the Gaussian is truncated where
    // it has fallen to e^{-12.5}.
    const double support = 1.25 * setup.filter_width;
    const int half = static_cast<int>(std::ceil(support / dt));
    std::vector<double> hb(static_cast<std::size_t>(2 * half + 1));
    for (int k = -half; k <= half; ++k)
        hb[static_cast<std::size_t>(k + half)] = baseband_filter(k * dt, setup.filter_width);

    std::vector<double> current(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        const std::int64_t c = counts[static_cast<std::size_t>(j)];
        if (c == 0)
            continue;
        const double charge = setup.electron_charge * static_cast<double>(c);
        const int lo = std::max(0, j - half);
        const int hi = std::min(n - 1, j + half);
        for (int k = lo; k <= hi; ++k)
            current[static_cast<std::size_t>(k)] +=
                charge * hb[static_cast<std::size_t>(k - j + half)];
    }
    return current;
}

std::vector<double> pinhole_rate(const CMatrix& field, int pinhole_index,
                                 const DetectionSetup& setup) {
    if (pinhole_index < 0 || pinhole_index >= field.rows())
        throw InvalidParams("pinhole index out of range");
    std::vector<double> mu(static_cast<std::size_t>(field.cols()));
    for (Eigen::Index t = 0; t < field.cols(); ++t)
        mu[static_cast<std::size_t>(t)] =
            setup.quantum_efficiency * std::norm(field(pinhole_index, t)) * setup.pinhole_area;
    return mu;
}

std::vector<double> bucket_rate(const CMatrix& field, const TransverseGrid& grid,
                                const MaskSpec& mask, const BucketRegion& bucket,
                                const DetectionSetup& setup) {
    if (field.rows() != grid.n)
        throw GridMismatch("field rows do not match the grid");
    if (!(mask.grid == grid))
        throw GridMismatch("mask grid does not match the field grid");
    std::vector<double> mu(static_cast<std::size_t>(field.cols()), 0.0);
    for (Eigen::Index t = 0; t < field.cols(); ++t) {
        double acc = 0.0;
        for (int j = 0; j < grid.n; ++j) {
            if (!bucket.contains(grid.position(j)) || mask.abs2(j) == 0.0)
                continue;
            acc += mask.abs2(j) * std::norm(field(j, t));
        }
        mu[static_cast<std::size_t>(t)] = setup.quantum_efficiency * acc * grid.spacing;
    }
    return mu;
}

PhotocurrentRecord simulate_photocurrents(const FieldEnsemble& ensemble, int sample_index,
                                          int pinhole_index, const MaskSpec& mask,
                                          const BucketRegion& bucket,
                                          const DetectionSetup& setup) {
    const CMatrix e_signal = ensemble.signal_sample(sample_index);
    const CMatrix e_reference = ensemble.reference_sample(e_signal);
    std::mt19937_64 rng = substream(ensemble.seed() ^ 0x9e3779b97f4a7c15ull,
                                    static_cast<std::uint64_t>(sample_index));

    PhotocurrentRecord rec;
    rec.filter_width = setup.filter_width;
    rec.rate_bucket = bucket_rate(e_reference, ensemble.grid(), mask, bucket, setup);
    rec.current_bucket = simulate_photocurrent(rec.rate_bucket, ensemble.time_grid(), setup, rng);
    rec.rate_pinhole = pinhole_rate(e_signal, pinhole_index, setup);
    rec.current_pinhole =
        simulate_photocurrent(rec.rate_pinhole, ensemble.time_grid(), setup, rng);
    return rec;
}

McImageScan estimate_image(const FieldEnsemble& ensemble, const MaskSpec& mask,
                           const BucketRegion& bucket, const DetectionSetup& setup,
                           const McOptions& options) {
    setup.validate();
    if (ensemble.n_samples() < 100)
        throw InsufficientSamples("the image estimator needs at least 100 samples");

    const TransverseGrid& grid =
        options.detection_grid ? *options.detection_grid : ensemble.grid();
    const TimeGrid& tg = ensemble.time_grid();
    const int n = grid.n;
    const int nt = tg.n;
    if (options.detection_grid && !options.propagate_signal)
        throw InvalidParams("a detection grid requires propagation matrices");

    // Average i1 i2 only where the filter support fits inside the record.
    const int margin = static_cast<int>(std::ceil(1.25 * setup.filter_width / tg.step)) + 1;
    if (2 * margin >= nt)
        throw InvalidParams("time record is shorter than the filter support");

    std::vector<double> mean(static_cast<std::size_t>(n), 0.0);
    std::vector<double> m2(static_cast<std::size_t>(n), 0.0);

    for (int s = 0; s < ensemble.n_samples(); ++s) {
        CMatrix e_signal = ensemble.signal_sample(s);
        CMatrix e_reference = ensemble.reference_sample(e_signal);
        if (options.propagate_signal)
            e_signal = (*options.propagate_signal) * e_signal;
        if (options.propagate_reference)
            e_reference = (*options.propagate_reference) * e_reference;

        std::mt19937_64 rng = substream(ensemble.seed() ^ 0x9e3779b97f4a7c15ull,
                                        static_cast<std::uint64_t>(s));

        const std::vector<double> mu2 = bucket_rate(e_reference, grid, mask, bucket, setup);
        const std::vector<double> i2 = simulate_photocurrent(mu2, tg, setup, rng);

        for (int p = 0; p < n; ++p) {
            const std::vector<double> mu1 = pinhole_rate(e_signal, p, setup);
            const std::vector<double> i1 = simulate_photocurrent(mu1, tg, setup, rng);
            double acc = 0.0;
            for (int t = margin; t < nt - margin; ++t)
                acc += i1[static_cast<std::size_t>(t)] * i2[static_cast<std::size_t>(t)];
            const double v = acc / static_cast<double>(nt - 2 * margin);

            const auto up = static_cast<std::size_t>(p);
            const double delta = v - mean[up];
            mean[up] += delta / static_cast<double>(s + 1);
            m2[up] += delta * (v - mean[up]);
        }
    }

    McImageScan out;
    out.n_samples = ensemble.n_samples();
    out.positions = grid.positions();
    out.estimate = mean;
    out.std_error.resize(static_cast<std::size_t>(n));
    const double ns = static_cast<double>(ensemble.n_samples());
    for (int p = 0; p < n; ++p)
        out.std_error[static_cast<std::size_t>(p)] =
            std::sqrt(m2[static_cast<std::size_t>(p)] / (ns - 1.0) / ns);
    return out;
}

} // namespace ghostsim
