#ifndef GHOSTSIM_MONTECARLO_HPP
#define GHOSTSIM_MONTECARLO_HPP

#include <cstdint>
#include <optional>
#include <random>

#include "ghostsim/imaging.hpp"
#include "ghostsim/source.hpp"

namespace ghostsim {

/// Deterministic per-sample random substream: the stream for (seed, index)
/// is independent of execution order, so samples can be generated in any
/// order (or in parallel) with identical results.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index);

/// Standard complex Gaussian CN(0,1) draw (unit mean square modulus).
Complex complex_normal(std::mt19937_64& rng);

/// Poisson draw; inversion for small means, rounded-normal for large ones.
/// Throws RateOverflow for means beyond 1e6.
std::int64_t poisson_draw(double mean, std::mt19937_64& rng);

enum class ReferenceMode {
    identical,   // E_R = E_S: maximal phase-insensitive cross-correlation
    conjugate    // E_R = E_S*: maximal classical phase-sensitive cross-correlation
};

/// Karhunen-Loeve synthesis of zero-mean circular complex Gaussian fields
/// E(x, t) with covariance <E*(x1,t1) E(x2,t2)> = K(x1,x2) R(t2-t1).
/// Samples are materialized on demand; the ensemble only stores the
/// synthesis operators and the seed.
class FieldEnsemble {
public:
    FieldEnsemble(const CorrelationKernel& spatial_kernel, const TemporalCorrelation& temporal,
                  const TimeGrid& time_grid, ReferenceMode mode, int n_samples,
                  std::uint64_t seed);

    CMatrix signal_sample(int index) const;            // nx x nt
    CMatrix reference_sample(const CMatrix& signal) const;

    int n_samples() const { return n_samples_; }
    std::uint64_t seed() const { return seed_; }
    const TransverseGrid& grid() const { return grid_; }
    const TimeGrid& time_grid() const { return time_grid_; }
    ReferenceMode reference_mode() const { return mode_; }

private:
    TransverseGrid grid_;
    TimeGrid time_grid_;
    CMatrix synth_x_;    // nx x rx, synth_x synth_x^H = conj(K)
    CMatrix synth_t_;    // nt x rt
    ReferenceMode mode_;
    int n_samples_ = 0;
    std::uint64_t seed_ = 0;
};

/// Sample classical Gaussian fields matching the source's second moments.
/// Refuses nonclassical states: their P-representation is not a probability
/// density and cannot be sampled.
FieldEnsemble sample_fields(const SourceState& state, const TimeGrid& time_grid, int n_samples,
                            std::uint64_t seed);

/// One shot-noise photocurrent realization: per-bin Poisson counts with
/// mean rate(t) dt, convolved with the Gaussian baseband filter h_B.
/// rate(t) must already include the quantum efficiency.
std::vector<double> simulate_photocurrent(const std::vector<double>& rate,
                                          const TimeGrid& time_grid,
                                          const DetectionSetup& setup, std::mt19937_64& rng);

/// Rate functions mu(t) = eta int |E|^2 for the two detectors.
std::vector<double> pinhole_rate(const CMatrix& field, int pinhole_index,
                                 const DetectionSetup& setup);
std::vector<double> bucket_rate(const CMatrix& field, const TransverseGrid& grid,
                                const MaskSpec& mask, const BucketRegion& bucket,
                                const DetectionSetup& setup);

/// One sample's detector pair: rate functions and filtered shot-noise
/// photocurrent realizations for the scanning pinhole and the masked bucket.
struct PhotocurrentRecord {
    std::vector<double> rate_pinhole;
    std::vector<double> rate_bucket;
    std::vector<double> current_pinhole;
    std::vector<double> current_bucket;
    double filter_width = 0.0;
};

PhotocurrentRecord simulate_photocurrents(const FieldEnsemble& ensemble, int sample_index,
                                          int pinhole_index, const MaskSpec& mask,
                                          const BucketRegion& bucket,
                                          const DetectionSetup& setup);

/// Photocurrent-correlation estimate of the ghost image with per-point
/// standard errors over the ensemble.
struct McImageScan {
    std::vector<double> positions;
    std::vector<double> estimate;
    std::vector<double> std_error;
    int n_samples = 0;
};

struct McOptions {
    /// Optional detection-plane transfer matrices applied to each sampled
    /// field column-by-column in time (free-space propagation of samples),
    /// plus the grid the propagated fields live on.
    std::optional<CMatrix> propagate_signal;
    std::optional<CMatrix> propagate_reference;
    std::optional<TransverseGrid> detection_grid;
};

McImageScan estimate_image(const FieldEnsemble& ensemble, const MaskSpec& mask,
                           const BucketRegion& bucket, const DetectionSetup& setup,
                           const McOptions& options = {});

} // namespace ghostsim

#endif // GHOSTSIM_MONTECARLO_HPP
