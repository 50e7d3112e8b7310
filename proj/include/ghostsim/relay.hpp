#ifndef GHOSTSIM_RELAY_HPP
#define GHOSTSIM_RELAY_HPP

#include "ghostsim/imaging.hpp"

namespace ghostsim {

/// Object separated from the bucket detector by L_R, signal arm relayed
/// through a thin lens d1 behind the object plane and d2 in front of the
/// detection plane, 1/d1 + 1/d2 = 1/f. The residual (L_R - d1 - d2)/c path
/// delay is compensated electronically and never enters the correlator.
struct RelayConfig {
    double object_to_bucket = 0.0;   // L_R, m
    double d1 = 0.0;
    double d2 = 0.0;
    double focal_length = 0.0;

    double magnification() const { return -d2 / d1; }

    void validate() const {
        if (object_to_bucket <= 0.0 || d1 <= 0.0 || d2 <= 0.0 || focal_length <= 0.0)
            throw InvalidParams("relay distances and focal length must be > 0");
        const double lhs = 1.0 / d1 + 1.0 / d2;
        const double rhs = 1.0 / focal_length;
        if (std::abs(lhs - rhs) > 1e-9 * rhs)
            throw InvalidParams("relay must satisfy the thin-lens law 1/d1 + 1/d2 = 1/f");
    }
};

/// Bucket-plane sampling for the relay Fresnel integral. Defaults: spacing
/// from the Nyquist rate of the masked object support, half-extent 8x the
/// e^-2 extent of |K(0, x2)| (capped at the grid's alias half-period).
struct RelayBucket {
    std::optional<double> half_width;    // m; default per the rule above
    std::optional<double> spacing;       // m
};

/// Magnitude of the detection-plane cross-correlation, Fresnel-integrated
/// over the object plane:
///   |K'(x1, x2)| = |c| | int dx' e^{-i k0 (2 x2 x' - x'^2)/2L_R}
///                        K(M x1, x') T(x') |,
/// evaluated on scan positions x1 (object-plane image grid) and the
/// bucket-plane samples x2. Identical for both cross-correlation flavors.
struct RelayCorrelation {
    std::vector<double> x1;       // scan positions (object-plane coordinates)
    std::vector<double> x2;       // bucket-plane samples
    Eigen::MatrixXd magnitude;    // |K'(x1, x2)|
};

RelayCorrelation relay_detection_correlation(const CorrelationKernel& object_cross,
                                             const MaskSpec& mask, const RelayConfig& config,
                                             double wavenumber,
                                             const RelayBucket& bucket = {});

/// Ghost image with the relayed signal arm: integrates |K'|^2 over the
/// bucket. For a sufficiently large bucket this reproduces the object-plane
/// image, C'(x1) = |M| C(M x1) in the 1D model.
ImageScan relay_image(const CorrelationKernel& auto_object,
                      const CorrelationKernel* pi_cross_object,
                      const CorrelationKernel* ps_cross_object, const MaskSpec& mask,
                      const RelayConfig& config, double wavenumber,
                      const DetectionSetup& setup, const TemporalConstants& constants,
                      const RelayBucket& bucket = {});

} // namespace ghostsim

#endif // GHOSTSIM_RELAY_HPP
