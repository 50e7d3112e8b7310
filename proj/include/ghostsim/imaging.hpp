#ifndef GHOSTSIM_IMAGING_HPP
#define GHOSTSIM_IMAGING_HPP

#include <optional>
#include <vector>

#include "ghostsim/propagation.hpp"
#include "ghostsim/source.hpp"

namespace ghostsim {

/// Pinhole + bucket detection pair: quantum efficiency, pinhole area
/// (a length in the 1D model), Gaussian post-detection filter of e^-2
/// duration Td, and the electron charge (1 in normalized units).
struct DetectionSetup {
    double quantum_efficiency = 1.0;
    double pinhole_area = 1.0;
    double filter_width = 0.0;      // Td, s
    double electron_charge = 1.0;

    void validate() const {
        if (quantum_efficiency <= 0.0 || quantum_efficiency > 1.0)
            throw InvalidParams("quantum efficiency must be in (0, 1]");
        if (pinhole_area <= 0.0 || filter_width <= 0.0 || electron_charge <= 0.0)
            throw InvalidParams("pinhole area, filter width and charge must be > 0");
    }

    double current_scale() const {
        const double qe = electron_charge * quantum_efficiency;
        return qe * qe * pinhole_area;
    }
};

/// Gaussian baseband impulse response with e^-2 duration Td, unit area.
double baseband_filter(double t, double filter_width);

/// Bucket aperture: either the full grid or |x| <= half_width.
struct BucketRegion {
    std::optional<double> half_width;

    static BucketRegion full() { return BucketRegion{}; }
    static BucketRegion centered(double hw) { return BucketRegion{hw}; }

    bool contains(double x) const { return !half_width || std::abs(x) <= *half_width; }
};

/// Amplitude transmission mask sampled on a grid, |T| <= 1.
struct MaskSpec {
    TransverseGrid grid;
    std::vector<Complex> transmittance;
    bool binary = false;

    /// 1D effective area sum |T|^2 dx.
    double effective_area() const;

    double abs2(int i) const {
        return std::norm(transmittance[static_cast<std::size_t>(i)]);
    }

    void validate() const;
};

MaskSpec mask_uniform(const TransverseGrid& grid);
MaskSpec mask_point(const TransverseGrid& grid, double center);
MaskSpec mask_slit(const TransverseGrid& grid, double center, double width);
MaskSpec mask_double_slit(const TransverseGrid& grid, double separation, double slit_width);
MaskSpec mask_gaussian(const TransverseGrid& grid, double width);
MaskSpec mask_from_values(const TransverseGrid& grid, std::vector<Complex> values);

/// Temporal image constants C_n, C_p (Eq. for C_m):
///   C_m = q^2 eta^2 A1 [ |R(t)|^2 * h_B(t) * h_B(-t) ]_{t=0}.
/// Computed in closed form for Gaussian R and h_B.
struct TemporalConstants {
    double cn = 0.0;
    double cp = 0.0;
};

TemporalConstants temporal_constants(const TemporalCorrelation* pi_cross,
                                     const TemporalCorrelation* ps_cross,
                                     const DetectionSetup& setup);

/// Same constant by direct numeric double convolution (oracle route).
double temporal_constant_numeric(const TemporalCorrelation& temporal,
                                 const DetectionSetup& setup);

/// Normalized temporal contrast factors.
double ct_classical(double filter_width, double coherence_time);
double ct_quantum(double filter_width, double coherence_time);

/// Ghost image scan C(x1) decomposed into the non-image-bearing background
/// and the phase-insensitive / phase-sensitive image-bearing terms;
/// total = background + pi_term + ps_term pointwise by construction.
struct ImageScan {
    std::vector<double> positions;
    std::vector<double> total;
    std::vector<double> background;
    std::vector<double> pi_term;
    std::vector<double> ps_term;
    double cn = 0.0;
    double cp = 0.0;

    std::size_t size() const { return positions.size(); }
};

/// Non-image-bearing background
///   C0(x1) = q^2 eta^2 A1 K(x1,x1) int_bucket K(x,x) |T(x)|^2 dx.
std::vector<double> background(const CorrelationKernel& auto_det, const MaskSpec& mask,
                               const BucketRegion& bucket, const DetectionSetup& setup);

/// Photocurrent cross-correlation scan from detection-plane kernels:
///   C(x1) = C0(x1) + C_n int |K_n(x1,x)|^2 |T|^2 dx
///                  + C_p int |K_p(x1,x)|^2 |T|^2 dx.
/// Either cross kernel may be absent; its term is then zero.
ImageScan ghost_image(const CorrelationKernel* pi_cross_det,
                      const CorrelationKernel* ps_cross_det,
                      const CorrelationKernel& auto_det, const MaskSpec& mask,
                      const BucketRegion& bucket, const DetectionSetup& setup,
                      const TemporalConstants& constants);

/// The six closed-form images (thermal / classical phase-sensitive /
/// low-brightness quantum, each near and far field), evaluated by direct
/// quadrature of their integrands on the mask grid.
ImageScan analytic_image(Regime regime, SourcePreset preset, const GaussianSchellParams& params,
                         const PropagationGeometry& geom, const MaskSpec& mask,
                         const BucketRegion& bucket, const DetectionSetup& setup);

enum class ContrastKind { classical, quantum };

struct ContrastReport {
    double contrast = 0.0;   // (max_R C - min_R C) / C0(0)
    double cs = 0.0;         // spatial factor, contrast / ct
    double ct = 0.0;         // temporal factor
    ContrastKind kind = ContrastKind::classical;
    bool binary_approximation_applied = false;
    double cs_binary_approx = 0.0;   // rho0^2 / A_T with A_T the 2D area of the
                                     // separable square mask built from this 1D factor
    double mask_area_2d = 0.0;
};

/// Contrast of a scan over the observation region |x1| < region_half_width
/// (default a0/4; larger regions are refused). For binary masks the
/// resolution-cell approximation cs ~ rho0^2 / A_T is reported alongside.
ContrastReport contrast(const ImageScan& scan, const MaskSpec& mask,
                        const GaussianSchellParams& params, const DetectionSetup& setup,
                        ContrastKind kind,
                        std::optional<double> region_half_width = std::nullopt);

struct PsfMeasurement {
    double e2_radius = 0.0;
    double peak_position = 0.0;
    double peak_value = 0.0;
};

/// Width and location of the background-subtracted image of a point-like
/// mask: e^-2 crossing radius and parabolic-refined peak position.
PsfMeasurement measure_psf(const ImageScan& scan);

/// Field-of-view measurement from a uniform-mask scan. The image-bearing
/// term is envelope(x1) * (object-plane weight convolved over the mask);
/// for T == 1 both factors share the same Gaussian width, so the envelope
/// e^-2 radius is sqrt(2) times the measured profile radius.
double measure_envelope_radius(const ImageScan& scan);

} // namespace ghostsim

#endif // GHOSTSIM_IMAGING_HPP
