#ifndef GHOSTSIM_CONSTRUCTION_HPP
#define GHOSTSIM_CONSTRUCTION_HPP

#include <utility>
#include <vector>

#include "ghostsim/grid.hpp"
#include "ghostsim/kernel.hpp"
#include "ghostsim/linalg.hpp"

namespace ghostsim {

/// Arbitrary prescribed phase-insensitive and phase-sensitive
/// cross-correlation kernels, discretized over a combined index (space, or
/// space x time with quadrature weights folded in, see
/// space_time_kernel below).
struct PrescribedKernels {
    CMatrix kn;
    CMatrix kp;

    void validate() const {
        if (kn.rows() != kn.cols() && kn.size() == 0)
            throw InvalidParams("prescribed K_n is empty");
        if (!kn.allFinite() || !kp.allFinite())
            throw InvalidParams("prescribed kernels must be finite");
    }
};

/// Fold a cross-spectrally pure kernel K(x1,x2) R(t2 - t1) into a single
/// matrix over the combined index (x, t), with symmetric quadrature weights
/// sqrt(dx dt) on both sides so that matrix SVD coincides with the
/// continuous operator SVD.
CMatrix space_time_kernel(const CMatrix& spatial, const TransverseGrid& grid,
                          const TemporalCorrelation& temporal, const TimeGrid& time_grid);

/// Singular-value data of the prescribed kernels:
///   K_n(x1,x2) = sum_m eta_m phi_m*(x1) Phi_m(x2)
///   K_p(x1,x2) = sum_m mu_m  psi_m(x1)  Psi_m(x2),
/// each mode set orthonormal, singular values sorted descending. Modes with
/// sigma <= tol * sigma_1 are truncated.
struct ModalDecomposition {
    std::vector<double> eta;
    std::vector<double> mu;
    CMatrix phi, Phi;   // columns are modes of K_n
    CMatrix psi, Psi;   // columns are modes of K_p
    double tol = 0.0;

    int rank_n() const { return static_cast<int>(eta.size()); }
    int rank_p() const { return static_cast<int>(mu.size()); }
};

ModalDecomposition svd_decompose(const PrescribedKernels& prescribed, double tol = 1e-8);

/// Four-field modal Gaussian state whose only non-zero correlations are the
/// per-mode cross-correlations 2 eta_m, 2 mu_m with auto-populations at the
/// classical Cauchy-Schwarz lower bounds (also 2 eta_m, 2 mu_m). The
/// physical signal/reference fields are the 1/sqrt(2) combinations of the
/// primed and double-primed fields.
struct ClassicalModalState {
    std::vector<double> population_eta;   // <a^dag a> for S', R' modes
    std::vector<double> population_mu;    // <a^dag a> for S'', R'' modes
    std::vector<double> cross_eta;        // <a_S'^dag a_R'>
    std::vector<double> cross_mu;         // <a_S'' a_R''>
};

ClassicalModalState build_classical_state(const ModalDecomposition& decomp);

/// Reassemble the cross-correlations carried by the constructed state; the
/// 1/sqrt(2) combiner halves the primed-field correlations exactly, so the
/// result reproduces the prescribed kernels within truncation error.
std::pair<CMatrix, CMatrix> reconstruct_cross_correlations(const ClassicalModalState& state,
                                                           const ModalDecomposition& decomp);

struct ModeCheck {
    int index = 0;
    bool phase_insensitive = true;
    double cross = 0.0;
    double bound = 0.0;   // product of populations, square-rooted
    bool ok = true;
};

struct ClassicalityReport {
    bool classical = true;
    std::vector<ModeCheck> modes;
};

/// Per-mode Cauchy-Schwarz verification |cross| <= sqrt(pop_S pop_R); the
/// constructed state sits exactly on the bound for every mode.
ClassicalityReport verify_classical(const ClassicalModalState& state, double tol = 1e-12);

} // namespace ghostsim

#endif // GHOSTSIM_CONSTRUCTION_HPP
