#include "ghostsim/construction.hpp"

#include <cmath>

namespace ghostsim {

CMatrix space_time_kernel(const CMatrix& spatial, const TransverseGrid& grid,
                          const TemporalCorrelation& temporal, const TimeGrid& time_grid) {
    if (spatial.rows() != grid.n || spatial.cols() != grid.n)
        throw GridMismatch("spatial kernel does not match its grid");
    const int nx = grid.n;
    const int nt = time_grid.n;
    const double w = std::sqrt(grid.spacing * time_grid.step);
    CMatrix m(nx * nt, nx * nt);
    for (int i1 = 0; i1 < nx; ++i1)
        for (int t1 = 0; t1 < nt; ++t1)
            for (int i2 = 0; i2 < nx; ++i2)
                for (int t2 = 0; t2 < nt; ++t2)
                    m(i1 * nt + t1, i2 * nt + t2) =
                        w * spatial(i1, i2) *
                        temporal.value(time_grid.time(t2) - time_grid.time(t1)) * w;
    return m;
}

namespace {

struct TruncatedSvd {
    std::vector<double> sigma;
    CMatrix left;    // kept columns of U
    CMatrix right;   // kept columns of V
};

TruncatedSvd truncated_svd(const CMatrix& a, double tol, const char* name) {
    const SvdResult full = svd(a);
    const double s1 = full.sigma.size() > 0 ? full.sigma(0) : 0.0;
    int kept = 0;
    for (Eigen::Index m = 0; m < full.sigma.size(); ++m)
        if (full.sigma(m) > tol * s1)
            ++kept;
    TruncatedSvd t;
    t.sigma.assign(full.sigma.data(), full.sigma.data() + kept);
    t.left = full.u.leftCols(kept);
    t.right = full.v.leftCols(kept);

    // Dropped singular mass must stay inside the requested tolerance.
    double dropped = 0.0;
    for (Eigen::Index m = kept; m < full.sigma.size(); ++m)
        dropped += full.sigma(m) * full.sigma(m);
    const double norm = a.norm();
    if (norm > 0.0 && std::sqrt(dropped) > tol * norm * 10.0)
        throw ToleranceUnreachable(std::string(name) +
                                   ": truncated singular mass exceeds tolerance");
    return t;
}

} // namespace

ModalDecomposition svd_decompose(const PrescribedKernels& prescribed, double tol) {
    prescribed.validate();
    if (tol <= 0.0)
        throw InvalidParams("svd tolerance must be > 0");

    ModalDecomposition d;
    d.tol = tol;

    // K_n = sum eta_m phi_m*(x1) Phi_m(x2): with SVD K = U S V^H this means
    // phi_m = conj(u_m) and Phi_m = conj(v_m).
    {
        const TruncatedSvd t = truncated_svd(prescribed.kn, tol, "K_n");
        d.eta = t.sigma;
        d.phi = t.left.conjugate();
        d.Phi = t.right.conjugate();
    }
    // K_p = sum mu_m psi_m(x1) Psi_m(x2): psi_m = u_m, Psi_m = conj(v_m).
    {
        const TruncatedSvd t = truncated_svd(prescribed.kp, tol, "K_p");
        d.mu = t.sigma;
        d.psi = t.left;
        d.Psi = t.right.conjugate();
    }
    return d;
}

ClassicalModalState build_classical_state(const ModalDecomposition& decomp) {
    ClassicalModalState st;
    st.population_eta.reserve(decomp.eta.size());
    st.cross_eta.reserve(decomp.eta.size());
    for (double eta : decomp.eta) {
        st.cross_eta.push_back(2.0 * eta);
        st.population_eta.push_back(2.0 * eta);   // classical lower bound
    }
    st.population_mu.reserve(decomp.mu.size());
    st.cross_mu.reserve(decomp.mu.size());
    for (double mu : decomp.mu) {
        st.cross_mu.push_back(2.0 * mu);
        st.population_mu.push_back(2.0 * mu);
    }
    return st;
}

std::pair<CMatrix, CMatrix> reconstruct_cross_correlations(const ClassicalModalState& state,
                                                           const ModalDecomposition& decomp) {
    if (state.cross_eta.size() != decomp.eta.size() ||
        state.cross_mu.size() != decomp.mu.size())
        throw InvalidParams("state does not match the decomposition");

    const Eigen::Index n_rows = decomp.phi.rows();
    CMatrix kn = CMatrix::Zero(n_rows, decomp.Phi.rows());
    for (std::size_t m = 0; m < state.cross_eta.size(); ++m) {
        // <E_S^dag E_R> = (1/2) <E_S'^dag E_R'> = (1/2) 2 eta_m phi* Phi^T.
        const double weight = 0.5 * state.cross_eta[m];
        kn += weight * decomp.phi.col(static_cast<Eigen::Index>(m)).conjugate() *
              decomp.Phi.col(static_cast<Eigen::Index>(m)).transpose();
    }
    CMatrix kp = CMatrix::Zero(decomp.psi.rows(), decomp.Psi.rows());
    for (std::size_t m = 0; m < state.cross_mu.size(); ++m) {
        const double weight = 0.5 * state.cross_mu[m];
        kp += weight * decomp.psi.col(static_cast<Eigen::Index>(m)) *
              decomp.Psi.col(static_cast<Eigen::Index>(m)).transpose();
    }
    return {kn, kp};
}

ClassicalityReport verify_classical(const ClassicalModalState& state, double tol) {
    ClassicalityReport rep;
    for (std::size_t m = 0; m < state.cross_eta.size(); ++m) {
        ModeCheck mc;
        mc.index = static_cast<int>(m);
        mc.phase_insensitive = true;
        mc.cross = std::abs(state.cross_eta[m]);
        mc.bound = std::sqrt(state.population_eta[m] * state.population_eta[m]);
        mc.ok = mc.cross <= mc.bound * (1.0 + tol) + tol;
        rep.classical = rep.classical && mc.ok;
        rep.modes.push_back(mc);
    }
    for (std::size_t m = 0; m < state.cross_mu.size(); ++m) {
        ModeCheck mc;
        mc.index = static_cast<int>(m);
        mc.phase_insensitive = false;
        mc.cross = std::abs(state.cross_mu[m]);
        mc.bound = std::sqrt(state.population_mu[m] * state.population_mu[m]);
        mc.ok = mc.cross <= mc.bound * (1.0 + tol) + tol;
        rep.classical = rep.classical && mc.ok;
        rep.modes.push_back(mc);
    }
    return rep;
}

} // namespace ghostsim
