#include "lagsym/kernel.hpp"

#include "lagsym/errors.hpp"

namespace lagsym {

NullSpaceResult null_basis(const Eigen::MatrixXd& M, Real tol_rank) {
    return null_space(M, tol_rank);
}

Eigen::MatrixXd reduced_force(const Eigen::MatrixXd& F, const Eigen::MatrixXd& Z) {
    return Z.transpose() * F * Z;
}

KernelData ker_omega_basis(const TensorEval& t, Real tol_rank) {
    const int D = static_cast<int>(t.M.rows());
    KernelData kd;
    kd.D = D;

    NullSpaceResult nz = null_space(t.M, tol_rank);
    kd.N0 = D - nz.rank;
    kd.Z = nz.basis;
    kd.sv_M = nz.singular_values;
    kd.Fbar = reduced_force(t.F, kd.Z);

    // Duals: theta * Z = I; Z has orthonormal columns but the pseudoinverse is
    // used so the identity survives any remixing applied later.
    kd.theta = pinv_rank(kd.Z, kd.N0);

    kd.G.setZero(2 * D, kd.N0);
    kd.G.bottomRows(D) = kd.Z;

    // Lift each null direction: M w = -F z least squares, then remove the
    // component along span Z (canonical quotient representative).
    Eigen::MatrixXd W(D, kd.N0);
    for (int n = 0; n < kd.N0; ++n) {
        Eigen::VectorXd w = lstsq_minnorm(t.M, Eigen::VectorXd(-t.F * kd.Z.col(n)), tol_rank);
        w -= kd.Z * (kd.Z.transpose() * w);
        W.col(n) = w;
    }
    kd.P.setZero(2 * D, kd.N0);
    kd.P.topRows(D) = kd.Z;
    kd.P.bottomRows(D) = W;
    kd.lift_resid_mat = t.M * W + t.F * kd.Z;
    kd.lift_residual = kd.lift_resid_mat.colwise().norm();

    // Oracle: SVD kernel of the assembled two-form, with a gap sanity check.
    NullSpaceResult no = null_space(t.omega, tol_rank);
    kd.sv_omega = no.singular_values;
    kd.svd_dim = 2 * D - no.rank;
    double gap = spectral_gap(no.singular_values, no.rank);
    if (kd.svd_dim > 0 && kd.svd_dim < 2 * D && gap < 1e3)
        throw RankInstability("ill-conditioned kernel: no spectral gap at the rank cut");
    kd.ker_omega = no.basis;

    // Reduced-force rank needs an absolute floor tied to the force scale:
    // a roundoff-level Fbar must count as zero.
    kd.dim_cbar = kd.N0 - svd_rank_mixed(kd.Fbar, tol_rank, tol_rank * (1.0 + t.F.norm()));
    kd.predicted_2n0 = 2 * kd.N0;
    kd.predicted_n0_plus_cbar = kd.N0 + kd.dim_cbar;
    kd.count_mismatch = kd.svd_dim != kd.predicted_2n0;
    return kd;
}

KernelData kernel_at(const CompiledLagrangian& sys, const PhasePoint& u, Real tol_rank) {
    return ker_omega_basis(eval_tensors(sys, u), tol_rank);
}

KernelData align_basis(const KernelData& prev, const KernelData& cur) {
    if (prev.N0 != cur.N0)
        throw RankInstability("kernel dimension changed between nearby points");
    KernelData out = cur;
    if (cur.N0 > 0) {
        Eigen::MatrixXd R = procrustes_rotation(cur.Z, prev.Z);
        out.Z = cur.Z * R;
        out.P = cur.P * R;
        out.G = cur.G * R;
        out.theta = R.transpose() * cur.theta;
        out.Fbar = R.transpose() * cur.Fbar * R;
        out.lift_resid_mat = cur.lift_resid_mat * R;
        out.lift_residual = out.lift_resid_mat.colwise().norm();
    }
    if (cur.ker_omega.cols() > 0 && cur.ker_omega.cols() == prev.ker_omega.cols()) {
        Eigen::MatrixXd R2 = procrustes_rotation(cur.ker_omega, prev.ker_omega);
        out.ker_omega = cur.ker_omega * R2;
    }
    return out;
}

KernelData kernel_at_aligned(const CompiledLagrangian& sys, const PhasePoint& u,
                             const KernelData* align_to, Real tol_rank) {
    KernelData kd = kernel_at(sys, u, tol_rank);
    return align_to ? align_basis(*align_to, kd) : kd;
}

Real basis_overlap(const KernelData& a, const KernelData& b) {
    if (a.N0 == 0 || b.N0 == 0) return 1.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.Z.transpose() * b.Z);
    return svd.singularValues().minCoeff();
}

} // namespace lagsym
