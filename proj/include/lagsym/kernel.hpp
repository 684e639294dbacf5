#ifndef LAGSYM_KERNEL_HPP
#define LAGSYM_KERNEL_HPP

#include "lagsym/linalg.hpp"
#include "lagsym/tangent.hpp"

namespace lagsym {

inline constexpr Real kTolRank = 1e-9;

// Kernel structure of the two-form at one phase point.
//
//   Z         D x N0   orthonormal null basis of M
//   Fbar      N0 x N0  reduced force matrix Z' F Z
//   theta     N0 x D   dual covectors: theta * Z = I (pseudoinverse rows)
//   G         2D x N0  vertical lifts (0, z_n) — exact kernel members
//   P         2D x N0  quotient representatives (z_n, w_n), M w_n = -F z_n
//                      least squares, w_n orthogonal to span Z
//   ker_omega 2D x k   SVD null basis of omega (the oracle)
//
// lift_residual(n) = ||M w_n + F z_n||; nonzero residual means the
// constructed lift is only approximate (reported as data, not an error).
struct KernelData {
    int D = 0;
    int N0 = 0;
    Eigen::MatrixXd Z;
    Eigen::MatrixXd Fbar;
    Eigen::MatrixXd theta;
    Eigen::MatrixXd G;
    Eigen::MatrixXd P;
    Eigen::MatrixXd ker_omega;
    Eigen::MatrixXd lift_resid_mat; // M W + F Z, transforms linearly under remixing
    Eigen::VectorXd lift_residual;
    Eigen::VectorXd sv_M;
    Eigen::VectorXd sv_omega;
    int svd_dim = 0;       // dim ker omega per the SVD oracle
    int dim_cbar = 0;      // dim of the liftable horizontal directions (null Fbar)
    int predicted_2n0 = 0;
    int predicted_n0_plus_cbar = 0;
    bool count_mismatch = false; // oracle disagrees with 2*N0
};

// Orthonormal null basis of the mass matrix.
NullSpaceResult null_basis(const Eigen::MatrixXd& M, Real tol_rank);

Eigen::MatrixXd reduced_force(const Eigen::MatrixXd& F, const Eigen::MatrixXd& Z);

// Full kernel structure; throws RankInstability when the omega spectrum has
// no factor-1e3 gap at the cut.
KernelData ker_omega_basis(const TensorEval& t, Real tol_rank);

// Convenience: tensors + kernel at a point.
KernelData kernel_at(const CompiledLagrangian& sys, const PhasePoint& u,
                     Real tol_rank = kTolRank);

// Remix cur's bases by orthogonal transformations to maximize overlap with
// prev (continuity of basis fields along flows).  Throws RankInstability on
// N0 mismatch.
KernelData align_basis(const KernelData& prev, const KernelData& cur);

KernelData kernel_at_aligned(const CompiledLagrangian& sys, const PhasePoint& u,
                             const KernelData* align_to, Real tol_rank = kTolRank);

// Smallest principal-overlap singular value between the two Z bases.
Real basis_overlap(const KernelData& a, const KernelData& b);

} // namespace lagsym

#endif
