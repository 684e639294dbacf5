#ifndef LAGSYM_LINALG_HPP
#define LAGSYM_LINALG_HPP

#include <Eigen/Dense>

namespace lagsym {

struct NullSpaceResult {
    Eigen::MatrixXd basis;        // orthonormal columns, deterministic signs
    int rank = 0;
    Eigen::VectorXd singular_values; // descending
};

// Right null space with relative threshold: sigma <= tol_rel * sigma_max.
// Columns are ordered by descending associated singular value and sign-fixed
// (first component of largest magnitude made positive).
NullSpaceResult null_space(const Eigen::MatrixXd& A, double tol_rel);

int svd_rank(const Eigen::MatrixXd& A, double tol_rel);

// Rank with a mixed threshold: sigma > max(rel * sigma_max, abs_floor).
int svd_rank_mixed(const Eigen::MatrixXd& A, double rel, double abs_floor);

// Moore-Penrose pseudoinverse truncated at the given rank.
Eigen::MatrixXd pinv_rank(const Eigen::MatrixXd& A, int rank);

// Minimum-norm least-squares solution of A x = b with relative rank cut.
Eigen::VectorXd lstsq_minnorm(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              double tol_rel);

// Orthogonal matrix R minimizing ||cur * R - prev||_F (polar factor of
// cur' * prev); used to align SVD-derived bases between nearby points.
Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& cur, const Eigen::MatrixXd& prev);

// Ratio sigma_kept_min / sigma_discarded_max at the rank cut; +inf when
// nothing is discarded or the discarded part is exactly zero.
double spectral_gap(const Eigen::VectorXd& descending_sigmas, int rank);

void sign_fix_columns(Eigen::MatrixXd& A);

} // namespace lagsym

#endif
