#include "lagsym/linalg.hpp"

#include <limits>

namespace lagsym {

void sign_fix_columns(Eigen::MatrixXd& A) {
    for (int j = 0; j < A.cols(); ++j) {
        int imax = 0;
        A.col(j).cwiseAbs().maxCoeff(&imax);
        if (A(imax, j) < 0) A.col(j) = -A.col(j);
    }
}

NullSpaceResult null_space(const Eigen::MatrixXd& A, double tol_rel) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const int n = static_cast<int>(A.cols());
    const int nsv = static_cast<int>(sv.size());
    double smax = nsv > 0 ? sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < nsv; ++i)
        if (sv(i) > tol_rel * smax && sv(i) > 0.0) ++rank;

    NullSpaceResult r;
    r.rank = rank;
    r.singular_values = sv;
    // Null space: trailing V columns (smallest sigmas), plus any columns with
    // no singular value at all (when rows < cols).
    r.basis = A.rows() > 0 ? Eigen::MatrixXd(svd.matrixV().rightCols(n - rank))
                           : Eigen::MatrixXd::Identity(n, n);
    sign_fix_columns(r.basis);
    return r;
}

int svd_rank(const Eigen::MatrixXd& A, double tol_rel) {
    if (A.rows() == 0 || A.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    double smax = sv.size() > 0 ? sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol_rel * smax && sv(i) > 0.0) ++rank;
    return rank;
}

int svd_rank_mixed(const Eigen::MatrixXd& A, double rel, double abs_floor) {
    if (A.rows() == 0 || A.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    double smax = sv.size() > 0 ? sv(0) : 0.0;
    double thresh = std::max(rel * smax, abs_floor);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++rank;
    return rank;
}

Eigen::MatrixXd pinv_rank(const Eigen::MatrixXd& A, int rank) {
    if (rank <= 0) return Eigen::MatrixXd::Zero(A.cols(), A.rows());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    rank = std::min<int>(rank, static_cast<int>(sv.size()));
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (int i = 0; i < rank; ++i)
        if (sv(i) > 0.0) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::VectorXd lstsq_minnorm(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              double tol_rel) {
    return pinv_rank(A, svd_rank(A, tol_rel)) * b;
}

Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& cur, const Eigen::MatrixXd& prev) {
    Eigen::MatrixXd C = cur.transpose() * prev;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

double spectral_gap(const Eigen::VectorXd& sv, int rank) {
    const int n = static_cast<int>(sv.size());
    if (rank <= 0 || rank >= n) return std::numeric_limits<double>::infinity();
    double kept = sv(rank - 1);
    double disc = sv(rank);
    if (disc <= 0.0) return std::numeric_limits<double>::infinity();
    return kept / disc;
}

} // namespace lagsym
