#include "lagsym/tangent.hpp"

#include "lagsym/errors.hpp"

#include <cmath>

namespace lagsym {

TensorEval eval_tensors(const CompiledLagrangian& sys, const PhasePoint& u, Real guard_min) {
    check_guards(sys, u, guard_min);
    const int D = sys.dim();
    TensorEval t;
    t.M.resize(D, D);
    t.F.resize(D, D);
    t.dE_dq.resize(D);
    t.dE_dv.resize(D);

    EvalCache cache; // one memo per point: M, F, E share subtrees heavily
    t.E = eval_scalar(sys, sys.energy, u, &cache);
    for (int a = 0; a < D; ++a) {
        t.dE_dq[a] = eval_scalar(sys, sys.dE_dq[a], u, &cache);
        t.dE_dv[a] = eval_scalar(sys, sys.dE_dv[a], u, &cache);
        for (int b = 0; b < D; ++b) {
            t.M(a, b) = eval_scalar(sys, sys.M_at(a, b), u, &cache);
            t.F(a, b) = eval_scalar(sys, sys.F_at(a, b), u, &cache);
        }
    }
    if (!t.M.allFinite() || !t.F.allFinite() || !t.dE_dq.allFinite() ||
        !t.dE_dv.allFinite() || !std::isfinite(t.E))
        throw GuardViolation("non-finite tensor evaluation (point near a singular set)");

    // Exact antisymmetry of omega requires exactly symmetric M; symmetrize
    // away the round-off between the two expression forms of M_ab and M_ba.
    t.M = ((t.M + t.M.transpose()) / 2.0).eval();
    t.F = ((t.F - t.F.transpose()) / 2.0).eval();

    t.omega.setZero(2 * D, 2 * D);
    t.omega.topLeftCorner(D, D) = t.F;
    t.omega.topRightCorner(D, D) = t.M;
    t.omega.bottomLeftCorner(D, D) = -t.M;
    return t;
}

Eigen::VectorXd el_residual(const CompiledLagrangian& sys, const PhasePoint& u,
                            const Eigen::VectorXd& accel) {
    TensorEval t = eval_tensors(sys, u);
    return t.dE_dq + t.F * u.v + t.M * accel;
}

Eigen::VectorXd energy_equation_residual(const TensorEval& t, const Eigen::VectorXd& X) {
    const int D = static_cast<int>(t.M.rows());
    Eigen::VectorXd dE(2 * D);
    dE.head(D) = t.dE_dq;
    dE.tail(D) = t.dE_dv;
    // (i_X Omega)_j = X_i Omega_ij
    return dE - t.omega.transpose() * X;
}

Real tensor_scale(const TensorEval& t) {
    Real m = t.M.cwiseAbs().maxCoeff();
    m = std::max(m, t.F.cwiseAbs().maxCoeff());
    m = std::max(m, t.dE_dq.cwiseAbs().maxCoeff());
    m = std::max(m, t.dE_dv.cwiseAbs().maxCoeff());
    m = std::max(m, std::abs(t.E));
    return 1.0 + m;
}

} // namespace lagsym
