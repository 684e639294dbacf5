#ifndef LAGSYM_TANGENT_HPP
#define LAGSYM_TANGENT_HPP

#include "lagsym/compile.hpp"

namespace lagsym {

// Phase-space tensors at a point.  omega is the 2D x 2D block matrix
//   [[ F,  M ],
//    [ -M, 0 ]]
// so that Omega(X, Y) = Xq' F Yq + Xq' M Yv - Yq' M Xv (M symmetric makes it
// antisymmetric).  The q/v block split is the horizontal/vertical split.
struct TensorEval {
    Eigen::MatrixXd M;
    Eigen::MatrixXd F;
    Real E = 0.0;
    Eigen::VectorXd dE_dq;
    Eigen::VectorXd dE_dv;
    Eigen::MatrixXd omega;
};

// Default minimum guard magnitude for admissibility (sampling / acceptance).
inline constexpr Real kGuardMin = 1e-3;

// Evaluation tolerates half the sampling margin: finite-difference probes step
// O(1e-5) away from an accepted point and must stay evaluable.
inline constexpr Real kGuardEval = kGuardMin / 2;

TensorEval eval_tensors(const CompiledLagrangian& sys, const PhasePoint& u,
                        Real guard_min = kGuardEval);

// Euler-Lagrange residual Delta_a = dE/dq_a + F_ab v_b + M_ab accel_b;
// zero iff (u, accel) lies on the Euler-Lagrange surface.
Eigen::VectorXd el_residual(const CompiledLagrangian& sys, const PhasePoint& u,
                            const Eigen::VectorXd& accel);

// Residual covector of the energy equation dE = i_X Omega for the field
// value X (2D components, horizontal first).
Eigen::VectorXd energy_equation_residual(const TensorEval& t, const Eigen::VectorXd& X);

// scale = 1 + max |entries involved|, the uniform relative/absolute mix used
// by the tolerance checks.
Real tensor_scale(const TensorEval& t);

} // namespace lagsym

#endif
