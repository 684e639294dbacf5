#ifndef LAGSYM_FD_HPP
#define LAGSYM_FD_HPP

#include "lagsym/compile.hpp"

#include <functional>

namespace lagsym {

using PhaseFn = std::function<Eigen::VectorXd(const PhasePoint&)>;

inline constexpr Real kFdStep = 1e-5;

inline PhasePoint shift_point(const PhasePoint& u, const Eigen::VectorXd& d, Real t) {
    const int D = static_cast<int>(u.q.size());
    PhasePoint s;
    s.q = u.q + t * d.head(D);
    s.v = u.v + t * d.tail(D);
    return s;
}

// Directional derivative of f along the (unnormalized) phase-space vector d:
// central difference with step 1e-5 * (1 + ||u||) on the normalized direction,
// one Richardson extrapolation.  Constraint evaluators are compositions with
// SVD-derived bases, so everything downstream of the symbolic layer
// differentiates numerically.
Eigen::VectorXd dir_deriv(const PhaseFn& f, const PhasePoint& u, const Eigen::VectorXd& d);

// Full phase-space gradient (length 2D) of a scalar evaluator.
Eigen::VectorXd fd_gradient(const std::function<Real(const PhasePoint&)>& f,
                            const PhasePoint& u);

} // namespace lagsym

#endif
