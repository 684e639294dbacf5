#include "lagsym/fd.hpp"

namespace lagsym {

namespace {

Real point_norm(const PhasePoint& u) {
    return std::sqrt(u.q.squaredNorm() + u.v.squaredNorm());
}

} // namespace

Eigen::VectorXd dir_deriv(const PhaseFn& f, const PhasePoint& u, const Eigen::VectorXd& d) {
    Real dn = d.norm();
    if (dn == 0.0) return Eigen::VectorXd::Zero(f(u).size());
    Eigen::VectorXd dir = d / dn;
    Real h = kFdStep * (1.0 + point_norm(u));

    auto central = [&](Real step) {
        return Eigen::VectorXd(
            (f(shift_point(u, dir, step)) - f(shift_point(u, dir, -step))) / (2.0 * step));
    };
    Eigen::VectorXd d1 = central(h);
    Eigen::VectorXd d2 = central(h / 2.0);
    return dn * (4.0 * d2 - d1) / 3.0;
}

Eigen::VectorXd fd_gradient(const std::function<Real(const PhasePoint&)>& f,
                            const PhasePoint& u) {
    const int D = static_cast<int>(u.q.size());
    Eigen::VectorXd g(2 * D);
    PhaseFn wrapped = [&](const PhasePoint& p) {
        Eigen::VectorXd r(1);
        r(0) = f(p);
        return r;
    };
    for (int i = 0; i < 2 * D; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(2 * D);
        e(i) = 1.0;
        g(i) = dir_deriv(wrapped, u, e)(0);
    }
    return g;
}

} // namespace lagsym
