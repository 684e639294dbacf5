#include "lagsym/compile.hpp"

#include "lagsym/errors.hpp"

#include <cmath>

namespace lagsym {

CompiledLagrangian compile_system(const SystemSpec& spec) {
    if (!spec.lagrangian) throw std::invalid_argument("spec has no Lagrangian");
    const int D = spec.dim;
    CompiledLagrangian sys;
    sys.spec = spec;
    sys.L = simplify(spec.lagrangian);

    sys.dL_dv.resize(D);
    for (int a = 0; a < D; ++a)
        sys.dL_dv[a] = simplify(differentiate(sys.L, Op::Vel, a + 1));

    Expr kin = make_const(0.0);
    for (int a = 0; a < D; ++a)
        kin = s_add(kin, s_mul(make_vel(a + 1), sys.dL_dv[a]));
    sys.energy = simplify(s_sub(kin, sys.L));

    sys.dE_dq.resize(D);
    sys.dE_dv.resize(D);
    for (int a = 0; a < D; ++a) {
        sys.dE_dq[a] = simplify(differentiate(sys.energy, Op::Coord, a + 1));
        sys.dE_dv[a] = simplify(differentiate(sys.energy, Op::Vel, a + 1));
    }

    sys.M.resize(D * D);
    sys.F.resize(D * D);
    std::vector<Expr> dLdv_dq(D * D);
    for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) {
            sys.M[a * D + b] = simplify(differentiate(sys.dL_dv[a], Op::Vel, b + 1));
            dLdv_dq[a * D + b] = differentiate(sys.dL_dv[a], Op::Coord, b + 1);
        }
    for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b)
            sys.F[a * D + b] = simplify(s_sub(dLdv_dq[a * D + b], dLdv_dq[b * D + a]));
    return sys;
}

Real eval_scalar(const CompiledLagrangian& sys, const Expr& e, const PhasePoint& u,
                 EvalCache* cache) {
    return eval_expr(e, std::span<const Real>(u.q.data(), u.q.size()),
                     std::span<const Real>(u.v.data(), u.v.size()), sys.spec.params, cache);
}

Real guard_margin(const CompiledLagrangian& sys, const PhasePoint& u) {
    Real margin = std::numeric_limits<Real>::infinity();
    for (const auto& g : sys.spec.guards) {
        Real val = eval_scalar(sys, g, u);
        if (!std::isfinite(val)) return 0.0;
        margin = std::min(margin, std::abs(val));
    }
    return margin;
}

void check_guards(const CompiledLagrangian& sys, const PhasePoint& u, Real min_mag) {
    if (guard_margin(sys, u) < min_mag)
        throw GuardViolation("phase point too close to a guard's singular set");
}

} // namespace lagsym
