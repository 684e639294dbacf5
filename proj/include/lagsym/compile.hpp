#ifndef LAGSYM_COMPILE_HPP
#define LAGSYM_COMPILE_HPP

#include "lagsym/expr.hpp"
#include "lagsym/parser.hpp"

#include <Eigen/Dense>

namespace lagsym {

struct PhasePoint {
    Eigen::VectorXd q;
    Eigen::VectorXd v;
};

// All symbolic derivatives of L needed downstream; every field is produced by
// differentiate(), never entered by hand.  Matrices are stored row-major as
// flat vectors of length D*D.
struct CompiledLagrangian {
    SystemSpec spec;
    Expr L;
    std::vector<Expr> dL_dv;   // momentum form components
    Expr energy;               // E = v . dL/dv - L
    std::vector<Expr> dE_dq;
    std::vector<Expr> dE_dv;
    std::vector<Expr> M;       // d2L/dv dv
    std::vector<Expr> F;       // d2L/dv dq - transpose

    int dim() const { return spec.dim; }
    const Expr& M_at(int a, int b) const { return M[a * spec.dim + b]; }
    const Expr& F_at(int a, int b) const { return F[a * spec.dim + b]; }
};

CompiledLagrangian compile_system(const SystemSpec& spec);

// Scalar evaluation at a phase point (no guard checking).
Real eval_scalar(const CompiledLagrangian& sys, const Expr& e, const PhasePoint& u,
                 EvalCache* cache = nullptr);

// Smallest guard magnitude at u (+infinity when no guards are declared).
Real guard_margin(const CompiledLagrangian& sys, const PhasePoint& u);

// Throws GuardViolation when a guard magnitude falls below min_mag or any
// guard evaluates non-finite.
void check_guards(const CompiledLagrangian& sys, const PhasePoint& u, Real min_mag);

} // namespace lagsym

#endif
