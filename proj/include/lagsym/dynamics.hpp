#ifndef LAGSYM_DYNAMICS_HPP
#define LAGSYM_DYNAMICS_HPP

#include "lagsym/symmetry.hpp"

#include <map>

namespace lagsym {

// Free gauge multiplier: scalar function of the phase point; the kernel data
// at that point is passed along so gauges can be written in terms of the
// canonical basis fields.
using GaugeFn = std::function<Real(const PhasePoint&, const KernelData&)>;

// Assembled second-order Euler-Lagrange field: base solution (horizontal part
// exactly v, vertical part minimum-norm), plus algorithm-determined
// multiplier terms, plus user gauge terms on the free kernel directions.
struct Soelvf {
    const CompiledLagrangian* sys = nullptr;
    const ConstraintLedger* ledger = nullptr;
    std::map<int, GaugeFn> gauge; // canonical P index (0-based) -> multiplier
    ConstraintOptions opts;

    // align_to: kernel-basis continuity reference (e.g. previous accepted
    // integration step); out_kd receives the kernel used, when requested.
    Eigen::VectorXd eval(const PhasePoint& u, const KernelData* align_to = nullptr,
                         KernelData* out_kd = nullptr) const;
};

// Validates the gauge choice: supplying a multiplier for a direction the
// algorithm has determined is rejected.
Soelvf assemble_soelvf(const CompiledLagrangian& sys, const ConstraintLedger& ledger,
                       std::map<int, GaugeFn> gauge = {},
                       const ConstraintOptions& opts = {});

struct Trajectory {
    std::vector<Real> times;
    std::vector<PhasePoint> points;
    std::vector<Real> energy;
    std::vector<Real> gamma_max;   // max |gamma| over recorded constraints
    std::vector<Real> overlap;     // kernel-basis overlap with previous step
    bool ok = true;
    std::string message;
    int steps_accepted = 0;
    int steps_rejected = 0;
};

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)); kernel bases are
// aligned step to step; monitors recorded at every accepted step.
Trajectory integrate_flow(const Soelvf& sv, const PhasePoint& u0, Real t_end,
                          Real dt_init = 1e-2, bool project_each_step = false,
                          Real rk_tol = 1e-9);

// One-parameter symmetry flow: integrates du/de = P(u) to e = eps.
PhasePoint symmetry_flow(const CompiledLagrangian& sys, const GeneratorBasis& basis,
                         int k, Real eps, const PhasePoint& u0,
                         const ConstraintOptions& opts = {}, Real rk_tol = 1e-9);

// Generic field flow used by both entry points.
PhasePoint flow_field(const PhaseFn& field, const PhasePoint& u0, Real t_end,
                      Real rk_tol = 1e-9);

// Max over on-shell samples of ||[X,P]' Omega|| / (1 + ||Omega||), the
// two-form pairing of the finite-difference Lie bracket of the assembled
// field with generator k.
Real bracket_residual(const CompiledLagrangian& sys, const Soelvf& sv,
                      const GeneratorBasis& basis, int k,
                      const std::vector<PhasePoint>& onshell_points);

struct OrbitMapResult {
    Real energy_eq_residual = 0.0;  // at the transported endpoint
    Real constraint_violation = 0.0;
    PhasePoint endpoint_direct;     // flow then nothing
    PhasePoint endpoint_transported;// symmetry-map then flow
};

// Transport u0 by the symmetry flow, integrate both points, and certify that
// the transported endpoint still solves the energy equation on the surface.
OrbitMapResult orbit_map_check(const CompiledLagrangian& sys, const Soelvf& sv,
                               const GeneratorBasis& basis, int k, Real eps,
                               const PhasePoint& u0, Real t_end);

} // namespace lagsym

#endif
