#ifndef LAGSYM_CONSTRAINTS_HPP
#define LAGSYM_CONSTRAINTS_HPP

#include "lagsym/fd.hpp"
#include "lagsym/kernel.hpp"
#include "lagsym/sampling.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lagsym {

struct ConstraintOptions {
    Real tol_rank = kTolRank;
    Real eps_id = 1e-8;      // identity threshold for "vanishes identically"
    Real guard_min = kGuardMin;
    int max_order = 10;
    int rank_samples = 8;    // projected points aggregated per rank decision
    int id_samples = 32;     // box samples per triviality decision
    std::uint64_t seed = 1234567;
};

// First-order constraints gamma_n = z_n . (dE/dq + F v) in kd's basis.
Eigen::VectorXd first_order_constraints(const CompiledLagrangian& sys,
                                        const PhasePoint& u, const KernelData& kd);

// Same, with the kernel basis aligned to a reference (for finite differencing
// through the SVD).
Eigen::VectorXd gamma1_at(const CompiledLagrangian& sys, const PhasePoint& u,
                          const KernelData* align_to, Real tol_rank = kTolRank);

struct BetaEval {
    Eigen::VectorXd gamma1;
    Eigen::MatrixXd theta_q;  // N0 x D, rows are the dual covectors
    Eigen::VectorXd beta;     // D-covector sum_n gamma_n theta^n
};
BetaEval beta_form(const CompiledLagrangian& sys, const PhasePoint& u,
                   const KernelData& kd);

// Pairing matrix <d c_k | dir_m> of a vector-valued constraint evaluator with
// a set of phase-space directions (columns), by central differences.
Eigen::MatrixXd pairing_matrix(const PhaseFn& constraints, const PhasePoint& u,
                               const Eigen::MatrixXd& directions);

// Level-1 constraint matrix Gamma_nm = <d gamma_n | P_(m)> at u, in kd's basis.
Eigen::MatrixXd gamma_matrix(const CompiledLagrangian& sys, const PhasePoint& u,
                             const KernelData& kd, Real tol_rank = kTolRank);

// Base second-order field: horizontal part exactly v, vertical part the
// minimum-norm least-squares solution of M a = -(dE/dq + F v).
Eigen::VectorXd base_field(const TensorEval& t, const Eigen::VectorXd& v, Real tol_rank);
Eigen::VectorXd base_field_at(const CompiledLagrangian& sys, const PhasePoint& u,
                              Real tol_rank = kTolRank);

using ConstraintEvaluator = std::function<Eigen::VectorXd(const PhasePoint&)>;

struct OrderRecord {
    int level = 0;
    int n_constraints = 0;        // constraint functions carried at this level
    std::vector<int> nontrivial;  // indices not identically zero on the box
    Eigen::MatrixXd Gamma_ref;    // at the first projected reference point
    int rank = 0;                 // r^[l]
    int independent = 0;          // I_[l]
    Real max_abs_gamma = 0.0;     // over the triviality samples
    Real symmetry_defect = 0.0;   // ||Gamma - Gamma'|| on-shell
};

// Outcome of the order-by-order constraint analysis.  Evaluators capture the
// compiled system by pointer; the system must outlive the ledger.
struct ConstraintLedger {
    int N0 = 0;
    int dim2 = 0;                 // 2D
    std::vector<OrderRecord> orders;
    int n_F = 1;
    std::string termination;      // fixed-point | full-rank | max-order-exceeded
    int free_multipliers = 0;     // N0 - sum of ranks
    bool any_nontrivial = false;
    PhasePoint ref_point;
    KernelData ref_kernel;
    std::vector<PhasePoint> onshell_points; // projected reference samples
    std::vector<ConstraintEvaluator> level_evals; // one per recorded order
    int total_nontrivial() const {
        int n = 0;
        for (const auto& o : orders) n += static_cast<int>(o.nontrivial.size());
        return n;
    }
};

ConstraintLedger run_constraint_algorithm(const CompiledLagrangian& sys,
                                          const std::vector<PhasePoint>& seed_points,
                                          const ConstraintOptions& opts = {});

// Newton projection onto the surface where all nontrivial constraints of
// orders <= order vanish.  Throws EmptySurface after 50 iterations without
// convergence.
PhasePoint project_to_constraint_surface(const CompiledLagrangian& sys,
                                         const ConstraintLedger& ledger,
                                         const PhasePoint& guess, int order,
                                         const ConstraintOptions& opts = {});

// Multiplier components determined by the algorithm, evaluated pointwise at u
// (coefficients on kd's P columns).  Zero vector when nothing is determined.
Eigen::VectorXd determined_coefficients(const CompiledLagrangian& sys,
                                        const ConstraintLedger& ledger,
                                        const PhasePoint& u, const KernelData& kd,
                                        const ConstraintOptions& opts = {});

// Max |gamma| over all recorded nontrivial constraints at u (0 when none).
Real constraint_violation(const CompiledLagrangian& sys, const ConstraintLedger& ledger,
                          const PhasePoint& u);

} // namespace lagsym

#endif
