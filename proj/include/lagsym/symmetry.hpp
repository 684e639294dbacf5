#ifndef LAGSYM_SYMMETRY_HPP
#define LAGSYM_SYMMETRY_HPP

#include "lagsym/constraints.hpp"

namespace lagsym {

// A classified family of symmetry generators.  Generators live in the
// quotient of the two-form kernel by the vertical ideal and are represented
// by coefficient vectors on the canonical P columns.  Coefficients are
// generally point-dependent (elements of the function algebra, not constants):
// the stored reference coefficients are transported to other points by
// projecting onto the pointwise admissible subspace.
struct GeneratorBasis {
    enum class Kind { Action, ElEquations };
    Kind kind = Kind::Action;
    int dim = 0;
    bool undetermined = false;      // EL classification with unreachable surface
    PhasePoint ref_point;
    KernelData ref_kernel;
    Eigen::MatrixXd coeffs_ref;     // N0 x dim, unit columns
    std::vector<Real> sample_residuals; // per-sample evidence for the span
    int samples_used = 0;
};

// Annihilator-based classification of action symmetries: at each sampled
// point the admissible coefficient space is the null space of the constraint
// pairing row; the generator family dimension is the (majority) pointwise
// dimension.
GeneratorBasis classify_action_symmetries(const CompiledLagrangian& sys,
                                          int samples, std::uint64_t seed,
                                          const ConstraintOptions& opts = {});

// On-shell classification of symmetries of the equations of motion via the
// residual covector r(P) = sum_m (P gamma_m) Theta^m - sum_m <Theta^m|P> d gamma_m.
GeneratorBasis classify_el_symmetries(const CompiledLagrangian& sys,
                                      const ConstraintLedger& ledger,
                                      int samples, std::uint64_t seed,
                                      const ConstraintOptions& opts = {});

// Value of generator k of the basis at u (2D phase-space vector).
Eigen::VectorXd generator_field(const CompiledLagrangian& sys, const GeneratorBasis& basis,
                                int k, const PhasePoint& u,
                                const ConstraintOptions& opts = {});

// The pointwise coefficient vector of generator k at u (on kd's P columns).
Eigen::VectorXd generator_coefficients(const CompiledLagrangian& sys,
                                       const GeneratorBasis& basis, int k,
                                       const PhasePoint& u, const KernelData& kd,
                                       const ConstraintOptions& opts = {});

// Residual matrix of the EL symmetry condition at u: column n is the 2D
// residual covector of the canonical representative P_(n).
Eigen::MatrixXd el_residual_matrix(const CompiledLagrangian& sys, const PhasePoint& u,
                                   const KernelData& kd, const ConstraintOptions& opts = {});

struct SymmetryReport {
    int N0 = 0;
    int dim_sym = 0;
    int dim_symL = 0;
    int I1 = 0;
    int dim_sol = 0;          // free multipliers at n_F
    bool sym_undetermined = false;
    GeneratorBasis symL;
    GeneratorBasis sym;
    ConstraintLedger ledger;
    int ker_svd_dim = 0;
    int predicted_2n0 = 0;
    int predicted_n0_plus_cbar = 0;
    Real lemma_subset_defect = 0.0; // action generators re-tested in the EL residual
    std::uint64_t seed = 0;
    int samples = 0;
};

SymmetryReport symmetry_report(const CompiledLagrangian& sys, int samples,
                               std::uint64_t seed, const ConstraintOptions& opts = {});

} // namespace lagsym

#endif
