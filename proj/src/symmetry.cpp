#include "lagsym/symmetry.hpp"

#include "lagsym/errors.hpp"

#include <algorithm>
#include <map>

namespace lagsym {

namespace {

// Rank-truncated right null space with deterministic signs.
Eigen::MatrixXd null_cols(const Eigen::MatrixXd& A, int rank) {
    const int n = static_cast<int>(A.cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    Eigen::MatrixXd N = svd.matrixV().rightCols(n - rank);
    sign_fix_columns(N);
    return N;
}

int majority(const std::vector<int>& vals) {
    std::map<int, int> counts;
    for (int v : vals) counts[v]++;
    int best = vals.front(), best_count = 0;
    for (const auto& [v, c] : counts)
        if (c > best_count || (c == best_count && v < best)) {
            best = v;
            best_count = c;
        }
    return best;
}

} // namespace

GeneratorBasis classify_action_symmetries(const CompiledLagrangian& sys,
                                          int samples, std::uint64_t seed,
                                          const ConstraintOptions& opts) {
    if (samples < 16)
        throw std::invalid_argument("classification needs at least 16 samples");
    Sampler sampler(sys, seed, opts.guard_min);
    std::vector<PhasePoint> pts = sampler.sample_n(samples);

    GeneratorBasis basis;
    basis.kind = GeneratorBasis::Kind::Action;
    basis.ref_point = pts.front();
    basis.ref_kernel = kernel_at(sys, basis.ref_point, opts.tol_rank);
    basis.samples_used = samples;
    const int N0 = basis.ref_kernel.N0;
    if (N0 == 0) return basis;

    std::vector<Eigen::VectorXd> gammas;
    Real scale = 1.0;
    for (const auto& p : pts) {
        gammas.push_back(gamma1_at(sys, p, &basis.ref_kernel, opts.tol_rank));
        scale = std::max(scale, 1.0 + gammas.back().cwiseAbs().maxCoeff());
    }

    // Pointwise admissible coefficient dimension: the annihilator of the
    // constraint row (all of it where the constraints vanish).
    std::vector<int> dims;
    for (const auto& g : gammas)
        dims.push_back(g.cwiseAbs().maxCoeff() <= opts.eps_id * scale ? N0 : N0 - 1);
    basis.dim = majority(dims);

    std::size_t ref_i = 0;
    while (ref_i < dims.size() && dims[ref_i] != basis.dim) ++ref_i;
    if (ref_i == dims.size()) ref_i = 0;
    basis.ref_point = pts[ref_i];
    basis.ref_kernel = kernel_at(sys, basis.ref_point, opts.tol_rank);
    basis.coeffs_ref =
        basis.dim == N0
            ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(N0, N0))
            : null_cols(Eigen::MatrixXd(gammas[ref_i].transpose()), N0 - basis.dim);

    // Evidence: the transported coefficients annihilate the constraint row at
    // every sample.
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Real worst = 0.0;
        Eigen::MatrixXd N =
            dims[i] == N0 ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(N0, N0))
                          : null_cols(Eigen::MatrixXd(gammas[i].transpose()), 1);
        for (int k = 0; k < basis.dim; ++k) {
            Eigen::VectorXd c = N * (N.transpose() * basis.coeffs_ref.col(k));
            Real nn = c.norm();
            if (nn > 1e-8) c /= nn;
            worst = std::max(worst, std::abs(gammas[i].dot(c)) / scale);
        }
        basis.sample_residuals.push_back(worst);
    }
    return basis;
}

Eigen::MatrixXd el_residual_matrix(const CompiledLagrangian& sys, const PhasePoint& u,
                                   const KernelData& kd, const ConstraintOptions& opts) {
    const int D = kd.D;
    const int N0 = kd.N0;
    Eigen::MatrixXd Gamma = gamma_matrix(sys, u, kd, opts.tol_rank);

    PhaseFn gamma_fn = [&](const PhasePoint& p) {
        return gamma1_at(sys, p, &kd, opts.tol_rank);
    };
    Eigen::MatrixXd Jg(N0, 2 * D);
    for (int c = 0; c < 2 * D; ++c) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(2 * D);
        e(c) = 1.0;
        Jg.col(c) = dir_deriv(gamma_fn, u, e);
    }

    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(2 * D, N0);
    for (int n = 0; n < N0; ++n) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * D);
        for (int m = 0; m < N0; ++m)
            r.head(D) += Gamma(m, n) * kd.theta.row(m).transpose();
        r -= Jg.row(n).transpose();
        R.col(n) = r;
    }
    return R;
}

GeneratorBasis classify_el_symmetries(const CompiledLagrangian& sys,
                                      const ConstraintLedger& ledger,
                                      int samples, std::uint64_t seed,
                                      const ConstraintOptions& opts) {
    if (samples < 16)
        throw std::invalid_argument("classification needs at least 16 samples");
    Sampler sampler(sys, seed, opts.guard_min);

    GeneratorBasis basis;
    basis.kind = GeneratorBasis::Kind::ElEquations;
    basis.ref_kernel = ledger.ref_kernel;
    basis.ref_point = ledger.ref_point;
    const int N0 = ledger.N0;
    if (N0 == 0) return basis;

    // The EL symmetry condition is tested on the constraint surface.
    std::vector<PhasePoint> pts;
    if (ledger.any_nontrivial) {
        for (int tries = 0; tries < 6 * samples &&
                            static_cast<int>(pts.size()) < samples; ++tries) {
            try {
                pts.push_back(project_to_constraint_surface(
                    sys, ledger, sampler.sample(), ledger.n_F, opts));
            } catch (const EmptySurface&) {
            }
        }
        if (static_cast<int>(pts.size()) < 8) {
            basis.undetermined = true;
            return basis;
        }
    } else {
        pts = sampler.sample_n(samples);
    }
    basis.samples_used = static_cast<int>(pts.size());

    std::vector<Eigen::MatrixXd> Rs;
    Real scale = 1.0;
    for (const auto& p : pts) {
        KernelData kd = kernel_at_aligned(sys, p, &ledger.ref_kernel, opts.tol_rank);
        Rs.push_back(el_residual_matrix(sys, p, kd, opts));
        scale = std::max(scale, 1.0 + Rs.back().cwiseAbs().maxCoeff());
    }

    std::vector<int> dims;
    for (const auto& R : Rs) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
        int nz = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > opts.eps_id * scale) ++nz;
        dims.push_back(N0 - nz);
    }
    basis.dim = majority(dims);

    std::size_t ref_i = 0;
    while (ref_i < dims.size() && dims[ref_i] != basis.dim) ++ref_i;
    if (ref_i == dims.size()) ref_i = 0;
    basis.ref_point = pts[ref_i];
    basis.ref_kernel = kernel_at_aligned(sys, basis.ref_point, &ledger.ref_kernel,
                                         opts.tol_rank);
    basis.coeffs_ref = basis.dim > 0
                           ? null_cols(Rs[ref_i], N0 - basis.dim)
                           : Eigen::MatrixXd(N0, 0);

    for (std::size_t i = 0; i < pts.size(); ++i) {
        Real worst = 0.0;
        Eigen::MatrixXd N = null_cols(Rs[i], N0 - basis.dim);
        for (int k = 0; k < basis.dim; ++k) {
            Eigen::VectorXd c = N * (N.transpose() * basis.coeffs_ref.col(k));
            Real nn = c.norm();
            if (nn > 1e-8) c /= nn;
            worst = std::max(worst, (Rs[i] * c).norm() / scale);
        }
        basis.sample_residuals.push_back(worst);
    }
    return basis;
}

Eigen::VectorXd generator_coefficients(const CompiledLagrangian& sys,
                                       const GeneratorBasis& basis, int k,
                                       const PhasePoint& u, const KernelData& kd,
                                       const ConstraintOptions& opts) {
    const int N0 = kd.N0;
    if (k < 0 || k >= basis.dim)
        throw std::out_of_range("generator index out of range");
    Eigen::MatrixXd N;
    if (basis.dim == N0) {
        N = Eigen::MatrixXd::Identity(N0, N0);
    } else if (basis.kind == GeneratorBasis::Kind::Action) {
        Eigen::VectorXd g = first_order_constraints(sys, u, kd);
        if (g.cwiseAbs().maxCoeff() <= opts.eps_id) {
            // On the constraint surface the row itself vanishes; the limiting
            // annihilator comes from the gamma Jacobian, whose row space there
            // collapses to the single defining-function direction.
            PhaseFn gf = [&](const PhasePoint& p) {
                return gamma1_at(sys, p, &kd, opts.tol_rank);
            };
            Eigen::MatrixXd Jg(N0, 2 * static_cast<int>(u.q.size()));
            for (int c = 0; c < Jg.cols(); ++c) {
                Eigen::VectorXd e = Eigen::VectorXd::Zero(Jg.cols());
                e(c) = 1.0;
                Jg.col(c) = dir_deriv(gf, u, e);
            }
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jg, Eigen::ComputeFullU);
            if (svd.singularValues()(0) <= 1e-6) {
                N = Eigen::MatrixXd::Identity(N0, N0); // truly trivial row
            } else {
                Eigen::MatrixXd row = svd.matrixU().col(0).transpose();
                N = null_cols(row, 1);
                if (N.cols() > basis.dim) N = N.rightCols(basis.dim).eval();
            }
        } else {
            N = null_cols(Eigen::MatrixXd(g.transpose()), 1);
            if (N.cols() > basis.dim) N = N.rightCols(basis.dim).eval();
        }
    } else {
        Eigen::MatrixXd R = el_residual_matrix(sys, u, kd, opts);
        N = null_cols(R, N0 - basis.dim);
    }
    Eigen::VectorXd c = N * (N.transpose() * basis.coeffs_ref.col(k));
    Real nn = c.norm();
    if (nn > 1e-10) c /= nn;
    return c;
}

Eigen::VectorXd generator_field(const CompiledLagrangian& sys, const GeneratorBasis& basis,
                                int k, const PhasePoint& u, const ConstraintOptions& opts) {
    KernelData kd = kernel_at_aligned(sys, u, &basis.ref_kernel, opts.tol_rank);
    return kd.P * generator_coefficients(sys, basis, k, u, kd, opts);
}

SymmetryReport symmetry_report(const CompiledLagrangian& sys, int samples,
                               std::uint64_t seed, const ConstraintOptions& opts) {
    ConstraintOptions o = opts;
    o.seed = seed;
    Sampler sampler(sys, seed, o.guard_min);
    std::vector<PhasePoint> seeds = sampler.sample_n(std::max(samples, 16));

    SymmetryReport rep;
    rep.seed = seed;
    rep.samples = samples;
    rep.ledger = run_constraint_algorithm(sys, seeds, o);
    rep.N0 = rep.ledger.N0;
    rep.symL = classify_action_symmetries(sys, samples, seed + 1, o);
    rep.sym = classify_el_symmetries(sys, rep.ledger, samples, seed + 2, o);
    rep.dim_symL = rep.symL.dim;
    rep.dim_sym = rep.sym.dim;
    rep.sym_undetermined = rep.sym.undetermined;
    rep.I1 = rep.ledger.orders.empty() ? 0 : rep.ledger.orders.front().independent;
    rep.dim_sol = rep.ledger.free_multipliers;
    rep.ker_svd_dim = rep.ledger.ref_kernel.svd_dim;
    rep.predicted_2n0 = rep.ledger.ref_kernel.predicted_2n0;
    rep.predicted_n0_plus_cbar = rep.ledger.ref_kernel.predicted_n0_plus_cbar;

    // Action generators must also pass the on-shell EL test (subset relation).
    Real defect = 0.0;
    if (rep.N0 > 0 && !rep.ledger.onshell_points.empty()) {
        for (const auto& p : rep.ledger.onshell_points) {
            KernelData kd = kernel_at_aligned(sys, p, &rep.ledger.ref_kernel, o.tol_rank);
            Eigen::MatrixXd R = el_residual_matrix(sys, p, kd, o);
            for (int k = 0; k < rep.symL.dim; ++k) {
                Eigen::VectorXd c = generator_coefficients(sys, rep.symL, k, p, kd, o);
                defect = std::max(defect,
                                  (R * c).norm() / (1.0 + R.cwiseAbs().maxCoeff()));
            }
        }
    }
    rep.lemma_subset_defect = defect;
    return rep;
}

} // namespace lagsym
