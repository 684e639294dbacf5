#include "lagsym/constraints.hpp"

#include "lagsym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace lagsym {

namespace {

// Rank thresholds for finite-difference-built matrices: FD noise sits around
// 1e-9 for O(1) data, genuine entries in the examples are O(0.1)..O(10).
int fd_rank(const Eigen::MatrixXd& A) {
    if (A.rows() == 0 || A.cols() == 0) return 0;
    return svd_rank_mixed(A, 1e-6, 1e-6 * (1.0 + A.cwiseAbs().maxCoeff()));
}

// Rank-truncated right null space (always cols - rank columns, sign-fixed).
Eigen::MatrixXd null_cols(const Eigen::MatrixXd& A, int rank) {
    const int n = static_cast<int>(A.cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    Eigen::MatrixXd N = svd.matrixV().rightCols(n - rank);
    sign_fix_columns(N);
    return N;
}

// Rank-truncated left null space (rows - rank columns).
Eigen::MatrixXd left_null_cols(const Eigen::MatrixXd& A, int rank) {
    const int m = static_cast<int>(A.rows());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU);
    Eigen::MatrixXd N = svd.matrixU().rightCols(m - rank);
    sign_fix_columns(N);
    return N;
}

Eigen::MatrixXd aligned_to(const Eigen::MatrixXd& cur, const Eigen::MatrixXd& ref) {
    if (cur.cols() == 0 || ref.cols() != cur.cols()) return cur;
    return cur * procrustes_rotation(cur, ref);
}

ConstraintEvaluator restrict_eval(ConstraintEvaluator eval, std::vector<int> idx) {
    return [eval = std::move(eval), idx = std::move(idx)](const PhasePoint& u) {
        Eigen::VectorXd full = eval(u);
        Eigen::VectorXd out(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) out(i) = full(idx[i]);
        return out;
    };
}

// Stream of admissible candidate points: caller-provided seeds first, then
// fresh samples.
class PointStream {
public:
    PointStream(const CompiledLagrangian& sys, const std::vector<PhasePoint>& seeds,
                const ConstraintOptions& opts)
        : sys_(&sys), seeds_(&seeds), sampler_(sys, opts.seed, opts.guard_min),
          guard_min_(opts.guard_min) {}

    PhasePoint next() {
        while (i_ < seeds_->size()) {
            const PhasePoint& p = (*seeds_)[i_++];
            if (admissible(*sys_, p, guard_min_)) return p;
        }
        return sampler_.sample();
    }

private:
    const CompiledLagrangian* sys_;
    const std::vector<PhasePoint>* seeds_;
    Sampler sampler_;
    Real guard_min_;
    std::size_t i_ = 0;
};

std::optional<PhasePoint> newton_project(const CompiledLagrangian& sys,
                                         const ConstraintEvaluator& constraints,
                                         const PhasePoint& guess,
                                         const ConstraintOptions& opts,
                                         bool require_box = true) {
    const int D = sys.dim();
    PhasePoint u = guess;
    auto safe_eval = [&](const PhasePoint& p) -> std::optional<Eigen::VectorXd> {
        if (!admissible(sys, p, opts.guard_min)) return std::nullopt;
        try {
            return constraints(p);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };
    auto g0 = safe_eval(u);
    if (!g0) return std::nullopt;
    Eigen::VectorXd g = *g0;

    for (int iter = 0; iter < 50; ++iter) {
        Real scale = 1.0 + std::max(u.q.cwiseAbs().maxCoeff(), u.v.cwiseAbs().maxCoeff());
        if (g.cwiseAbs().maxCoeff() <= 1e-10 * scale) {
            if (require_box && !in_box(sys, u)) return std::nullopt;
            return u;
        }

        Eigen::MatrixXd J(g.size(), 2 * D);
        for (int i = 0; i < 2 * D; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(2 * D);
            e(i) = 1.0;
            J.col(i) = dir_deriv(constraints, u, e);
        }
        Eigen::VectorXd du = -pinv_rank(J, fd_rank(J)) * g;
        if (!du.allFinite() || du.norm() == 0.0) return std::nullopt;

        Real t = 1.0;
        bool improved = false;
        for (int bt = 0; bt < 6; ++bt, t /= 2.0) {
            PhasePoint trial = shift_point(u, du, t);
            auto gt = safe_eval(trial);
            if (gt && gt->cwiseAbs().maxCoeff() < g.cwiseAbs().maxCoeff()) {
                u = trial;
                g = *gt;
                improved = true;
                break;
            }
        }
        if (!improved) return std::nullopt;
    }
    return std::nullopt;
}

} // namespace

Eigen::VectorXd first_order_constraints(const CompiledLagrangian& sys,
                                        const PhasePoint& u, const KernelData& kd) {
    TensorEval t = eval_tensors(sys, u);
    return kd.Z.transpose() * (t.dE_dq + t.F * u.v);
}

Eigen::VectorXd gamma1_at(const CompiledLagrangian& sys, const PhasePoint& u,
                          const KernelData* align_to, Real tol_rank) {
    TensorEval t = eval_tensors(sys, u);
    KernelData kd = ker_omega_basis(t, tol_rank);
    if (align_to) kd = align_basis(*align_to, kd);
    return kd.Z.transpose() * (t.dE_dq + t.F * u.v);
}

BetaEval beta_form(const CompiledLagrangian& sys, const PhasePoint& u,
                   const KernelData& kd) {
    BetaEval b;
    b.gamma1 = first_order_constraints(sys, u, kd);
    b.theta_q = kd.theta;
    b.beta = kd.theta.transpose() * b.gamma1;
    return b;
}

Eigen::MatrixXd pairing_matrix(const PhaseFn& constraints, const PhasePoint& u,
                               const Eigen::MatrixXd& directions) {
    Eigen::VectorXd probe = constraints(u);
    Eigen::MatrixXd G(probe.size(), directions.cols());
    for (int m = 0; m < directions.cols(); ++m)
        G.col(m) = dir_deriv(constraints, u, directions.col(m));
    return G;
}

Eigen::MatrixXd gamma_matrix(const CompiledLagrangian& sys, const PhasePoint& u,
                             const KernelData& kd, Real tol_rank) {
    PhaseFn f = [&sys, &kd, tol_rank](const PhasePoint& p) {
        return gamma1_at(sys, p, &kd, tol_rank);
    };
    return pairing_matrix(f, u, kd.P);
}

Eigen::VectorXd base_field(const TensorEval& t, const Eigen::VectorXd& v, Real tol_rank) {
    const int D = static_cast<int>(t.M.rows());
    Eigen::VectorXd X(2 * D);
    X.head(D) = v;
    X.tail(D) = lstsq_minnorm(t.M, Eigen::VectorXd(-(t.dE_dq + t.F * v)), tol_rank);
    return X;
}

Eigen::VectorXd base_field_at(const CompiledLagrangian& sys, const PhasePoint& u,
                              Real tol_rank) {
    return base_field(eval_tensors(sys, u), u.v, tol_rank);
}

ConstraintLedger run_constraint_algorithm(const CompiledLagrangian& sys,
                                          const std::vector<PhasePoint>& seed_points,
                                          const ConstraintOptions& opts) {
    const int D = sys.dim();
    ConstraintLedger led;
    led.dim2 = 2 * D;

    PointStream stream(sys, seed_points, opts);
    led.ref_point = stream.next();
    led.ref_kernel = kernel_at(sys, led.ref_point, opts.tol_rank);
    led.N0 = led.ref_kernel.N0;

    if (led.N0 == 0) {
        led.n_F = 1;
        led.termination = "fixed-point";
        led.free_multipliers = 0;
        return led;
    }

    const CompiledLagrangian* sysp = &sys;
    auto ref_kd = std::make_shared<KernelData>(led.ref_kernel);
    const Real tol = opts.tol_rank;

    // Current level state.
    ConstraintEvaluator cur_eval = [sysp, ref_kd, tol](const PhasePoint& u) {
        return gamma1_at(*sysp, u, ref_kd.get(), tol);
    };
    int cur_count = led.N0;
    // Coefficient basis (on the canonical P columns) of directions still free.
    std::function<Eigen::MatrixXd(const PhasePoint&)> free_dirs =
        [N0 = led.N0](const PhasePoint&) { return Eigen::MatrixXd::Identity(N0, N0); };
    int n_free = led.N0;
    // Field carrying the determinations made so far.
    std::function<Eigen::VectorXd(const PhasePoint&)> field =
        [sysp, tol](const PhasePoint& u) { return base_field_at(*sysp, u, tol); };

    std::vector<ConstraintEvaluator> projection_stack; // restricted nontrivial evals
    int I_prev = 0;
    int cum_rank = 0;
    Real gscale = 0.0; // largest constraint magnitude seen at any level

    auto make_stacked = [](std::vector<ConstraintEvaluator> stack) {
        return [stack = std::move(stack)](const PhasePoint& u) {
            std::vector<Eigen::VectorXd> parts;
            int total = 0;
            for (const auto& e : stack) {
                parts.push_back(e(u));
                total += static_cast<int>(parts.back().size());
            }
            Eigen::VectorXd out(total);
            int at = 0;
            for (const auto& p : parts) {
                out.segment(at, p.size()) = p;
                at += static_cast<int>(p.size());
            }
            return out;
        };
    };

    for (int level = 1; level <= opts.max_order; ++level) {
        OrderRecord rec;
        rec.level = level;
        rec.n_constraints = cur_count;
        led.level_evals.push_back(cur_eval);

        // Triviality scan.  Level 1 scans the whole domain box; later levels
        // scan the previous level's constraint surface — the tangency
        // condition that generates them only holds there.
        Real gmax = 0.0;
        std::vector<PhasePoint> box_pts;
        const int want = projection_stack.empty()
                             ? opts.id_samples
                             : std::max(2 * opts.rank_samples, 16);
        if (projection_stack.empty()) {
            for (int i = 0; i < want; ++i) box_pts.push_back(stream.next());
        } else {
            auto prev_surface = make_stacked(projection_stack);
            for (int tries = 0; tries < 8 * want &&
                                static_cast<int>(box_pts.size()) < want; ++tries) {
                auto p = newton_project(sys, prev_surface, stream.next(), opts);
                if (p) box_pts.push_back(*p);
            }
            if (box_pts.empty())
                throw EmptySurface("constraint surface not found: Newton projection "
                                   "failed from every sampled guess at order " +
                                   std::to_string(level));
        }
        Eigen::MatrixXd vals(cur_count, box_pts.size());
        for (std::size_t i = 0; i < box_pts.size(); ++i)
            vals.col(i) = cur_count > 0 ? cur_eval(box_pts[i]) : Eigen::VectorXd(0);
        if (cur_count > 0 && !box_pts.empty()) gmax = vals.cwiseAbs().maxCoeff();
        rec.max_abs_gamma = gmax;
        // Threshold scale carries over from earlier levels: a level whose
        // values are pure evaluation noise must not set its own scale.
        gscale = std::max(gscale, gmax);
        Real thresh = opts.eps_id * (1.0 + gscale);
        for (int n = 0; n < cur_count; ++n)
            if (cur_count > 0 && vals.row(n).cwiseAbs().maxCoeff() > thresh)
                rec.nontrivial.push_back(n);

        if (rec.nontrivial.empty()) {
            rec.rank = 0;
            rec.independent = I_prev;
            led.orders.push_back(rec);
            led.n_F = level;
            led.termination = "fixed-point";
            if (led.onshell_points.empty())
                led.onshell_points.assign(box_pts.begin(),
                                          box_pts.begin() + std::min<std::size_t>(
                                              box_pts.size(), opts.rank_samples));
            break;
        }
        led.any_nontrivial = true;
        projection_stack.push_back(restrict_eval(cur_eval, rec.nontrivial));

        // Stacked nontrivial constraints through this level.
        auto stacked = make_stacked(projection_stack);

        // Project a batch of points onto the current constraint surface.
        std::vector<PhasePoint> projected;
        for (int tries = 0; tries < 8 * opts.rank_samples &&
                            static_cast<int>(projected.size()) < opts.rank_samples;
             ++tries) {
            auto p = newton_project(sys, stacked, stream.next(), opts);
            if (p) projected.push_back(*p);
        }
        if (projected.empty())
            throw EmptySurface("constraint surface not found: Newton projection failed "
                               "from every sampled guess at order " + std::to_string(level));
        led.onshell_points = projected;

        // Gamma at the projected points, restricted to the free directions.
        std::vector<int> ranks;
        Eigen::MatrixXd Gamma_ref;
        Real sym_defect = 0.0;
        for (std::size_t i = 0; i < projected.size(); ++i) {
            const PhasePoint& p = projected[i];
            KernelData kd = kernel_at_aligned(sys, p, ref_kd.get(), tol);
            Eigen::MatrixXd dirs = kd.P * free_dirs(p);
            Eigen::MatrixXd G = pairing_matrix(cur_eval, p, dirs);
            ranks.push_back(fd_rank(G));
            if (i == 0) Gamma_ref = G;
            if (G.rows() == G.cols())
                sym_defect = std::max(
                    sym_defect, (G - G.transpose()).norm() / (1.0 + G.norm()));
        }
        for (int r : ranks)
            if (r != ranks[0])
                throw RankInstability(
                    "constraint matrix rank varies across sample points (order " +
                    std::to_string(level) + ")");
        int r_l = ranks[0];
        rec.rank = r_l;
        rec.Gamma_ref = Gamma_ref;
        rec.symmetry_defect = sym_defect;
        cum_rank += r_l;

        // I_[l]: independent directions among all nontrivial constraint
        // gradients at the projected points.
        std::vector<int> Is;
        for (const PhasePoint& p : projected) {
            Eigen::MatrixXd J(stacked(p).size(), 2 * D);
            for (int c = 0; c < 2 * D; ++c) {
                Eigen::VectorXd e = Eigen::VectorXd::Zero(2 * D);
                e(c) = 1.0;
                J.col(c) = dir_deriv(stacked, p, e);
            }
            Is.push_back(fd_rank(J));
        }
        for (int v : Is)
            if (v != Is[0])
                throw RankInstability("independent-constraint count varies across "
                                      "sample points (order " + std::to_string(level) + ")");
        rec.independent = Is[0];
        led.orders.push_back(rec);

        if (rec.independent == 2 * D) {
            led.n_F = level;
            led.termination = "full-rank";
            break;
        }
        if (level >= 2 && rec.independent == I_prev) {
            led.n_F = level;
            led.termination = "fixed-point";
            break;
        }
        I_prev = rec.independent;
        if (level == opts.max_order) {
            led.n_F = level;
            led.termination = "max-order-exceeded";
            break;
        }

        // Build the next level from this one.
        const PhasePoint p0 = projected.front();
        KernelData kd0 = kernel_at_aligned(sys, p0, ref_kd.get(), tol);
        Eigen::MatrixXd dirs0 = kd0.P * free_dirs(p0);
        Eigen::MatrixXd G0 = pairing_matrix(cur_eval, p0, dirs0);
        Eigen::MatrixXd Cref = left_null_cols(G0, r_l);
        Eigen::MatrixXd Kref = null_cols(G0, r_l);

        auto prev_eval = cur_eval;
        auto prev_free = free_dirs;
        auto prev_field = field;

        // Restricted Gamma of the previous level at an arbitrary point.
        auto gamma_of = [sysp, ref_kd, tol, prev_eval, prev_free](const PhasePoint& u) {
            KernelData kd = kernel_at_aligned(*sysp, u, ref_kd.get(), tol);
            return Eigen::MatrixXd(
                pairing_matrix(prev_eval, u, Eigen::MatrixXd(kd.P * prev_free(u))));
        };

        // New constraints: left-null combinations of the stability pairings.
        cur_eval = [gamma_of, prev_eval, prev_field, Cref, r_l](const PhasePoint& u) {
            Eigen::MatrixXd C = aligned_to(left_null_cols(gamma_of(u), r_l), Cref);
            Eigen::VectorXd g = dir_deriv(prev_eval, u, prev_field(u));
            return Eigen::VectorXd(C.transpose() * g);
        };
        cur_count = static_cast<int>(Cref.cols());

        // Free directions shrink by this level's rank.
        free_dirs = [gamma_of, prev_free, Kref, r_l](const PhasePoint& u) {
            Eigen::MatrixXd K = aligned_to(null_cols(gamma_of(u), r_l), Kref);
            return Eigen::MatrixXd(prev_free(u) * K);
        };
        n_free -= r_l;

        // Field with this level's multipliers determined (minimum norm).
        field = [sysp, ref_kd, tol, gamma_of, prev_eval, prev_field, prev_free,
                 r_l](const PhasePoint& u) {
            KernelData kd = kernel_at_aligned(*sysp, u, ref_kd.get(), tol);
            Eigen::MatrixXd G = gamma_of(u);
            Eigen::VectorXd X = prev_field(u);
            Eigen::VectorXd g = dir_deriv(prev_eval, u, X);
            Eigen::VectorXd y = -pinv_rank(G, r_l) * g;
            return Eigen::VectorXd(X + kd.P * (prev_free(u) * y));
        };
    }

    if (led.termination.empty()) {
        led.n_F = opts.max_order;
        led.termination = "max-order-exceeded";
    }
    led.free_multipliers = led.N0 - cum_rank;
    return led;
}

PhasePoint project_to_constraint_surface(const CompiledLagrangian& sys,
                                         const ConstraintLedger& ledger,
                                         const PhasePoint& guess, int order,
                                         const ConstraintOptions& opts) {
    std::vector<ConstraintEvaluator> stack;
    for (std::size_t i = 0; i < ledger.orders.size() &&
                            static_cast<int>(i) < order; ++i)
        if (!ledger.orders[i].nontrivial.empty())
            stack.push_back(restrict_eval(ledger.level_evals[i], ledger.orders[i].nontrivial));
    if (stack.empty()) return guess;

    ConstraintEvaluator stacked = [stack](const PhasePoint& u) {
        std::vector<Eigen::VectorXd> parts;
        int total = 0;
        for (const auto& e : stack) {
            parts.push_back(e(u));
            total += static_cast<int>(parts.back().size());
        }
        Eigen::VectorXd out(total);
        int at = 0;
        for (const auto& p : parts) {
            out.segment(at, p.size()) = p;
            at += static_cast<int>(p.size());
        }
        return out;
    };
    // Caller-supplied guesses need not sit inside the sampling box; guard
    // admissibility is enforced throughout the iteration regardless.
    auto p = newton_project(sys, stacked, guess, opts, /*require_box=*/false);
    if (!p)
        throw EmptySurface("Newton projection did not converge in 50 iterations");
    return *p;
}

Eigen::VectorXd determined_coefficients(const CompiledLagrangian& sys,
                                        const ConstraintLedger& ledger,
                                        const PhasePoint& u, const KernelData& kd,
                                        const ConstraintOptions& opts) {
    Eigen::VectorXd u_det = Eigen::VectorXd::Zero(ledger.N0);
    if (ledger.N0 == 0) return u_det;

    Eigen::MatrixXd free = Eigen::MatrixXd::Identity(ledger.N0, ledger.N0);
    Eigen::VectorXd X = base_field_at(sys, u, opts.tol_rank);

    for (std::size_t i = 0; i < ledger.orders.size(); ++i) {
        const OrderRecord& rec = ledger.orders[i];
        if (rec.nontrivial.empty() || rec.rank == 0) continue;
        const ConstraintEvaluator& eval = ledger.level_evals[i];
        Eigen::MatrixXd G = pairing_matrix(eval, u, Eigen::MatrixXd(kd.P * free));
        Eigen::VectorXd g = dir_deriv(eval, u, X);
        Eigen::VectorXd y = -pinv_rank(G, rec.rank) * g;
        u_det += free * y;
        X += kd.P * (free * y);
        if (rec.rank < free.cols()) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeFullV);
            Eigen::MatrixXd K = svd.matrixV().rightCols(free.cols() - rec.rank);
            free = (free * K).eval();
        } else {
            break;
        }
    }
    return u_det;
}

Real constraint_violation(const CompiledLagrangian& sys, const ConstraintLedger& ledger,
                          const PhasePoint& u) {
    (void)sys;
    Real worst = 0.0;
    for (std::size_t i = 0; i < ledger.orders.size(); ++i) {
        if (ledger.orders[i].nontrivial.empty()) continue;
        Eigen::VectorXd g = ledger.level_evals[i](u);
        for (int n : ledger.orders[i].nontrivial)
            worst = std::max(worst, std::abs(g(n)));
    }
    return worst;
}

} // namespace lagsym
