#include "lagsym/dynamics.hpp"

#include "lagsym/errors.hpp"

#include <cmath>

namespace lagsym {

Eigen::VectorXd Soelvf::eval(const PhasePoint& u, const KernelData* align_to,
                             KernelData* out_kd) const {
    TensorEval t = eval_tensors(*sys, u, opts.guard_min);
    KernelData kd = ker_omega_basis(t, opts.tol_rank);
    kd = align_basis(align_to ? *align_to : ledger->ref_kernel, kd);

    Eigen::VectorXd X = base_field(t, u.v, opts.tol_rank);
    bool any_determined = false;
    for (const auto& o : ledger->orders) any_determined |= o.rank > 0;
    if (any_determined)
        X += kd.P * determined_coefficients(*sys, *ledger, u, kd, opts);
    for (const auto& [idx, fn] : gauge)
        X += fn(u, kd) * kd.P.col(idx);
    if (out_kd) *out_kd = kd;
    return X;
}

Soelvf assemble_soelvf(const CompiledLagrangian& sys, const ConstraintLedger& ledger,
                       std::map<int, GaugeFn> gauge, const ConstraintOptions& opts) {
    // Reject gauges on determined directions: the row space of the first
    // constraint matrix with positive rank is what the algorithm solves for.
    for (const auto& o : ledger.orders) {
        if (o.rank == 0 || o.Gamma_ref.size() == 0) continue;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(o.Gamma_ref, Eigen::ComputeFullV);
        Eigen::MatrixXd Vr = svd.matrixV().leftCols(o.rank);
        for (const auto& [idx, fn] : gauge) {
            if (idx < 0 || idx >= ledger.N0)
                throw std::invalid_argument("gauge index out of range");
            Eigen::VectorXd e = Eigen::VectorXd::Zero(ledger.N0);
            e(idx) = 1.0;
            if ((Vr.transpose() * e).norm() > 0.5)
                throw std::invalid_argument(
                    "gauge supplied for a multiplier the constraint algorithm "
                    "determines (index " + std::to_string(idx) + ")");
        }
        break;
    }
    Soelvf sv;
    sv.sys = &sys;
    sv.ledger = &ledger;
    sv.gauge = std::move(gauge);
    sv.opts = opts;
    return sv;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr Real kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr Real kC[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr Real kB4[7] = {5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                         -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct StepResult {
    bool ok = false;
    Eigen::VectorXd y5;
    Real err = 0.0;
};

StepResult rk_step(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                   const Eigen::VectorXd& y, Real h, Real tol) {
    StepResult r;
    const int n = static_cast<int>(y.size());
    Eigen::MatrixXd k(n, 7);
    try {
        k.col(0) = f(y);
        for (int s = 1; s < 7; ++s) {
            Eigen::VectorXd ys = y;
            for (int j = 0; j < s; ++j) ys += h * kA[s][j] * k.col(j);
            (void)kC;
            k.col(s) = f(ys);
        }
    } catch (const std::exception&) {
        return r; // guard trip inside a stage: caller shrinks the step
    }
    // The 5th-order solution reuses row a7 (k7 carries zero weight).
    Eigen::VectorXd y5 = y;
    Eigen::VectorXd y4 = y;
    for (int s = 0; s < 6; ++s) y5 += h * kA[6][s] * k.col(s);
    for (int s = 0; s < 7; ++s) y4 += h * kB4[s] * k.col(s);
    Eigen::VectorXd e = y5 - y4;
    Real err = 0.0;
    for (int i = 0; i < n; ++i) {
        Real sc = tol + tol * std::max(std::abs(y(i)), std::abs(y5(i)));
        err = std::max(err, std::abs(e(i)) / sc);
    }
    if (!y5.allFinite()) return r;
    r.ok = true;
    r.y5 = y5;
    r.err = err;
    return r;
}

Eigen::VectorXd pack(const PhasePoint& u) {
    Eigen::VectorXd y(u.q.size() + u.v.size());
    y.head(u.q.size()) = u.q;
    y.tail(u.v.size()) = u.v;
    return y;
}

PhasePoint unpack(const Eigen::VectorXd& y) {
    const int D = static_cast<int>(y.size()) / 2;
    PhasePoint u;
    u.q = y.head(D);
    u.v = y.tail(D);
    return u;
}

// Generic adaptive driver; on_accept may veto continuation by throwing.
bool drive(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
           Eigen::VectorXd& y, Real t_end, Real dt_init, Real tol,
           const std::function<void(Real, Eigen::VectorXd&)>& on_accept,
           std::string* message, int* accepted, int* rejected) {
    Real t = 0.0;
    Real h = std::min(std::abs(dt_init), std::abs(t_end)) * (t_end < 0 ? -1.0 : 1.0);
    if (h == 0.0) return true;
    const Real hmin = 1e-12 * (1.0 + std::abs(t_end));
    while ((t_end > 0 && t < t_end) || (t_end < 0 && t > t_end)) {
        if (std::abs(h) > std::abs(t_end - t)) h = t_end - t;
        StepResult s = rk_step(f, y, h, tol);
        if (s.ok && s.err <= 1.0) {
            t += h;
            y = s.y5;
            if (accepted) ++(*accepted);
            if (on_accept) on_accept(t, y);
            Real fac = s.err > 0 ? 0.9 * std::pow(s.err, -0.2) : 5.0;
            h *= std::clamp(fac, 0.2, 5.0);
        } else {
            if (rejected) ++(*rejected);
            Real fac = s.ok && s.err > 0 ? std::clamp(0.9 * std::pow(s.err, -0.2), 0.1, 0.5)
                                         : 0.25;
            h *= fac;
            if (std::abs(h) < hmin) {
                if (message)
                    *message = "step size underflow at t = " + std::to_string(t) +
                               " (guard set or stiffness)";
                return false;
            }
        }
    }
    return true;
}

} // namespace

Trajectory integrate_flow(const Soelvf& sv, const PhasePoint& u0, Real t_end,
                          Real dt_init, bool project_each_step, Real rk_tol) {
    Trajectory traj;
    KernelData last_kd = kernel_at_aligned(*sv.sys, u0, &sv.ledger->ref_kernel,
                                           sv.opts.tol_rank);
    auto rhs = [&](const Eigen::VectorXd& y) {
        return sv.eval(unpack(y), &last_kd);
    };

    auto record = [&](Real t, const PhasePoint& u) {
        TensorEval te = eval_tensors(*sv.sys, u, sv.opts.guard_min);
        KernelData kd = align_basis(last_kd, ker_omega_basis(te, sv.opts.tol_rank));
        traj.times.push_back(t);
        traj.points.push_back(u);
        traj.energy.push_back(te.E);
        traj.gamma_max.push_back(constraint_violation(*sv.sys, *sv.ledger, u));
        traj.overlap.push_back(basis_overlap(last_kd, kd));
        last_kd = kd;
    };

    Eigen::VectorXd y = pack(u0);
    record(0.0, u0);
    bool ok = drive(
        rhs, y, t_end, dt_init, rk_tol,
        [&](Real t, Eigen::VectorXd& yy) {
            PhasePoint u = unpack(yy);
            if (project_each_step && sv.ledger->any_nontrivial) {
                u = project_to_constraint_surface(*sv.sys, *sv.ledger, u,
                                                 sv.ledger->n_F, sv.opts);
                yy = pack(u);
            }
            record(t, u);
        },
        &traj.message, &traj.steps_accepted, &traj.steps_rejected);
    traj.ok = ok;
    return traj;
}

PhasePoint flow_field(const PhaseFn& field, const PhasePoint& u0, Real t_end,
                      Real rk_tol) {
    Eigen::VectorXd y = pack(u0);
    std::string msg;
    auto rhs = [&](const Eigen::VectorXd& yy) { return field(unpack(yy)); };
    if (!drive(rhs, y, t_end, std::abs(t_end) / 16.0 + 1e-6, rk_tol, nullptr, &msg,
               nullptr, nullptr))
        throw GuardViolation("symmetry flow failed: " + msg);
    return unpack(y);
}

PhasePoint symmetry_flow(const CompiledLagrangian& sys, const GeneratorBasis& basis,
                         int k, Real eps, const PhasePoint& u0,
                         const ConstraintOptions& opts, Real rk_tol) {
    if (eps == 0.0) return u0;
    PhaseFn field = [&](const PhasePoint& u) {
        return generator_field(sys, basis, k, u, opts);
    };
    return flow_field(field, u0, eps, rk_tol);
}

Real bracket_residual(const CompiledLagrangian& sys, const Soelvf& sv,
                      const GeneratorBasis& basis, int k,
                      const std::vector<PhasePoint>& onshell_points) {
    Real worst = 0.0;
    PhaseFn Xf = [&](const PhasePoint& u) { return sv.eval(u); };
    PhaseFn Pf = [&](const PhasePoint& u) {
        return generator_field(sys, basis, k, u, sv.opts);
    };
    for (const auto& p : onshell_points) {
        Eigen::VectorXd X = Xf(p);
        Eigen::VectorXd P = Pf(p);
        Eigen::VectorXd bracket = dir_deriv(Pf, p, X) - dir_deriv(Xf, p, P);
        TensorEval t = eval_tensors(sys, p, sv.opts.guard_min);
        Real r = (t.omega.transpose() * bracket).norm() / (1.0 + t.omega.norm());
        worst = std::max(worst, r);
    }
    return worst;
}

OrbitMapResult orbit_map_check(const CompiledLagrangian& sys, const Soelvf& sv,
                               const GeneratorBasis& basis, int k, Real eps,
                               const PhasePoint& u0, Real t_end) {
    OrbitMapResult res;
    Trajectory direct = integrate_flow(sv, u0, t_end);
    if (!direct.ok) throw GuardViolation("orbit map: direct flow failed: " + direct.message);
    res.endpoint_direct = direct.points.back();

    PhasePoint w0 = symmetry_flow(sys, basis, k, eps, u0, sv.opts);
    Trajectory mapped = integrate_flow(sv, w0, t_end);
    if (!mapped.ok) throw GuardViolation("orbit map: mapped flow failed: " + mapped.message);
    res.endpoint_transported = mapped.points.back();

    TensorEval t = eval_tensors(sys, res.endpoint_transported, sv.opts.guard_min);
    Eigen::VectorXd Y = sv.eval(res.endpoint_transported);
    res.energy_eq_residual = energy_equation_residual(t, Y).norm() / tensor_scale(t);
    res.constraint_violation =
        constraint_violation(sys, *sv.ledger, res.endpoint_transported);
    return res;
}

} // namespace lagsym
