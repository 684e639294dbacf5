#include <doctest.h>

#include "lagsym/dynamics.hpp"
#include "lagsym/errors.hpp"
#include "lagsym/examples.hpp"

using namespace lagsym;

namespace {

ConstraintLedger make_ledger(const CompiledLagrangian& sys, std::uint64_t seed) {
    ConstraintOptions o;
    o.seed = seed;
    Sampler sampler(sys, seed, o.guard_min);
    return run_constraint_algorithm(sys, sampler.sample_n(32), o);
}

} // namespace

TEST_CASE("first-order constraints equal the energy pairing with P") {
    // gamma_n = <dE|P_(n)>: z.dE_dq + w.dE_dv with M w = -F z and dE_dv = M v.
    for (const char* name : {"s1_spherical", "s1_generic", "s2"}) {
        CompiledLagrangian sys = compile_system(builtin(name).spec);
        Sampler sampler(sys, 71);
        for (int i = 0; i < 6; ++i) {
            PhasePoint u = sampler.sample();
            TensorEval t = eval_tensors(sys, u);
            KernelData kd = ker_omega_basis(t, kTolRank);
            Eigen::VectorXd gamma = first_order_constraints(sys, u, kd);
            Eigen::VectorXd pairing =
                kd.P.topRows(sys.dim()).transpose() * t.dE_dq +
                kd.P.bottomRows(sys.dim()).transpose() * t.dE_dv;
            CHECK((gamma - pairing).norm() < 1e-8 * (1.0 + gamma.norm()));
        }
    }
}

TEST_CASE("radial-well constraint is the radial derivative of the well") {
    // The angular part of the potential is scale free, so |gamma| reduces to
    // |kappa (|q| - R)| with R the critical radius.
    CompiledLagrangian sys = compile_system(builtin("s1_spherical").spec);
    Sampler sampler(sys, 73);
    for (int i = 0; i < 8; ++i) {
        PhasePoint u = sampler.sample();
        KernelData kd = kernel_at(sys, u);
        Eigen::VectorXd g = first_order_constraints(sys, u, kd);
        REQUIRE(g.size() == 1);
        CHECK(std::abs(g.cwiseAbs()(0) - std::abs(u.q.norm() - 1.0)) < 1e-9);
    }
}

TEST_CASE("two-particle constraints match the displayed combinations") {
    // In the analytic (unnormalized radial-lift) frame the sum combination
    // vanishes identically and the difference equals the displayed formula.
    CompiledLagrangian sys = compile_system(builtin("s2").spec);
    Sampler sampler(sys, 79);
    const Real lambda = 1.0;
    for (int i = 0; i < 8; ++i) {
        PhasePoint u = sampler.sample();
        TensorEval t = eval_tensors(sys, u);
        Eigen::Vector2d q1 = u.q.head(2), q2 = u.q.tail(2);
        Eigen::Vector2d v1 = u.v.head(2), v2 = u.v.tail(2);
        Eigen::Matrix2d P1 = Eigen::Matrix2d::Identity() - q1.normalized() * q1.normalized().transpose();
        Eigen::Matrix2d P2 = Eigen::Matrix2d::Identity() - q2.normalized() * q2.normalized().transpose();

        Eigen::VectorXd r = t.dE_dq + t.F * u.v;
        Real g1 = q1.normalized().dot(r.head(2));
        Real g2 = q2.normalized().dot(r.tail(2));
        Real plus = q1.norm() * g1 + q2.norm() * g2;
        Real minus = q1.norm() * g1 - q2.norm() * g2;
        Real displayed = -2.0 * lambda / (q1.norm() * q2.norm()) *
                         (q2.dot(P1 * v1) + q1.dot(P2 * v2));
        CHECK(std::abs(plus) < 1e-10 * (1.0 + std::abs(minus)));
        CHECK(minus == doctest::Approx(displayed).epsilon(1e-9));
    }
}

TEST_CASE("constraint ledgers per system") {
    SUBCASE("trivial constraints leave all multipliers free") {
        for (const char* name : {"s1_conformal", "s3"}) {
            CompiledLagrangian sys = compile_system(builtin(name).spec);
            ConstraintLedger led = make_ledger(sys, 83);
            CHECK(led.n_F == 1);
            CHECK_FALSE(led.any_nontrivial);
            CHECK(led.termination == "fixed-point");
            CHECK(led.free_multipliers == led.N0);
            CHECK(led.total_nontrivial() == 0);
        }
    }
    SUBCASE("radial well determines its multiplier at first order") {
        CompiledLagrangian sys = compile_system(builtin("s1_spherical").spec);
        ConstraintLedger led = make_ledger(sys, 83);
        CHECK(led.n_F == 2);
        REQUIRE(led.orders.size() == 2);
        CHECK(led.orders[0].rank == 1);
        CHECK(led.orders[0].independent == 1);
        CHECK(led.orders[1].nontrivial.empty());
        CHECK(led.free_multipliers == 0);
        // Gamma on the critical sphere is the well curvature (kappa = 1),
        // independent of the kernel-basis sign convention.
        Eigen::MatrixXd G = led.orders[0].Gamma_ref;
        REQUIRE(G.rows() == 1);
        CHECK(std::abs(G(0, 0)) == doctest::Approx(1.0).epsilon(1e-5));
    }
    SUBCASE("two-particle system keeps one free multiplier") {
        CompiledLagrangian sys = compile_system(builtin("s2").spec);
        ConstraintLedger led = make_ledger(sys, 83);
        CHECK(led.n_F == 2);
        CHECK(led.orders[0].rank == 1);
        CHECK(led.orders[0].independent == 1);
        CHECK(led.free_multipliers == 1);
    }
}

TEST_CASE("projection reaches the constraint surface") {
    for (const char* name : {"s1_spherical", "s1_generic", "s2"}) {
        CompiledLagrangian sys = compile_system(builtin(name).spec);
        ConstraintLedger led = make_ledger(sys, 89);
        Sampler sampler(sys, 97);
        int done = 0;
        for (int tries = 0; tries < 24 && done < 6; ++tries) {
            PhasePoint p;
            try {
                p = project_to_constraint_surface(sys, led, sampler.sample(),
                                                  led.n_F);
            } catch (const EmptySurface&) {
                continue;
            }
            ++done;
            Real scale = 1.0 + std::max(p.q.cwiseAbs().maxCoeff(),
                                        p.v.cwiseAbs().maxCoeff());
            CHECK(constraint_violation(sys, led, p) <= 1e-9 * scale);
        }
        CHECK(done >= 6);
    }
}

TEST_CASE("determined multipliers make the flow tangent to the surface") {
    for (const char* name : {"s1_spherical", "s2"}) {
        CompiledLagrangian sys = compile_system(builtin(name).spec);
        ConstraintLedger led = make_ledger(sys, 101);
        REQUIRE_FALSE(led.onshell_points.empty());
        Soelvf sv = assemble_soelvf(sys, led);
        for (std::size_t i = 0; i < std::min<std::size_t>(4, led.onshell_points.size()); ++i) {
            const PhasePoint& p = led.onshell_points[i];
            Eigen::VectorXd X = sv.eval(p);
            Eigen::VectorXd dgamma = dir_deriv(led.level_evals[0], p, X);
            CHECK(dgamma.cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("base field horizontal part is the velocity") {
    for (const auto& name : builtin_names()) {
        CompiledLagrangian sys = compile_system(builtin(name).spec);
        Sampler sampler(sys, 103);
        PhasePoint u = sampler.sample();
        Eigen::VectorXd X = base_field_at(sys, u);
        CHECK((X.head(sys.dim()) - u.v).norm() == 0.0);
    }
}
