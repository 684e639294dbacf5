#include <doctest.h>

#include "lagsym/dynamics.hpp"
#include "lagsym/examples.hpp"

#include <cmath>

using namespace lagsym;

namespace {

ConstraintLedger ledger_for(const CompiledLagrangian& sys, std::uint64_t seed = 301) {
    ConstraintOptions o;
    o.seed = seed;
    Sampler sampler(sys, seed, o.guard_min);
    return run_constraint_algorithm(sys, sampler.sample_n(32), o);
}

Real rel_drift(const std::vector<Real>& e) {
    Real lo = e[0], hi = e[0];
    for (Real x : e) { lo = std::min(lo, x); hi = std::max(hi, x); }
    return (hi - lo) / (1.0 + std::abs(e[0]));
}

} // namespace

TEST_CASE("harmonic oscillator matches the closed-form orbit") {
    CompiledLagrangian sys = compile_system(builtin("oscillator").spec);
    ConstraintLedger led = ledger_for(sys);
    Soelvf sv = assemble_soelvf(sys, led);
    PhasePoint u0;
    u0.q = Eigen::VectorXd::Constant(1, 0.8);
    u0.v = Eigen::VectorXd::Constant(1, -0.3);
    const Real T = 2.0 * M_PI;
    Trajectory tr = integrate_flow(sv, u0, T);
    REQUIRE(tr.ok);
    const PhasePoint& uf = tr.points.back();
    CHECK(std::abs(uf.q(0) - 0.8) < 1e-6);
    CHECK(std::abs(uf.v(0) + 0.3) < 1e-6);
    CHECK(rel_drift(tr.energy) < 1e-8);
    // mid-trajectory spot check against q(t) = q0 cos t + v0 sin t
    for (std::size_t i = 0; i < tr.times.size(); i += 16) {
        Real t = tr.times[i];
        CHECK(std::abs(tr.points[i].q(0) -
                       (0.8 * std::cos(t) - 0.3 * std::sin(t))) < 1e-6);
    }
}

TEST_CASE("monitored flows stay on the surface without projection") {
    for (const char* name : {"s1_conformal", "s2"}) {
        CAPTURE(name);
        CompiledLagrangian sys = compile_system(builtin(name).spec);
        ConstraintLedger led = ledger_for(sys);
        Soelvf sv = assemble_soelvf(sys, led);
        PhasePoint u0;
        if (sys.dim() == 3) {
            u0.q = Eigen::Vector3d(1.0, 0.2, 0.3);
            u0.v = Eigen::Vector3d(0.1, 0.5, -0.4);
        } else {
            u0.q = Eigen::Vector4d(1.0, 0.1, -0.2, 1.1);
            u0.v = Eigen::Vector4d(0.2, 0.4, 0.3, -0.3);
        }
        if (led.any_nontrivial)
            u0 = project_to_constraint_surface(sys, led, u0, led.n_F);
        Trajectory tr = integrate_flow(sv, u0, 5.0);
        REQUIRE(tr.ok);
        CHECK(rel_drift(tr.energy) < 1e-6);
        for (Real g : tr.gamma_max) CHECK(g < 1e-6);
        for (Real o : tr.overlap) CHECK(o > 0.99);
        CHECK(tr.steps_accepted > 10);
    }
}

TEST_CASE("gauge choices on determined directions are rejected") {
    CompiledLagrangian sys = compile_system(builtin("s1_spherical").spec);
    ConstraintLedger led = ledger_for(sys);
    REQUIRE(led.free_multipliers == 0);
    std::map<int, GaugeFn> g;
    g[0] = [](const PhasePoint&, const KernelData&) { return 0.5; };
    CHECK_THROWS_AS(assemble_soelvf(sys, led, g), std::invalid_argument);
    CHECK_THROWS_AS(([&] { // out-of-range index
        std::map<int, GaugeFn> bad;
        bad[7] = g[0];
        assemble_soelvf(sys, led, bad);
    }()), std::invalid_argument);
}

TEST_CASE("free gauge terms preserve the conserved energy") {
    // The conformal system's constraint is trivial, so any multiplier choice
    // still solves the energy equation.
    CompiledLagrangian sys = compile_system(builtin("s1_conformal").spec);
    ConstraintLedger led = ledger_for(sys);
    std::map<int, GaugeFn> g;
    g[0] = [](const PhasePoint& u, const KernelData&) {
        return 0.3 * std::sin(u.q(0));
    };
    Soelvf sv = assemble_soelvf(sys, led, g);
    PhasePoint u0;
    u0.q = Eigen::Vector3d(0.9, 0.6, 0.8);
    u0.v = Eigen::Vector3d(0.2, -0.3, 0.4);
    Trajectory tr = integrate_flow(sv, u0, 3.0);
    REQUIRE(tr.ok);
    CHECK(rel_drift(tr.energy) < 1e-6);
    // and it genuinely changes the motion relative to the zero gauge
    Trajectory base = integrate_flow(assemble_soelvf(sys, led), u0, 3.0);
    CHECK((tr.points.back().q - base.points.back().q).norm() > 1e-3);
}

TEST_CASE("radial gauge drives purely radial motion") {
    // Choosing multipliers so the horizontal part becomes the unit radial
    // direction freezes the angular position.
    CompiledLagrangian sys = compile_system(builtin("s3").spec);
    ConstraintLedger led = ledger_for(sys);
    REQUIRE(led.free_multipliers == 2);
    std::map<int, GaugeFn> g;
    for (int i = 0; i < 2; ++i) {
        g[i] = [i](const PhasePoint& u, const KernelData& kd) {
            Eigen::VectorXd want = u.q.normalized() - u.v;
            return want.dot(kd.Z.col(i));
        };
    }
    Soelvf sv = assemble_soelvf(sys, led, g);
    PhasePoint u0;
    u0.q = Eigen::Vector3d(1.0, 0.4, -0.2);
    u0.v = Eigen::Vector3d(0.3, 0.5, 0.6);
    Eigen::Vector3d qhat0 = u0.q.normalized();
    Trajectory tr = integrate_flow(sv, u0, 0.5);
    REQUIRE(tr.ok);
    for (const PhasePoint& p : tr.points)
        CHECK((p.q.normalized() - qhat0).norm() < 1e-7);
    CHECK(tr.points.back().q.norm() > u0.q.norm() + 0.4);
}

TEST_CASE("symmetry generators commute with the flow") {
    for (const char* name : {"s2", "s3"}) {
        CAPTURE(name);
        CompiledLagrangian sys = compile_system(builtin(name).spec);
        SymmetryReport rep = symmetry_report(sys, 32, 331);
        Soelvf sv = assemble_soelvf(sys, rep.ledger);
        std::vector<PhasePoint> pts;
        if (rep.ledger.any_nontrivial) {
            pts = rep.ledger.onshell_points;
        } else {
            Sampler sampler(sys, 333);
            pts = sampler.sample_n(8);
        }
        REQUIRE(pts.size() >= 4);
        pts.resize(4);
        for (int k = 0; k < rep.dim_sym; ++k)
            CHECK(bracket_residual(sys, sv, rep.sym, k, pts) < 1e-5);
    }
}

TEST_CASE("symmetry transport maps solutions to solutions") {
    CompiledLagrangian sys = compile_system(builtin("s1_conformal").spec);
    SymmetryReport rep = symmetry_report(sys, 32, 337);
    REQUIRE(rep.dim_sym == 1);
    Soelvf sv = assemble_soelvf(sys, rep.ledger);
    PhasePoint u0;
    u0.q = Eigen::Vector3d(0.8, 0.7, 0.9);
    u0.v = Eigen::Vector3d(0.2, 0.1, -0.3);
    OrbitMapResult r = orbit_map_check(sys, sv, rep.sym, 0, 0.1, u0, 1.0);
    CHECK(r.energy_eq_residual < 1e-6);
    CHECK(r.constraint_violation < 1e-6);
    CHECK((r.endpoint_direct.q - r.endpoint_transported.q).norm() > 1e-4);
}
