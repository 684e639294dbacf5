#include <doctest.h>

#include "lagsym/constraints.hpp"
#include "lagsym/examples.hpp"
#include "lagsym/kernel.hpp"
#include "lagsym/sampling.hpp"

using namespace lagsym;

TEST_CASE("two-form block structure and antisymmetry") {
    CompiledLagrangian sys = compile_system(builtin("s2").spec);
    Sampler sampler(sys, 3);
    for (int i = 0; i < 6; ++i) {
        PhasePoint u = sampler.sample();
        TensorEval t = eval_tensors(sys, u);
        const int D = sys.dim();
        CHECK((t.M - t.M.transpose()).norm() < 1e-13 * (1 + t.M.norm()));
        CHECK((t.F + t.F.transpose()).norm() < 1e-13 * (1 + t.F.norm()));
        CHECK((t.omega + t.omega.transpose()).norm() <
              1e-12 * (1 + t.omega.norm()));
        CHECK((t.omega.topLeftCorner(D, D) - t.F).norm() == 0.0);
        CHECK((t.omega.topRightCorner(D, D) - t.M).norm() == 0.0);
        CHECK(t.omega.bottomRightCorner(D, D).norm() == 0.0);
    }
}

TEST_CASE("base field solves the energy equation for a regular system") {
    CompiledLagrangian sys = compile_system(builtin("oscillator").spec);
    PhasePoint u;
    u.q = Eigen::VectorXd::Constant(1, 0.9);
    u.v = Eigen::VectorXd::Constant(1, 0.2);
    TensorEval t = eval_tensors(sys, u);
    Eigen::VectorXd X = base_field(t, u.v, kTolRank);
    CHECK(X(0) == doctest::Approx(0.2));
    CHECK(X(1) == doctest::Approx(-0.9)); // accel = -k q
    CHECK(energy_equation_residual(t, X).norm() < 1e-12);
    CHECK(el_residual(sys, u, X.tail(1)).norm() < 1e-12);
}

TEST_CASE("energy-equation residual lives in the horizontal block") {
    // For any second-order field the vertical block of dE - i_X Omega cancels
    // exactly (dE/dv = M v against the -M X^q term).
    CompiledLagrangian sys = compile_system(builtin("s1_spherical").spec);
    Sampler sampler(sys, 21);
    for (int i = 0; i < 6; ++i) {
        PhasePoint u = sampler.sample();
        TensorEval t = eval_tensors(sys, u);
        Eigen::VectorXd X(6);
        X.head(3) = u.v;
        X.tail(3) = Eigen::Vector3d(0.3, -0.1, 0.2); // arbitrary vertical part
        Eigen::VectorXd r = energy_equation_residual(t, X);
        CHECK(r.tail(3).norm() < 1e-11 * (1 + r.norm()));
    }
}

TEST_CASE("kernel dimension of the assembled two-form") {
    // dim ker Omega = 2 * dim ker M at every admissible point.
    for (const auto& name : builtin_names()) {
        CompiledLagrangian sys = compile_system(builtin(name).spec);
        Sampler sampler(sys, 31);
        for (int i = 0; i < 8; ++i) {
            KernelData kd = kernel_at(sys, sampler.sample());
            CHECK(kd.svd_dim == 2 * kd.N0);
            CHECK_FALSE(kd.count_mismatch);
        }
    }
}
