#include <doctest.h>

#include "lagsym/errors.hpp"
#include "lagsym/examples.hpp"
#include "lagsym/sampling.hpp"
#include "lagsym/tangent.hpp"

using namespace lagsym;

namespace {

Eigen::MatrixXd eval_mat(const CompiledLagrangian& sys, const std::vector<Expr>& flat,
                         const PhasePoint& u) {
    const int D = sys.dim();
    Eigen::MatrixXd A(D, D);
    EvalCache cache;
    for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b)
            A(a, b) = eval_scalar(sys, flat[a * D + b], u, &cache);
    return A;
}

} // namespace

TEST_CASE("oscillator tensors") {
    CompiledLagrangian sys = compile_system(builtin("oscillator").spec);
    PhasePoint u;
    u.q = Eigen::VectorXd::Constant(1, 0.7);
    u.v = Eigen::VectorXd::Constant(1, -0.4);
    TensorEval t = eval_tensors(sys, u);
    CHECK(t.M(0, 0) == doctest::Approx(1.0));
    CHECK(t.F(0, 0) == doctest::Approx(0.0));
    CHECK(t.E == doctest::Approx(0.5 * 0.16 + 0.5 * 0.49));
    CHECK(t.dE_dq(0) == doctest::Approx(0.7));
    CHECK(t.dE_dv(0) == doctest::Approx(-0.4));
}

TEST_CASE("conformal kinetic mass matrix is the scaled projector") {
    CompiledLagrangian sys = compile_system(builtin("s1_conformal").spec);
    Sampler sampler(sys, 7);
    for (int i = 0; i < 8; ++i) {
        PhasePoint u = sampler.sample();
        TensorEval t = eval_tensors(sys, u);
        Eigen::VectorXd qhat = u.q.normalized();
        Eigen::MatrixXd Pi =
            Eigen::MatrixXd::Identity(3, 3) - qhat * qhat.transpose();
        Eigen::MatrixXd expect = Pi / u.q.squaredNorm(); // m = 1
        CHECK((t.M - expect).norm() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK((t.M * qhat).norm() < 1e-12);
    }
}

TEST_CASE("dE/dv equals M v for every builtin") {
    for (const auto& name : builtin_names()) {
        CompiledLagrangian sys = compile_system(builtin(name).spec);
        Sampler sampler(sys, 11);
        for (int i = 0; i < 6; ++i) {
            PhasePoint u = sampler.sample();
            TensorEval t = eval_tensors(sys, u);
            CHECK((t.dE_dv - t.M * u.v).norm() <
                  1e-10 * (1.0 + t.dE_dv.norm()));
        }
    }
}

TEST_CASE("fully constrained system has identically zero energy") {
    CompiledLagrangian sys = compile_system(builtin("s3").spec);
    Sampler sampler(sys, 5);
    for (int i = 0; i < 32; ++i) {
        PhasePoint u = sampler.sample();
        TensorEval t = eval_tensors(sys, u);
        CHECK(std::abs(t.E) < 1e-12);
        CHECK(t.dE_dq.norm() < 1e-9);
        CHECK(t.dE_dv.norm() < 1e-9);
    }
}

TEST_CASE("guard violations throw") {
    CompiledLagrangian sys = compile_system(builtin("s3").spec);
    PhasePoint u;
    u.q = Eigen::Vector3d(1.0, 0.8, 0.6);
    u.v = 2.0 * u.q; // v parallel to q: the projected speed guard vanishes
    CHECK_THROWS_AS(eval_tensors(sys, u), GuardViolation);
    CHECK_FALSE(admissible(sys, u));
}
