#include <doctest.h>

#include "lagsym/expr.hpp"
#include "lagsym/parser.hpp"

#include <cmath>
#include <random>

using namespace lagsym;

namespace {

SystemSpec ctx3() {
    return parse_spec("dim 3;\nparam m = 1.5;\nparam k = 0.7;\nbox q 0.5 2;\n"
                      "box v -1 1;\nL = 0.5*m*dot(v,v) - 0.5*k*dot(q,q)");
}

Real eval_at(const SystemSpec& spec, const Expr& e, const std::vector<Real>& q,
             const std::vector<Real>& v) {
    return eval_expr(e, q, v, spec.params);
}

// Central-difference oracle for symbolic derivatives.
Real fd_partial(const SystemSpec& spec, const Expr& e, Op wrt, int idx,
                std::vector<Real> q, std::vector<Real> v) {
    const Real h = 1e-6;
    auto& target = (wrt == Op::Coord) ? q : v;
    target[idx - 1] += h;
    Real hi = eval_at(spec, e, q, v);
    target[idx - 1] -= 2 * h;
    Real lo = eval_at(spec, e, q, v);
    return (hi - lo) / (2 * h);
}

} // namespace

TEST_CASE("rational exponents normalize") {
    Rational r = make_rational(4, -6);
    CHECK(r.num == -2);
    CHECK(r.den == 3);
    Rational s = rational_sub_one(make_rational(1, 2));
    CHECK(s.num == -1);
    CHECK(s.den == 2);
}

TEST_CASE("derivatives match finite differences on assorted expressions") {
    SystemSpec spec = ctx3();
    const char* exprs[] = {
        "q[1]^2*v[2] - m*q[3]",
        "dot(q,v)/dot(q,q)",
        "sqrt(dot(v,v) + 1)",
        "sin(q[1])*cos(v[1]) + ln(dot(q,q))",
        "norm(q)^(-3)*q[2]",
        "(q[1]+v[1])^(5/2)",
        "k*q[3]/norm(q)",
    };
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<Real> dist(0.6, 1.4);
    for (const char* txt : exprs) {
        Expr e = parse_expr_in(spec, txt);
        for (int trial = 0; trial < 4; ++trial) {
            std::vector<Real> q = {dist(rng), dist(rng), dist(rng)};
            std::vector<Real> v = {dist(rng), dist(rng), dist(rng)};
            for (int idx = 1; idx <= 3; ++idx) {
                for (Op wrt : {Op::Coord, Op::Vel}) {
                    Expr d = differentiate(e, wrt, idx);
                    Real sym = eval_at(spec, d, q, v);
                    Real num = fd_partial(spec, e, wrt, idx, q, v);
                    CHECK(sym == doctest::Approx(num).epsilon(1e-5));
                }
            }
        }
    }
}

TEST_CASE("simplify preserves value and is idempotent") {
    SystemSpec spec = ctx3();
    const char* exprs[] = {
        "q[1]*1 + 0*v[2]",
        "(q[1]^2)^3",
        "-(-q[2])",
        "2*3 + q[1] - q[1]*0",
        "dot(q,v)^2/dot(q,q)^2",
    };
    std::vector<Real> q = {1.1, 0.7, 0.9}, v = {0.3, -0.2, 0.5};
    for (const char* txt : exprs) {
        Expr e = parse_expr_in(spec, txt);
        Expr s = simplify(e);
        CHECK(eval_at(spec, e, q, v) == doctest::Approx(eval_at(spec, s, q, v)).epsilon(1e-14));
        CHECK(same_expr(simplify(s), s));
        CHECK(count_nodes(s) <= count_nodes(e));
    }
    // Known folds.
    CHECK(is_const(simplify(parse_expr_in(spec, "0*q[1]")), 0.0));
    CHECK(is_const(simplify(parse_expr_in(spec, "2^3")), 8.0));
}

TEST_CASE("printer round trip is structural") {
    SystemSpec spec = ctx3();
    const char* exprs[] = {
        "q[1] - (q[2] - q[3])",
        "-q[1]^2",
        "(q[1] + v[1])*(q[2] - v[2])",
        "q[1]/(q[2]*q[3])",
        "(q[1]*q[2])^(-1/2)",
        "-0.5*k*q[1]^2",
        "2 - -3*q[1]",
    };
    for (const char* txt : exprs) {
        Expr e = parse_expr_in(spec, txt);
        Expr back = parse_expr_in(spec, to_string(e));
        CHECK(same_expr(e, back));
        // And the printed form is stable.
        CHECK(to_string(back) == to_string(e));
    }
}

TEST_CASE("integer powers evaluate exactly at zero base") {
    SystemSpec spec = ctx3();
    Expr e = parse_expr_in(spec, "q[1]^3");
    CHECK(eval_at(spec, e, {0.0, 1, 1}, {0, 0, 0}) == 0.0);
    CHECK(eval_at(spec, e, {-2.0, 1, 1}, {0, 0, 0}) == -8.0);
}
