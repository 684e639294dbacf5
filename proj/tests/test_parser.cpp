#include <doctest.h>

#include "lagsym/errors.hpp"
#include "lagsym/parser.hpp"

#include <cmath>

using namespace lagsym;

TEST_CASE("headers populate the spec") {
    SystemSpec s = parse_spec(
        "# comment line\n"
        "dim 4;\n"
        "param m = 2; param lambda = 0.5;\n"
        "slice q1 = q[1..2];\n"
        "slice q2 = q[3..4];\n"
        "guard norm(q1);\n"
        "box q 0.5 2;\n"
        "box v -1 1;\n"
        "box q1 0.25 1;\n"
        "L = dot(v[q1],v[q1]) + m*lambda\n");
    CHECK(s.dim == 4);
    CHECK(s.params.at("m") == 2.0);
    CHECK(s.params.at("lambda") == 0.5);
    CHECK(s.slices.at("q1").lo == 1);
    CHECK(s.slices.at("q2").hi == 4);
    CHECK(s.guards.size() == 1);
    REQUIRE(s.q_box.size() == 4);
    // later slice box overrides the q-wide default for components 1..2
    CHECK(s.q_box[0].lo == 0.25);
    CHECK(s.q_box[0].shell);
    CHECK(s.q_box[2].lo == 0.5);
    CHECK(s.v_box[3].lo == -1.0);
    CHECK_FALSE(s.v_box[3].shell);
}

TEST_CASE("shell boxes require positive lower bound") {
    SystemSpec a = parse_spec("dim 1;\nbox q 0.5 2;\nbox v -1 1;\nL = v[1]^2");
    CHECK(a.q_box[0].shell);
    SystemSpec b = parse_spec("dim 1;\nbox q -2 2;\nbox v -1 1;\nL = v[1]^2");
    CHECK_FALSE(b.q_box[0].shell);
}

TEST_CASE("dot and norm expand to scalar arithmetic") {
    SystemSpec s = parse_spec("dim 2;\nbox q -1 1;\nbox v -1 1;\nL = dot(q,v)");
    Expr e = parse_expr_in(s, "dot(q,v) - (q[1]*v[1] + q[2]*v[2])");
    std::vector<Real> q = {0.3, -0.7}, v = {1.2, 0.4};
    CHECK(eval_expr(e, q, v, s.params) == doctest::Approx(0.0).epsilon(1e-15));
    Expr n = parse_expr_in(s, "norm(q)");
    CHECK(eval_expr(n, q, v, s.params) ==
          doctest::Approx(std::sqrt(0.09 + 0.49)).epsilon(1e-14));
}

TEST_CASE("slice-restricted vectors") {
    SystemSpec s = parse_spec(
        "dim 4;\nslice a = q[1..2];\nslice b = q[3..4];\n"
        "box q -1 1;\nbox v -1 1;\nL = dot(v[a],v[b])");
    Expr e = parse_expr_in(s, "dot(q[a],v[b]) - (q[1]*v[3] + q[2]*v[4])");
    std::vector<Real> q = {1, 2, 3, 4}, v = {5, 6, 7, 8};
    CHECK(eval_expr(e, q, v, s.params) == doctest::Approx(0.0));
}

TEST_CASE("parse errors carry source locations") {
    try {
        parse_spec("dim 2;\nbox q -1 1;\nbox v -1 1;\nL = q[1] + + v[1]");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
        CHECK(e.col() > 0);
    }
    CHECK_THROWS_AS(parse_spec("box q -1 1;\nL = 1"), ParseError); // dim first
    CHECK_THROWS_AS(parse_spec("dim 2;\nL = q[3]"), ParseError);   // out of range
    CHECK_THROWS_AS(parse_spec("dim 2;\nL = w[1]"), ParseError);   // unknown name
}

TEST_CASE("exponents are restricted to rational literals") {
    SystemSpec s = parse_spec("dim 2;\nbox q -1 1;\nbox v -1 1;\nL = dot(v,v)");
    CHECK_NOTHROW(parse_expr_in(s, "q[1]^2"));
    CHECK_NOTHROW(parse_expr_in(s, "q[1]^(-3/2)"));
    CHECK_NOTHROW(parse_expr_in(s, "q[1]^(1/2)"));
    CHECK_THROWS_AS(parse_expr_in(s, "q[1]^v[1]"), ParseError);
    CHECK_THROWS_AS(parse_expr_in(s, "q[1]^(q[2])"), ParseError);
    CHECK_THROWS_AS(parse_expr_in(s, "q[1]^1.5"), ParseError);
}

TEST_CASE("precedence and associativity") {
    SystemSpec s = parse_spec("dim 1;\nbox q -1 1;\nbox v -1 1;\nL = v[1]");
    std::vector<Real> q = {2}, v = {3};
    auto val = [&](const char* t) {
        return eval_expr(parse_expr_in(s, t), q, v, s.params);
    };
    CHECK(val("2 + 3*4") == 14.0);
    CHECK(val("2 - 3 - 4") == -5.0);
    CHECK(val("12/3/2") == 2.0);
    CHECK(val("-q[1]^2") == -4.0);      // unary minus binds looser than pow
    CHECK(val("2*q[1]^2") == 8.0);
    CHECK(val("(2*q[1])^2") == 16.0);
}
