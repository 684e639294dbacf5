#include <doctest.h>

#include "lagsym/examples.hpp"
#include "lagsym/report.hpp"

#include <stdexcept>

using namespace lagsym;

TEST_CASE("builtin registry") {
    const auto& names = builtin_names();
    CHECK(names.size() == 6);
    for (const auto& n : names) {
        BuiltinExample ex = builtin(n);
        CHECK(ex.name == n);
        CHECK_FALSE(ex.text.empty());
        CHECK(ex.spec.dim >= 1);
        CHECK_NOTHROW(compile_system(ex.spec));
    }
    CHECK_THROWS_AS(builtin("nope"), std::invalid_argument);
    CHECK(builtin("oscillator").expected.value() == ExpectedRow{0, 0, 0, 0, 0});
}

TEST_CASE("classification table reproduces at a reduced sample count") {
    Table1Result t = reproduce_table1(32, 424242);
    REQUIRE(t.rows.size() == 5);
    CHECK(t.all_match);
    for (const auto& row : t.rows) {
        CAPTURE(row.name);
        CHECK(row.match);
        CHECK(row.actual == row.expected);
    }
    // serialization covers every cell
    auto j = table1_json(t, ConstraintOptions{}, 424242, 32);
    CHECK(j["schema"] == kReportSchema);
    CHECK(j["all_match"] == true);
    CHECK(j["rows"].size() == 5);
    for (const auto& jr : j["rows"]) CHECK(jr["actual"].size() == 5);
    CHECK_FALSE(table1_text(t).empty());
}

TEST_CASE("restricted well dynamics reduce to the conformal system") {
    AppendixCheckResult r = appendix_check(16, 31337);
    CHECK(r.points == 16);
    // on the critical sphere the radial gradient of the well vanishes under
    // the tangential projector
    CHECK(r.projector_radial_residual < 1e-10);
    // the scale-free angular potential's gradient is already tangential
    CHECK(r.projector_angular_residual < 1e-10);
    // projected accelerations of the two variants agree on the surface
    CHECK(r.projected_accel_residual < 1e-8);
    CHECK(r.gamma_on_surface < 1e-9);
}
