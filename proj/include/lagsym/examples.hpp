#ifndef LAGSYM_EXAMPLES_HPP
#define LAGSYM_EXAMPLES_HPP

#include "lagsym/symmetry.hpp"

#include <array>
#include <memory>
#include <optional>

namespace lagsym {

// Expected classification row: (kernel quotient dim, Sym, SymL, I1, free
// multipliers).
using ExpectedRow = std::array<int, 5>;

struct BuiltinExample {
    std::string name;
    std::string text;                 // DSL source
    SystemSpec spec;
    std::optional<ExpectedRow> expected;
};

// Recognized names: oscillator, s1_conformal, s1_spherical, s1_generic,
// s2, s3.  Throws std::invalid_argument otherwise.
BuiltinExample builtin(const std::string& name);

const std::vector<std::string>& builtin_names();

struct Table1Row {
    std::string name;
    ExpectedRow expected{};
    ExpectedRow actual{};
    bool match = false;
    // Kept alive here: the report's constraint evaluators close over it.
    std::shared_ptr<CompiledLagrangian> system;
    SymmetryReport report;
};

struct Table1Result {
    std::vector<Table1Row> rows;
    bool all_match = false;
};

// Runs the full pipeline on the five classified systems and compares every
// integer cell.
Table1Result reproduce_table1(int samples = 64, std::uint64_t seed = 20240817,
                              const ConstraintOptions& opts = {});

struct AppendixCheckResult {
    Real projector_radial_residual = 0.0; // projected radial-gradient at the critical radius
    Real projector_angular_residual = 0.0;// angular potential gradient passes through untouched
    Real projected_accel_residual = 0.0;  // restricted dynamics match the conformal case
    Real gamma_on_surface = 0.0;          // radial constraint at projected points
    int points = 0;
};

// On the critical-radius surface of the spherical-well variant, the projected
// equations of motion reduce to the conformal variant's equations.
AppendixCheckResult appendix_check(int points = 16, std::uint64_t seed = 20240817,
                                   const ConstraintOptions& opts = {});

} // namespace lagsym

#endif
