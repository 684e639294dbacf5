#ifndef LAGSYM_REPORT_HPP
#define LAGSYM_REPORT_HPP

#include "lagsym/dynamics.hpp"
#include "lagsym/examples.hpp"

#include <json.hpp>

namespace lagsym {

// All emitted documents carry this schema tag plus a reproducibility block
// (seed, tolerances, domain box); identical inputs give byte-identical output.
inline constexpr const char* kReportSchema = "lagsym-report/1";

using Json = nlohmann::ordered_json;

Json reproducibility_block(const SystemSpec& spec, const ConstraintOptions& opts,
                           std::uint64_t seed, int samples);

Json ledger_json(const ConstraintLedger& ledger);
Json generator_basis_json(const GeneratorBasis& basis);

// Full analysis document: dimensions, kernel counts, ledger, both symmetry
// classifications with evidence.
Json analysis_json(const std::string& system_name, const SystemSpec& spec,
                   const SymmetryReport& rep, const ConstraintOptions& opts);
std::string analysis_text(const std::string& system_name, const SymmetryReport& rep);

Json trajectory_json(const std::string& system_name, const SystemSpec& spec,
                     const Trajectory& traj, const ConstraintOptions& opts,
                     std::uint64_t seed);
std::string trajectory_csv(const Trajectory& traj, const ConstraintLedger& ledger);
// One-line drift summary (max energy drift, max constraint violation).
std::string trajectory_summary(const Trajectory& traj);

Json table1_json(const Table1Result& result, const ConstraintOptions& opts,
                 std::uint64_t seed, int samples);
std::string table1_text(const Table1Result& result);

} // namespace lagsym

#endif
