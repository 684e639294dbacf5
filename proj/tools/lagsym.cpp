#include "lagsym/errors.hpp"
#include "lagsym/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace lagsym;

namespace {

struct RunConfig {
    std::uint64_t seed = 20240817;
    int samples = 64;
    Real tol_rank = 1e-9;
    Real eps_id = 1e-8;
    int max_order = 10;
    std::string format = "json";
    std::string out; // empty = stdout
    bool project_each_step = false;

    ConstraintOptions opts() const {
        ConstraintOptions o;
        o.tol_rank = tol_rank;
        o.eps_id = eps_id;
        o.max_order = max_order;
        o.seed = seed;
        return o;
    }
};

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--seed", cfg.seed, "sampling seed (env LAGSYM_SEED is the fallback)");
    cmd->add_option("--samples", cfg.samples, "sample count for identity tests")
        ->check(CLI::Range(16, 1 << 20));
    cmd->add_option("--tol-rank", cfg.tol_rank, "relative singular-value cutoff")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--eps-id", cfg.eps_id, "identity-test threshold")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-order", cfg.max_order, "constraint algorithm order cap")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--format", cfg.format, "json|text|csv")
        ->check(CLI::IsMember({"json", "text", "csv"}));
    cmd->add_option("--out", cfg.out, "output path (default stdout)");
}

void emit(const RunConfig& cfg, const std::string& body) {
    if (cfg.out.empty()) {
        std::cout << body;
        if (!body.empty() && body.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream f(cfg.out);
        if (!f) throw std::runtime_error("cannot open output file: " + cfg.out);
        f << body;
        if (!body.empty() && body.back() != '\n') f << '\n';
    }
}

// A spec argument names either a file on disk or a built-in example.
std::pair<std::string, SystemSpec> resolve_spec(const std::string& arg) {
    std::ifstream f(arg);
    if (f) {
        std::stringstream ss;
        ss << f.rdbuf();
        std::string name = arg;
        auto slash = name.find_last_of('/');
        if (slash != std::string::npos) name = name.substr(slash + 1);
        return {name, parse_spec(ss.str())};
    }
    BuiltinExample ex = builtin(arg);
    return {ex.name, ex.spec};
}

int cmd_analyze(const std::string& spec_arg, const RunConfig& cfg) {
    auto [name, spec] = resolve_spec(spec_arg);
    CompiledLagrangian sys = compile_system(spec);
    SymmetryReport rep = symmetry_report(sys, cfg.samples, cfg.seed, cfg.opts());
    if (cfg.format == "text")
        emit(cfg, analysis_text(name, rep));
    else
        emit(cfg, analysis_json(name, spec, rep, cfg.opts()).dump(2));
    return 0;
}

int cmd_integrate(const std::string& spec_arg, std::vector<Real> q0,
                  std::vector<Real> v0, Real t_end, Real dt,
                  const std::vector<std::pair<int, Real>>& gauge_consts,
                  const RunConfig& cfg) {
    auto [name, spec] = resolve_spec(spec_arg);
    CompiledLagrangian sys = compile_system(spec);
    const int D = sys.dim();
    if (static_cast<int>(q0.size()) != D || static_cast<int>(v0.size()) != D)
        throw std::runtime_error("--q0/--v0 must each have " + std::to_string(D) +
                                 " components");
    PhasePoint u0;
    u0.q = Eigen::Map<Eigen::VectorXd>(q0.data(), D);
    u0.v = Eigen::Map<Eigen::VectorXd>(v0.data(), D);

    ConstraintOptions opts = cfg.opts();
    Sampler sampler(sys, cfg.seed, opts.guard_min);
    ConstraintLedger ledger = run_constraint_algorithm(sys, sampler.sample_n(32), opts);
    if (ledger.any_nontrivial)
        u0 = project_to_constraint_surface(sys, ledger, u0, ledger.n_F, opts);

    std::map<int, GaugeFn> gauge;
    for (auto [idx, val] : gauge_consts)
        gauge[idx - 1] = [val](const PhasePoint&, const KernelData&) { return val; };
    Soelvf sv = assemble_soelvf(sys, ledger, std::move(gauge), opts);
    Trajectory traj = integrate_flow(sv, u0, t_end, dt, cfg.project_each_step);

    if (cfg.format == "csv")
        emit(cfg, trajectory_csv(traj, ledger) + "# " + trajectory_summary(traj) + "\n");
    else if (cfg.format == "text")
        emit(cfg, trajectory_summary(traj) + "\n");
    else
        emit(cfg, trajectory_json(name, spec, traj, opts, cfg.seed).dump(2));
    std::cerr << trajectory_summary(traj) << "\n";
    return traj.ok ? 0 : 1;
}

int cmd_table1(const RunConfig& cfg) {
    Table1Result result = reproduce_table1(cfg.samples, cfg.seed, cfg.opts());
    if (cfg.format == "json")
        emit(cfg, table1_json(result, cfg.opts(), cfg.seed, cfg.samples).dump(2));
    else
        emit(cfg, table1_text(result));
    return result.all_match ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"symmetry and constraint analysis of singular Lagrangians"};
    app.require_subcommand(1);

    RunConfig cfg;
    if (const char* env = std::getenv("LAGSYM_SEED"))
        cfg.seed = std::strtoull(env, nullptr, 10);

    std::string spec_arg;
    auto* analyze = app.add_subcommand("analyze", "full structure/symmetry report");
    analyze->add_option("spec", spec_arg, "spec file or builtin name")->required();
    add_common_flags(analyze, cfg);

    std::vector<Real> q0, v0;
    Real t_end = 5.0, dt = 1e-2;
    std::vector<std::string> gauge_raw;
    auto* integrate = app.add_subcommand("integrate", "integrate the assembled field");
    integrate->add_option("spec", spec_arg, "spec file or builtin name")->required();
    integrate->add_option("--q0", q0, "initial coordinates")->required()->expected(-1);
    integrate->add_option("--v0", v0, "initial velocities")->required()->expected(-1);
    integrate->add_option("--t-end", t_end, "integration time");
    integrate->add_option("--dt", dt, "initial step size");
    integrate->add_option("--gauge", gauge_raw,
                          "free multiplier constants as INDEX=VALUE (1-based)");
    integrate->add_flag("--project-each-step", cfg.project_each_step,
                        "re-project onto the constraint surface after each step");
    add_common_flags(integrate, cfg);

    auto* table1 = app.add_subcommand("table1", "classification table for the builtins");
    add_common_flags(table1, cfg);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(spec_arg, cfg);
        if (app.got_subcommand(integrate)) {
            std::vector<std::pair<int, Real>> gauge;
            for (const auto& g : gauge_raw) {
                auto eq = g.find('=');
                if (eq == std::string::npos)
                    throw std::runtime_error("--gauge expects INDEX=VALUE, got: " + g);
                gauge.emplace_back(std::stoi(g.substr(0, eq)),
                                   std::stod(g.substr(eq + 1)));
            }
            return cmd_integrate(spec_arg, q0, v0, t_end, dt, gauge, cfg);
        }
        return cmd_table1(cfg);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const RankInstability& e) {
        std::cerr << "rank instability: " << e.what() << "\n";
        return 3;
    } catch (const EmptySurface& e) {
        std::cerr << "empty constraint surface: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
