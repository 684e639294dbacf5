#include "lagsym/report.hpp"

#include <iomanip>
#include <sstream>

namespace lagsym {

namespace {

Json vec_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json mat_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i)));
    return rows;
}

Json box_json(const std::vector<BoxInterval>& box) {
    Json a = Json::array();
    for (const auto& b : box)
        a.push_back({{"lo", b.lo}, {"hi", b.hi}, {"shell", b.shell}});
    return a;
}

std::string fmt(Real x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

} // namespace

Json reproducibility_block(const SystemSpec& spec, const ConstraintOptions& opts,
                           std::uint64_t seed, int samples) {
    Json j;
    j["seed"] = seed;
    j["samples"] = samples;
    j["tol_rank"] = opts.tol_rank;
    j["eps_id"] = opts.eps_id;
    j["guard_min"] = opts.guard_min;
    j["max_order"] = opts.max_order;
    j["domain_box"] = {{"q", box_json(spec.q_box)}, {"v", box_json(spec.v_box)}};
    return j;
}

Json ledger_json(const ConstraintLedger& ledger) {
    Json j;
    j["N0"] = ledger.N0;
    j["phase_dim"] = ledger.dim2;
    j["n_F"] = ledger.n_F;
    j["termination"] = ledger.termination;
    j["free_multipliers"] = ledger.free_multipliers;
    j["any_nontrivial"] = ledger.any_nontrivial;
    Json orders = Json::array();
    for (const auto& o : ledger.orders) {
        Json oj;
        oj["level"] = o.level;
        oj["n_constraints"] = o.n_constraints;
        oj["nontrivial"] = o.nontrivial;
        oj["rank"] = o.rank;
        oj["independent"] = o.independent;
        oj["max_abs_gamma"] = o.max_abs_gamma;
        oj["symmetry_defect"] = o.symmetry_defect;
        oj["Gamma_ref"] = mat_json(o.Gamma_ref);
        orders.push_back(std::move(oj));
    }
    j["orders"] = std::move(orders);
    return j;
}

Json generator_basis_json(const GeneratorBasis& basis) {
    Json j;
    j["kind"] = basis.kind == GeneratorBasis::Kind::Action ? "action" : "el-equations";
    j["dim"] = basis.dim;
    j["undetermined"] = basis.undetermined;
    j["samples_used"] = basis.samples_used;
    j["coeffs_ref"] = mat_json(basis.coeffs_ref);
    j["sample_residuals"] = basis.sample_residuals;
    return j;
}

Json analysis_json(const std::string& system_name, const SystemSpec& spec,
                   const SymmetryReport& rep, const ConstraintOptions& opts) {
    Json j;
    j["schema"] = kReportSchema;
    j["kind"] = "analysis";
    j["system"] = system_name;
    j["dims"] = {
        {"configuration", spec.dim},
        {"N0", rep.N0},
        {"ker_omega_svd", rep.ker_svd_dim},
        {"ker_omega_predicted_2n0", rep.predicted_2n0},
        {"ker_omega_predicted_n0_plus_cbar", rep.predicted_n0_plus_cbar},
        {"sym", rep.dim_sym},
        {"symL", rep.dim_symL},
        {"I1", rep.I1},
        {"sol_free", rep.dim_sol},
        {"sym_undetermined", rep.sym_undetermined},
    };
    j["ledger"] = ledger_json(rep.ledger);
    j["symL"] = generator_basis_json(rep.symL);
    j["sym"] = generator_basis_json(rep.sym);
    j["lemma_subset_defect"] = rep.lemma_subset_defect;
    j["reproducibility"] = reproducibility_block(spec, opts, rep.seed, rep.samples);
    return j;
}

std::string analysis_text(const std::string& system_name, const SymmetryReport& rep) {
    std::ostringstream os;
    os << "system: " << system_name << "\n"
       << "  N0 = " << rep.N0 << ", dim ker(omega) [svd] = " << rep.ker_svd_dim
       << " (predicted 2*N0 = " << rep.predicted_2n0 << ", N0+dim(Cbar) = "
       << rep.predicted_n0_plus_cbar << ")\n"
       << "  Sym = " << rep.dim_sym << (rep.sym_undetermined ? " (undetermined)" : "")
       << ", SymL = " << rep.dim_symL << ", I1 = " << rep.I1
       << ", free multipliers = " << rep.dim_sol << "\n"
       << "  constraint algorithm: n_F = " << rep.ledger.n_F << ", termination = "
       << rep.ledger.termination << "\n";
    for (const auto& o : rep.ledger.orders)
        os << "    order " << o.level << ": carried " << o.n_constraints
           << ", nontrivial " << o.nontrivial.size() << ", rank " << o.rank
           << ", I = " << o.independent << ", max|gamma| = " << fmt(o.max_abs_gamma)
           << "\n";
    return os.str();
}

Json trajectory_json(const std::string& system_name, const SystemSpec& spec,
                     const Trajectory& traj, const ConstraintOptions& opts,
                     std::uint64_t seed) {
    Json j;
    j["schema"] = kReportSchema;
    j["kind"] = "trajectory";
    j["system"] = system_name;
    j["ok"] = traj.ok;
    j["message"] = traj.message;
    j["steps_accepted"] = traj.steps_accepted;
    j["steps_rejected"] = traj.steps_rejected;
    Json rows = Json::array();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        Json r;
        r["t"] = traj.times[i];
        r["q"] = vec_json(traj.points[i].q);
        r["v"] = vec_json(traj.points[i].v);
        r["E"] = traj.energy[i];
        r["gamma_max"] = traj.gamma_max[i];
        r["kernel_overlap"] = traj.overlap[i];
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["summary"] = trajectory_summary(traj);
    j["reproducibility"] = reproducibility_block(spec, opts, seed, 0);
    return j;
}

std::string trajectory_csv(const Trajectory& traj, const ConstraintLedger& ledger) {
    std::ostringstream os;
    os << std::setprecision(17);
    const int D = ledger.dim2 / 2;
    os << "t";
    for (int a = 1; a <= D; ++a) os << ",q" << a;
    for (int a = 1; a <= D; ++a) os << ",v" << a;
    os << ",E,gamma_max,kernel_overlap\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << traj.times[i];
        for (int a = 0; a < D; ++a) os << "," << traj.points[i].q(a);
        for (int a = 0; a < D; ++a) os << "," << traj.points[i].v(a);
        os << "," << traj.energy[i] << "," << traj.gamma_max[i] << ","
           << traj.overlap[i] << "\n";
    }
    return os.str();
}

std::string trajectory_summary(const Trajectory& traj) {
    Real e_drift = 0.0, g_max = 0.0, overlap_min = 1.0;
    if (!traj.energy.empty()) {
        Real e0 = traj.energy.front();
        for (Real e : traj.energy)
            e_drift = std::max(e_drift, std::abs(e - e0) / (1.0 + std::abs(e0)));
    }
    for (Real g : traj.gamma_max) g_max = std::max(g_max, g);
    for (Real o : traj.overlap) overlap_min = std::min(overlap_min, o);
    std::ostringstream os;
    os << "steps " << traj.steps_accepted << " (+" << traj.steps_rejected
       << " rejected), max relative E drift " << fmt(e_drift)
       << ", max |gamma| " << fmt(g_max) << ", min kernel overlap "
       << fmt(overlap_min);
    if (!traj.ok) os << " [FAILED: " << traj.message << "]";
    return os.str();
}

Json table1_json(const Table1Result& result, const ConstraintOptions& opts,
                 std::uint64_t seed, int samples) {
    Json j;
    j["schema"] = kReportSchema;
    j["kind"] = "table1";
    j["all_match"] = result.all_match;
    Json rows = Json::array();
    for (const auto& r : result.rows) {
        Json rj;
        rj["system"] = r.name;
        rj["expected"] = r.expected;
        rj["actual"] = r.actual;
        rj["match"] = r.match;
        rows.push_back(std::move(rj));
    }
    j["rows"] = std::move(rows);
    j["reproducibility"] = {{"seed", seed},
                            {"samples", samples},
                            {"tol_rank", opts.tol_rank},
                            {"eps_id", opts.eps_id},
                            {"max_order", opts.max_order}};
    return j;
}

std::string table1_text(const Table1Result& result) {
    std::ostringstream os;
    os << "system         N0 Sym SymL I1 Sol  expected        status\n";
    for (const auto& r : result.rows) {
        os << std::left << std::setw(14) << r.name << std::right;
        for (int c : r.actual) os << std::setw(4) << c;
        os << "  (";
        for (std::size_t i = 0; i < r.expected.size(); ++i)
            os << (i ? "," : "") << r.expected[i];
        os << ")  " << (r.match ? "ok" : "MISMATCH") << "\n";
    }
    os << (result.all_match ? "all rows match\n" : "MISMATCH in at least one row\n");
    return os.str();
}

} // namespace lagsym
