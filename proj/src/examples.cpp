#include "lagsym/examples.hpp"

#include "lagsym/dynamics.hpp"
#include "lagsym/errors.hpp"

#include <stdexcept>

namespace lagsym {

namespace {

const char* kOscillator = R"(# regular control system: unit-mass harmonic oscillator
dim 1;
param k = 1;
box q -2 2;
box v -2 2;
L = 0.5*v[1]^2 - 0.5*k*q[1]^2
)";

// Scale-invariant kinetic term shared by the single-particle variants.
const char* kS1Kinetic =
    "0.5*m*(dot(v,v)/dot(q,q) - dot(q,v)^2/dot(q,q)^2)";

std::string s1_text(const std::string& potential) {
    return std::string("# single particle with conformally rescaled kinetic energy\n") +
           "dim 3;\n"
           "param m = 1;\n"
           "param k = 1;\n"
           "param kappa = 1;\n"
           "param b = 0;\n"
           "guard norm(q);\n"
           "box q 0.5 2;\n"
           "box v -1 1;\n"
           "L = " + kS1Kinetic + " - (" + potential + ")\n";
}

const char* kS2 = R"(# two interacting particles on the plane, scale-invariant coupling
dim 4;
param m = 1;
param lambda = 1;
slice q1 = q[1..2];
slice q2 = q[3..4];
guard norm(q1);
guard norm(q2);
guard 1 - dot(q1,q2)^2/(dot(q1,q1)*dot(q2,q2));
box q 0.5 2;
box v -1 1;
L = 0.5*m*(dot(v[q1],v[q1])/dot(q1,q1) - dot(q1,v[q1])^2/dot(q1,q1)^2)
  + 0.5*m*(dot(v[q2],v[q2])/dot(q2,q2) - dot(q2,v[q2])^2/dot(q2,q2)^2)
  + 0.5*lambda*((dot(q1,v[q2]) - dot(q2,v[q1]))/(norm(q1)*norm(q2))
      - dot(q1,q2)*(dot(q1,v[q1])/dot(q1,q1) - dot(q2,v[q2])/dot(q2,q2))
        /(norm(q1)*norm(q2)))
)";

const char* kS3 = R"(# reparametrization-invariant particle (fully constrained)
dim 3;
param m = 1;
guard norm(q);
guard dot(v,v) - dot(q,v)^2/dot(q,q);
box q 0.5 2;
box v -1 1;
L = m*sqrt(dot(v,v) - dot(q,v)^2/dot(q,q))/norm(q)
)";

struct BuiltinDef {
    const char* name;
    std::string text;
    std::optional<ExpectedRow> expected;
};

const std::vector<BuiltinDef>& defs() {
    static const std::vector<BuiltinDef> d = {
        {"oscillator", kOscillator, ExpectedRow{0, 0, 0, 0, 0}},
        // Purely angular potential: the scaling symmetry of the kinetic term
        // survives in the action.
        {"s1_conformal", s1_text("b + k*q[3]/norm(q)"), ExpectedRow{1, 1, 1, 0, 1}},
        // Radial well with a critical radius plus the angular term: the
        // constraint surface is the critical sphere.
        {"s1_spherical", s1_text("0.5*kappa*(norm(q)-1)^2 + k*q[3]/norm(q)"),
         ExpectedRow{1, 1, 0, 1, 0}},
        // Radial well perturbed by a quadratic that breaks the angular
        // symmetry: the radial derivative of V has a simple zero set with
        // nonvanishing second radial derivative, so the multiplier is
        // determined and no symmetry survives.  Critical radius 1.5 keeps the
        // zero set inside the sampling shell despite the perturbation.
        {"s1_generic", s1_text("0.5*kappa*(norm(q)-1.5)^2 + 0.5*k*q[1]^2"),
         ExpectedRow{1, 0, 0, 1, 0}},
        {"s2", kS2, ExpectedRow{2, 1, 1, 1, 1}},
        {"s3", kS3, ExpectedRow{2, 2, 2, 0, 2}},
    };
    return d;
}

} // namespace

BuiltinExample builtin(const std::string& name) {
    for (const auto& d : defs()) {
        if (name == d.name) {
            BuiltinExample ex;
            ex.name = d.name;
            ex.text = d.text;
            ex.spec = parse_spec(d.text);
            ex.expected = d.expected;
            return ex;
        }
    }
    throw std::invalid_argument("unknown builtin example: " + name);
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& d : defs()) n.push_back(d.name);
        return n;
    }();
    return names;
}

Table1Result reproduce_table1(int samples, std::uint64_t seed,
                              const ConstraintOptions& opts) {
    static const std::vector<std::string> rows_order = {
        "s1_conformal", "s1_spherical", "s1_generic", "s2", "s3"};
    Table1Result result;
    result.all_match = true;
    for (const auto& name : rows_order) {
        BuiltinExample ex = builtin(name);
        Table1Row row;
        row.name = name;
        row.expected = *ex.expected;
        row.system = std::make_shared<CompiledLagrangian>(compile_system(ex.spec));
        row.report = symmetry_report(*row.system, samples, seed, opts);
        row.actual = {row.report.N0, row.report.dim_sym, row.report.dim_symL,
                      row.report.I1, row.report.dim_sol};
        row.match = row.actual == row.expected && !row.report.sym_undetermined;
        result.all_match = result.all_match && row.match;
        result.rows.push_back(std::move(row));
    }
    return result;
}

AppendixCheckResult appendix_check(int points, std::uint64_t seed,
                                   const ConstraintOptions& opts) {
    BuiltinExample well = builtin("s1_spherical");
    BuiltinExample conf = builtin("s1_conformal");
    CompiledLagrangian sys_well = compile_system(well.spec);
    CompiledLagrangian sys_conf = compile_system(conf.spec);
    const int D = sys_well.dim();

    // The two potential pieces, differentiated symbolically for the projector
    // identities.
    Expr v_radial = parse_expr_in(well.spec, "0.5*kappa*(norm(q)-1)^2");
    Expr v_angular = parse_expr_in(well.spec, "k*q[3]/norm(q)");
    std::vector<Expr> d_radial(D), d_angular(D);
    for (int a = 0; a < D; ++a) {
        d_radial[a] = simplify(differentiate(v_radial, Op::Coord, a + 1));
        d_angular[a] = simplify(differentiate(v_angular, Op::Coord, a + 1));
    }

    ConstraintOptions o = opts;
    o.seed = seed;
    Sampler sampler(sys_well, seed, o.guard_min);
    ConstraintLedger ledger =
        run_constraint_algorithm(sys_well, sampler.sample_n(32), o);

    AppendixCheckResult res;
    int collected = 0;
    for (int tries = 0; tries < 8 * points && collected < points; ++tries) {
        PhasePoint p;
        try {
            p = project_to_constraint_surface(sys_well, ledger, sampler.sample(),
                                              ledger.n_F, o);
        } catch (const EmptySurface&) {
            continue;
        }
        ++collected;

        Eigen::VectorXd qhat = p.q.normalized();
        Eigen::MatrixXd Pi =
            Eigen::MatrixXd::Identity(D, D) - qhat * qhat.transpose();

        Eigen::VectorXd gr(D), ga(D);
        for (int a = 0; a < D; ++a) {
            gr(a) = eval_scalar(sys_well, d_radial[a], p);
            ga(a) = eval_scalar(sys_well, d_angular[a], p);
        }
        res.projector_radial_residual =
            std::max(res.projector_radial_residual, (Pi * gr).norm());
        res.projector_angular_residual =
            std::max(res.projector_angular_residual, (Pi * ga - ga).norm());

        // The minimum-norm acceleration is supported on the projector plane,
        // so it is the projected equation-of-motion acceleration directly.
        Eigen::VectorXd a_well = base_field_at(sys_well, p, o.tol_rank).tail(D);
        Eigen::VectorXd a_conf = base_field_at(sys_conf, p, o.tol_rank).tail(D);
        Real scale = 1.0 + std::max(a_well.cwiseAbs().maxCoeff(),
                                    a_conf.cwiseAbs().maxCoeff());
        res.projected_accel_residual = std::max(
            res.projected_accel_residual, (Pi * (a_well - a_conf)).norm() / scale);

        KernelData kd = kernel_at(sys_well, p, o.tol_rank);
        res.gamma_on_surface =
            std::max(res.gamma_on_surface,
                     first_order_constraints(sys_well, p, kd).cwiseAbs().maxCoeff());
    }
    if (collected == 0)
        throw EmptySurface("no projected points found for the restriction check");
    res.points = collected;
    return res;
}

} // namespace lagsym
