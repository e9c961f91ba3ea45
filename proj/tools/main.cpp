// vortexmf command line: canonical and microcanonical solves, branch sweeps,
// blow-up diagnosis, bubble profiles and the acceptance checklist. Every
// subcommand emits a single JSON artifact whose bytes depend only on the
// configuration (wall_time_s is the one exception, appended last).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "common.hpp"
#include "criteria.hpp"
#include "vortexmf/blowup.hpp"
#include "vortexmf/bubble.hpp"
#include "vortexmf/canonical.hpp"
#include "vortexmf/errors.hpp"
#include "vortexmf/mesh.hpp"
#include "vortexmf/microcanonical.hpp"

using nlohmann::ordered_json;
using namespace vmf;
using namespace vmf::tools;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double s() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

struct GlobalArgs {
    std::string out;
    int threads = 1;
    std::uint64_t seed = 12345;
    std::string config_path;
};

const char* status_name(SampleStatus s) {
    switch (s) {
        case SampleStatus::Converged: return "converged";
        case SampleStatus::Diverged: return "diverged";
        default: return "skipped";
    }
}

const char* case_label(BlowupCase c) {
    switch (c) {
        case BlowupCase::I: return "I";
        case BlowupCase::II: return "II";
        case BlowupCase::III: return "III";
        default: return "none";
    }
}

double sup_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.v) m = std::max(m, std::abs(v));
    return m;
}

ordered_json solution_json(const MeanFieldSolution& sol) {
    ordered_json j;
    j["lambda"] = sol.spec.lambda;
    j["converged"] = sol.converged;
    j["supercritical"] = sol.supercritical;
    j["iterations"] = sol.iterations;
    j["final_update"] = sol.final_update;
    j["energy"] = sol.energy;
    j["vortex_energy"] = sol.vortex_energy;
    j["mvp_energy"] = sol.mvp_energy();
    j["entropy"] = sol.entropy;
    j["free_energy"] = sol.free_energy;
    j["j_value"] = sol.j_value;
    j["fj_gap"] = sol.free_energy - sol.j_value;
    j["log_normalizer"] = sol.log_normalizer;
    j["sup_psi"] = sup_abs(sol.psi);
    return j;
}

void dump_field(const std::string& path, const ScalarField& f) {
    if (path.empty()) return;
    std::ofstream os(path);
    require_config(bool(os), "cannot open '" + path + "'");
    write_field_csv(os, f);
}

// ---- cvp -------------------------------------------------------------------

struct CvpArgs {
    std::string mesh = "disk:4096";
    double sigma = 0.0, eps = 0.0;
    double lambda = -1.0;          // <0 = not set
    std::string lambda_grid;
    double omega = 0.5, tol = 0.0;
    int max_iter = 10000;
    std::string curve_csv, field_csv, rho_csv;
};

int run_cvp(const GlobalArgs& g, const CvpArgs& a) {
    require_config((a.lambda >= 0.0) != (!a.lambda_grid.empty()),
                   "cvp: pass exactly one of --lambda or --lambda-grid");
    ordered_json cfg;
    cfg["mesh"] = a.mesh;
    cfg["sigma"] = a.sigma;
    cfg["eps"] = a.eps;
    if (a.lambda >= 0.0) cfg["lambda"] = a.lambda;
    if (!a.lambda_grid.empty()) cfg["lambda_grid"] = a.lambda_grid;
    cfg["omega"] = a.omega;
    cfg["tol"] = a.tol;
    cfg["max_iter"] = a.max_iter;
    cfg["threads"] = g.threads;
    cfg["seed"] = g.seed;

    std::vector<std::string> inputs;
    if (!g.config_path.empty()) inputs.push_back(g.config_path);
    ordered_json art = artifact_envelope("cvp", cfg, inputs);

    Timer t;
    MeshPtr mesh = parse_mesh_spec(a.mesh);
    SolveOptions sopt;
    sopt.omega = a.omega;
    sopt.tol = a.tol;
    sopt.max_iter = a.max_iter;

    int rc = 0;
    ordered_json result;
    if (!a.lambda_grid.empty()) {
        std::vector<double> lams = parse_double_list(a.lambda_grid, "cvp --lambda-grid");
        SweepOptions sw;
        sw.solve = sopt;
        EnsembleCurve curve = sweep_lambda(mesh, a.sigma, a.eps, lams, sw);
        result["kind"] = "curve";
        result["branch_end"] = curve.branch_end;
        ordered_json rows = ordered_json::array();
        for (const auto& s : curve.samples) {
            ordered_json row;
            row["lambda"] = s.lambda;
            row["E"] = s.E;
            row["S"] = s.S;
            row["F"] = s.F;
            row["J"] = s.J;
            row["sup_psi"] = s.sup_psi;
            row["mass_b01"] = s.mass_b01;
            row["mass_b001"] = s.mass_b001;
            row["status"] = status_name(s.status);
            rows.push_back(std::move(row));
        }
        result["samples"] = std::move(rows);
        if (!a.curve_csv.empty()) {
            std::ofstream os(a.curve_csv);
            require_config(bool(os), "cannot open '" + a.curve_csv + "'");
            write_curve_csv(os, curve);
        }
        if (curve.branch_end >= 0) rc = 2;
    } else {
        MeanFieldSolution sol = solve_cvp(mesh, WeightSpec{a.sigma, a.lambda, a.eps}, sopt);
        result["kind"] = "solution";
        result.update(solution_json(sol));
        dump_field(a.field_csv, sol.psi);
        dump_field(a.rho_csv, sol.rho);
        if (!sol.converged) rc = 2;
    }
    finish_artifact(art, std::move(result), t.s());
    write_artifact(art, g.out);
    return rc;
}

// ---- mvp -------------------------------------------------------------------

struct MvpArgs {
    std::string mesh = "disk:4096";
    double sigma = 0.0, eps = 1e-3;
    double energy = HUGE_VAL;      // HUGE_VAL = not set
    std::string energy_grid, eps_seq;
    bool classify = false;
    double lambda_min = 0.0, lambda_max = 0.0, energy_tol = 1e-8;
    int scan_points = 32;
};

int run_mvp(const GlobalArgs& g, const MvpArgs& a) {
    ordered_json cfg;
    cfg["mesh"] = a.mesh;
    cfg["sigma"] = a.sigma;
    cfg["eps"] = a.eps;
    if (a.energy != HUGE_VAL) cfg["energy"] = a.energy;
    if (!a.energy_grid.empty()) cfg["energy_grid"] = a.energy_grid;
    if (!a.eps_seq.empty()) cfg["eps_seq"] = a.eps_seq;
    cfg["classify"] = a.classify;
    cfg["lambda_min"] = a.lambda_min;
    cfg["lambda_max"] = a.lambda_max;
    cfg["energy_tol"] = a.energy_tol;
    cfg["scan_points"] = a.scan_points;
    cfg["threads"] = g.threads;
    cfg["seed"] = g.seed;

    std::vector<std::string> inputs;
    if (!g.config_path.empty()) inputs.push_back(g.config_path);
    ordered_json art = artifact_envelope("mvp", cfg, inputs);

    Timer t;
    MeshPtr mesh = parse_mesh_spec(a.mesh);
    MvpOptions mopt;
    mopt.lambda_min = a.lambda_min;
    mopt.lambda_max = a.lambda_max;
    mopt.energy_tol = a.energy_tol;
    mopt.scan_points = a.scan_points;

    int rc = 0;
    ordered_json result;
    if (a.classify) {
        require_config(!a.energy_grid.empty(), "mvp --classify needs --energy-grid");
        std::vector<double> grid = parse_double_list(a.energy_grid, "mvp --energy-grid");
        DomainTypeReport rep = classify_domain_type(mesh, a.sigma, a.eps, grid, mopt);
        result["kind"] = "domain_type";
        result["verdict"] = rep.verdict == DomainType::TypeI      ? "TypeI"
                            : rep.verdict == DomainType::TypeII   ? "TypeII"
                                                                  : "Inconclusive";
        ordered_json table = ordered_json::array();
        for (const auto& e : rep.table) {
            ordered_json row;
            row["E"] = e.E;
            row["has_root"] = e.has_root;
            row["lambda"] = e.lambda;
            row["below_threshold"] = e.below_threshold;
            table.push_back(std::move(row));
        }
        result["table"] = std::move(table);
    } else if (!a.eps_seq.empty()) {
        require_config(a.energy != HUGE_VAL, "mvp --eps-seq needs --energy");
        std::vector<double> seq = parse_double_list(a.eps_seq, "mvp --eps-seq");
        RegLimitReport rep = mvp_regularization_limit(mesh, a.sigma, a.energy, seq, mopt);
        result["kind"] = "regularization_limit";
        ordered_json rows = ordered_json::array();
        for (const auto& s : rep.samples) {
            ordered_json row;
            row["eps"] = s.eps;
            row["ok"] = s.ok;
            row["lambda"] = s.lambda;
            row["entropy"] = s.entropy;
            row["lambda_delta"] = s.lambda_delta;
            row["rho_l1_delta"] = s.rho_l1_delta;
            rows.push_back(std::move(row));
        }
        result["samples"] = std::move(rows);
        result["cauchy"] = rep.cauchy;
        result["complete"] = rep.complete;
        if (!rep.complete) rc = 2;
    } else {
        require_config(a.energy != HUGE_VAL, "mvp needs --energy (or --classify/--eps-seq)");
        MvpResult res = solve_mvp(mesh, a.sigma, a.eps, a.energy, mopt);
        result["kind"] = "inversion";
        result["energy_target"] = res.target_energy;
        result["eps"] = res.eps;
        if (res.found) {
            const MvpRoot& root = res.roots[std::size_t(res.primary)];
            result["lambda"] = root.lambda;
            result["entropy"] = root.entropy;
            result["achieved_energy"] = root.achieved_energy;
        } else {
            result["lambda"] = nullptr;
            result["entropy"] = nullptr;
            result["achieved_energy"] = nullptr;
        }
        ordered_json roots = ordered_json::array();
        for (const auto& root : res.roots) {
            ordered_json row;
            row["lambda"] = root.lambda;
            row["achieved_energy"] = root.achieved_energy;
            row["entropy"] = root.entropy;
            roots.push_back(std::move(row));
        }
        result["roots"] = std::move(roots);
        result["status"] = res.status;
        result["found"] = res.found;
        if (!res.found) rc = 2;
    }
    finish_artifact(art, std::move(result), t.s());
    write_artifact(art, g.out);
    return rc;
}

// ---- diagnose ---------------------------------------------------------------

struct DiagnoseArgs {
    std::string family;
    double ratio_threshold = 10.0;
    double plateau_tol = 0.01;
    std::string radii;
};

int run_diagnose(const GlobalArgs& g, const DiagnoseArgs& a) {
    require_config(!a.family.empty(), "diagnose needs --family <manifest.json>");
    std::ifstream is(a.family);
    require_config(bool(is), "diagnose: cannot open '" + a.family + "'");
    ordered_json manifest;
    try {
        manifest = ordered_json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw config_error("family manifest: " + std::string(e.what()));
    }

    std::vector<std::string> inputs;
    if (!g.config_path.empty()) inputs.push_back(g.config_path);
    inputs.push_back(a.family);

    double sigma;
    std::string mesh_spec;
    std::vector<std::string> fields;
    std::vector<double> epses, lambdas;
    try {
        sigma = manifest.at("sigma").get<double>();
        mesh_spec = manifest.at("mesh").get<std::string>();
        const auto& members = manifest.at("members");
        require_config(members.is_array(), "family manifest: members must be an array");
        auto base = std::filesystem::path(a.family).parent_path();
        for (const auto& m : members) {
            auto rel = std::filesystem::path(m.at("field").get<std::string>());
            fields.push_back((rel.is_absolute() ? rel : base / rel).string());
            epses.push_back(m.at("eps").get<double>());
            lambdas.push_back(m.value("lambda", 0.0));
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error("family manifest: " + std::string(e.what()));
    }
    require_config(!fields.empty(), "family manifest: no members");
    for (const auto& f : fields) inputs.push_back(f);

    ordered_json cfg;
    cfg["family"] = a.family;
    cfg["ratio_threshold"] = a.ratio_threshold;
    cfg["plateau_tol"] = a.plateau_tol;
    if (!a.radii.empty()) cfg["radii"] = a.radii;
    cfg["threads"] = g.threads;
    cfg["seed"] = g.seed;
    ordered_json art = artifact_envelope("diagnose", cfg, inputs);

    Timer t;
    MeshPtr mesh = parse_mesh_spec(mesh_spec);
    SolutionFamily fam;
    fam.sigma = sigma;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        std::ifstream fs(fields[k]);
        require_config(bool(fs), "diagnose: cannot open field file '" + fields[k] + "'");
        ScalarField v = read_field_csv(fs, mesh);
        fam.members.push_back(make_member(std::move(v), sigma, epses[k], 0.0, lambdas[k]));
    }

    ClassifyOptions copt;
    copt.ratio_threshold = a.ratio_threshold;
    copt.plateau_tol = a.plateau_tol;
    if (!a.radii.empty()) copt.radii = parse_double_list(a.radii, "diagnose --radii");
    BlowupReport rep = classify_profile(fam, copt);

    ordered_json result;
    result["label"] = case_label(rep.label);
    result["lambda_inf"] = rep.lambda_inf;
    result["beta"] = rep.beta;
    result["eps0"] = rep.eps0;
    result["lambdas"] = rep.lambdas;
    result["eps_over_t"] = rep.eps_over_t;
    result["x_over_delta"] = rep.x_over_delta;
    result["pohozaev"] = rep.pohozaev;
    result["fit_exponent"] = rep.fit_exponent;
    result["fit_log_b"] = rep.fit_log_b;
    result["fit_residual"] = rep.fit_residual;
    result["window"] = {{"lower", rep.window.lower},
                        {"upper", rep.window.upper},
                        {"hypotheses_ok", rep.window.hypotheses_ok},
                        {"note", rep.window.note}};
    result["in_window"] = rep.in_window;
    result["notes"] = rep.notes;
    finish_artifact(art, std::move(result), t.s());
    write_artifact(art, g.out);
    return 0;
}

// ---- bubble ------------------------------------------------------------------

struct BubbleArgs {
    double alpha = HUGE_VAL;
    double t0 = 0.0, core = 0.0, r_max = 1e8;
    double target_mass = HUGE_VAL;
    double sigma = HUGE_VAL;       // set: solve the self-consistent exponent
    std::string profile_csv;
};

int run_bubble(const GlobalArgs& g, const BubbleArgs& a) {
    ordered_json cfg;
    if (a.alpha != HUGE_VAL) cfg["alpha"] = a.alpha;
    if (a.sigma != HUGE_VAL) cfg["sigma"] = a.sigma;
    cfg["t0"] = a.t0;
    cfg["core"] = a.core;
    if (a.target_mass != HUGE_VAL) cfg["target_mass"] = a.target_mass;
    cfg["r_max"] = a.r_max;
    cfg["threads"] = g.threads;
    cfg["seed"] = g.seed;

    std::vector<std::string> inputs;
    if (!g.config_path.empty()) inputs.push_back(g.config_path);
    ordered_json art = artifact_envelope("bubble", cfg, inputs);

    Timer t;
    BubbleSolution b;
    if (a.sigma != HUGE_VAL) {
        require_config(a.alpha == HUGE_VAL && a.target_mass == HUGE_VAL,
                       "bubble: --sigma solves the self-consistent exponent; "
                       "drop --alpha/--target-mass");
        double alpha = bubble_selfconsistent_alpha(a.sigma, a.t0, a.core, a.r_max);
        b = bubble_solve(alpha, a.t0, a.core, a.r_max);
    } else {
        require_config(a.alpha != HUGE_VAL, "bubble needs --alpha (or --sigma)");
        b = a.target_mass != HUGE_VAL
                ? bubble_solve_for_mass(a.alpha, a.t0, a.target_mass, a.r_max)
                : bubble_solve(a.alpha, a.t0, a.core, a.r_max);
    }

    ordered_json result;
    result["alpha"] = b.alpha;
    result["t0"] = b.t0;
    result["core"] = b.c;
    result["r_max"] = b.r_max;
    result["mass"] = b.mass;
    result["beta"] = b.beta;
    result["moment"] = b.moment;
    result["identity_residual"] = b.identity_residual;
    result["decay_slope"] = b.decay_slope;
    result["tail_fraction"] = b.tail_fraction;
    if (!a.profile_csv.empty()) {
        std::ofstream os(a.profile_csv);
        require_config(bool(os), "cannot open '" + a.profile_csv + "'");
        os << "r,phi,dphi_dlogr\n";
        for (std::size_t i = 0; i < b.r.size(); ++i)
            os << b.r[i] << "," << b.phi[i] << "," << b.dphi[i] << "\n";
    }
    finish_artifact(art, std::move(result), t.s());
    write_artifact(art, g.out);
    return 0;
}

// ---- validate ----------------------------------------------------------------

struct ValidateArgs {
    std::string only;
    std::string plot_dir;
};

int run_validate(const GlobalArgs& g, const ValidateArgs& a) {
    ordered_json cfg;
    cfg["only"] = a.only;
    cfg["emit_plot_data"] = a.plot_dir;
    cfg["threads"] = g.threads;
    cfg["seed"] = g.seed;
    std::vector<std::string> inputs;
    if (!g.config_path.empty()) inputs.push_back(g.config_path);
    ordered_json art = artifact_envelope("validate", cfg, inputs);

    Timer t;
    ValidateOptions vopt;
    vopt.seed = g.seed;
    vopt.only = a.only;
    vopt.plot_dir = a.plot_dir;
    auto results = run_criteria(vopt);

    bool all = !results.empty();
    ordered_json rows = ordered_json::array();
    for (const auto& r : results) {
        std::printf("criterion %2d %-4s %-48s (%.1f s)  %s\n", r.id,
                    r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                    r.detail.c_str());
        all = all && r.pass;
        ordered_json row;
        row["id"] = r.id;
        row["name"] = r.name;
        row["pass"] = r.pass;
        row["seconds"] = r.seconds;
        row["detail"] = r.detail;
        rows.push_back(std::move(row));
    }
    std::fflush(stdout);
    ordered_json result;
    result["criteria"] = std::move(rows);
    result["all_pass"] = all;
    finish_artifact(art, std::move(result), t.s());
    write_artifact(art, g.out);
    return all ? 0 : 2;
}

// ---- mesh ---------------------------------------------------------------------

struct MeshArgs {
    std::string mesh = "disk:4096";
    std::string nodes_csv;
};

int run_mesh(const GlobalArgs& g, const MeshArgs& a) {
    ordered_json cfg;
    cfg["mesh"] = a.mesh;
    cfg["threads"] = g.threads;
    cfg["seed"] = g.seed;
    std::vector<std::string> inputs;
    if (!g.config_path.empty()) inputs.push_back(g.config_path);
    ordered_json art = artifact_envelope("mesh", cfg, inputs);

    Timer t;
    MeshPtr mesh = parse_mesh_spec(a.mesh);
    ordered_json result;
    result["kind"] = mesh->kind == MeshKind::DiskRadial ? "disk-radial" : "grid-2d";
    result["nodes"] = mesh->size();
    int nb = 0;
    for (char b : mesh->boundary) nb += b != 0;
    result["boundary_nodes"] = nb;
    result["area"] = mesh->area;
    if (mesh->kind == MeshKind::DiskRadial) {
        result["r_first"] = mesh->r.size() > 1 ? mesh->r[1] : 0.0;
        result["r_last"] = mesh->r.back();
    } else {
        result["nx"] = mesh->nx;
        result["ny"] = mesh->ny;
        result["h"] = mesh->h;
    }
    if (!a.nodes_csv.empty()) {
        std::ofstream os(a.nodes_csv);
        require_config(bool(os), "cannot open '" + a.nodes_csv + "'");
        os << "node_id,x,y,weight,boundary\n";
        for (std::size_t i = 0; i < mesh->size(); ++i)
            os << i << "," << mesh->x[i] << "," << mesh->y[i] << "," << mesh->weight[i]
               << "," << int(mesh->boundary[i]) << "\n";
    }
    finish_artifact(art, std::move(result), t.s());
    write_artifact(art, g.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean-field vortex statistics with a fixed point vortex"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs g;
    app.add_option("--out", g.out, "write the JSON artifact here (default: stdout)");
    app.add_option("--threads", g.threads, "thread cap for sweeps")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "seed for randomized checks");
    app.set_config("--config", "", "key=value config file; command line flags win");
    app.allow_config_extras(false);  // unknown config keys are a usage error

    CvpArgs cvp;
    auto* c = app.add_subcommand("cvp", "canonical solve or branch sweep");
    c->add_option("--mesh", cvp.mesh, "disk:<n>[:log|:uniform] or grid:<W>x<H>:<h>")
        ->capture_default_str();
    c->add_option("--sigma", cvp.sigma, "vortex intensity")->capture_default_str();
    c->add_option("--eps", cvp.eps, "regularization scale")->capture_default_str();
    c->add_option("--lambda", cvp.lambda, "inverse-temperature parameter (single solve)");
    c->add_option("--lambda-grid", cvp.lambda_grid,
                  "sweep lambdas: comma list or a:b:n range");
    c->add_option("--omega", cvp.omega, "fixed-point damping")->capture_default_str();
    c->add_option("--tol", cvp.tol, "update tolerance (0 = mesh default)")
        ->capture_default_str();
    c->add_option("--max-iter", cvp.max_iter, "iteration cap")->capture_default_str();
    c->add_option("--curve-csv", cvp.curve_csv, "write the sweep curve as CSV");
    c->add_option("--field-csv", cvp.field_csv, "write the stream function as CSV");
    c->add_option("--rho-csv", cvp.rho_csv, "write the density as CSV");

    MvpArgs mvp;
    auto* m = app.add_subcommand("mvp", "microcanonical inversion at fixed energy");
    m->add_option("--mesh", mvp.mesh, "mesh spec")->capture_default_str();
    m->add_option("--sigma", mvp.sigma, "vortex intensity")->capture_default_str();
    m->add_option("--eps", mvp.eps, "regularization scale")->capture_default_str();
    m->add_option("--energy", mvp.energy, "target energy");
    m->add_option("--energy-grid", mvp.energy_grid,
                  "energies for --classify: comma list or a:b:n");
    m->add_flag("--classify", mvp.classify, "classify the domain type over --energy-grid");
    m->add_option("--eps-seq", mvp.eps_seq,
                  "decreasing eps sequence: track the regularization limit");
    m->add_option("--lambda-min", mvp.lambda_min, "scan bracket start")
        ->capture_default_str();
    m->add_option("--lambda-max", mvp.lambda_max, "scan bracket end (0 = default)")
        ->capture_default_str();
    m->add_option("--energy-tol", mvp.energy_tol, "bisection tolerance on E")
        ->capture_default_str();
    m->add_option("--scan-points", mvp.scan_points, "scan grid size")
        ->capture_default_str();

    DiagnoseArgs dia;
    auto* d = app.add_subcommand("diagnose", "classify a blow-up family from files");
    d->add_option("--family", dia.family, "family manifest JSON")->required();
    d->add_option("--ratio-threshold", dia.ratio_threshold,
                  "bounded/divergent split for the scale ratios")
        ->capture_default_str();
    d->add_option("--plateau-tol", dia.plateau_tol, "concentration plateau tolerance")
        ->capture_default_str();
    d->add_option("--radii", dia.radii, "concentration ball radii (comma list)");

    BubbleArgs bub;
    auto* b = app.add_subcommand("bubble", "entire-plane limiting profile");
    b->add_option("--alpha", bub.alpha, "weight exponent");
    b->add_option("--t0", bub.t0, "core regularization")->capture_default_str();
    b->add_option("--core", bub.core, "center value phi(0)")->capture_default_str();
    b->add_option("--target-mass", bub.target_mass, "solve for this total mass");
    b->add_option("--sigma", bub.sigma, "solve the self-consistent exponent instead");
    b->add_option("--r-max", bub.r_max, "integration horizon")->capture_default_str();
    b->add_option("--profile-csv", bub.profile_csv, "write (r, phi, dphi/dlogr) samples");

    ValidateArgs val;
    auto* v = app.add_subcommand("validate", "run the acceptance checklist");
    v->add_option("--only", val.only, "substring filter on criterion names");
    v->add_option("--emit-plot-data", val.plot_dir, "also write plot CSVs to this directory");

    MeshArgs msh;
    auto* me = app.add_subcommand("mesh", "mesh summary and node dump");
    me->add_option("--mesh", msh.mesh, "mesh spec")->capture_default_str();
    me->add_option("--nodes-csv", msh.nodes_csv, "write the node table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    g.config_path = app.get_config_ptr() && !app.get_config_ptr()->results().empty()
                        ? app.get_config_ptr()->as<std::string>()
                        : "";

    try {
        if (c->parsed()) return run_cvp(g, cvp);
        if (m->parsed()) return run_mvp(g, mvp);
        if (d->parsed()) return run_diagnose(g, dia);
        if (b->parsed()) return run_bubble(g, bub);
        if (v->parsed()) return run_validate(g, val);
        if (me->parsed()) return run_mesh(g, msh);
        std::fprintf(stderr, "no subcommand\n");
        return 1;
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const vmf::domain_error& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return 1;
    } catch (const divergence_error& e) {
        std::fprintf(stderr, "divergence: %s\n", e.what());
        return 2;
    } catch (const internal_error& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
}
