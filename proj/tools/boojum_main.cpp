#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "boojum/analysis.hpp"
#include "boojum/config.hpp"
#include "boojum/io.hpp"
#include "boojum/minimize.hpp"
#include "boojum/tangent_ode.hpp"

// Exit codes: 0 success (solve: converged), 1 usage/config/input error,
// 2 solve hit max_iters without converging (artifacts still written).

namespace {

using namespace boojum;

int usage() {
    std::cerr <<
        "usage:\n"
        "  boojum solve <config>\n"
        "  boojum analyze <checkpoint> <outdir> [--analyses=defects,densities,tangent_ode]\n"
        "  boojum validate-anchoring <profile.csv>\n"
        "  boojum validate-anchoring --amp_polar=<A> --amp_tilt=<B> [--n_polar=<n>]\n"
        "  boojum tangent-ode [--tol=<t>] [--theta0=<t0>] [--out=<report.json>]\n"
        "  boojum densities <checkpoint> <out.csv>\n";
    return 1;
}

bool opt_value(const std::string& arg, const char* name, std::string& out) {
    const std::string prefix = std::string(name) + "=";
    if (arg.rfind(prefix, 0) != 0) return false;
    out = arg.substr(prefix.size());
    return true;
}

AnchoringProfile load_profile(const RunConfig& rc, const MeridianGrid& g) {
    if (rc.anchoring_profile.empty()) return default_profile(rc.anchoring, g);
    std::ifstream is(rc.anchoring_profile);
    if (!is)
        throw std::invalid_argument("anchoring.profile: cannot open " +
                                    rc.anchoring_profile);
    auto prof = read_profile_csv(is);
    const auto v = validate_profile(prof);
    if (!v.all_pass())
        throw std::invalid_argument("anchoring.profile: " + rc.anchoring_profile +
                                    " violates the profile constraints");
    return prof;
}

void emit_analyses(const std::string& dir, const MeridianGrid& g, const UnitField& u,
                   const ModelParams& model, const AnalysisFlags& flags, int threads) {
    namespace fs = std::filesystem;
    if (flags.defects || flags.far_field) {
        write_defect_report_json((fs::path(dir) / "defects.json").string(),
                                 defect_report(u, g));
        write_director_raster_csv((fs::path(dir) / "director_raster.csv").string(), u,
                                  g, 101, 201);
    }
    if (flags.densities) {
        const EnergyModel em(g, default_profile(AnchoringParams{}, g), model, threads);
        const std::vector<double> theta_ladder{0.5, 0.35, 0.25, 0.15, 0.1, 0.07, 0.05};
        const std::vector<double> xi_ladder{0.4, 0.3, 0.2, 0.1};
        std::vector<std::pair<std::string, DensitySamples>> rows;
        rows.emplace_back("theta_north",
                          density_probe(u, g, em, {0.0, 1.0}, theta_ladder));
        rows.emplace_back("theta_south",
                          density_probe(u, g, em, {0.0, -1.0}, theta_ladder));
        rows.emplace_back("xi_equator",
                          density_probe(u, g, em, {1.5, 0.0}, xi_ladder));
        write_densities_csv((fs::path(dir) / "densities.csv").string(), rows);
    }
    if (flags.tangent_ode)
        write_ode_report_json((fs::path(dir) / "tangent_ode.json").string(),
                              shoot_classify(default_shot_grid(), 1e-6, 1e-2, 1e-10,
                                             threads));
}

int cmd_solve(const std::string& cfg_path) {
    RunConfig rc = read_run_config(cfg_path);
    rc.validate();
    const auto g = build_grid(rc.grid);
    const auto prof = load_profile(rc, g);

    SolveResult res;
    ModelParams effective = rc.model;
    if (!rc.solver.continuation_nus.empty()) {
        const auto stages = continuation(g, prof, rc.model, rc.solver, rc.threads);
        for (std::size_t k = 0; k < stages.size(); ++k)
            std::printf("continuation nu=%g %s E=%.12g iterations=%d\n",
                        rc.solver.continuation_nus[k],
                        stages[k].converged ? "converged" : "max-iters",
                        stages[k].breakdown.total, stages[k].iterations);
        res = stages.back();
        effective.nu = rc.solver.continuation_nus.back();
    } else {
        UnitField u0;
        if (rc.init == InitMode::from_checkpoint) {
            const auto ck = read_checkpoint(rc.init_checkpoint);
            if (ck.grid.n_radial != rc.grid.n_radial ||
                ck.grid.n_polar != rc.grid.n_polar ||
                ck.grid.outer_radius != rc.grid.outer_radius ||
                ck.grid.grading != rc.grid.grading)
                throw std::runtime_error(rc.init_checkpoint +
                                         ": grid/config mismatch with this run");
            u0 = ck.field;
        } else {
            u0 = initial_field(g, rc.init, rc.solver);
        }
        res = solve(u0, g, prof, rc.model, rc.solver, rc.threads);
    }

    namespace fs = std::filesystem;
    fs::create_directories(rc.outputs);
    write_field_csv((fs::path(rc.outputs) / "field.csv").string(), g, res.field);
    write_energy_json((fs::path(rc.outputs) / "energy.json").string(), res.breakdown,
                      res.iterations, res.converged);
    write_checkpoint((fs::path(rc.outputs) / "checkpoint.ckpt").string(), g, effective,
                     res.field, res.iterations, res.converged, res.breakdown.total);
    emit_analyses(rc.outputs, g, res.field, effective, rc.analyses, rc.threads);

    std::printf("%s E=%.12g iterations=%d\n",
                res.converged ? "converged" : "max-iters", res.breakdown.total,
                res.iterations);
    return res.converged ? 0 : 2;
}

int cmd_analyze(const std::string& ckpt_path, const std::string& outdir,
                const std::vector<std::string>& opts) {
    AnalysisFlags flags;  // defects + far_field by default
    for (const auto& o : opts) {
        std::string v;
        if (opt_value(o, "--analyses", v)) {
            flags = {false, false, false, false};
            std::istringstream vs(v);
            std::string piece;
            while (std::getline(vs, piece, ',')) {
                if (piece == "defects")
                    flags.defects = true;
                else if (piece == "densities")
                    flags.densities = true;
                else if (piece == "tangent_ode")
                    flags.tangent_ode = true;
                else if (piece == "far_field")
                    flags.far_field = true;
                else
                    throw std::invalid_argument("--analyses: unknown flag '" + piece +
                                                "'");
            }
        } else {
            throw std::invalid_argument("analyze: unknown option " + o);
        }
    }
    const auto ck = read_checkpoint(ckpt_path);
    const auto g = build_grid(ck.grid);
    std::filesystem::create_directories(outdir);
    emit_analyses(outdir, g, ck.field, ck.model, flags, 0);
    return 0;
}

int cmd_validate_anchoring(const std::vector<std::string>& args) {
    AnchoringProfile prof;
    if (!args.empty() && args[0].rfind("--", 0) == 0) {
        AnchoringParams p;
        int n_polar = 128;
        for (const auto& a : args) {
            std::string v;
            if (opt_value(a, "--amp_polar", v))
                p.amp_polar = std::stod(v);
            else if (opt_value(a, "--amp_tilt", v))
                p.amp_tilt = std::stod(v);
            else if (opt_value(a, "--n_polar", v))
                n_polar = std::stoi(v);
            else
                throw std::invalid_argument("validate-anchoring: unknown option " + a);
        }
        prof = default_profile(p, build_grid({2, n_polar, 20.0, 1.0}));
    } else if (args.size() == 1) {
        std::ifstream is(args[0]);
        if (!is) throw std::invalid_argument(args[0] + ": cannot open profile");
        prof = read_profile_csv(is);
    } else {
        return usage();
    }

    const auto v = validate_profile(prof);
    auto line = [](const char* name, const ConstraintCheck& c) {
        std::printf("%-18s %s  (violation %.3e)\n", name, c.pass ? "pass" : "FAIL",
                    c.violation);
    };
    line("unit_norm", v.unit_norm);
    line("pole_value", v.pole_value);
    line("nonnegative_u1", v.nonnegative_u1);
    line("nonconstant_u1", v.nonconstant[0]);
    line("nonconstant_u2", v.nonconstant[1]);
    line("nonconstant_u3", v.nonconstant[2]);
    std::printf("pole_rows_present  %s\n", v.pole_rows_present ? "yes" : "no");
    std::printf("decay slopes north (u1,u3) = (%.3f, %.3f), south = (%.3f, %.3f)\n",
                v.slope_u1_north, v.slope_u3_north, v.slope_u1_south,
                v.slope_u3_south);
    return v.all_pass() ? 0 : 1;
}

int cmd_tangent_ode(const std::vector<std::string>& opts) {
    double tol = 1e-6, theta0 = 1e-2;
    std::string out;
    for (const auto& o : opts) {
        std::string v;
        if (opt_value(o, "--tol", v))
            tol = std::stod(v);
        else if (opt_value(o, "--theta0", v))
            theta0 = std::stod(v);
        else if (opt_value(o, "--out", v))
            out = v;
        else
            throw std::invalid_argument("tangent-ode: unknown option " + o);
    }
    const auto rep = shoot_classify(default_shot_grid(), tol, theta0);
    if (out.empty()) {
        double max_drift = 0, min_nonzero = 1e300;
        for (const auto& o : rep.shots) {
            max_drift = std::max(max_drift, o.c_e_drift);
            if (o.spec.a != 0 || o.spec.b != 0)
                min_nonzero = std::min(min_nonzero, o.mismatch);
        }
        std::printf("shots=%zu only_constants_pass=%s min_nonzero_mismatch=%.6e "
                    "max_c_e_drift=%.3e\n",
                    rep.shots.size(), rep.only_constants_pass ? "true" : "false",
                    min_nonzero, max_drift);
    } else {
        write_ode_report_json(out, rep);
    }
    return rep.only_constants_pass ? 0 : 1;
}

int cmd_densities(const std::string& ckpt_path, const std::string& out_csv) {
    const auto ck = read_checkpoint(ckpt_path);
    const auto g = build_grid(ck.grid);
    const EnergyModel em(g, default_profile(AnchoringParams{}, g), ck.model, 0);
    const std::vector<double> theta_ladder{0.5, 0.35, 0.25, 0.15, 0.1, 0.07, 0.05};
    const std::vector<double> xi_ladder{0.4, 0.3, 0.2, 0.1};
    std::vector<std::pair<std::string, DensitySamples>> rows;
    rows.emplace_back("theta_north",
                      density_probe(ck.field, g, em, {0.0, 1.0}, theta_ladder));
    rows.emplace_back("theta_south",
                      density_probe(ck.field, g, em, {0.0, -1.0}, theta_ladder));
    rows.emplace_back("xi_equator",
                      density_probe(ck.field, g, em, {1.5, 0.0}, xi_ladder));
    write_densities_csv(out_csv, rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) return usage();
    const std::string cmd = argv[1];
    std::vector<std::string> rest(argv + 2, argv + argc);
    try {
        if (cmd == "solve" && rest.size() == 1) return cmd_solve(rest[0]);
        if (cmd == "analyze" && rest.size() >= 2)
            return cmd_analyze(rest[0], rest[1],
                               {rest.begin() + 2, rest.end()});
        if (cmd == "validate-anchoring" && !rest.empty())
            return cmd_validate_anchoring(rest);
        if (cmd == "tangent-ode") return cmd_tangent_ode(rest);
        if (cmd == "densities" && rest.size() == 2)
            return cmd_densities(rest[0], rest[1]);
        return usage();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
