// pbrg: command line front end.  Every subcommand reads one config file and writes its outputs
// plus manifest.json into --out.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "pbrg/cli.hpp"

using namespace pbrg;
namespace fs = std::filesystem;

namespace {

struct Context {
    RunConfig cfg;
    fs::path out;
    RunManifest manifest;

    fs::path write(const std::string& name, const std::string& bytes) {
        const fs::path p = out / name;
        write_atomic(p, bytes);
        manifest.outputs.push_back(p.string());
        return p;
    }
};

void log_checks(const std::vector<Check>& checks) {
    for (const Check& c : checks)
        std::fprintf(stderr, "%s %s = %.6g %s %.6g\n", c.pass ? "pass" : "FAIL", c.name.c_str(), c.actual,
                     c.relation.c_str(), c.tolerance);
}

// Writes the checks table and, if anything failed, the JSON-lines summary; returns the exit status.
int report(Context& ctx, const std::string& stem, const std::vector<Check>& checks, bool asserted = true) {
    log_checks(checks);
    ctx.write(stem + "_checks.csv", checks_table(checks).str());
    std::string failures;
    for (const Check& c : checks)
        if (!c.pass) failures += failure_record(c) + "\n";
    if (!asserted) return 0;
    if (!failures.empty()) {
        std::fputs(failures.c_str(), stdout);
        ctx.write("failures.jsonl", failures);
        return 1;
    }
    return 0;
}

int cmd_simulate(Context& ctx) {
    const SimConfig& sim = ctx.cfg.sim;
    const Trajectory tr = run(sim);
    ctx.write("simulate.csv", simulate_table(tr, sim.alpha).str());
    const fs::path final_path = ctx.out / "final.pbrg";
    save_field(final_path, tr.states.back(), sim.alpha, tr.times.back());
    ctx.manifest.outputs.push_back(final_path.string());
    for (const fs::path& p : save_trajectory(ctx.out, "trajectory", tr, sim.alpha))
        ctx.manifest.outputs.push_back(p.string());
    std::fprintf(stderr, "steps %ld, rejected %ld, t = %.6g\n", tr.steps, tr.rejected, tr.times.back());
    if (tr.blowup_suspected)
        std::fprintf(stderr, "blow-up suspected after t = %.6g: %s\n", tr.last_valid_time, tr.blowup_reason.c_str());
    return 0;
}

int cmd_verify(Context& ctx, const std::string& stem, const std::function<std::vector<Check>(const SuiteParams&)>& suite) {
    return report(ctx, stem, suite(ctx.cfg.suite_params()));
}

int cmd_estimate(Context& ctx) {
    SimConfig base = ctx.cfg.sim;
    base.equation = Equation::Paralinear;
    const double a = base.amplitude;
    const std::vector<double> amplitudes = {0.5 * a, a, 2.0 * a};
    std::vector<EnergyStudy> studies;
    const EnsembleMeasure m = measure_energy_ensemble(base, amplitudes, ctx.cfg.exp.s, &studies);

    CsvTable t({"init", "amplitude", "t", "dwdt", "dvdt", "denominator", "ratio", "w_over_v", "growth", "weak_integral"});
    const std::vector<SimConfig> members = standard_ensemble(base, amplitudes);
    for (size_t k = 0; k < studies.size(); ++k) {
        for (const EnergySample& s : studies[k].samples) {
            std::vector<std::string> row = {init_name(members[k].init), csv_number(members[k].amplitude)};
            for (double v : {s.t, s.dwdt, s.dvdt, s.denominator, s.ratio, s.w_over_v, s.growth, s.weak_integral})
                row.push_back(csv_number(v));
            t.add(row);
        }
    }
    ctx.write("estimate.csv", t.str());
    const EstimateReport r = energy_estimate_study(studies, calib::kEnergyRatio);
    std::fprintf(stderr, "members %d, max ratio %.6g, lsq constant %.6g, verdict %s, equivalence %.6g\n", m.members,
                 r.max_ratio, r.lsq_constant, verdict_name(r.verdict), m.equivalence_constant);
    std::vector<Check> checks = energy_checks(m, studies);
    checks.push_back(check_le("energy.hyperbolic_constant", m.hyperbolic_constant, calib::kHyperbolic));
    return report(ctx, "estimate", checks);
}

int cmd_conjugate(Context& ctx) {
    const SimConfig& sim = ctx.cfg.sim;
    const std::vector<ConjugationRun> runs = conjugation_runs(sim, {sim.cutoff.big_b}, {sim.samples, 2 * sim.samples});
    CsvTable t({"B", "samples", "t", "slope"});
    CsvTable s({"B", "samples", "order", "residual_constant", "ellipticity_constant", "residual_norm",
                "support_residual", "k_hat", "newton_iterations"});
    for (const ConjugationRun& r : runs) {
        for (size_t k = 0; k < r.study.times.size(); ++k)
            t.add_numbers({r.big_b, double(r.samples), r.study.times[k], r.study.slopes[k]});
        s.add_numbers({r.big_b, double(r.samples), r.study.order, r.study.residual_constant,
                       r.study.ellipticity_constant, r.study.residual_norm, r.study.support_residual, r.study.k_hat,
                       double(r.study.newton_iterations)});
    }
    ctx.write("conjugate_slopes.csv", t.str());
    ctx.write("conjugate.csv", s.str());
    return report(ctx, "conjugate", conjugation_checks(runs));
}

int cmd_scan(Context& ctx) {
    const ExperimentParams& e = ctx.cfg.exp;
    ScanOptions opt;
    opt.family = ctx.cfg.sim.init;
    opt.grids = e.scan_grids;
    opt.t_end = ctx.cfg.sim.t_end;
    opt.cutoff = ctx.cfg.sim.cutoff;
    const std::vector<ScanCell> cells = blowup_scan(e.scan_alphas, e.scan_amplitudes, opt);

    std::vector<std::string> header = {"alpha", "amplitude", "outcome", "agree", "grid_sensitive"};
    for (int n : opt.grids) {
        header.push_back("class_" + std::to_string(n));
        header.push_back("lipschitz_growth_" + std::to_string(n));
        header.push_back("sup_growth_" + std::to_string(n));
    }
    CsvTable t(header);
    for (const ScanCell& c : cells) {
        std::vector<std::string> row = {csv_number(c.alpha), csv_number(c.amplitude), blowup_name(c.outcome),
                                        c.agree ? "true" : "false", grid_sensitive(c) ? "true" : "false"};
        for (size_t k = 0; k < c.grids.size(); ++k) {
            row.push_back(blowup_name(c.per_grid[k]));
            row.push_back(csv_number(c.lipschitz_growth[k]));
            row.push_back(csv_number(c.sup_growth[k]));
        }
        t.add(row);
        std::fprintf(stderr, "alpha %.3g amplitude %.3g: %s%s\n", c.alpha, c.amplitude, blowup_name(c.outcome),
                     grid_sensitive(c) ? " (grid sensitive)" : "");
    }
    ctx.write("scan.csv", t.str());
    for (const auto& [alpha, amp] : scan_monotonicity_violations(cells))
        std::fprintf(stderr, "monotonicity violation at alpha %.3g amplitude %.3g\n", alpha, amp);
    return report(ctx, "scan", scan_checks(cells), false);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Paradifferential gauge laboratory for weakly dispersive Burgers equations on the torus"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::map<std::string, std::function<int(Context&)>> commands = {
        {"simulate", cmd_simulate},
        {"verify-calculus", [](Context& c) { return cmd_verify(c, "verify_calculus", calculus_suite); }},
        {"verify-flow", [](Context& c) { return cmd_verify(c, "verify_flow", flow_suite); }},
        {"verify-gauge", [](Context& c) { return cmd_verify(c, "verify_gauge", gauge_suite); }},
        {"estimate", cmd_estimate},
        {"conjugate", cmd_conjugate},
        {"scan", cmd_scan},
    };
    const std::map<std::string, std::string> help = {
        {"simulate", "run the solver; CSV diagnostics, final snapshot and trajectory snapshots"},
        {"verify-calculus", "paraproduct and symbolic calculus suite"},
        {"verify-flow", "flow laws, BCH truncation and flow estimates"},
        {"verify-gauge", "commutator equation, time-dependent series and exponential gauge"},
        {"estimate", "normal-form energy estimate over the standard ensemble"},
        {"conjugate", "residual of the conjugating gauge along a paralinear run"},
        {"scan", "blow-up scan over alpha and amplitude (observational)"},
    };
    for (const auto& [name, fn] : commands) {
        CLI::App* sc = app.add_subcommand(name, help.at(name));
        sc->add_option("-c,--config", config_path, "config file")->required();
        sc->add_option("-o,--out", out_dir, "output directory")->capture_default_str();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        Context ctx{parse_config(config_path), out_dir, {}};
        fs::create_directories(ctx.out);
        ctx.manifest.config_hash = ctx.cfg.hash();
        ctx.manifest.seed = ctx.cfg.sim.seed;
        const int status = commands.at(name)(ctx);
        write_atomic(ctx.out / "manifest.json", ctx.manifest.to_json());
        return status;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        std::puts(failure_record(name, "successful run", e.what(), 0.0).c_str());
        return 1;
    }
}
