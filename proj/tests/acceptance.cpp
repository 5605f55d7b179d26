// One PASS/FAIL line per acceptance criterion on stdout, the individual checks on stderr.

#include <chrono>
#include <cstdio>
#include <functional>

#include "pbrg/suites.hpp"

using namespace pbrg;

namespace {

const std::vector<double> kAlphas = {1.25, 1.5, 1.75, 2.5};
constexpr std::uint64_t kSeed = calib::kVerificationSeed;

struct Criterion {
    const char* name;
    std::function<std::vector<Check>()> checks;
};

std::vector<Check> linear_gauge() {
    std::vector<Check> out;
    for (double alpha : kAlphas) append(out, gauge_linear_checks(Grid(128), alpha, Cutoff(), kSeed));
    return out;
}

std::vector<Check> nonlinear_gauge() {
    std::vector<Check> out;
    for (double alpha : kAlphas) append(out, gauge_nonlinear_checks(Grid(128), alpha, Cutoff(), kSeed, 0.05));
    return out;
}

std::vector<Check> conservation() {
    std::vector<Check> out;
    for (double alpha : {1.5, 2.0}) append(out, conservation_checks(256, alpha));
    return out;
}

std::vector<Check> energy() {
    std::vector<EnergyStudy> studies;
    const EnsembleMeasure m = measure_energy_ensemble({0.005, 0.01, 0.02}, kSeed, &studies);
    return energy_checks(m, studies);
}

std::vector<Check> conjugation() {
    SimConfig base;
    base.n_points = 128;
    base.alpha = 2.5;
    base.amplitude = 0.01;
    base.t_end = 0.5;
    base.cutoff = Cutoff(8.0, 2.0);
    return conjugation_checks(conjugation_runs(base, {8.0, 16.0}, {10, 20}));
}

std::vector<Check> scan() {
    ScanOptions opt;
    opt.grids = {512, 1024};
    opt.t_end = 10.0;
    const std::vector<ScanCell> cells = blowup_scan({1.1, 1.4, 1.7}, {0.01, 0.1, 1.0}, opt);
    for (const ScanCell& c : cells) {
        std::fprintf(stderr, "    cell alpha=%g amplitude=%g outcome=%s agree=%d", c.alpha, c.amplitude,
                     blowup_name(c.outcome), c.agree ? 1 : 0);
        for (size_t k = 0; k < c.grids.size(); ++k)
            std::fprintf(stderr, " N=%d:%s(lip x%.3g, sup x%.3g)", c.grids[k], blowup_name(c.per_grid[k]),
                         c.lipschitz_growth[k], c.sup_growth[k]);
        std::fprintf(stderr, "\n");
    }
    return scan_checks(cells);
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"linear gauge equation", linear_gauge},
        {"resonance bracket", [] { return resonance_checks(1024); }},
        {"flow laws", [] { return flow_law_checks(Grid(128), Cutoff(), kSeed); }},
        {"commutator expansion", [] { return bch_checks(Grid(128), Cutoff(), kSeed); }},
        {"symbolic calculus", [] { return calculus_suite(SuiteParams{512, 1.5, Cutoff(), kSeed}); }},
        {"conservation laws", conservation},
        {"normal-form energy estimate", energy},
        {"conjugated paralinear flow", conjugation},
        {"exponential gauge", nonlinear_gauge},
        {"blow-up scan", scan},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        std::vector<Check> checks;
        std::string error;
        try {
            checks = criteria[i].checks();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        int bad = 0;
        for (const Check& c : checks) {
            std::fprintf(stderr, "    %s %s = %.6g %s %.6g\n", c.pass ? "ok  " : "FAIL", c.name.c_str(), c.actual,
                         c.relation.c_str(), c.tolerance);
            if (!c.pass) ++bad;
        }
        const bool pass = error.empty() && !checks.empty() && bad == 0;
        if (!pass) ++failed;
        std::printf("%s %2zu %s (%zu checks, %d failed, %.1fs)%s%s\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    checks.size(), bad, secs, error.empty() ? "" : ": ", error.c_str());
        std::fflush(stdout);
        std::fflush(stderr);
    }
    return failed == 0 ? 0 : 1;
}
