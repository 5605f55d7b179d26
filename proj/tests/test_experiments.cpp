#include <cmath>

#include "doctest.h"
#include "pbrg/suites.hpp"

using namespace pbrg;

namespace {

Trajectory constant_trajectory(const Field& u, int samples, double dt) {
    Trajectory tr;
    for (int k = 0; k < samples; ++k) {
        tr.times.push_back(k * dt);
        tr.states.push_back(u);
        tr.sup_norms.push_back(norm_linf(u));
        tr.lipschitz.push_back(norm_linf(multiplier_apply(u, mult::dx())));
    }
    return tr;
}

SimConfig paralinear(int n, double alpha, double amplitude) {
    SimConfig c;
    c.n_points = n;
    c.alpha = alpha;
    c.equation = Equation::Paralinear;
    c.amplitude = amplitude;
    c.t_end = 0.5;
    c.samples = 10;
    return c;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("diagnostics") {
    const Grid g(64);
    const DiagnosticsRecord z = diagnostics(Field::zero(g), 1.5, {0.0, 2.0});
    CHECK(z.mass == 0.0);
    CHECK(z.hamiltonian == 0.0);
    CHECK(z.lipschitz == 0.0);
    CHECK(z.weak_criterion == 0.0);
    CHECK(z.sobolev_norms.at(2.0) == 0.0);

    // u^2 = (1 + cos 2x)/2 and |D|^{1/2} cos 2x = sqrt(2) cos 2x
    const Field cx = Field::from_function(g, [](double x) { return std::cos(x); });
    const DiagnosticsRecord d = diagnostics(cx, 1.5, {0.0}, 0.25);
    CHECK(d.t == 0.25);
    CHECK(d.weak_criterion == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-13));
    CHECK(d.mass == doctest::Approx(kPi).epsilon(1e-13));
    CHECK(std::abs(d.mass - std::pow(d.sobolev_norms.at(0.0), 2)) <= 1e-12);
    CHECK(d.lipschitz == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(d.sup_norm == doctest::Approx(1.0).epsilon(1e-13));
    // int |D|^{1/4} cos x|^2 = pi, int cos^3 = 0
    CHECK(d.hamiltonian == doctest::Approx(kPi).epsilon(1e-13));
}

TEST_CASE("estimate reports") {
    CHECK(make_report({0.1, 0.2}, 0.15, 1).verdict == Verdict::Violated);
    const EstimateReport r = make_report({0.1, 0.4}, 0.5, 2);
    CHECK(r.verdict == Verdict::Bounded);
    CHECK(r.max_ratio == 0.4);
    CHECK(r.lsq_constant == doctest::Approx(0.2));
    CHECK(make_report({0.1, std::nan("")}, 1.0, 1).verdict == Verdict::Inconclusive);
}

TEST_CASE("energy study") {
    const SimConfig cfg = paralinear(64, 1.5, 0.01);
    SUBCASE("zero trajectory") {
        const EnergyStudy st = energy_study(constant_trajectory(Field::zero(Grid(64)), 4, 0.1), cfg, 2.0);
        CHECK(st.samples.size() == 4);
        CHECK(st.max_ratio == 0.0);
        CHECK(st.growth_constant == 0.0);
        CHECK(energy_estimate_study({st}, calib::kEnergyRatio).ensemble_size == 1);
    }
    SUBCASE("single small mode") {
        const Trajectory tr = run(cfg);
        const EnergyStudy st = energy_study(tr, cfg, 2.0, 5);
        CHECK(st.samples.size() == tr.states.size());
        CHECK(st.max_ratio <= calib::kEnergyRatio);
        CHECK(st.hermitian_residual <= 1e-9);
        CHECK(st.skew_residual <= 1e-8);
        for (const EnergySample& e : st.samples)
            CHECK(e.growth <= st.equivalence_constant * st.equivalence_constant *
                                  std::exp(calib::kEnergyRatio * e.weak_integral) * (1.0 + 1e-12));
        CHECK(energy_estimate_study({st}, calib::kEnergyRatio).verdict == Verdict::Bounded);
    }
}

TEST_CASE("conjugation study") {
    SUBCASE("zero data has no residual") {
        SimConfig cfg = paralinear(32, 2.5, 0.0);
        const ConjugationStudy st = conjugation_study(constant_trajectory(Field::zero(Grid(32)), 3, 0.1), cfg, {0.0});
        CHECK(st.residual_norm == 0.0);
        CHECK(st.residual_constant == 0.0);
    }
    SUBCASE("one sample is rejected") {
        CHECK_THROWS_AS(conjugation_study(constant_trajectory(Field::zero(Grid(32)), 1, 0.1), paralinear(32, 2.5, 0.0), {0.0}),
                        Error);
    }
    SUBCASE("bounded residual at alpha = 2.5") {
        const std::vector<ConjugationRun> runs = conjugation_runs(paralinear(128, 2.5, 0.01), {8.0}, {10, 20});
        REQUIRE(runs.size() == 2);
        CHECK(runs[0].study.order <= 0.2);
        CHECK(runs[1].study.order <= 0.2);
        CHECK(std::abs(runs[1].study.residual_constant / runs[0].study.residual_constant - 1.0) <= 0.1);
    }
}

TEST_CASE("hyperbolic growth") {
    const Grid g(64);
    const Field u = initial_condition(g, InitialCondition::Cos1, 0.1);
    CHECK(hyperbolic_growth_constant(constant_trajectory(u, 5, 0.1), 2.0) == 0.0);
    SimConfig c = paralinear(64, 1.5, 0.1);
    c.equation = Equation::Full;
    CHECK(hyperbolic_growth_constant(run(c), 2.0) <= calib::kHyperbolic);
}

TEST_CASE("blow-up classification") {
    const Grid g(64);
    const Field u = initial_condition(g, InitialCondition::Cos1, 0.1);
    Trajectory tr = constant_trajectory(u, 3, 0.1);
    CHECK(classify_blowup(tr) == BlowupClass::None);
    tr.sup_norms.back() *= 2e3;
    CHECK(classify_blowup(tr) == BlowupClass::SupNorm);
    tr = constant_trajectory(u, 3, 0.1);
    tr.lipschitz.back() *= 2e3;
    CHECK(classify_blowup(tr) == BlowupClass::Lipschitz);
    tr = constant_trajectory(u, 3, 0.1);
    tr.blowup_suspected = true;
    tr.blowup_reason = "step rejected";
    CHECK(classify_blowup(tr) == BlowupClass::Inconclusive);

    CHECK(scan_dt(512, 1.5, 0.0) == default_dt(512, 1.5));
    CHECK(scan_dt(512, 1.5, 10.0) < default_dt(512, 1.5));
}

TEST_CASE("small data scan") {
    ScanOptions opt;
    opt.grids = {64, 128};
    opt.t_end = 2.0;
    opt.samples = 20;
    const std::vector<ScanCell> cells = blowup_scan({1.8}, {0.01}, opt);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].outcome == BlowupClass::None);
    CHECK(cells[0].agree);
    CHECK(cells[0].per_grid.size() == 2);
    CHECK(scan_monotonicity_violations(cells).empty());
}

TEST_CASE("monotonicity violations") {
    ScanCell a, b;
    a.alpha = b.alpha = 1.4;
    a.amplitude = 0.1;
    b.amplitude = 1.0;
    a.outcome = BlowupClass::SupNorm;
    b.outcome = BlowupClass::None;
    CHECK(scan_monotonicity_violations({a, b}).size() == 1);
    b.outcome = BlowupClass::Inconclusive;
    CHECK(scan_monotonicity_violations({a, b}).empty());
}

}
