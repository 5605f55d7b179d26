#include <cmath>

#include "doctest.h"
#include "pbrg/suites.hpp"

using namespace pbrg;

namespace {

void require_all(const std::vector<Check>& checks) {
    for (const Check& ch : checks) {
        INFO(ch.name, " = ", ch.actual, " ", ch.relation, " ", ch.tolerance);
        CHECK(ch.pass);
    }
}

double d(double alpha, double xi) { return xi * std::pow(std::abs(xi), alpha - 1.0); }

}  // namespace

TEST_SUITE("gauge") {

TEST_CASE("zero data") {
    const Grid g(32);
    const Cutoff c;
    const GaugeSolution s = solve_commutator(Symbol::zero(g, 1.0), 1.5, c);
    CHECK(s.p.max_abs() == 0.0);
    CHECK(s.residual_norm == 0.0);
    CHECK(cole_hopf_parametrix(Symbol::zero(g, 1.0), 1.5, c).max_abs() == 0.0);
    const GaugeSolution nl = solve_nonlinear_exp(Symbol::zero(g, 1.0), 1.5, c);
    CHECK(nl.iterations == 0);
    CHECK(max_entry(nl.matrix.entries) == 0.0);
}

TEST_CASE("explicit formula on single modes") {
    const Grid g(64);
    const Cutoff c;  // binary: integer B and b
    for (double alpha : {1.5, 2.5})
        for (int eta : {-2, 1, 3}) {
            auto gxi = [](int xi) { return cplx(1.0 + 0.1 * xi, 0.2); };
            const Symbol a = Symbol::separable(Field::mode(g, eta), gxi, 0.0, 0.0);
            const GaugeSolution s = solve_commutator(a, alpha, c);
            CHECK(s.residual_norm <= 1e-12);
            for (int xi = -g.band(); xi <= g.band(); ++xi) {
                if (!g.in_band(xi + eta)) continue;
                const cplx expected =
                    cutoff_eval(c, eta, xi) * gxi(xi) / (kI * (d(alpha, xi) - d(alpha, xi + eta)));
                CHECK(std::abs(s.p.coef(eta, xi) - expected) <= 1e-14 * std::max(1.0, std::abs(expected)));
            }
        }
}

TEST_CASE("alpha = 1 gives the x-antiderivative") {
    const Grid g(64);
    const Cutoff c;
    const Symbol a = random_symbol(g, 0.0, c, 3, 3);
    const GaugeSolution s = solve_commutator(a, 1.0, c);
    for (int eta = -3; eta <= 3; ++eta) {
        if (eta == 0) continue;
        for (int xi = -g.band(); xi <= g.band(); ++xi) {
            if (!g.in_band(xi + eta) || cutoff_eval(c, eta, xi) == 0.0) continue;
            if ((xi > 0) != (xi + eta > 0)) continue;
            // d(xi) - d(xi + eta) = -eta on one side of the origin
            CHECK(std::abs(s.p.coef(eta, xi) + a.coef(eta, xi) / (kI * double(eta))) <= 1e-14);
        }
    }
}

TEST_CASE("cole-hopf parametrix closed form at alpha = 2") {
    const Grid g(64);
    const Cutoff c;
    const int eta = 2;
    const Symbol a = Symbol::separable(Field::mode(g, eta), [](int) { return cplx(1.0); }, 0.0, 0.0);
    const Symbol e = cole_hopf_parametrix(a, 2.0, c);
    for (int xi = -g.band(); xi <= g.band(); ++xi) {
        if (cutoff_eval(c, eta, xi) != 1.0) continue;
        const cplx expected = 1.0 / (2.0 * std::abs(xi)) / (kI * double(eta));
        CHECK(std::abs(e.coef(eta, xi) - expected) <= 1e-15);
    }
}

TEST_CASE("linear gauge checks") {
    const Grid g(128);
    for (double alpha : {1.25, 2.5}) require_all(gauge_linear_checks(g, alpha, Cutoff(), calib::kVerificationSeed));
}

TEST_CASE("division estimate with the |xi|^{alpha-1} gain") {
    // per column: |d_x p(., xi)|_inf |xi|^{alpha-1} B[1-(1-1/B)^alpha] <= |a(., xi)|_inf
    const Grid g(128);
    const Cutoff c;
    for (double alpha : {1.25, 1.5, 1.75, 2.5}) {
        const double B = c.big_b, den = B * (1.0 - std::pow(1.0 - 1.0 / B, alpha));
        for (std::uint64_t seed = 1; seed <= 40; ++seed) {
            const Symbol a = regularize(random_symbol(g, 1.0, c, seed), c);
            const Symbol dp = regularize(solve_commutator(a, alpha, c).p, c).dx(1);
            double worst = 0.0;
            for (int xi = -g.band(); xi <= g.band(); ++xi) {
                const double na = x_norm(g, a.coeffs().col(g.index(xi)), 0.0);
                if (na == 0.0) continue;
                const double np = x_norm(g, dp.coeffs().col(g.index(xi)), 0.0);
                worst = std::max(worst, np * std::pow(std::abs(xi), alpha - 1.0) * den / na);
            }
            CHECK(worst <= 1.0);
        }
    }
}

TEST_CASE("remainder contraction over apertures") {
    const Grid g(256);
    CHECK(measure_remainder(g, 1.5, 1.0, 19, 2) <= calib::kRemainder);
}

TEST_CASE("time-dependent series") {
    const Grid g(64);
    const Cutoff c;
    const double alpha = 1.5;
    const Symbol a = random_symbol(g, 1.0, c, 5);
    const GaugeSolution p0 = solve_commutator(a, alpha, c);
    SUBCASE("constant data keeps p0") {
        const std::vector<MatrixXc> traj(7, materialize(a, c).entries);
        const TimeGaugeResult r = solve_time_dependent(traj, 0.1, g, alpha, c);
        CHECK(r.increment_norms.at(1) <= 1e-12 * r.increment_norms.at(0));
        for (const MatrixXc& p : r.p) CHECK(max_entry(p - p0.matrix.entries) <= 1e-12 * max_entry(p0.matrix.entries));
    }
    SUBCASE("single sample is the stationary solve") {
        const std::vector<GaugeSolution> r = solve_time_dependent(std::vector<Symbol>{a}, 0.1, alpha, c);
        REQUIRE(r.size() == 1);
        CHECK(max_entry(r[0].matrix.entries - p0.matrix.entries) == 0.0);
    }
    SUBCASE("geometric decay for slowly rotating data") {
        const SuiteParams sp{64, alpha, c, 5, 0.05, 8};
        for (const Check& ch : gauge_suite(sp))
            if (ch.name.rfind("gauge.time_dependent", 0) == 0) {
                INFO(ch.name, " = ", ch.actual);
                CHECK(ch.pass);
            }
    }
}

TEST_CASE("kernel of the commutator is the diagonal") {
    const KernelReport k = commutator_kernel(Grid(32), 1.5, Cutoff());
    CHECK(k.nullity == k.diagonal_entries);
    CHECK(k.rank + k.nullity == k.support_entries);
}

TEST_CASE("exponential gauge") {
    const Grid g(64);
    for (double alpha : {1.5, 2.5}) require_all(gauge_nonlinear_checks(g, alpha, Cutoff(), 9, 0.05));
    const Symbol big = random_symbol(g, 1.0, Cutoff(), 9);
    CHECK_THROWS_AS(solve_nonlinear_exp(big, 1.5, Cutoff()), Error);
}

TEST_CASE("conjugating gauge") {
    const Grid g(32);
    const Cutoff c;
    const double alpha = 2.5;
    SUBCASE("zero trajectory") {
        const ConjugatingGauge z = solve_conjugating(std::vector<Field>(5, Field::zero(g)), 0.1, alpha, c);
        for (const MatrixXc& p : z.p) CHECK(max_entry(p) == 0.0);
    }
    SUBCASE("stationary tiny data matches the exponential gauge") {
        const Field u = Field::from_function(g, [](double x) { return 1e-6 * std::cos(x); });
        ConjugatingOptions opt;
        opt.tol = 1e-20;
        const ConjugatingGauge cg = solve_conjugating(std::vector<Field>(5, u), 0.1, alpha, c, opt);
        // [D, E] = E T_{i u xi} on the support; to first order [e^{iT_p}, D] = T_{-i u xi}
        const Symbol a = Symbol::separable(u, [](int xi) { return cplx(0.0, -xi); }, 1.0, 1.0);
        NonlinearOptions nopt;
        nopt.tol = 1e-20;
        const GaugeSolution s = solve_nonlinear_exp(a, alpha, c, nopt);
        const Eigen::MatrixXd mask = offdiag_support(g, c);
        for (const MatrixXc& p : cg.p) CHECK(masked_max(p - s.matrix.entries, mask) <= 1e-9 * max_entry(s.matrix.entries));
    }
}

}
