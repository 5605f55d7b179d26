#include <cmath>
#include <limits>

#include "doctest.h"
#include "pbrg/paraop.hpp"

using namespace pbrg;

TEST_SUITE("symbols") {

TEST_CASE("cutoff definition regions") {
    const Cutoff c(2.0, 1.0);
    CHECK(cutoff_eval(c, 0, 10) == 1.0);
    CHECK(cutoff_eval(c, 3, 5) == 0.0);
    CHECK(cutoff_eval(c, 3, 7) == 0.0);
    CHECK(cutoff_eval(c, 3, 8) == 1.0);
    double prev = 0.0;
    for (int i = 1; i < 10; ++i) {
        const double v = cutoff_eval(c, 3, 7.0 + i / 10.0);
        CHECK(v > prev);
        CHECK(v < 1.0);
        prev = v;
    }
    CHECK(cutoff_eval(c, 3, 7.5) == doctest::Approx(0.5));
    CHECK(cutoff_eval(c, -3, -7.5) == doctest::Approx(0.5));
    for (int eta = -5; eta <= 5; ++eta)
        for (int xi = -30; xi <= 30; ++xi) {
            const double v = cutoff_eval(c, eta, xi);
            CHECK((v >= 0.0 && v <= 1.0));
        }
}

TEST_CASE("tabulation round trip and x-independence") {
    const Grid g(32);
    MatrixXc vals(g.n(), g.n());
    for (int j = 0; j < g.n(); ++j)
        for (int col = 0; col < g.n(); ++col)
            vals(j, col) = std::sin(g.node(j) + 0.1 * col) + cplx(0.0, std::cos(2.0 * g.node(j)) * col);
    const Symbol a = Symbol::from_tabulation(g, vals, 0.0, 0.0);
    CHECK((a.tabulate() - vals).cwiseAbs().maxCoeff() < 1e-12);

    const Symbol m = Symbol::multiplier(g, [](int xi) { return cplx(xi * xi); }, 2.0);
    CHECK(m.x_independent());
    for (int eta = -8; eta <= 8; ++eta)
        if (eta != 0) CHECK(m.coeffs().row(g.index(eta)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("regularize") {
    const Grid g(64);
    const Cutoff c(2.0, 1.0);
    SUBCASE("x-independent symbol") {
        const Symbol m = Symbol::multiplier(g, [](int xi) { return cplx(1.0 + xi); }, 1.0);
        const Symbol r = regularize(m, c);
        for (int xi = -g.band(); xi <= g.band(); ++xi) {
            if (std::abs(xi) < 1) CHECK(r.coef(0, xi) == cplx(0.0));
            if (std::abs(xi) > 2) CHECK(r.coef(0, xi) == m.coef(0, xi));
        }
    }
    SUBCASE("single x-mode") {
        const Symbol a = Symbol::separable(Field::mode(g, 3), [](int) { return cplx(1.0); }, 0.0, 0.0);
        const Symbol r = regularize(a, c);
        for (int xi = -g.band(); xi <= g.band(); ++xi) {
            if (std::abs(xi) < 7) CHECK(r.coef(3, xi) == cplx(0.0));
            if (std::abs(xi) > 8) CHECK(std::abs(r.coef(3, xi) - a.coef(3, xi)) < 1e-15);
        }
    }
}

TEST_CASE("seminorm closed forms") {
    const Grid g(64);
    const Symbol one = Symbol::multiplier(g, [](int) { return cplx(1.0); }, 0.0);
    CHECK(seminorm(one, 0.0, 0.0, 0, 0) == doctest::Approx(1.0));

    const double m = 1.5;
    const Symbol jb = Symbol::multiplier(g, [m](int xi) { return cplx(std::pow(1.0 + xi * xi, m / 2)); }, m);
    double expected = 0.0;
    for (int xi = 1; xi <= g.band(); ++xi)
        expected = std::max(expected, std::pow(1.0 + xi * xi, m / 2) / std::pow(1.0 + xi, m));
    CHECK(seminorm(jb, m, 0.0, 0, 0) == doctest::Approx(expected).epsilon(1e-12));

    const Field u = Field::from_function(g, [](double x) { return std::cos(x); });
    const Symbol a = Symbol::separable(u, [](int xi) { return cplx(xi); }, 1.0, 1.0);
    const double band = g.band();
    CHECK(seminorm(a, 1.0, 1.0, 0, 0) == doctest::Approx(2.0 * band / (1.0 + band)).epsilon(1e-12));
}

TEST_CASE("two admissible cutoffs differ by a smoothing operator") {
    // symbols with |eta| <= 2: both cutoffs equal 1 beyond |xi| = 2 * 16 + 3 + 1
    const Grid g(512);
    const Cutoff c1(8.0, 2.0), c2(16.0, 3.0);
    const double m = 1.0, rho = 1.0;
    const Symbol a = random_symbol(g, m, c1, 7, 2);
    const OperatorMatrix d = materialize(a, c1) - materialize(a, c2);
    const double window = 2 * 16 + 3 + 1;
    std::vector<int> centers;
    for (int k : default_probe_centers(g))
        if (k - 12 > window) centers.push_back(k);
    REQUIRE(centers.size() >= 2);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * materialize(a, c1).max_abs() * std::sqrt(g.n());
    double slope = -std::numeric_limits<double>::infinity();
    try {
        slope = order_probe(d, centers, floor).slope;
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateProbe);
    }
    CHECK(slope <= m - rho + 0.2);
}

}
