#include <cmath>

#include "doctest.h"
#include "pbrg/suites.hpp"

using namespace pbrg;

namespace {

Field cosine(const Grid& g, int k) {
    return Field::from_function(g, [k](double x) { return std::cos(k * x); });
}

double max_diff(const Symbol& a, const Symbol& b) { return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("paraop") {

TEST_CASE("materialize: constant symbol is a high-pass filter") {
    const Grid g(32);
    const Cutoff c;
    const OperatorMatrix t = materialize(Symbol::multiplier(g, [](int) { return cplx(1.0); }, 0.0), c);
    for (int i = 0; i < g.n(); ++i)
        for (int j = 0; j < g.n(); ++j) {
            const int xi = g.freq(j);
            const cplx expected = (i == j && g.in_band(xi)) ? cplx(cutoff_eval(c, 0, xi)) : cplx(0.0);
            CHECK(std::abs(t.entries(i, j) - expected) < 1e-15);
        }
}

TEST_CASE("materialize: single x-mode shifts frequency") {
    const Grid g(64);
    const Cutoff c(2.0, 1.0);
    for (int eta : {-3, 2, 5})
        for (int xi : {-20, -9, 4, 12, 17}) {
            const Symbol a = Symbol::separable(Field::mode(g, eta), [](int) { return cplx(1.0); }, 0.0, 0.0);
            const Field out = apply(a, c, Field::mode(g, xi));
            for (int k = -g.band(); k <= g.band(); ++k) {
                const cplx expected = k == xi + eta ? cplx(cutoff_eval(c, eta, xi)) : cplx(0.0);
                CHECK(std::abs(out.coef(k) - expected) < 1e-14);
            }
        }
}

TEST_CASE("materialize: sparsity follows the cutoff") {
    const Grid g(64);
    const Cutoff c(4.0, 2.0);
    const Symbol a = random_symbol(g, 0.5, c, 3, 4);
    const OperatorMatrix t = materialize(a, c);
    const Eigen::MatrixXd w = support_weights(g, c);
    for (int i = 0; i < g.n(); ++i)
        for (int j = 0; j < g.n(); ++j)
            if (w(i, j) == 0.0) CHECK(t.entries(i, j) == cplx(0.0));
}

TEST_CASE("spectrum localisation") {
    const Grid g(128);
    const double B = 8.0, b = 2.0;
    const Cutoff c(B, b);
    const Symbol a = random_symbol(g, 0.0, c, 9, 6);
    const int R = 40;
    const Field u = random_band_limited(g, 1, R, 4);
    const Field out = apply(a, c, u);
    const double bound = (1.0 + 1.0 / B) * R - b / B;
    for (int k = -g.band(); k <= g.band(); ++k)
        if (std::abs(k) > bound) CHECK(std::abs(out.coef(k)) == 0.0);
}

TEST_CASE("apply examples") {
    const Grid g(64);
    const Field one = Field::from_function(g, [](double) { return 1.0; });
    const Symbol a1 = Symbol::multiplier(g, [](int) { return cplx(1.0); }, 0.0);
    CHECK(apply(a1, Cutoff(), one).spectrum().norm() == 0.0);

    const Field cx = cosine(g, 1);
    const Symbol acos = Symbol::separable(cx, [](int) { return cplx(1.0); }, 0.0, 0.0);
    CHECK(apply(acos, Cutoff(2.0, 1.0), cx).spectrum().norm() < 1e-15);

    const Field ar = random_band_limited(g, 1, 3, 1);
    const Field ur = random_band_limited(g, 1, 30, 2);
    const Field out = apply(Symbol::paraproduct(ar, 0.0), Cutoff(), ur);
    for (int k = 0; k <= g.band(); ++k) CHECK(std::abs(out.coef(-k) - std::conj(out.coef(k))) <= 1e-12);
}

TEST_CASE("paraproduct fast path matches the matrix") {
    const Grid g(128);
    const Cutoff c;
    const Field a = random_band_limited(g, 1, 20, 5);
    const Field u = random_band_limited(g, 1, 60, 6);
    const Field fast = paraproduct(a, u, c);
    const Field slow = apply(Symbol::paraproduct(a, 0.0), c, u);
    CHECK(fast.max_coef_diff(slow) <= 1e-12 * slow.spectrum().cwiseAbs().maxCoeff());
}

TEST_CASE("compose_sharp") {
    const Grid g(32);
    const Field u = cosine(g, 2);
    const Field v = Field::from_function(g, [](double x) { return std::sin(x) + 0.5 * std::cos(3 * x); });
    const Symbol a = Symbol::separable(u, [](int xi) { return cplx(xi * xi); }, 2.0, 2.0);
    const Symbol b = Symbol::separable(v, [](int xi) { return cplx(1.0 + xi); }, 1.0, 2.0);
    SUBCASE("rho = 1 is the product") { CHECK(max_diff(compose_sharp(a, b, 1.0), a.times(b)) < 1e-14); }
    SUBCASE("x-only left factor") {
        const Symbol ax = Symbol::separable(u, [](int) { return cplx(1.0); }, 0.0, 2.0);
        CHECK(max_diff(compose_sharp(ax, b, 2.0), ax.times(b)) < 1e-14);
    }
    SUBCASE("xi # b(x)") {
        const Symbol xi = Symbol::multiplier(g, [](int k) { return cplx(k); }, 1.0);
        const Symbol bx = Symbol::separable(v, [](int) { return cplx(1.0); }, 0.0, 2.0);
        // xi b + (1/i) d_x b
        const Symbol expected = xi.times(bx) + bx.dx() * cplx(0.0, -1.0);
        CHECK(max_diff(compose_sharp(xi, bx, 2.0), expected) < 1e-12);
    }
}

TEST_CASE("adjoint_star") {
    const Grid g(32);
    const Symbol m = Symbol::multiplier(g, [](int xi) { return cplx(std::abs(xi) + 2.0); }, 1.0);
    CHECK(max_diff(adjoint_star(m, 2.0), m) < 1e-14);

    const Field u = Field::from_function(g, [](double x) { return std::cos(x) + 0.3 * std::sin(2 * x); });
    const Field iu = u * cplx(0.0, 1.0);
    const Symbol a = Symbol::separable(u + iu.scaled(0.5), [](int xi) { return cplx(xi); }, 1.0, 2.0);
    CHECK(max_diff(adjoint_star(a, 1.0), a.conj()) < 1e-14);
    const Symbol xi = Symbol::multiplier(g, [](int k) { return cplx(k); }, 1.0);
    const Symbol ubar = Symbol::separable(u - iu.scaled(0.5), [](int) { return cplx(1.0); }, 0.0, 2.0);
    const Symbol expected = ubar.times(xi) + ubar.dx() * cplx(0.0, -1.0);
    CHECK(max_diff(adjoint_star(a, 2.0), expected) < 1e-12);
}

TEST_CASE("order probe on exact multipliers") {
    const Grid g(256);
    const OrderEstimate half = order_probe(OperatorMatrix::multiplier(g, mult::abs_pow(0.5)));
    CHECK(std::abs(half.slope - 0.5) <= 0.1);
    const OrderEstimate id = order_probe(OperatorMatrix::identity(g));
    CHECK(std::abs(id.slope) <= 0.05);
}

TEST_CASE("composition remainder order") {
    const Grid g(512);
    const Cutoff c;
    const std::vector<Check> checks = calculus_order_checks(g, c, 17);
    for (const Check& ch : checks) {
        INFO(ch.name, " = ", ch.actual, " ", ch.relation, " ", ch.tolerance);
        CHECK(ch.pass);
    }
}

TEST_CASE("bony remainder") {
    const Grid g(64);
    CHECK(bony_remainder(Field::zero(g), random_band_limited(g, 1, 10, 1)).spectrum().norm() == 0.0);
    const Field cx = cosine(g, 1);
    const Field expected = Field::from_function(g, [](double x) { return 0.5 * (1.0 + std::cos(2 * x)); });
    CHECK(bony_remainder(cx, cx).max_coef_diff(expected) < 1e-15);

    const Grid g2(256);
    CHECK(measure_bony(g2, 23, 4) <= calib::kBony);
}

}
