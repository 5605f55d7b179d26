#include <cmath>

#include "doctest.h"
#include "pbrg/suites.hpp"

using namespace pbrg;

namespace {

Symbol constant_symbol(const Grid& g, double v) {
    return Symbol::multiplier(g, [v](int) { return cplx(v); }, 0.0);
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("expm against closed forms") {
    MatrixXc rot(2, 2);
    rot << 0.0, -1.0, 1.0, 0.0;
    const MatrixXc e = expm(rot * 0.3);
    CHECK(std::abs(e(0, 0) - std::cos(0.3)) < 1e-15);
    CHECK(std::abs(e(1, 0) - std::sin(0.3)) < 1e-15);
    MatrixXc big = MatrixXc::Zero(3, 3);
    big(0, 0) = 40.0;
    big(1, 1) = cplx(0.0, 25.0);
    const MatrixXc eb = expm(big);
    CHECK(std::abs(eb(0, 0) / std::exp(40.0) - 1.0) < 1e-13);
    CHECK(std::abs(eb(1, 1) - std::exp(cplx(0.0, 25.0))) < 1e-13);
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    double s = 0.0;
    for (const QuadNode& q : gauss_legendre16(0.0, 2.0, 3)) s += q.w * std::pow(q.x, 9);
    CHECK(s == doctest::Approx(std::pow(2.0, 10) / 10.0).epsilon(1e-14));
}

TEST_CASE("flow of zero and constant generators") {
    const Grid g(32);
    const Cutoff c;
    const FlowOperator f0 = flow_build(Symbol::zero(g), c, 0.8);
    CHECK(max_entry(f0.matrix.entries - MatrixXc::Identity(g.n(), g.n())) < 1e-15);

    const double cst = 0.7, tau = 0.9;
    const FlowOperator f = flow_build(constant_symbol(g, cst), c, tau);
    for (int k = -g.band(); k <= g.band(); ++k) {
        if (cutoff_eval(c, 0, k) != 1.0) continue;
        const Field out = f.matrix.apply(Field::mode(g, k));
        CHECK(std::abs(out.coef(k) - std::exp(cplx(0.0, tau * cst))) < 1e-13);
        CHECK(std::abs(out.spectrum().norm() - 1.0) < 1e-13);
    }
}

TEST_CASE("flow laws") {
    const Grid g(128);
    const std::vector<Check> checks = flow_law_checks(g, Cutoff(), 31);
    for (const Check& ch : checks) {
        INFO(ch.name, " = ", ch.actual, " ", ch.relation, " ", ch.tolerance);
        CHECK(ch.pass);
    }
}

TEST_CASE("isometry for self-adjointified generators") {
    const Grid g(64);
    const Cutoff c;
    const Symbol p = random_symbol(g, 0.0, c, 12, 3);
    FlowOptions opt;
    opt.self_adjointify = true;
    const FlowOperator f = flow_build(p, c, 0.7, opt);
    const Field u = random_band_limited(g, 1, 30, 8);
    CHECK(std::abs(f.matrix.apply(u).spectrum().norm() / u.spectrum().norm() - 1.0) <= 1e-9);
}

TEST_CASE("conjugation trivialities") {
    const Grid g(32);
    const Cutoff c;
    const Symbol p = Symbol::multiplier(g, [](int xi) { return cplx(std::cos(xi)); }, 0.0);
    const Symbol b = Symbol::multiplier(g, [](int xi) { return cplx(std::abs(xi)); }, 1.0);
    const OperatorMatrix tb = materialize(b, c);
    CHECK(max_entry(conjugate(p, b, c, 0.6).entries - tb.entries) <= 1e-12);
    CHECK(max_entry(commutator_factor(p, b, c, 0.6).entries) <= 1e-12);

    const Symbol pr = random_symbol(g, 0.0, c, 4, 3);
    const Symbol br = random_symbol(g, 1.0, c, 5, 3);
    CHECK(max_entry(conjugate(pr, br, c, 0.0).entries - materialize(br, c).entries) == 0.0);
    CHECK(max_entry(commutator_factor(pr, br, c, 0.0).entries) == 0.0);
    CHECK(bch_truncation(pr, br, c, 0.0, 0) == 0.0);
    CHECK(bch_truncation(p, b, c, 0.4, 4) <= 1e-12);
}

TEST_CASE("bch truncation decay") {
    const Grid g(128);
    const std::vector<Check> checks = bch_checks(g, Cutoff(), 41);
    CHECK(checks.size() == 2);
    for (const Check& ch : checks) {
        INFO(ch.name, " = ", ch.actual, " ", ch.relation, " ", ch.tolerance);
        CHECK(ch.pass);
    }
}

TEST_CASE("flow composition") {
    const Grid g(128);
    const Cutoff c;
    const Symbol p = random_symbol(g, 0.0, c, 51, 3);
    const Symbol p2 = random_symbol(g, 0.0, c, 52, 3);
    // the trivial cases are exact up to the integrator, run here at 1e-11
    CHECK(flow_compose_check(p, Symbol::zero(g), c, 0.5, {}, 1e-11).composition <= 1e-9);
    const Symbol m1 = Symbol::multiplier(g, [](int xi) { return cplx(std::sin(xi)); }, 0.0);
    const Symbol m2 = Symbol::multiplier(g, [](int xi) { return cplx(0.5 / (1.0 + std::abs(xi))); }, 0.0);
    CHECK(flow_compose_check(m1, m2, c, 0.5, {}, 1e-11).composition <= 1e-9);
    CHECK(flow_compose_check(p, p2, c, 0.5).composition <= 1e-6);
}

TEST_CASE("flow symbol identity") {
    const Grid g(128);
    const Cutoff c;
    const Symbol p = random_symbol(g, 0.0, c, 61, 3);
    CHECK(flow_symbol_identity(p, c, 0.5, 40) <= 1e-6);
}

}
