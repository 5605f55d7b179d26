#include <cmath>

#include "doctest.h"
#include "pbrg/suites.hpp"

using namespace pbrg;

namespace {

SimConfig small_config(double alpha) {
    SimConfig c;
    c.n_points = 64;
    c.alpha = alpha;
    c.amplitude = 0.5;
    c.t_end = 1.0;
    c.samples = 1;
    return c;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("zero step is the identity") {
    const SimConfig c = small_config(1.5);
    const Field u = initial_condition(Grid(64), InitialCondition::Cos1Sin2, 0.5);
    CHECK(step(u, c, 0.0).max_coef_diff(u) == 0.0);
}

TEST_CASE("linear runs follow the free propagator") {
    SimConfig c = small_config(1.75);
    c.nonlinear = false;
    c.init = InitialCondition::Random;
    c.seed = 3;
    const Trajectory tr = run(c);
    const Field exact = multiplier_apply(tr.states.front(), mult::free_propagator(c.alpha, tr.times.back()));
    CHECK(tr.states.back().max_coef_diff(exact) <= 1e-12);
}

TEST_CASE("one step keeps the L2 norm") {
    for (Equation e : {Equation::Full, Equation::Paralinear}) {
        SimConfig c = small_config(1.5);
        c.equation = e;
        const Field u = initial_condition(Grid(64), InitialCondition::Cos1, 0.01);
        const Field v = step(u, c);
        CHECK(std::abs(norm_hs(v, 0.0) - norm_hs(u, 0.0)) <= 1e-10 * norm_hs(u, 0.0));
    }
}

TEST_CASE("fourth order in time") {
    SimConfig c = small_config(1.5);
    c.dt = 0.02 / 8;
    const Field ref = run(c).states.back();
    c.dt = 0.02;
    const double e1 = (run(c).states.back() - ref).spectrum().norm();
    c.dt = 0.01;
    const double e2 = (run(c).states.back() - ref).spectrum().norm();
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(3.0 / 16.0));
}

TEST_CASE("conservation of mass and hamiltonian") {
    for (const Check& ch : conservation_checks(128, 1.5)) {
        INFO(ch.name, " = ", ch.actual, " ", ch.relation, " ", ch.tolerance);
        CHECK(ch.pass);
    }
}

TEST_CASE("paralinear runs keep the lowest modes free") {
    SimConfig c = small_config(1.5);
    c.equation = Equation::Paralinear;
    c.amplitude = 0.01;
    CHECK(run(c).low_mode_residual <= 1e-12);
}

TEST_CASE("rescaling") {
    const Grid g(64);
    const Field u = initial_condition(g, InitialCondition::Cos1Sin2, 1.0);
    CHECK(rescale(u, 1, 1.5).max_coef_diff(u) == 0.0);

    const Field c2 = Field::from_function(g, [](double x) { return std::cos(2.0 * x); });
    const Field c4 = Field::from_function(g, [](double x) { return std::sqrt(2.0) * std::cos(4.0 * x); });
    CHECK(rescale(c2, 2, 1.5).max_coef_diff(c4) <= 1e-15);

    // homogeneous norm on one period cell of u_lambda scales like lambda^{alpha + s - 3/2}
    for (double alpha : {1.25, 1.5, 2.5})
        for (int lambda : {2, 4}) {
            const double s = 1.5 - alpha;
            const double cell = norm_hdot(rescale(u, lambda, alpha), s) / std::sqrt(double(lambda));
            CHECK(cell == doctest::Approx(norm_hdot(u, s)).epsilon(1e-12));
            const double s1 = 1.0;
            const double ratio = norm_hdot(rescale(u, lambda, alpha), s1) / norm_hdot(u, s1);
            CHECK(ratio == doctest::Approx(std::pow(lambda, alpha - 1.0 + s1)).epsilon(1e-12));
        }
    CHECK_THROWS_AS(rescale(u, 3, 1.5), Error);
    CHECK_THROWS_AS(rescale(u, 64, 1.5), Error);
}

TEST_CASE("configuration checks") {
    CHECK(default_dt(256, 1.5) == doctest::Approx(0.5 * std::pow(128.0, -1.5) * kTwoPi));
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    c.alpha = 1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c.alpha = 1.5;
    c.n_points = 31;
    CHECK_THROWS_AS(c.validate(), Error);
    c.n_points = 64;
    c.t_end = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c.t_end = 1.0;
    c.samples = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    CHECK(parse_equation("paralinear") == Equation::Paralinear);
    CHECK_THROWS_AS(parse_init("square"), Error);
}

TEST_CASE("initial data families") {
    const Grid g(128);
    for (InitialCondition k :
         {InitialCondition::Cos1, InitialCondition::Cos1Sin2, InitialCondition::Bump, InitialCondition::Random}) {
        const Field u = initial_condition(g, k, 0.3, 5);
        CHECK(u.is_real());
        CHECK(norm_linf(u) == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(std::abs(u.coef(0)) <= 1e-15);
    }
}

}
