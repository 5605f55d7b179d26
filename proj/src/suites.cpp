#include "pbrg/suites.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace pbrg {

namespace {

std::string label(const std::string& base, double v) {
    std::ostringstream os;
    os << base << v;
    return os.str();
}

constexpr int kSymbolBand = 2;

// Slope of X - Y from the probes whose packets (width 4, three widths) clear |xi| <= window,
// with responses under the cancellation floor of X and Y left out.  An operator that vanishes
// to round-off on all but one of those probes has order -infinity.
double difference_order(const OperatorMatrix& x, const OperatorMatrix& y, double window) {
    const double scale = std::max(x.max_abs(), y.max_abs());
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale * std::sqrt(x.grid.n());
    std::vector<int> centers;
    for (int k : default_probe_centers(x.grid))
        if (k - 12 > window) centers.push_back(k);
    if (centers.size() < 2) throw Error(ErrorCode::DomainTooSmall, "fewer than two probes beyond the cutoff window");
    try {
        const OrderEstimate e = order_probe(x - y, centers, floor);
        return e.slope;
    } catch (const Error& err) {
        if (err.code() != ErrorCode::DegenerateProbe) throw;
        return -std::numeric_limits<double>::infinity();
    }
}

Field smooth_field(const Grid& g, std::uint64_t seed) {
    Field u = random_band_limited(g, 1, kSymbolBand, seed);
    return u.scaled(1.0 / norm_linf(u));
}

}  // namespace

Check check_le(std::string name, double actual, double bound) {
    return {std::move(name), "<=", actual, bound, !std::isnan(actual) && actual <= bound};
}

Check check_ge(std::string name, double actual, double bound) {
    return {std::move(name), ">=", actual, bound, std::isfinite(actual) && actual >= bound};
}

Check check_eq(std::string name, double actual, double expected) {
    return {std::move(name), "==", actual, expected, actual == expected};
}

bool all_pass(const std::vector<Check>& checks) {
    for (const Check& c : checks)
        if (!c.pass) return false;
    return true;
}

void append(std::vector<Check>& to, const std::vector<Check>& from) { to.insert(to.end(), from.begin(), from.end()); }

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

std::vector<Check> gauge_linear_checks(const Grid& g, double alpha, const Cutoff& c, std::uint64_t seed) {
    std::vector<Check> out;
    const std::string tag = label("alpha=", alpha);
    const Symbol a = random_symbol(g, 1.0, c, seed);
    const GaugeSolution e = solve_commutator(a, alpha, c, GaugeRoute::ExplicitFormula);
    const GaugeSolution n = solve_commutator(a, alpha, c, GaugeRoute::NeumannSeries);
    out.push_back(check_le("gauge.explicit_residual " + tag, e.residual_norm, 1e-9));
    out.push_back(check_le("gauge.neumann_residual " + tag, n.residual_norm, 1e-9));
    out.push_back(check_le("gauge.route_agreement " + tag,
                           max_entry(e.p.coeffs() - n.p.coeffs()) / max_entry(e.p.coeffs()), 1e-8));
    const CommutatorBounds b = commutator_bounds(e.p, a, alpha, 1.0, c);
    out.push_back(check_le("gauge.seminorm_bound " + tag, b.lhs, b.rhs));
    out.push_back(check_le("gauge.seminorm_bound_dxi " + tag, b.lhs_xi, b.rhs_xi));
    return out;
}

std::vector<Check> gauge_nonlinear_checks(const Grid& g, double alpha, const Cutoff& c, std::uint64_t seed,
                                          double epsilon) {
    std::vector<Check> out;
    const std::string tag = label("alpha=", alpha);
    const Symbol a = random_symbol(g, 1.0, c, seed);
    NonlinearOptions opt;
    opt.epsilon = epsilon;

    const Symbol medium = a * cplx(1e-2);
    const GaugeSolution m = solve_nonlinear_exp(medium, alpha, c, opt);
    out.push_back(check_le("gauge.newton_iterations " + tag, m.iterations, 25));
    out.push_back(check_le("gauge.newton_residual " + tag, m.residual_norm, opt.tol));
    const double eps = seminorm(medium, 1.0, 0.0, 0, 0);
    out.push_back(check_le("gauge.nonlinear_bound " + tag, nonlinear_bound_ratio(m, medium, alpha),
                           1.0 + calib::kNonlinear * eps));

    const Symbol tiny = a * cplx(1e-6);
    NonlinearOptions tight = opt;
    tight.tol = 1e-18;
    const GaugeSolution t = solve_nonlinear_exp(tiny, alpha, c, tight);
    const GaugeSolution lin = solve_commutator(tiny * cplx(0.0, -1.0), alpha, c);
    out.push_back(check_le("gauge.small_data_agreement " + tag, max_entry(t.matrix.entries - lin.matrix.entries), 1e-11));
    return out;
}

std::vector<Check> gauge_suite(const SuiteParams& p) {
    const Grid g(p.n_points);
    std::vector<Check> out = gauge_linear_checks(g, p.alpha, p.cutoff, p.seed);

    const KernelReport k = commutator_kernel(g, p.alpha, p.cutoff);
    out.push_back(check_eq("gauge.kernel_nullity", k.nullity, k.diagonal_entries));

    const Symbol a = random_symbol(g, 1.0, p.cutoff, p.seed);
    const Symbol r = commutator_remainder(a, p.alpha, p.cutoff);
    out.push_back(check_le("gauge.remainder_contraction",
                           p.cutoff.big_b * seminorm(r, 1.0, 0.0, 0, 0) / seminorm(a, 1.0, 0.0, 0, 0),
                           calib::kRemainder));

    // a(t) = exp(i w t) a0: the first correction shrinks by w / |denominator| at least
    const double omega = 0.05, dt = 1.0;
    const MatrixXc a0 = materialize(a, p.cutoff).entries;
    std::vector<MatrixXc> traj;
    for (int k2 = 0; k2 < 21; ++k2) traj.push_back(a0 * std::exp(kI * omega * (k2 * dt)));
    TimeGaugeOptions topt;
    topt.j_max = p.j_max;
    const TimeGaugeResult ts = solve_time_dependent(traj, dt, g, p.alpha, p.cutoff, topt);
    double min_den = 1e300;
    for (int xi = -g.band(); xi <= g.band(); ++xi)
        for (int eta = -g.band(); eta <= g.band(); ++eta)
            if (eta != 0 && g.in_band(xi + eta) && p.cutoff(eta, xi) > 0.0)
                min_den = std::min(min_den, std::abs(commutator_denominator(p.alpha, xi, eta)));
    out.push_back(check_le("gauge.time_dependent_first_ratio", ts.increment_norms.at(1) / ts.increment_norms.at(0),
                           omega / min_den));
    out.push_back(check_le("gauge.time_dependent_residual", ts.residual_norm / a0.cwiseAbs().maxCoeff(), 1e-8));

    append(out, gauge_nonlinear_checks(g, p.alpha, p.cutoff, p.seed, p.epsilon));
    return out;
}

std::vector<Check> calculus_order_checks(const Grid& g, const Cutoff& c, std::uint64_t seed) {
    std::vector<Check> out;
    const Field u = smooth_field(g, seed);
    const Field v = smooth_field(g, seed + 1);
    auto half = [](int xi) -> cplx { return xi == 0 ? 0.0 : xi / std::sqrt(std::abs(static_cast<double>(xi))); };
    auto lin = [](int xi) -> cplx { return static_cast<double>(xi); };
    const Symbol a = Symbol::separable(u, half, 0.5, 2.0);
    const Symbol b = Symbol::separable(v, lin, 1.0, 2.0);
    const double bc = c.big_b * c.big_b / (2.0 * c.big_b + 1.0);
    const Cutoff composed(bc, c.little_b);
    const OperatorMatrix tab = materialize(a, c) * materialize(b, c);
    // where two cutoffs can disagree: |xi| <= B (eta_a + eta_b) + b + 1 plus the output shift
    const double window = c.big_b * 2 * kSymbolBand + c.little_b + 1 + 2 * kSymbolBand;
    for (double rho : {1.0, 2.0}) {
        const double slope = difference_order(tab, materialize(compose_sharp(a, b, rho), composed), window);
        out.push_back(check_le(label("calculus.composition_order rho=", rho), slope, 0.5 + 1.0 - rho + 0.2));
    }
    const Symbol w = Symbol::separable(smooth_field(g, seed + 2), lin, 1.0, 2.0);
    for (const Symbol* s : {&a, &w}) {
        for (double rho : {1.0, 2.0}) {
            const double slope = difference_order(materialize(*s, c).adjoint(), materialize(adjoint_star(*s, rho), c), window);
            std::ostringstream name;
            name << "calculus.adjoint_order m=" << s->order_m() << " rho=" << rho;
            out.push_back(check_le(name.str(), slope, s->order_m() - rho + 0.2));
        }
    }
    return out;
}

std::vector<Check> calculus_suite(const SuiteParams& p) {
    const Grid g(p.n_points);
    const Cutoff& c = p.cutoff;
    std::vector<Check> out = calculus_order_checks(g, c, p.seed);

    // Spectrum localisation: every entry of T_a maps xi to xi' with
    // (1 - 1/B)|xi| + b/B <= |xi'| <= (1 + 1/B)|xi| - b/B, which gives both inclusions.
    const double B = c.big_b, b = c.little_b;
    int high = 0, low = 0;
    const OperatorMatrix A = materialize(random_symbol(g, 0.0, c, p.seed, g.band()), c);
    for (int i = 0; i < g.n(); ++i) {
        for (int j = 0; j < g.n(); ++j) {
            if (A.entries(i, j) == cplx(0.0)) continue;
            const double xo = std::abs(g.freq(i)), xi = std::abs(g.freq(j));
            if (xo > (1.0 + 1.0 / B) * xi - b / B) ++low;
            if (xo < (1.0 - 1.0 / B) * xi + b / B) ++high;
        }
    }
    out.push_back(check_eq("calculus.localisation_ball_violations", low, 0));
    out.push_back(check_eq("calculus.localisation_ring_violations", high, 0));

    // Composition cutoff law on the product pattern.
    const OperatorMatrix prod = materialize(random_symbol(g, 0.0, c, p.seed + 3, g.band()), c) *
                                materialize(random_symbol(g, 0.0, c, p.seed + 4, g.band()), c);
    const Eigen::MatrixXd pattern = support_weights(g, Cutoff(B * B / (2.0 * B + 1.0), b));
    int outside = 0;
    for (int i = 0; i < g.n(); ++i)
        for (int j = 0; j < g.n(); ++j)
            if (std::abs(prod.entries(i, j)) > 0.0 && pattern(i, j) == 0.0) ++outside;
    out.push_back(check_eq("calculus.composition_cutoff_violations", outside, 0));

    out.push_back(check_le("calculus.operator_norm", measure_operator_norm(g, c, p.seed, 3), calib::kOperatorNorm));
    out.push_back(check_le("calculus.bony_remainder", measure_bony(g, p.seed, 5), calib::kBony));

    double fast = 0.0;
    for (int t = 0; t < 50; ++t) {
        const Field av = random_band_limited(g, 0, g.band(), p.seed + 100 + 2 * t);
        const Field uv = random_band_limited(g, 0, g.band(), p.seed + 101 + 2 * t);
        const Field dense = apply(Symbol::paraproduct(av, 0.0), c, uv);
        const Field quick = paraproduct(av, uv, c);
        const double scale = std::max(dense.spectrum().norm(), 1e-300);
        fast = std::max(fast, (dense.spectrum() - quick.spectrum()).norm() / scale);
    }
    out.push_back(check_le("calculus.paraproduct_fast_path", fast, 1e-10));
    return out;
}

std::vector<Check> flow_law_checks(const Grid& g, const Cutoff& c, std::uint64_t seed) {
    std::vector<Check> out;
    const Symbol p = random_symbol(g, 0.0, c, seed);
    FlowOptions sa;
    sa.self_adjointify = true;
    const MatrixXc f1 = flow_build(p, c, 0.3, sa).matrix.entries;
    const MatrixXc f2 = flow_build(p, c, 0.2, sa).matrix.entries;
    const MatrixXc f3 = flow_build(p, c, 0.5, sa).matrix.entries;
    const MatrixXc fm = flow_build(p, c, -0.3, sa).matrix.entries;
    const MatrixXc id = MatrixXc::Identity(g.n(), g.n());
    out.push_back(check_le("flow.group_law", max_entry(f1 * f2 - f3), 1e-9));
    out.push_back(check_le("flow.inverse", max_entry(f1 * fm - id), 1e-9));
    out.push_back(check_le("flow.isometry", max_entry(f1.adjoint() * f1 - id), 1e-9));
    out.push_back(check_le("flow.symbol_identity", flow_symbol_identity(p, c, 0.5, g.band()), 1e-6));
    return out;
}

std::vector<Check> bch_checks(const Grid& g, const Cutoff& c, std::uint64_t seed) {
    std::vector<Check> out;
    const Symbol p = random_symbol(g, 0.0, c, seed);
    const Symbol b = random_symbol(g, 1.0, c, seed + 1);
    const std::vector<double> taus = {0.1, 0.05, 0.025};
    for (int K : {1, 2}) {
        std::vector<double> errs;
        for (double tau : taus) errs.push_back(bch_truncation(p, b, c, tau, K));
        out.push_back(check_ge(label("flow.bch_exponent K=", K), loglog_slope(taus, errs), K + 1 - 0.3));
    }
    return out;
}

std::vector<Check> flow_suite(const SuiteParams& sp) {
    const Grid g(sp.n_points);
    const Cutoff& c = sp.cutoff;
    std::vector<Check> out = flow_law_checks(g, c, sp.seed);
    append(out, bch_checks(g, c, sp.seed));

    const Symbol p = random_symbol(g, 0.0, c, sp.seed);
    const Symbol b = random_symbol(g, 1.0, c, sp.seed + 1);
    FlowOptions ode;
    ode.method = FlowMethod::OdeIntegration;
    out.push_back(check_le("flow.ode_matches_expm",
                           max_entry(flow_build(p, c, 0.3, ode).matrix.entries - flow_build(p, c, 0.3).matrix.entries),
                           1e-9));
    out.push_back(check_le("flow.commutator_factor",
                           max_entry(commutator_factor(p, b, c, 0.5).entries - commutator_integral(p, b, c, 0.5).entries),
                           1e-9));
    const ComposeCheck cc = flow_compose_check(p, random_symbol(g, 0.0, c, sp.seed + 2), c, 0.5);
    out.push_back(check_le("flow.composition", cc.composition, 1e-7));
    out.push_back(check_le("flow.difference_identity", cc.difference, 1e-9));
    out.push_back(check_le("flow.difference_estimate", measure_flow_difference(g, c, sp.seed, 2, 0.5, 0.5),
                           calib::kFlowDifference));
    out.push_back(check_le("flow.zygmund_bound", measure_flow_zygmund(g, c, sp.seed, 2, 1.0), calib::kFlowZygmund));
    return out;
}

std::vector<Check> resonance_checks(int lattice_n) {
    std::vector<Check> out;
    for (double alpha : {1.25, 1.5, 1.75, 2.0, 2.5}) {
        const auto [lo, hi] = resonance_bracket(alpha, lattice_n);
        out.push_back(check_ge(label("resonance.lower alpha=", alpha), lo, resonance_lower(alpha) * (1.0 - 1e-12)));
        out.push_back(check_le(label("resonance.upper alpha=", alpha), hi, resonance_upper(alpha)));
    }
    return out;
}

std::vector<Check> conservation_checks(int n_points, double alpha) {
    auto drifts = [&](double dt) {
        SimConfig c;
        c.n_points = n_points;
        c.alpha = alpha;
        c.amplitude = 0.01;
        c.t_end = 1.0;
        c.samples = 1;
        c.dt = dt;
        const Trajectory tr = run(c);
        const Field& u0 = tr.states.front();
        const Field& u1 = tr.states.back();
        return std::pair{std::abs(mass(u1) - mass(u0)) / mass(u0),
                         std::abs(hamiltonian(u1, alpha) - hamiltonian(u0, alpha)) / std::abs(hamiltonian(u0, alpha))};
    };
    std::vector<Check> out;
    const auto [m0, h0] = drifts(0.0);
    out.push_back(check_le(label("conservation.mass_drift alpha=", alpha), m0, 1e-8));
    out.push_back(check_le(label("conservation.hamiltonian_drift alpha=", alpha), h0, 1e-6));
    std::vector<double> dts = {0.5, 0.25, 0.125}, dm, dh;
    for (double dt : dts) {
        const auto [m, h] = drifts(dt);
        dm.push_back(m);
        dh.push_back(h);
    }
    out.push_back(check_ge(label("conservation.mass_order alpha=", alpha), loglog_slope(dts, dm), 3.7));
    out.push_back(check_ge(label("conservation.hamiltonian_order alpha=", alpha), loglog_slope(dts, dh), 3.7));
    return out;
}

std::vector<Check> energy_checks(const EnsembleMeasure& m, const std::vector<EnergyStudy>& studies) {
    std::vector<Check> out;
    out.push_back(check_le("energy.max_ratio", m.max_ratio, calib::kEnergyRatio));
    out.push_back(check_le("energy.hermitian_residual", m.hermitian_residual, 1e-9));
    out.push_back(check_le("energy.skew_residual", m.skew_residual, 1e-8));
    double excess = 0.0;
    for (const EnergyStudy& st : studies) {
        const double k2 = st.equivalence_constant * st.equivalence_constant;
        for (const EnergySample& s : st.samples)
            excess = std::max(excess, s.growth / (k2 * std::exp(calib::kEnergyRatio * s.weak_integral)));
    }
    out.push_back(check_le("energy.growth_over_bound", excess, 1.0));
    return out;
}

std::vector<ConjugationRun> conjugation_runs(const SimConfig& base, const std::vector<double>& apertures,
                                             const std::vector<int>& samples) {
    std::vector<ConjugationRun> runs;
    for (double B : apertures) {
        for (int n : samples) {
            SimConfig c = base;
            c.equation = Equation::Paralinear;
            c.cutoff = Cutoff(B, base.cutoff.little_b);
            c.samples = n;
            const Trajectory tr = run(c);
            runs.push_back({B, n, conjugation_study(tr, c, {0.0, 1.0, 2.0}, std::max(1, n / 5))});
        }
    }
    return runs;
}

std::vector<Check> conjugation_checks(const std::vector<ConjugationRun>& runs) {
    std::vector<Check> out;
    std::map<double, const ConjugationRun*> coarse;
    for (const ConjugationRun& r : runs) {
        out.push_back(check_le(label("conjugation.order B=", r.big_b) + label(" samples=", r.samples), r.study.order, 0.2));
        auto it = coarse.find(r.big_b);
        if (it == coarse.end()) {
            coarse[r.big_b] = &r;
            continue;
        }
        const double c0 = it->second->study.residual_constant, c1 = r.study.residual_constant;
        out.push_back(check_le(label("conjugation.refinement_change B=", r.big_b), std::abs(c1 - c0) / c0, 0.1));
    }
    if (coarse.size() >= 2) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& [B, r] : coarse) {
            lo = std::min(lo, r->study.order);
            hi = std::max(hi, r->study.order);
        }
        out.push_back(check_le("conjugation.aperture_spread", hi - lo, 0.05));
    }
    return out;
}

bool grid_sensitive(const ScanCell& c) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double g : c.lipschitz_growth) {
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    return hi > kGridSensitivity * lo;
}

std::vector<Check> scan_checks(const std::vector<ScanCell>& cells) {
    std::vector<Check> out;
    if (cells.empty()) return out;
    double agreeing = 0.0, mislabelled = 0.0, small_blowups = 0.0;
    double smallest = std::numeric_limits<double>::infinity();
    for (const ScanCell& c : cells) smallest = std::min(smallest, c.amplitude);
    for (const ScanCell& c : cells) {
        if (c.agree) agreeing += 1.0;
        if (!c.agree && c.outcome != BlowupClass::Inconclusive) mislabelled += 1.0;
        if (c.amplitude == smallest && c.outcome != BlowupClass::None) small_blowups += 1.0;
    }
    out.push_back(check_ge("scan.agreement_fraction", agreeing / cells.size(), 0.8));
    out.push_back(check_eq("scan.disagreeing_not_inconclusive", mislabelled, 0.0));
    out.push_back(check_eq("scan.small_amplitude_not_none", small_blowups, 0.0));
    return out;
}

}  // namespace pbrg
