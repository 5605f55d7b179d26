#include "pbrg/experiments.hpp"

#include <cmath>
#include <limits>

namespace pbrg {

double weak_criterion(const Field& u, double alpha) {
    return norm_linf(multiplier_apply(dealiased_product(u, u), mult::abs_pow(2.0 - alpha)));
}

double energy_denominator(const Field& u, double alpha) {
    return norm_linf(multiplier_apply(dealiased_product(u, u), mult::dx_abs_pow(1.0 - alpha)));
}

DiagnosticsRecord diagnostics(const Field& u, double alpha, const std::vector<double>& s_list, double t) {
    DiagnosticsRecord d;
    d.t = t;
    d.mass = mass(u);
    d.hamiltonian = hamiltonian(u, alpha);
    for (double s : s_list) d.sobolev_norms[s] = norm_hs(u, s);
    d.lipschitz = norm_linf(multiplier_apply(u, mult::dx()));
    d.weak_criterion = weak_criterion(u, alpha);
    d.sup_norm = norm_linf(u);
    return d;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Bounded: return "bounded";
        case Verdict::Violated: return "violated";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

EstimateReport make_report(const std::vector<double>& ratios, double fitted_constant, int ensemble_size) {
    EstimateReport r;
    r.fitted_constant = fitted_constant;
    r.ensemble_size = ensemble_size;
    double logs = 0.0;
    int count = 0;
    for (double x : ratios) {
        if (!std::isfinite(x)) {
            r.verdict = Verdict::Inconclusive;
            return r;
        }
        r.max_ratio = std::max(r.max_ratio, x);
        if (x > 0.0) {
            logs += std::log(x);
            ++count;
        }
    }
    r.lsq_constant = count ? std::exp(logs / count) : 0.0;
    r.verdict = r.max_ratio <= fitted_constant ? Verdict::Bounded : Verdict::Violated;
    return r;
}

std::vector<SimConfig> standard_ensemble(const SimConfig& base, const std::vector<double>& amplitudes) {
    std::vector<SimConfig> out;
    for (InitialCondition ic : {InitialCondition::Cos1, InitialCondition::Cos1Sin2, InitialCondition::Bump,
                                InitialCondition::Random}) {
        for (double a : amplitudes) {
            SimConfig c = base;
            c.init = ic;
            c.amplitude = a;
            out.push_back(c);
        }
    }
    return out;
}

namespace {

double l2(const Field& f) { return std::sqrt(kTwoPi) * f.spectrum().norm(); }

double l2_inner_re(const Field& a, const Field& b) { return kTwoPi * a.spectrum().dot(b.spectrum()).real(); }

Field time_rhs(const Field& u, const SimConfig& cfg) {
    return nonlinear_term(u, cfg) - multiplier_apply(u, mult::dispersion(cfg.alpha));
}

double trapezoid_step(double dt, double a, double b) { return 0.5 * dt * (a + b); }

}  // namespace

MatrixXc energy_gauge(const Field& u, double alpha, const Cutoff& c) {
    const Grid& g = u.grid();
    const Symbol m = Symbol::separable(u, [](int xi) { return cplx(xi); }, 1.0, 1.0);
    const MatrixXc M = materialize(m, c).entries;
    const MatrixXc H = M + M.adjoint();
    return solve_commutator_matrix(-H, g, alpha);
}

double bracket_skew_residual(const MatrixXc& p, const MatrixXc& h) {
    const MatrixXc ph = self_adjoint_part(p);
    const MatrixXc br = ph * h - h * ph;
    FlowEvaluator ev(ph);
    MatrixXc x = MatrixXc::Zero(p.rows(), p.cols());
    for (const auto& q : gauss_legendre16(0.0, 1.0, 1)) x += q.w * (ev.at(-q.x) * br * ev.at(q.x));
    return max_entry(x + x.adjoint());
}

EnergyStudy energy_study(const Trajectory& tr, const SimConfig& cfg, double s, int gauge_stride) {
    EnergyStudy st;
    if (tr.states.empty()) return st;
    const Grid& g = tr.states.front().grid();
    const NormalFormTables& tab = build_chi1(g, s, cfg.alpha, cfg.cutoff);
    const double h0 = norm_hs(tr.states.front(), s);
    double integral = 0.0, prev_weak = 0.0;
    for (size_t k = 0; k < tr.states.size(); ++k) {
        const Field& u = tr.states[k];
        const Field v = multiplier_apply(u, mult::japanese(s));
        const Field w = v + multilinear_apply(tab.chi, u, v);
        const Field ut = time_rhs(u, cfg);
        const Field vt = multiplier_apply(ut, mult::japanese(s));
        const Field wt = vt + multilinear_apply(tab.chi, ut, v) + multilinear_apply(tab.chi, u, vt);

        EnergySample e;
        e.t = tr.times[k];
        const double wn = l2(w), vn = l2(v);
        e.dwdt = wn > 0.0 ? l2_inner_re(w, wt) / wn : 0.0;
        e.dvdt = vn > 0.0 ? l2_inner_re(v, vt) / vn : 0.0;
        e.denominator = energy_denominator(u, cfg.alpha) * vn;
        e.ratio = e.denominator > 0.0 ? std::abs(e.dwdt) / e.denominator : 0.0;
        e.w_over_v = vn > 0.0 ? wn / vn : 1.0;
        const double weak = weak_criterion(u, cfg.alpha);
        if (k > 0) integral += trapezoid_step(tr.times[k] - tr.times[k - 1], prev_weak, weak);
        prev_weak = weak;
        e.weak_integral = integral;
        e.growth = h0 > 0.0 ? norm_hs(u, s) / h0 : 1.0;
        st.samples.push_back(e);

        st.max_ratio = std::max(st.max_ratio, e.ratio);
        if (e.w_over_v > 0.0) st.equivalence_constant = std::max({st.equivalence_constant, e.w_over_v, 1.0 / e.w_over_v});

        if (gauge_stride > 0 && k % static_cast<size_t>(gauge_stride) == 0) {
            const MatrixXc p = energy_gauge(u, cfg.alpha, cfg.cutoff);
            const Symbol m = Symbol::separable(u, [](int xi) { return cplx(xi); }, 1.0, 1.0);
            const MatrixXc M = materialize(m, cfg.cutoff).entries;
            st.hermitian_residual = std::max(st.hermitian_residual, max_entry(p - p.adjoint()));
            st.skew_residual = std::max(st.skew_residual, bracket_skew_residual(p, M + M.adjoint()));
        }
    }
    // |v(t)| <= K^2 exp(C int) |v(0)| with K the measured w-v equivalence constant
    const double k2 = st.equivalence_constant * st.equivalence_constant;
    for (const auto& e : st.samples)
        if (e.weak_integral > 0.0)
            st.growth_constant = std::max(st.growth_constant, std::log(e.growth / k2) / e.weak_integral);
    return st;
}

EstimateReport energy_estimate_study(const std::vector<EnergyStudy>& ensemble, double fitted_constant) {
    std::vector<double> ratios;
    for (const auto& e : ensemble)
        for (const auto& s : e.samples)
            if (s.denominator > 0.0) ratios.push_back(s.ratio);
    return make_report(ratios, fitted_constant, static_cast<int>(ensemble.size()));
}

ConjugationStudy conjugation_study(const Trajectory& tr, const SimConfig& cfg, const std::vector<double>& s_probes,
                                   int probe_stride) {
    ConjugationStudy st;
    if (tr.states.size() < 2) throw Error(ErrorCode::InvalidValue, "conjugation_study needs at least two samples");
    const Grid& g = tr.states.front().grid();
    const double dt = tr.times[1] - tr.times[0];
    const ConjugatingGauge cg = solve_conjugating(tr.states, dt, cfg.alpha, cfg.cutoff);
    st.support_residual = cg.support_residual;
    st.k_hat = cg.k_hat;
    st.newton_iterations = cg.iterations;
    st.order = -std::numeric_limits<double>::infinity();
    std::vector<double> ratios;
    for (size_t k = 0; k < tr.states.size(); ++k) {
        const Field& u = tr.states[k];
        const MatrixXc& rop = cg.residual[k];
        const Field r(g, rop * u.spectrum(), false);
        const Field w(g, cg.e[k] * u.spectrum(), false);
        const Field low = multiplier_apply(u, [](int xi) { return cplx(lp_low(xi)); });
        st.residual_norm = std::max(st.residual_norm, l2(r));
        for (double s : s_probes) {
            const double wn = norm_hs(w, s);
            if (wn > 0.0) {
                ratios.push_back(norm_hs(r, s) / wn);
                st.residual_constant = std::max(st.residual_constant, ratios.back());
            }
            const double den = wn + l2(low);
            if (den > 0.0) st.ellipticity_constant = std::max(st.ellipticity_constant, norm_hs(u, s) / den);
        }
        if (probe_stride > 0 && k % static_cast<size_t>(probe_stride) == 0) {
            const MatrixXc op = rop * high_part_inverse(cg.e[k], g, cfg.cutoff);
            double slope = -std::numeric_limits<double>::infinity();
            try {
                slope = order_probe(OperatorMatrix(g, op)).slope;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DegenerateProbe) throw;
            }
            st.times.push_back(tr.times[k]);
            st.slopes.push_back(slope);
            st.order = std::max(st.order, slope);
        }
    }
    st.report = make_report(ratios, st.residual_constant, 1);
    st.report.verdict = st.order <= 0.2 ? Verdict::Bounded : Verdict::Violated;
    return st;
}

double hyperbolic_growth_constant(const Trajectory& tr, double mu) {
    if (tr.states.empty()) return 0.0;
    const double h0 = norm_hs(tr.states.front(), mu);
    double integral = 0.0, c = 0.0;
    for (size_t k = 1; k < tr.states.size(); ++k) {
        integral += trapezoid_step(tr.times[k] - tr.times[k - 1], tr.lipschitz[k - 1], tr.lipschitz[k]);
        if (integral > 0.0 && h0 > 0.0) c = std::max(c, std::log(norm_hs(tr.states[k], mu) / h0) / integral);
    }
    return c;
}

const char* blowup_name(BlowupClass b) {
    switch (b) {
        case BlowupClass::None: return "none";
        case BlowupClass::Lipschitz: return "lipschitz";
        case BlowupClass::SupNorm: return "sup_norm";
        case BlowupClass::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

std::pair<double, double> growths(const Trajectory& tr) {
    double lip = 0.0, sup = 0.0;
    for (double x : tr.lipschitz) lip = std::max(lip, x);
    for (double x : tr.sup_norms) sup = std::max(sup, x);
    const double l0 = tr.lipschitz.front(), s0 = tr.sup_norms.front();
    return {l0 > 0.0 ? lip / l0 : 1.0, s0 > 0.0 ? sup / s0 : 1.0};
}

}  // namespace

BlowupClass classify_blowup(const Trajectory& tr) {
    const auto [lip, sup] = growths(tr);
    const bool sup_trigger = tr.blowup_suspected && tr.blowup_reason.find("sup") != std::string::npos;
    const bool lip_trigger = tr.blowup_suspected && tr.blowup_reason.find("Lipschitz") != std::string::npos;
    if (sup >= 1e3 || sup_trigger) return BlowupClass::SupNorm;
    if (lip >= 1e3 || lip_trigger) return sup < 3.0 ? BlowupClass::Lipschitz : BlowupClass::SupNorm;
    if (tr.blowup_suspected) return BlowupClass::Inconclusive;
    return BlowupClass::None;
}

double scan_dt(int n_points, double alpha, double amplitude) {
    const double d = default_dt(n_points, alpha);
    if (amplitude <= 0.0) return d;
    return std::min(d, 0.5 / (amplitude * n_points / 3.0));
}

std::vector<ScanCell> blowup_scan(const std::vector<double>& alphas, const std::vector<double>& amplitudes,
                                  const ScanOptions& opt) {
    std::vector<ScanCell> cells;
    for (double alpha : alphas) {
        for (double amp : amplitudes) {
            ScanCell cell;
            cell.alpha = alpha;
            cell.amplitude = amp;
            for (int n : opt.grids) {
                SimConfig cfg;
                cfg.n_points = n;
                cfg.alpha = alpha;
                cfg.cutoff = opt.cutoff;
                cfg.equation = Equation::Full;
                cfg.init = opt.family;
                cfg.amplitude = amp;
                cfg.t_end = opt.t_end;
                cfg.samples = opt.samples;
                cfg.dt = scan_dt(n, alpha, amp);
                const Trajectory tr = run(cfg);
                const auto [lip, sup] = growths(tr);
                cell.grids.push_back(n);
                cell.per_grid.push_back(classify_blowup(tr));
                cell.lipschitz_growth.push_back(lip);
                cell.sup_growth.push_back(sup);
            }
            cell.agree = true;
            for (auto b : cell.per_grid) cell.agree = cell.agree && b == cell.per_grid.front();
            cell.outcome = cell.agree ? cell.per_grid.front() : BlowupClass::Inconclusive;
            cells.push_back(cell);
        }
    }
    return cells;
}

std::vector<std::pair<double, double>> scan_monotonicity_violations(const std::vector<ScanCell>& cells) {
    std::vector<std::pair<double, double>> bad;
    for (const auto& a : cells) {
        if (a.outcome == BlowupClass::Inconclusive || a.outcome == BlowupClass::None) continue;
        for (const auto& b : cells)
            if (b.alpha == a.alpha && b.amplitude > a.amplitude && b.outcome == BlowupClass::None)
                bad.emplace_back(b.alpha, b.amplitude);
    }
    return bad;
}

}  // namespace pbrg
