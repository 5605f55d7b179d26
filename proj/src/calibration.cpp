#include "pbrg/calibration.hpp"

#include <cmath>
#include <random>

namespace pbrg {

double resonance_lower(double alpha) { return 2.0 - std::pow(2.0, 2.0 - alpha); }
double resonance_upper(double alpha) { return alpha; }

Field random_band_limited(const Grid& g, int k_min, int k_max, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Field u = Field::zero(g);
    for (int k = std::max(k_min, 0); k <= std::min(k_max, g.band()); ++k) {
        if (k == 0) {
            u.coef(0) = nd(rng);
            continue;
        }
        const cplx z(nd(rng), nd(rng));
        u.coef(k) = z;
        u.coef(-k) = std::conj(z);
    }
    return u;
}

double measure_cutoff_decay(const Grid& g, const Cutoff& c, int eta_max) {
    auto diff = [&](int eta, int xi, int j, int k) {
        // forward differences: j in xi, k in eta
        double acc = 0.0;
        for (int p = 0; p <= j; ++p) {
            for (int q = 0; q <= k; ++q) {
                const double sign = ((j - p) + (k - q)) % 2 == 0 ? 1.0 : -1.0;
                const double binom = std::tgamma(j + 1.0) / (std::tgamma(p + 1.0) * std::tgamma(j - p + 1.0)) *
                                     std::tgamma(k + 1.0) / (std::tgamma(q + 1.0) * std::tgamma(k - q + 1.0));
                acc += sign * binom * c(eta + q, xi + p);
            }
        }
        return acc;
    };
    double worst = 0.0;
    for (int eta = -eta_max; eta <= eta_max; ++eta) {
        for (int xi = -g.band(); xi <= g.band(); ++xi) {
            for (int j = 0; j <= 2; ++j) {
                for (int k = 0; j + k <= 2; ++k) {
                    const double v = std::abs(diff(eta, xi, j, k)) * std::pow(1.0 + std::abs(xi), j + k);
                    worst = std::max(worst, v);
                }
            }
        }
    }
    return worst;
}

double measure_zygmund_sum(const Grid& g, double r, std::uint64_t seed, int count) {
    double worst = 0.0;
    for (int t = 0; t < count; ++t) {
        Field total = Field::zero(g);
        for (int q = 0; q <= g.lp_top(); ++q) {
            Field uq = multiplier_apply(random_band_limited(g, 0, g.band(), seed + 97 * t + q), mult::lp_block(q));
            const double sup = norm_linf(uq);
            if (sup == 0.0) continue;
            total = total + uq.scaled(std::pow(2.0, -q * r) / sup);
        }
        worst = std::max(worst, norm_zygmund(total, r) * (1.0 - std::pow(2.0, -r)));
    }
    return worst;
}

double measure_bony(const Grid& g, std::uint64_t seed, int count) {
    double worst = 0.0;
    for (int t = 0; t < count; ++t) {
        Field a = random_band_limited(g, 1, g.n() / 8, seed + 2 * t);
        Field b = random_band_limited(g, 1, g.n() / 8, seed + 2 * t + 1);
        a = a.scaled(1.0 / norm_hs(a, 2.0));
        b = b.scaled(1.0 / norm_hs(b, 2.0));
        worst = std::max(worst, norm_hs(bony_remainder(a, b), 3.5));
    }
    return worst;
}

double measure_operator_norm(const Grid& g, const Cutoff& c, std::uint64_t seed, int count) {
    double worst = 0.0;
    for (int t = 0; t < count; ++t) {
        for (double m : {-0.5, 0.0, 1.0}) {
            const OperatorMatrix A = materialize(random_symbol(g, m, c, seed + t), c);
            for (double s : {-1.0, 0.0, 2.0}) worst = std::max(worst, sobolev_operator_norm(A, s, m));
        }
    }
    return worst;
}

double measure_flow_difference(const Grid& g, const Cutoff& c, std::uint64_t seed, int count, double tau,
                               double delta) {
    FlowOptions opt;
    opt.self_adjointify = true;
    double worst = 0.0;
    for (int t = 0; t < count; ++t) {
        const Symbol p = random_symbol(g, 0.0, c, seed + 2 * t);
        const Symbol q = p + random_symbol(g, delta, c, seed + 2 * t + 1) * cplx(0.1);
        const FlowOperator fp = flow_build(p, c, tau, opt);
        const FlowOperator fq = flow_build(q, c, tau, opt);
        const double lhs = sobolev_operator_norm(fp.matrix - fq.matrix, 0.0, delta);
        worst = std::max(worst, lhs / (std::abs(tau) * seminorm(p - q, delta, 0.0, 0, 0)));
    }
    return worst;
}

double measure_flow_zygmund(const Grid& g, const Cutoff& c, std::uint64_t seed, int count, double tau) {
    FlowOptions opt;
    opt.self_adjointify = true;
    double worst = 0.0;
    for (int t = 0; t < count; ++t) {
        const FlowOperator f = flow_build(random_symbol(g, 0.0, c, seed + t), c, tau, opt);
        for (int k = 0; k < 4; ++k) {
            const Field u = random_band_limited(g, 1, g.n() / 4, seed + 1000 + 4 * t + k);
            const Field fu = f.matrix.apply(u);
            for (double s : {0.5, 1.5}) worst = std::max(worst, norm_zygmund(fu, s) / norm_zygmund(u, s));
        }
    }
    return worst;
}

double measure_remainder(const Grid& g, double alpha, double beta, std::uint64_t seed, int count) {
    double worst = 0.0;
    for (double B : {4.0, 8.0, 16.0}) {
        const Cutoff c(B, 2.0);
        for (int t = 0; t < count; ++t) {
            const Symbol a = random_symbol(g, beta, c, seed + t);
            const Symbol r = commutator_remainder(a, alpha, c);
            worst = std::max(worst, B * seminorm(r, beta, 0.0, 0, 0) / seminorm(a, beta, 0.0, 0, 0));
        }
    }
    return worst;
}

double measure_nonlinear(const Grid& g, const std::vector<double>& alphas, double scale, std::uint64_t seed,
                         int count) {
    const Cutoff c(8.0, 2.0);
    double worst = 0.0;
    for (double alpha : alphas) {
        for (int t = 0; t < count; ++t) {
            const Symbol a = random_symbol(g, 1.0, c, seed + t) * cplx(scale);
            const GaugeSolution s = solve_nonlinear_exp(a, alpha, c);
            const double eps = seminorm(a, 1.0, 0.0, 0, 0);
            worst = std::max(worst, (nonlinear_bound_ratio(s, a, alpha) - 1.0) / eps);
        }
    }
    return worst;
}

double measure_marcinkiewicz(const Grid& g, double s, const std::vector<double>& alphas, const Cutoff& c) {
    double worst = 0.0;
    for (double alpha : alphas) {
        const MarcinkiewiczReport r = marcinkiewicz(build_chi1(g, s, alpha, c).chi);
        worst = std::max({worst, r.d_xi1, r.d_xi2});
    }
    return worst;
}

double measure_normal_form(const Grid& g, double s, double alpha, const Cutoff& c, double scale,
                           std::uint64_t seed, int count) {
    const double reg = std::max(1.5 - alpha, 0.0) + 0.05;
    double worst = 0.0;
    for (int t = 0; t < count; ++t) {
        Field u = random_band_limited(g, 1, g.n() / 8, seed + t);
        u = u.scaled(scale / norm_linf(u));
        const Field v = multiplier_apply(u, mult::japanese(s));
        const Field w = normal_form(u, v, s, alpha, c);
        const double lhs = norm_hs(w - v, 0.0);
        worst = std::max(worst, lhs / (norm_zygmund(u, reg) * norm_hs(v, 0.0)));
    }
    return worst;
}

SimConfig energy_base_config() {
    SimConfig c;
    c.n_points = 128;
    c.alpha = 1.5;
    c.equation = Equation::Paralinear;
    c.t_end = 2.0;
    c.samples = 20;
    return c;
}

EnsembleMeasure measure_energy_ensemble(const std::vector<double>& amplitudes, std::uint64_t seed,
                                        std::vector<EnergyStudy>* studies) {
    SimConfig base = energy_base_config();
    base.seed = seed;
    return measure_energy_ensemble(base, amplitudes, 2.0, studies);
}

EnsembleMeasure measure_energy_ensemble(const SimConfig& base, const std::vector<double>& amplitudes, double s,
                                        std::vector<EnergyStudy>* studies) {
    EnsembleMeasure m;
    for (const SimConfig& cfg : standard_ensemble(base, amplitudes)) {
        const Trajectory tr = run(cfg);
        const EnergyStudy st = energy_study(tr, cfg, s, 10);
        m.max_ratio = std::max(m.max_ratio, st.max_ratio);
        m.growth_constant = std::max(m.growth_constant, st.growth_constant);
        m.hermitian_residual = std::max(m.hermitian_residual, st.hermitian_residual);
        m.skew_residual = std::max(m.skew_residual, st.skew_residual);
        m.equivalence_constant = std::max(m.equivalence_constant, st.equivalence_constant);
        SimConfig full = cfg;
        full.equation = Equation::Full;
        const Trajectory tf = run(full);
        for (double mu : {2.0, 3.0}) m.hyperbolic_constant = std::max(m.hyperbolic_constant, hyperbolic_growth_constant(tf, mu));
        ++m.members;
        if (studies) studies->push_back(st);
    }
    return m;
}

}  // namespace pbrg
