#include "pbrg/solver.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace pbrg {

const char* equation_name(Equation e) { return e == Equation::Full ? "full" : "paralinear"; }

const char* init_name(InitialCondition i) {
    switch (i) {
        case InitialCondition::Cos1: return "cos1";
        case InitialCondition::Cos1Sin2: return "cos1sin2";
        case InitialCondition::Bump: return "bump";
        case InitialCondition::Random: return "random";
    }
    return "?";
}

Equation parse_equation(const std::string& s) {
    if (s == "full") return Equation::Full;
    if (s == "paralinear") return Equation::Paralinear;
    throw Error(ErrorCode::InvalidValue, "equation must be full or paralinear, got '" + s + "'");
}

InitialCondition parse_init(const std::string& s) {
    if (s == "cos1") return InitialCondition::Cos1;
    if (s == "cos1sin2") return InitialCondition::Cos1Sin2;
    if (s == "bump") return InitialCondition::Bump;
    if (s == "random") return InitialCondition::Random;
    throw Error(ErrorCode::InvalidValue, "unknown initial condition '" + s + "'");
}

double default_dt(int n_points, double alpha) { return 0.5 * std::pow(0.5 * n_points, -alpha) * kTwoPi; }

void SimConfig::validate() const {
    Grid g(n_points);
    if (!(alpha > 1.0 && alpha <= 3.0)) throw Error(ErrorCode::InvalidValue, "alpha must lie in (1, 3]");
    if (dt < 0.0 || !std::isfinite(dt)) throw Error(ErrorCode::InvalidValue, "dt must be positive");
    if (!(t_end >= step_size())) throw Error(ErrorCode::InvalidValue, "t_end must be at least dt");
    if (samples < 1) throw Error(ErrorCode::InvalidValue, "samples must be positive");
    if (!(amplitude >= 0.0)) throw Error(ErrorCode::InvalidValue, "amplitude must be non-negative");
}

double SimConfig::step_size() const { return dt > 0.0 ? dt : default_dt(n_points, alpha); }

Field initial_condition(const Grid& g, InitialCondition kind, double amplitude, std::uint64_t seed) {
    Field u = Field::zero(g);
    switch (kind) {
        case InitialCondition::Cos1:
            u = Field::from_function(g, [](double x) { return std::cos(x); });
            break;
        case InitialCondition::Cos1Sin2:
            u = Field::from_function(g, [](double x) { return std::cos(x) + 0.3 * std::sin(2.0 * x); });
            break;
        case InitialCondition::Bump: {
            u = Field::from_function(g, [](double x) {
                const double d = (x - kPi) / 0.25;
                return std::exp(-0.5 * d * d);
            });
            u.coef(0) = 0.0;
            u = truncate_band(u, std::min(g.band(), g.n() / 8));
            break;
        }
        case InitialCondition::Random: {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> nd;
            VectorXc c = VectorXc::Zero(g.n());
            const int top = std::min(g.band(), std::max(8, g.n() / 8));
            for (int k = 1; k <= top; ++k) {
                const cplx z = cplx(nd(rng), nd(rng)) / double(k * k);
                c(g.index(k)) = z;
                c(g.index(-k)) = std::conj(z);
            }
            u = Field(g, c, true);
            break;
        }
    }
    const double sup = norm_linf(u);
    return sup > 0.0 ? u.scaled(amplitude / sup) : u;
}

Field nonlinear_term(const Field& u, const SimConfig& cfg) {
    const Field ux = multiplier_apply(u, mult::dx());
    if (cfg.equation == Equation::Paralinear) return paraproduct(u, ux, cfg.cutoff).scaled(-1.0);
    if (cfg.dealias) return dealiased_product(u, ux).scaled(-1.0);
    Eigen::VectorXd prod = u.real_values().cwiseProduct(ux.real_values());
    return Field::from_real_values(u.grid(), prod).scaled(-1.0);
}

namespace {

Field rhs(const Field& u, const SimConfig& cfg) {
    if (!cfg.nonlinear) return Field::zero(u.grid(), u.is_real());
    return nonlinear_term(u, cfg);
}

bool finite(const Field& u) { return u.spectrum().allFinite(); }

}  // namespace

Field step(const Field& u, const SimConfig& cfg, double h) {
    const Multiplier e_half = mult::free_propagator(cfg.alpha, 0.5 * h);
    const Multiplier e_full = mult::free_propagator(cfg.alpha, h);
    auto E2 = [&](const Field& f) { return multiplier_apply(f, e_half); };
    auto E1 = [&](const Field& f) { return multiplier_apply(f, e_full); };

    const Field k1 = rhs(u, cfg);
    const Field k2 = rhs(E2(u + k1.scaled(0.5 * h)), cfg);
    const Field k3 = rhs(E2(u) + k2.scaled(0.5 * h), cfg);
    const Field k4 = rhs(E1(u) + E2(k3).scaled(h), cfg);
    Field out = E1(u) + (E1(k1) + E2(k2 + k3).scaled(2.0) + k4).scaled(h / 6.0);
    if (!finite(out)) throw Error(ErrorCode::NanDetected, "non-finite state after a step");
    return out;
}

Field step(const Field& u, const SimConfig& cfg) { return step(u, cfg, cfg.step_size()); }

Trajectory run(const SimConfig& cfg) {
    cfg.validate();
    Grid g(cfg.n_points);
    return run_from(initial_condition(g, cfg.init, cfg.amplitude, cfg.seed), cfg);
}

Trajectory run_from(const Field& u0, const SimConfig& cfg) {
    cfg.validate();
    const Grid& g = u0.grid();
    Trajectory tr;
    Field u = u0;
    const double sup0 = norm_linf(u0);
    auto record = [&](double t, const Field& f) {
        tr.times.push_back(t);
        tr.states.push_back(f);
        tr.sup_norms.push_back(norm_linf(f));
        tr.lipschitz.push_back(norm_linf(multiplier_apply(f, mult::dx())));
    };
    record(0.0, u);
    const double interval = cfg.t_end / cfg.samples;
    const long per = std::max<long>(1, static_cast<long>(std::ceil(interval / cfg.step_size() - 1e-9)));
    const double h = interval / per;
    double t = 0.0;

    auto check = [&](const Field& f) -> std::string {
        if (!finite(f)) return "NaN";
        const double sup = norm_linf(f);
        if (sup0 > 0.0 && sup > 1e6 * sup0) return "sup-norm above 1e6 times initial";
        if (norm_linf(multiplier_apply(f, mult::dx())) > 1e8) return "Lipschitz norm above 1e8";
        return "";
    };

    for (int s = 1; s <= cfg.samples; ++s) {
        const double t_target = s * interval;
        try {
            if (!cfg.adaptive) {
                for (long k = 0; k < per; ++k) {
                    u = step(u, cfg, h);
                    ++tr.steps;
                }
            } else {
                double remaining = interval, hh = h;
                while (remaining > 1e-14 * interval) {
                    hh = std::min(hh, remaining);
                    const Field big = step(u, cfg, hh);
                    const Field small = step(step(u, cfg, 0.5 * hh), cfg, 0.5 * hh);
                    const double scale = std::max(1e-300, small.spectrum().cwiseAbs().maxCoeff());
                    const double err = (big.spectrum() - small.spectrum()).cwiseAbs().maxCoeff() / scale;
                    if (err > 1e-8 && hh > 1e-12) {
                        hh *= 0.5;
                        ++tr.rejected;
                        continue;
                    }
                    u = small;
                    remaining -= hh;
                    tr.steps += 2;
                }
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NanDetected) throw;
            tr.blowup_suspected = true;
            tr.blowup_reason = "NaN";
            tr.last_valid_time = t;
            return tr;
        }
        const std::string why = check(u);
        if (!why.empty()) {
            tr.blowup_suspected = true;
            tr.blowup_reason = why;
            tr.last_valid_time = t;
            return tr;
        }
        t = t_target;
        record(t, u);
        if (cfg.equation == Equation::Paralinear) {
            for (int k = -1; k <= 1; ++k) {
                const cplx free = std::exp(cplx(0.0, -t * dispersion_relation(cfg.alpha, k))) * u0.coef(k);
                tr.low_mode_residual = std::max(tr.low_mode_residual, std::abs(u.coef(k) - free));
            }
        }
    }
    tr.last_valid_time = t;
    (void)g;
    return tr;
}

Field rescale(const Field& u, int lambda, double alpha) {
    if (lambda < 1 || (lambda & (lambda - 1)) != 0)
        throw Error(ErrorCode::InvalidValue, "lambda must be a power of two");
    const Grid& g = u.grid();
    VectorXc out = VectorXc::Zero(g.n());
    const double f = std::pow(static_cast<double>(lambda), alpha - 1.0);
    // transform round-off beyond the band is dropped, anything larger is an overflow
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * u.spectrum().cwiseAbs().maxCoeff();
    for (int xi = g.kmin(); xi <= g.kmax(); ++xi) {
        const cplx c = u.coef(xi);
        if (c == 0.0) continue;
        const long target = static_cast<long>(lambda) * xi;
        if (!g.in_band(target) && std::abs(c) <= noise) continue;
        if (!g.in_band(target)) {
            std::ostringstream os;
            os << "mode " << xi << " maps to " << target << " outside the band";
            throw Error(ErrorCode::SpectrumOverflow, os.str());
        }
        out(g.index(static_cast<int>(target))) = f * c;
    }
    return Field(g, out, u.is_real());
}

double mass(const Field& u) { return kTwoPi * u.spectrum().squaredNorm(); }

double hamiltonian(const Field& u, double alpha) {
    const Grid& g = u.grid();
    double quad = 0.0;
    for (int xi = g.kmin(); xi <= g.kmax(); ++xi) {
        if (xi == 0) continue;
        quad += std::pow(std::abs(static_cast<double>(xi)), alpha - 1.0) * std::norm(u.coef(xi));
    }
    const Field sq = dealiased_product(u, u);
    double cubic = 0.0;
    for (int xi = -g.band(); xi <= g.band(); ++xi) cubic += (sq.coef(xi) * u.coef(-xi)).real();
    return kTwoPi * quad + kTwoPi * cubic / 3.0;
}

}  // namespace pbrg
