#include "pbrg/gauge.hpp"

#include <cmath>
#include <sstream>

namespace pbrg {

const char* route_name(GaugeRoute r) {
    switch (r) {
        case GaugeRoute::ExplicitFormula: return "explicit_formula";
        case GaugeRoute::NeumannSeries: return "neumann_series";
        case GaugeRoute::Newton: return "newton";
    }
    return "?";
}

double commutator_denominator(double alpha, int xi, int eta) {
    return dispersion_relation(alpha, xi) - dispersion_relation(alpha, xi + eta);
}

MatrixXc dispersion_commutator(const MatrixXc& p, const Grid& g, double alpha) {
    MatrixXc out(p.rows(), p.cols());
    for (int col = 0; col < g.n(); ++col) {
        const double dc = dispersion_relation(alpha, g.freq(col));
        for (int row = 0; row < g.n(); ++row)
            out(row, col) = p(row, col) * cplx(0.0, dc - dispersion_relation(alpha, g.freq(row)));
    }
    return out;
}

Eigen::MatrixXd offdiag_support(const Grid& g, const Cutoff& c) {
    Eigen::MatrixXd m = support_weights(g, c);
    for (int i = 0; i < g.n(); ++i) m(i, i) = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = m.data()[i] > 0.0 ? 1.0 : 0.0;
    return m;
}

double masked_max(const MatrixXc& m, const Eigen::MatrixXd& mask) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i)
        if (mask.data()[i] != 0.0) best = std::max(best, std::abs(m.data()[i]));
    return best;
}

double unmasked_max(const MatrixXc& m, const Eigen::MatrixXd& mask) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i)
        if (mask.data()[i] == 0.0) best = std::max(best, std::abs(m.data()[i]));
    return best;
}

namespace {

void check_divisor(double alpha, int xi, int eta, double den) {
    const double scale = std::abs(static_cast<double>(eta)) *
                         std::pow(std::max(std::abs(xi), std::abs(xi + eta)), alpha - 1.0);
    if (std::abs(den) < 1e-8 * scale) {
        std::ostringstream os;
        os << "|d(" << xi << ") - d(" << xi + eta << ")| = " << std::abs(den) << " on the support";
        throw Error(ErrorCode::SmallDivisor, os.str());
    }
}

MatrixXc masked(const MatrixXc& m, const Eigen::MatrixXd& mask) { return m.cwiseProduct(mask.cast<cplx>()); }

GaugeSolution finish(const Symbol& p, const Symbol& a, double alpha, const Cutoff& c, GaugeRoute route,
                     double kernel, int iterations) {
    const Grid& g = a.grid();
    OperatorMatrix tp = materialize(p, c);
    const MatrixXc lhs = dispersion_commutator(tp.entries, g, alpha);
    const MatrixXc rhs = materialize(a, c).entries;
    const Eigen::MatrixXd mask = offdiag_support(g, c);
    GaugeSolution s{p, tp, route};
    s.residual_norm = masked_max(lhs - rhs, mask);
    s.off_support_norm = unmasked_max(lhs, mask);
    s.kernel_norm = kernel;
    s.iterations = iterations;
    s.seminorm_report = seminorm_report(p, p.order_m(), 0.0, 0, 0);
    return s;
}

}  // namespace

MatrixXc solve_commutator_matrix(const MatrixXc& a, const Grid& g, double alpha, double* kernel_norm) {
    MatrixXc p = MatrixXc::Zero(a.rows(), a.cols());
    double kernel = 0.0;
    for (int col = 0; col < g.n(); ++col) {
        const int xi = g.freq(col);
        for (int row = 0; row < g.n(); ++row) {
            const cplx v = a(row, col);
            if (v == 0.0) continue;
            if (row == col) {
                kernel = std::max(kernel, std::abs(v));
                continue;
            }
            const int eta = g.freq(row) - xi;
            const double den = commutator_denominator(alpha, xi, eta);
            check_divisor(alpha, xi, eta, den);
            p(row, col) = v / cplx(0.0, den);
        }
    }
    if (kernel_norm) *kernel_norm = kernel;
    return p;
}

Symbol cole_hopf_parametrix(const Symbol& a, double alpha, const Cutoff& c) {
    const Grid& g = a.grid();
    MatrixXc out = MatrixXc::Zero(g.n(), g.n());
    for (int col = 0; col < g.n(); ++col) {
        const int xi = g.freq(col);
        if (xi == 0) continue;
        const double w = std::pow(std::abs(static_cast<double>(xi)), 1.0 - alpha) / alpha;
        for (int row = 0; row < g.n(); ++row) {
            const int eta = g.freq(row);
            const double psi = c(eta, xi);
            if (eta == 0 || psi == 0.0) continue;
            out(row, col) = w * psi * a.coeffs()(row, col) / cplx(0.0, eta);
        }
    }
    return Symbol(g, out, a.order_m() + 1.0 - alpha, a.rho() + 1.0);
}

namespace {

// -parametrix restricted to psi > 0 without the psi weight, and the remainder
// x - i den E'(x) on the same entries
void neumann_step(const Grid& g, double alpha, const Cutoff& c, const MatrixXc& x, MatrixXc& inc, MatrixXc& next) {
    inc.setZero(g.n(), g.n());
    next.setZero(g.n(), g.n());
    for (int col = 0; col < g.n(); ++col) {
        const int xi = g.freq(col);
        if (xi == 0) continue;
        const double w = std::pow(std::abs(static_cast<double>(xi)), 1.0 - alpha) / alpha;
        for (int row = 0; row < g.n(); ++row) {
            const int eta = g.freq(row);
            if (eta == 0 || c(eta, xi) == 0.0) continue;
            const cplx e = -w * x(row, col) / cplx(0.0, eta);
            inc(row, col) = e;
            next(row, col) = x(row, col) - cplx(0.0, commutator_denominator(alpha, xi, eta)) * e;
        }
    }
}

}  // namespace

Symbol commutator_remainder(const Symbol& a, double alpha, const Cutoff& c) {
    const Grid& g = a.grid();
    MatrixXc inc, next;
    neumann_step(g, alpha, c, a.coeffs(), inc, next);
    return Symbol(g, next, a.order_m(), a.rho());
}

GaugeSolution solve_commutator(const Symbol& a, double alpha, const Cutoff& c, GaugeRoute route) {
    if (!(alpha >= 1.0)) throw Error(ErrorCode::InvalidValue, "solve_commutator needs alpha >= 1");
    const Grid& g = a.grid();
    const double order = a.order_m() + 1.0 - alpha;
    double kernel = 0.0;
    for (int xi = -g.band(); xi <= g.band(); ++xi)
        kernel = std::max(kernel, c(0, xi) * std::abs(a.coef(0, xi)));

    if (route == GaugeRoute::ExplicitFormula) {
        MatrixXc p = MatrixXc::Zero(g.n(), g.n());
        for (int col = 0; col < g.n(); ++col) {
            const int xi = g.freq(col);
            for (int row = 0; row < g.n(); ++row) {
                const int eta = g.freq(row);
                if (eta == 0 || c(eta, xi) == 0.0) continue;
                const double den = commutator_denominator(alpha, xi, eta);
                check_divisor(alpha, xi, eta, den);
                p(row, col) = a.coeffs()(row, col) / cplx(0.0, den);
            }
        }
        return finish(Symbol(g, p, order, a.rho() + 1.0), a, alpha, c, route, kernel, 0);
    }
    if (route == GaugeRoute::Newton)
        throw Error(ErrorCode::InvalidValue, "the Newton route belongs to solve_nonlinear_exp");
    if (alpha == 1.0) throw Error(ErrorCode::InvalidValue, "the Neumann route needs alpha > 1");

    MatrixXc x = a.coeffs(), p = MatrixXc::Zero(g.n(), g.n()), inc, next;
    double first = -1.0, prev = -1.0;
    int growing = 0, k = 0;
    bool converged = false;
    for (; k < 50; ++k) {
        neumann_step(g, alpha, c, x, inc, next);
        p += inc;
        const double size = seminorm(Symbol(g, inc, order, 0.0), order, 0.0, 0, 0);
        if (first < 0.0) first = size;
        if (size <= 1e-10 * first || first == 0.0) {
            converged = true;
            ++k;
            break;
        }
        if (prev >= 0.0 && size > prev) {
            if (++growing >= 3) {
                std::ostringstream os;
                os << "Neumann increments grew for 3 consecutive terms (last " << size << ")";
                throw Error(ErrorCode::NeumannDivergence, os.str());
            }
        } else {
            growing = 0;
        }
        prev = size;
        x = next;
    }
    if (!converged) throw Error(ErrorCode::NeumannDivergence, "Neumann series not converged after 50 terms");
    return finish(Symbol(g, p, order, a.rho() + 1.0), a, alpha, c, route, kernel, k);
}

CommutatorBounds commutator_bounds(const Symbol& p, const Symbol& a, double alpha, double beta, const Cutoff& c) {
    const double B = c.big_b;
    const double denom = B * (1.0 - std::pow(1.0 - 1.0 / B, alpha));
    const Symbol sp = regularize(p, c), sa = regularize(a, c);
    CommutatorBounds r;
    r.lhs = seminorm(sp.dx(1), beta + 1.0 - alpha, 0.0, 0, 0);
    r.rhs = seminorm(sa, beta, 0.0, 0, 0) / denom;
    r.lhs_xi = seminorm(sp.dx(1).dxi(1), beta - alpha, 0.0, 0, 0);
    r.rhs_xi = seminorm(sa.dxi(1), beta - 1.0, 0.0, 0, 0) / denom +
               alpha * (std::pow(1.0 + 1.0 / B, alpha - 1.0) - 1.0) / (1.0 - std::pow(1.0 - 1.0 / B, alpha)) * r.lhs;
    return r;
}

std::pair<double, double> denominator_bracket(const Grid& g, double alpha, const Cutoff& c) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int xi = -g.band(); xi <= g.band(); ++xi) {
        for (int eta = -g.band(); eta <= g.band(); ++eta) {
            if (eta == 0 || !g.in_band(xi + eta) || c(eta, xi) == 0.0) continue;
            const double scale = std::abs(eta) * std::pow(std::max(std::abs(xi), std::abs(xi + eta)), alpha - 1.0);
            const double r = std::abs(commutator_denominator(alpha, xi, eta)) / scale;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    return {lo, hi};
}

KernelReport commutator_kernel(const Grid& g, double alpha, const Cutoff& c) {
    KernelReport k;
    std::vector<double> diag;
    for (int xi = -g.band(); xi <= g.band(); ++xi) {
        for (int xo = -g.band(); xo <= g.band(); ++xo) {
            if (c(xo - xi, xi) == 0.0) continue;
            diag.push_back(std::abs(dispersion_relation(alpha, xi) - dispersion_relation(alpha, xo)));
            if (xo == xi) ++k.diagonal_entries;
        }
    }
    k.support_entries = static_cast<int>(diag.size());
    // L acts diagonally on the entries, so its singular values are these magnitudes
    Eigen::VectorXd sv = Eigen::Map<Eigen::VectorXd>(diag.data(), static_cast<Eigen::Index>(diag.size()));
    const double top = sv.size() ? sv.maxCoeff() : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-12 * top) ++k.rank;
    k.nullity = k.support_entries - k.rank;
    return k;
}

std::vector<MatrixXc> time_derivative(const std::vector<MatrixXc>& f, double dt) {
    const size_t n = f.size();
    std::vector<MatrixXc> d(n);
    if (n == 0) return d;
    if (n == 1) {
        d[0] = MatrixXc::Zero(f[0].rows(), f[0].cols());
        return d;
    }
    if (n == 2) {
        d[0] = d[1] = (f[1] - f[0]) / dt;
        return d;
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dt);
    for (size_t i = 1; i + 1 < n; ++i) {
        if (i >= 2 && i + 2 < n)
            d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * dt);
        else
            d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dt);
    }
    return d;
}

TimeGaugeResult solve_time_dependent(const std::vector<MatrixXc>& a, double dt, const Grid& g, double alpha,
                                     const Cutoff& c, const TimeGaugeOptions& opt) {
    if (!(alpha > 1.0)) throw Error(ErrorCode::InvalidValue, "solve_time_dependent needs alpha > 1");
    if (a.empty()) throw Error(ErrorCode::InvalidValue, "empty time series");
    const size_t n = a.size();
    const Eigen::MatrixXd mask = offdiag_support(g, c);
    TimeGaugeResult out;

    auto max_over = [](const std::vector<MatrixXc>& m) {
        double b = 0.0;
        for (const auto& x : m) b = std::max(b, max_entry(x));
        return b;
    };
    auto residual = [&](const std::vector<MatrixXc>& p) {
        const auto dp = time_derivative(p, dt);
        double r = 0.0;
        for (size_t t = 0; t < n; ++t)
            r = std::max(r, masked_max(dispersion_commutator(p[t], g, alpha) - dp[t] - a[t], mask));
        return r;
    };

    std::vector<MatrixXc> pj(n);
    for (size_t t = 0; t < n; ++t) pj[t] = solve_commutator_matrix(masked(a[t], mask), g, alpha);
    out.p = pj;
    out.increment_norms.push_back(max_over(pj));
    out.residual_by_j.push_back(residual(out.p));
    const double first = out.increment_norms.front();
    int flat = 0;
    for (int j = 0; j < opt.j_max; ++j) {
        const double last = out.increment_norms.back();
        if (last <= opt.tol * std::max(first, 1e-300) || last == 0.0) break;
        const auto dp = time_derivative(pj, dt);
        for (size_t t = 0; t < n; ++t) pj[t] = solve_commutator_matrix(masked(dp[t], mask), g, alpha);
        const double size = max_over(pj);
        const double ratio = last > 0.0 ? size / last : 0.0;
        out.growth_ratio = std::max(out.growth_ratio, ratio);
        for (size_t t = 0; t < n; ++t) out.p[t] += pj[t];
        out.increment_norms.push_back(size);
        out.residual_by_j.push_back(residual(out.p));
        flat = ratio > 0.99 ? flat + 1 : 0;
        if (flat >= 2 && size > opt.tol * first) {
            std::ostringstream os;
            os << "series increments plateau at " << size << " (ratio " << ratio << ")";
            throw Error(ErrorCode::SeriesStalled, os.str());
        }
    }
    out.terms = static_cast<int>(out.increment_norms.size());
    out.residual_norm = out.residual_by_j.back();
    out.k_hat = alpha * out.growth_ratio;
    out.k_flag = out.k_hat >= alpha;

    if (opt.integrate_kernel) {
        // -d_t p = a on the diagonal, p(0) = 0
        std::vector<MatrixXc> diag(n, MatrixXc::Zero(g.n(), g.n()));
        for (size_t t = 1; t < n; ++t)
            for (int i = 0; i < g.n(); ++i) diag[t](i, i) = diag[t - 1](i, i) - 0.5 * dt * (a[t](i, i) + a[t - 1](i, i));
        const auto dd = time_derivative(diag, dt);
        for (size_t t = 0; t < n; ++t) {
            out.p[t] += diag[t];
            for (int i = 0; i < g.n(); ++i)
                out.kernel_residual = std::max(out.kernel_residual, std::abs(dd[t](i, i) + a[t](i, i)));
        }
    }
    return out;
}

std::vector<GaugeSolution> solve_time_dependent(const std::vector<Symbol>& a, double dt, double alpha,
                                                const Cutoff& c, const TimeGaugeOptions& opt) {
    if (a.empty()) throw Error(ErrorCode::InvalidValue, "empty time series");
    const Grid& g = a.front().grid();
    std::vector<MatrixXc> am;
    for (const auto& s : a) am.push_back(materialize(s, c).entries);
    const TimeGaugeResult r = solve_time_dependent(am, dt, g, alpha, c, opt);
    std::vector<GaugeSolution> out;
    for (size_t t = 0; t < a.size(); ++t) {
        const double order = a[t].order_m() + 1.0 - alpha;
        Symbol p = extract_symbol(OperatorMatrix(g, r.p[t]), c, order, a[t].rho() + 1.0).symbol;
        GaugeSolution s{p, OperatorMatrix(g, r.p[t]), GaugeRoute::NeumannSeries};
        s.residual_norm = r.residual_norm;
        s.iterations = r.terms;
        s.kernel_norm = r.kernel_residual;
        s.seminorm_report = seminorm_report(p, order, 0.0, 0, 0);
        out.push_back(std::move(s));
    }
    return out;
}

GaugeSolution solve_nonlinear_exp(const Symbol& a, double alpha, const Cutoff& c, const NonlinearOptions& opt) {
    const Grid& g = a.grid();
    const double beta = a.order_m();
    const Symbol ra = regularize(a, c);
    const double size = seminorm(ra, beta, 0.0, 0, 0);
    if (size > opt.epsilon) {
        std::ostringstream os;
        os << "M^beta_0(a) = " << size << " exceeds epsilon = " << opt.epsilon;
        throw Error(ErrorCode::SmallnessViolated, os.str());
    }
    const MatrixXc A = materialize(a, c).entries;
    const Eigen::MatrixXd mask = offdiag_support(g, c);
    MatrixXc P = MatrixXc::Zero(g.n(), g.n());
    MatrixXc F = MatrixXc::Zero(g.n(), g.n());
    double res = 0.0, res0 = -1.0;
    int it = 0;
    for (;; ++it) {
        F = dispersion_commutator(expm(kI * P), g, alpha);
        const MatrixXc R = masked(F - A, mask);
        res = max_entry(R);
        if (res0 < 0.0) res0 = res;
        if (!std::isfinite(res) || res > 1e3 * std::max(res0, 1e-300)) {
            std::ostringstream os;
            os << "Newton residual " << res << " at iteration " << it;
            throw Error(ErrorCode::NewtonDiverged, os.str());
        }
        if (res < opt.tol) break;
        if (it >= opt.max_iter) {
            std::ostringstream os;
            os << "Newton residual " << res << " after " << opt.max_iter << " iterations";
            throw Error(ErrorCode::NewtonDiverged, os.str());
        }
        // i L(delta) = -R
        P += solve_commutator_matrix(kI * R, g, alpha);
    }
    const double order = beta + 1.0 - alpha;
    Symbol p = extract_symbol(OperatorMatrix(g, P), c, order, a.rho() + 1.0).symbol;
    GaugeSolution s{p, OperatorMatrix(g, P), GaugeRoute::Newton};
    s.residual_norm = res;
    s.off_support_norm = unmasked_max(F, mask);
    double kernel = 0.0;
    for (int xi = -g.band(); xi <= g.band(); ++xi) kernel = std::max(kernel, c(0, xi) * std::abs(a.coef(0, xi)));
    s.kernel_norm = kernel;
    s.iterations = it;
    s.seminorm_report = seminorm_report(p, order, 0.0, 0, 0);
    return s;
}

double nonlinear_bound_ratio(const GaugeSolution& s, const Symbol& a, double alpha) {
    const double beta = a.order_m();
    const double rhs = seminorm(a, beta, 0.0, 0, 0);
    if (rhs == 0.0) return 0.0;
    return alpha * seminorm(s.p.dx(1), beta + 1.0 - alpha, 0.0, 0, 0) / rhs;
}

MatrixXc high_part_inverse(const MatrixXc& e, const Grid& g, const Cutoff& c) {
    MatrixXc m = e;
    for (int i = 0; i < g.n(); ++i) {
        const int xi = g.freq(i);
        const double psi = g.in_band(xi) ? c(0, xi) : 0.0;
        m(i, i) += 1.0 - psi;
    }
    return m.partialPivLu().inverse();
}

ConjugatingGauge solve_conjugating(const std::vector<Field>& u, double dt, double alpha, const Cutoff& c,
                                   const ConjugatingOptions& opt) {
    if (!(alpha > 2.0)) throw Error(ErrorCode::InvalidValue, "solve_conjugating needs alpha > 2");
    if (u.empty()) throw Error(ErrorCode::InvalidValue, "empty trajectory");
    const Grid& g = u.front().grid();
    const size_t n = u.size();
    const Eigen::MatrixXd mask = offdiag_support(g, c);
    const MatrixXc weights = support_weights(g, c).cast<cplx>();
    MatrixXc D = MatrixXc::Zero(g.n(), g.n());
    for (int i = 0; i < g.n(); ++i) D(i, i) = cplx(0.0, dispersion_relation(alpha, g.freq(i)));

    ConjugatingGauge out;
    for (const auto& ut : u) {
        const Symbol a = Symbol::separable(ut, [](int xi) { return cplx(0.0, xi); }, 1.0, 1.0);
        out.a.push_back(materialize(a, c).entries);
    }
    out.p.assign(n, MatrixXc::Zero(g.n(), g.n()));
    out.e.resize(n);
    out.residual.resize(n);
    TimeGaugeOptions topt;
    topt.j_max = opt.j_max;
    topt.integrate_kernel = false;

    double res = 0.0, res0 = -1.0;
    int it = 0;
    for (;; ++it) {
        for (size_t t = 0; t < n; ++t) out.e[t] = weights.cwiseProduct(expm(kI * out.p[t]));
        const auto et = time_derivative(out.e, dt);
        std::vector<MatrixXc> rhs(n);
        res = 0.0;
        for (size_t t = 0; t < n; ++t) {
            out.residual[t] = et[t] + D * out.e[t] - out.e[t] * D - out.e[t] * out.a[t];
            const MatrixXc r = masked(out.residual[t], mask);
            res = std::max(res, max_entry(r));
            rhs[t] = -kI * r;
        }
        if (res0 < 0.0) res0 = res;
        if (!std::isfinite(res) || res > 1e3 * std::max(res0, 1e-300)) {
            std::ostringstream os;
            os << "conjugating Newton residual " << res << " at iteration " << it;
            throw Error(ErrorCode::NewtonDiverged, os.str());
        }
        if (res < opt.tol) break;
        if (it >= opt.max_iter) {
            std::ostringstream os;
            os << "conjugating Newton residual " << res << " after " << opt.max_iter << " iterations";
            throw Error(ErrorCode::NewtonDiverged, os.str());
        }
        const TimeGaugeResult step = solve_time_dependent(rhs, dt, g, alpha, c, topt);
        out.growth_ratio = std::max(out.growth_ratio, step.growth_ratio);
        if (step.growth_ratio >= 1.0) {
            std::ostringstream os;
            os << "time-derivative series growth ratio " << step.growth_ratio << " >= 1";
            throw Error(ErrorCode::TamenessViolated, os.str());
        }
        for (size_t t = 0; t < n; ++t) out.p[t] += step.p[t];
    }
    out.k_hat = alpha * out.growth_ratio;
    out.iterations = it;
    out.support_residual = res;
    for (const auto& r : out.residual) out.off_support_residual = std::max(out.off_support_residual, unmasked_max(r, mask));
    return out;
}

}  // namespace pbrg
