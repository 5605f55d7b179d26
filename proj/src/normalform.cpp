#include "pbrg/normalform.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <tuple>

namespace pbrg {

double resonance(double alpha, double xi1, double xi2) {
    return dispersion_relation(alpha, xi1 + xi2) - dispersion_relation(alpha, xi1) - dispersion_relation(alpha, xi2);
}

std::pair<double, double> resonance_bracket(double alpha, int n) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    const int top = n / 4;
    for (int a = -top; a <= top; ++a) {
        if (a == 0) continue;
        for (int b = -top; b <= top; ++b) {
            if (b == 0 || a + b == 0) continue;
            const double x1 = std::abs(a), x2 = std::abs(b), x3 = std::abs(a + b);
            const double mn = std::min({x1, x2, x3}), mx = std::max({x1, x2, x3});
            const double r = std::abs(resonance(alpha, a, b)) / (mn * std::pow(mx, alpha - 1.0));
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    return {lo, hi};
}

Multiplier2 Multiplier2::constant(const Grid& g, cplx v) {
    MatrixXc m = MatrixXc::Zero(g.n(), g.n());
    for (int a = -g.band(); a <= g.band(); ++a)
        for (int b = -g.band(); b <= g.band(); ++b) m(g.index(a), g.index(b)) = v;
    return {g, m};
}

Field multilinear_apply(const Multiplier2& chi, const Field& f1, const Field& f2) {
    require_same_grid(chi.grid, f1.grid(), "multilinear_apply");
    require_same_grid(chi.grid, f2.grid(), "multilinear_apply");
    const Grid& g = chi.grid;
    VectorXc out = VectorXc::Zero(g.n());
    for (int a = -g.band(); a <= g.band(); ++a) {
        const cplx ca = f1.coef(a);
        if (ca == 0.0) continue;
        const int lo = std::max(-g.band(), -g.band() - a), hi = std::min(g.band(), g.band() - a);
        for (int b = lo; b <= hi; ++b) out(g.index(a + b)) += chi.at(a, b) * ca * f2.coef(b);
    }
    bool real = f1.is_real() && f2.is_real();
    if (real) {
        // real inputs give a real output iff chi(-a,-b) = conj(chi(a,b)) on the band
        for (int a = -g.band(); a <= g.band() && real; ++a)
            for (int b = -g.band(); b <= g.band(); ++b)
                if (std::abs(chi.at(-a, -b) - std::conj(chi.at(a, b))) > 1e-13 * (1.0 + std::abs(chi.at(a, b)))) {
                    real = false;
                    break;
                }
    }
    return Field(g, out, real);
}

namespace {

void check_resonance(double alpha, int a, int b, double om) {
    const double x1 = std::abs(a), x2 = std::abs(b), x3 = std::abs(a + b);
    const double mn = std::min({x1, x2, x3}), mx = std::max({x1, x2, x3});
    if (std::abs(om) < 1e-8 * mn * std::pow(mx, alpha - 1.0)) {
        std::ostringstream os;
        os << "|Omega(" << a << ", " << b << ")| = " << std::abs(om) << " on the support";
        throw Error(ErrorCode::SmallDivisor, os.str());
    }
}

}  // namespace

const NormalFormTables& build_chi1(const Grid& g, double s, double alpha, const Cutoff& c) {
    if (!(alpha > 1.0)) throw Error(ErrorCode::InvalidValue, "build_chi1 needs alpha > 1");
    using Key = std::tuple<int, double, double, double, double>;
    static std::mutex mu;
    static std::map<Key, std::unique_ptr<NormalFormTables>> cache;
    const Key key{g.n(), s, alpha, c.big_b, c.little_b};
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;

    MatrixXc chi = MatrixXc::Zero(g.n(), g.n()), chi1 = MatrixXc::Zero(g.n(), g.n());
    for (int a = -g.band(); a <= g.band(); ++a) {
        for (int b = -g.band(); b <= g.band(); ++b) {
            const int x = a + b;
            const double psi1 = c(a, b), psi2 = c(a, x);
            if (psi1 == 0.0 && psi2 == 0.0) continue;
            const double om = resonance(alpha, a, b);
            const double r = std::pow(japanese_bracket(x), s) / std::pow(japanese_bracket(b), s);
            const double num = b * psi1 * r - x * psi2 / r;
            if (num == 0.0) continue;
            check_resonance(alpha, a, b, om);
            const double v = num / (2.0 * om);
            chi(g.index(a), g.index(b)) = v;
            chi1(g.index(a), g.index(b)) = v * std::pow(std::abs(static_cast<double>(b)), alpha - 1.0);
        }
    }
    auto tables = std::make_unique<NormalFormTables>(NormalFormTables{{g, chi}, {g, chi1}});
    return *cache.emplace(key, std::move(tables)).first->second;
}

Multiplier2 printed_chi(const Grid& g, double s, double alpha, const Cutoff& c) {
    MatrixXc chi = MatrixXc::Zero(g.n(), g.n());
    for (int a = -g.band(); a <= g.band(); ++a) {
        for (int b = -g.band(); b <= g.band(); ++b) {
            const double psi1 = c(a, b), psi2 = c(a, b - a);
            if (psi1 == 0.0 && psi2 == 0.0) continue;
            const double om = resonance(alpha, a, b);
            const double f1 = psi1 * std::pow(japanese_bracket(b), -s) * std::pow(japanese_bracket(a), -s) * b *
                              (std::pow(japanese_bracket(b), s) - std::pow(japanese_bracket(a + b), s));
            const double f2 = psi2 * (b - a) - psi1 * b;
            if (f1 == 0.0 || f2 == 0.0) continue;
            check_resonance(alpha, a, b, om);
            chi(g.index(a), g.index(b)) = (f1 / om) * (f2 / (2.0 * om));
        }
    }
    return {g, chi};
}

MarcinkiewiczReport marcinkiewicz(const Multiplier2& chi) {
    const Grid& g = chi.grid;
    MarcinkiewiczReport r;
    for (int a = -g.band(); a <= g.band(); ++a) {
        for (int b = -g.band(); b <= g.band(); ++b) {
            const double v = std::abs(chi.at(a, b));
            r.sup = std::max(r.sup, v);
            if (std::abs(b) >= 4 * std::abs(a)) r.far_sup = std::max(r.far_sup, v);
            if (v == 0.0) continue;
            if (a + 1 <= g.band() && chi.at(a + 1, b) != 0.0)
                r.d_xi1 = std::max(r.d_xi1, std::abs(chi.at(a + 1, b) - chi.at(a, b)) * std::abs(a));
            if (b + 1 <= g.band() && chi.at(a, b + 1) != 0.0)
                r.d_xi2 = std::max(r.d_xi2, std::abs(chi.at(a, b + 1) - chi.at(a, b)) * std::abs(b));
        }
    }
    return r;
}

Field normal_form(const Field& u, const Field& v, double s, double alpha, const Cutoff& c) {
    require_same_grid(u.grid(), v.grid(), "normal_form");
    const NormalFormTables& t = build_chi1(u.grid(), s, alpha, c);
    const Field dv = multiplier_apply(v, mult::abs_pow(1.0 - alpha));
    return v + multilinear_apply(t.chi1, u, dv);
}

}  // namespace pbrg
