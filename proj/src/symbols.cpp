#include "pbrg/symbols.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace pbrg {

Cutoff::Cutoff(double B, double b) : big_b(B), little_b(b) {
    if (!(B > 1.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidValue, "cutoff needs B > 1 and b > 0");
}

double Cutoff::operator()(double eta, double xi) const {
    return smoothstep5(std::abs(xi) - big_b * std::abs(eta) - little_b);
}

double cutoff_eval(const Cutoff& c, double eta, double xi) { return c(eta, xi); }

Symbol::Symbol(const Grid& g, MatrixXc coeffs, double order_m, double rho)
    : grid_(g), c_(std::move(coeffs)), m_(order_m), rho_(rho) {
    if (c_.rows() != g.n() || c_.cols() != g.n())
        throw Error(ErrorCode::GridMismatch, "symbol coefficient array has wrong shape");
}

Symbol Symbol::zero(const Grid& g, double order_m, double rho) {
    return Symbol(g, MatrixXc::Zero(g.n(), g.n()), order_m, rho);
}

Symbol Symbol::from_tabulation(const Grid& g, const MatrixXc& values, double order_m, double rho) {
    MatrixXc c(g.n(), g.n());
    for (int col = 0; col < g.n(); ++col) c.col(col) = fft_forward(values.col(col));
    return Symbol(g, c, order_m, rho);
}

Symbol Symbol::from_function(const Grid& g, const std::function<cplx(double, int)>& f, double order_m,
                             double rho) {
    MatrixXc v(g.n(), g.n());
    for (int col = 0; col < g.n(); ++col)
        for (int j = 0; j < g.n(); ++j) v(j, col) = f(g.node(j), g.freq(col));
    return from_tabulation(g, v, order_m, rho);
}

Symbol Symbol::multiplier(const Grid& g, const std::function<cplx(int)>& m, double order_m) {
    MatrixXc c = MatrixXc::Zero(g.n(), g.n());
    for (int col = 0; col < g.n(); ++col) c(g.index(0), col) = m(g.freq(col));
    return Symbol(g, c, order_m, 1e9);
}

Symbol Symbol::separable(const Field& u, const std::function<cplx(int)>& gfun, double order_m, double rho) {
    const Grid& g = u.grid();
    MatrixXc c(g.n(), g.n());
    for (int col = 0; col < g.n(); ++col) c.col(col) = u.spectrum() * gfun(g.freq(col));
    return Symbol(g, c, order_m, rho);
}

Symbol Symbol::paraproduct(const Field& u, double rho) {
    return separable(u, [](int) { return cplx(1.0); }, 0.0, rho);
}

MatrixXc Symbol::tabulate() const {
    MatrixXc v(grid_.n(), grid_.n());
    for (int col = 0; col < grid_.n(); ++col) v.col(col) = fft_inverse(c_.col(col));
    return v;
}

Field Symbol::column(int xi) const { return Field(grid_, c_.col(grid_.index(xi)), false); }

Symbol Symbol::operator+(const Symbol& o) const {
    require_same_grid(grid_, o.grid_, "Symbol::operator+");
    return Symbol(grid_, c_ + o.c_, std::max(m_, o.m_), std::min(rho_, o.rho_));
}

Symbol Symbol::operator-(const Symbol& o) const {
    require_same_grid(grid_, o.grid_, "Symbol::operator-");
    return Symbol(grid_, c_ - o.c_, std::max(m_, o.m_), std::min(rho_, o.rho_));
}

Symbol Symbol::operator*(cplx s) const { return Symbol(grid_, c_ * s, m_, rho_); }

Symbol Symbol::times(const Symbol& o) const {
    require_same_grid(grid_, o.grid_, "Symbol::times");
    MatrixXc prod = tabulate().cwiseProduct(o.tabulate());
    return from_tabulation(grid_, prod, m_ + o.m_, std::min(rho_, o.rho_));
}

Symbol Symbol::map_pointwise(const std::function<cplx(cplx)>& f) const {
    MatrixXc v = tabulate();
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = f(v.data()[i]);
    return from_tabulation(grid_, v, m_, rho_);
}

Symbol Symbol::dx(int k) const {
    MatrixXc c = c_;
    for (int r = 0; r < grid_.n(); ++r) {
        cplx f = std::pow(cplx(0.0, grid_.freq(r)), k);
        if (k == 0) f = 1.0;
        c.row(r) *= f;
    }
    return Symbol(grid_, c, m_, rho_ - k);
}

Symbol Symbol::dxi(int j) const {
    MatrixXc c = c_;
    const int n = grid_.n();
    for (int step = 0; step < j; ++step) {
        MatrixXc d(n, n);
        for (int col = 0; col + 1 < n; ++col) d.col(col) = c.col(col + 1) - c.col(col);
        d.col(n - 1) = c.col(n - 1) - c.col(n - 2);
        c = d;
    }
    return Symbol(grid_, c, m_ - j, rho_);
}

Symbol Symbol::conj() const {
    // conj(a)^(eta, xi) = conj(a^(-eta, xi)); the Nyquist row pairs with itself
    MatrixXc c(grid_.n(), grid_.n());
    for (int r = 0; r < grid_.n(); ++r) {
        int eta = grid_.freq(r);
        int src = (eta == grid_.kmin()) ? r : grid_.index(-eta);
        c.row(r) = c_.row(src).conjugate();
    }
    return Symbol(grid_, c, m_, rho_);
}

bool Symbol::x_independent(double tol) const {
    for (int r = 0; r < grid_.n(); ++r) {
        if (grid_.freq(r) == 0) continue;
        if (c_.row(r).cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
}

Symbol regularize(const Symbol& a, const Cutoff& c) {
    const Grid& g = a.grid();
    MatrixXc out = a.coeffs();
    for (int col = 0; col < g.n(); ++col) {
        const int xi = g.freq(col);
        for (int r = 0; r < g.n(); ++r) {
            double w = c(g.freq(r), xi);
            if (w != 1.0) out(r, col) *= w;
        }
    }
    return Symbol(g, out, a.order_m(), a.rho());
}

double x_norm(const Grid& g, const VectorXc& column_spectrum, double r) {
    const double ri = std::round(r);
    if (std::abs(r - ri) < 1e-12) {
        double acc = 0.0;
        VectorXc d = column_spectrum;
        const int kmax = static_cast<int>(ri);
        for (int j = 0; j <= kmax; ++j) {
            acc += norm_linf_spectrum(d);
            if (j < kmax)
                for (int i = 0; i < g.n(); ++i) d(i) *= cplx(0.0, g.freq(i));
        }
        return acc;
    }
    return norm_zygmund_spectrum(g, column_spectrum, r);
}

double seminorm(const Symbol& a, double m, double rho, int n, int k) {
    const Grid& g = a.grid();
    if (k < 0 || k > g.n() / 4) {
        std::ostringstream os;
        os << "xi-difference count " << k << " exceeds N/4 = " << g.n() / 4;
        throw Error(ErrorCode::DomainTooSmall, os.str());
    }
    double best = 0.0;
    MatrixXc diff = a.coeffs();
    for (int j = 0; j <= k; ++j) {
        if (j > 0) {
            MatrixXc d = MatrixXc::Zero(g.n(), g.n());
            for (int col = 0; col + 1 < g.n(); ++col) d.col(col) = diff.col(col + 1) - diff.col(col);
            diff = d;
        }
        // xi ranges over the band, xi != 0, with xi + j still on the lattice
        for (int xi = -g.band(); xi + j <= g.kmax(); ++xi) {
            if (xi == 0) continue;
            const double w = std::pow(1.0 + std::abs(static_cast<double>(xi)), -(m - j));
            const VectorXc col = diff.col(g.index(xi));
            if (col.cwiseAbs().maxCoeff() == 0.0) continue;
            best = std::max(best, w * x_norm(g, col, rho + n));
        }
    }
    return best;
}

SeminormReport seminorm_report(const Symbol& a, double m, double rho, int n_max, int k_max) {
    SeminormReport r;
    for (int k = 0; k <= k_max; ++k)
        for (int n = 0; n <= n_max; ++n) r.values[{k, n}] = seminorm(a, m, rho, n, k);
    return r;
}

Symbol random_symbol(const Grid& g, double order, const Cutoff& c, std::uint64_t seed, int eta_max) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    MatrixXc coeffs = MatrixXc::Zero(g.n(), g.n());
    for (int xi = -g.band(); xi <= g.band(); ++xi) {
        const double w = std::pow(1.0 + std::abs(static_cast<double>(xi)), order);
        for (int eta = -eta_max; eta <= eta_max; ++eta) {
            if (eta == 0 || !g.in_band(eta) || c(eta, xi) == 0.0) continue;
            const double decay = 1.0 / (eta * eta);
            coeffs(g.index(eta), g.index(xi)) = w * decay * cplx(nd(rng), nd(rng));
        }
    }
    Symbol a(g, coeffs, order, 0.0);
    const double size = seminorm(a, order, 0.0, 0, 0);
    if (size > 0.0) a = a * cplx(1.0 / size);
    return a;
}

}  // namespace pbrg
