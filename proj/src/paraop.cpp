#include "pbrg/paraop.hpp"

#include <cmath>
#include <sstream>

namespace pbrg {

OperatorMatrix::OperatorMatrix(const Grid& g, MatrixXc m) : grid(g), entries(std::move(m)) {
    if (entries.rows() != g.n() || entries.cols() != g.n())
        throw Error(ErrorCode::GridMismatch, "operator matrix has wrong shape");
}

OperatorMatrix OperatorMatrix::zero(const Grid& g) { return OperatorMatrix(g, MatrixXc::Zero(g.n(), g.n())); }

OperatorMatrix OperatorMatrix::identity(const Grid& g) {
    return OperatorMatrix(g, MatrixXc::Identity(g.n(), g.n()));
}

OperatorMatrix OperatorMatrix::multiplier(const Grid& g, const Multiplier& m) {
    MatrixXc d = MatrixXc::Zero(g.n(), g.n());
    for (int i = 0; i < g.n(); ++i) d(i, i) = m(g.freq(i));
    return OperatorMatrix(g, d);
}

Field OperatorMatrix::apply(const Field& u) const {
    require_same_grid(grid, u.grid(), "OperatorMatrix::apply");
    return Field(grid, entries * u.spectrum(), false);
}

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& o) const {
    require_same_grid(grid, o.grid, "OperatorMatrix::operator*");
    return OperatorMatrix(grid, entries * o.entries);
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& o) const {
    require_same_grid(grid, o.grid, "OperatorMatrix::operator+");
    return OperatorMatrix(grid, entries + o.entries);
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& o) const {
    require_same_grid(grid, o.grid, "OperatorMatrix::operator-");
    return OperatorMatrix(grid, entries - o.entries);
}

OperatorMatrix OperatorMatrix::adjoint() const { return OperatorMatrix(grid, entries.adjoint()); }

Eigen::MatrixXd support_weights(const Grid& g, const Cutoff& c) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(g.n(), g.n());
    for (int xi = -g.band(); xi <= g.band(); ++xi)
        for (int xo = -g.band(); xo <= g.band(); ++xo) w(g.index(xo), g.index(xi)) = c(xo - xi, xi);
    return w;
}

OperatorMatrix materialize(const Symbol& a, const Cutoff& c) {
    const Grid& g = a.grid();
    MatrixXc m = MatrixXc::Zero(g.n(), g.n());
    for (int xi = -g.band(); xi <= g.band(); ++xi) {
        const int col = g.index(xi);
        for (int xo = -g.band(); xo <= g.band(); ++xo) {
            const int eta = xo - xi;
            if (!g.on_lattice(eta)) continue;
            const double w = c(eta, xi);
            if (w == 0.0) continue;
            m(g.index(xo), col) = w * a.coeffs()(g.index(eta), col);
        }
    }
    return OperatorMatrix(g, m);
}

namespace {

bool symbol_preserves_reality(const Symbol& a) {
    // a(x, -xi) = conj(a(x, xi))  <=>  a^(-eta, -xi) = conj(a^(eta, xi))
    const Grid& g = a.grid();
    const double scale = 1e-13 * (1.0 + a.max_abs());
    for (int xi = -g.band(); xi <= g.band(); ++xi)
        for (int eta = -g.band(); eta <= g.band(); ++eta)
            if (std::abs(a.coef(-eta, -xi) - std::conj(a.coef(eta, xi))) > scale) return false;
    return true;
}

}  // namespace

Field apply(const Symbol& a, const Cutoff& c, const Field& u) {
    require_same_grid(a.grid(), u.grid(), "apply");
    OperatorMatrix m = materialize(a, c);
    Field out = m.apply(u);
    if (u.is_real() && symbol_preserves_reality(a)) out.set_real(true);
    return out;
}

Field paraproduct(const Field& a, const Field& u, const Cutoff& c) {
    require_same_grid(a.grid(), u.grid(), "paraproduct");
    const Grid& g = a.grid();
    const int n = g.n();
    const int band = g.band();
    const int pad = 2 * n;
    const double B = c.big_b, b = c.little_b;
    const int width = 16;

    VectorXc out = VectorXc::Zero(n);
    const int start = static_cast<int>(std::floor(b)) + 1;  // psi(., xi) = 0 for |xi| <= b
    for (int lo = start; lo <= band; lo += width) {
        const int hi = std::min(band, lo + width - 1);
        // |eta| <= e_full: psi = 1 on the whole block; |eta| >= e_zero: psi = 0 on the whole block
        const int e_full = static_cast<int>(std::floor((lo - b - 1.0) / B));
        const int e_zero = std::max(0, static_cast<int>(std::ceil((hi - b) / B)));

        if (e_full >= 0) {
            VectorXc ap = VectorXc::Zero(pad), up = VectorXc::Zero(pad);
            for (int eta = -e_full; eta <= e_full; ++eta)
                if (g.in_band(eta)) ap(eta + pad / 2) = a.coef(eta);
            for (int xi = lo; xi <= hi; ++xi) {
                up(xi + pad / 2) = u.coef(xi);
                up(-xi + pad / 2) = u.coef(-xi);
            }
            VectorXc conv = fft_forward(fft_inverse(ap).cwiseProduct(fft_inverse(up)));
            for (int xo = -band; xo <= band; ++xo) out(g.index(xo)) += conv(xo + pad / 2);
        }
        for (int e = std::max(e_full + 1, 0); e < e_zero; ++e) {
            for (int sgn_eta : {1, -1}) {
                if (e == 0 && sgn_eta < 0) continue;
                const int eta = sgn_eta * e;
                if (!g.in_band(eta)) continue;
                const cplx ae = a.coef(eta);
                if (ae == 0.0) continue;
                for (int mag = lo; mag <= hi; ++mag) {
                    for (int xi : {mag, -mag}) {
                        const int xo = xi + eta;
                        if (!g.in_band(xo)) continue;
                        const double w = c(eta, xi);
                        if (w == 0.0) continue;
                        out(g.index(xo)) += w * ae * u.coef(xi);
                    }
                }
            }
        }
    }
    return Field(g, out, a.is_real() && u.is_real());
}

Symbol compose_sharp(const Symbol& a, const Symbol& b, double rho) {
    require_same_grid(a.grid(), b.grid(), "compose_sharp");
    if (!(rho > 0.0)) throw Error(ErrorCode::InvalidValue, "compose_sharp needs rho > 0");
    Symbol acc = a.times(b);
    double fact = 1.0;
    for (int k = 1; k < rho; ++k) {
        fact *= k;
        const cplx coeff = 1.0 / (std::pow(kI, k) * fact);
        acc = acc + a.dxi(k).times(b.dx(k)) * coeff;
    }
    acc.set_order(a.order_m() + b.order_m());
    acc.set_rho(std::min(a.rho(), b.rho()));
    return acc;
}

Symbol adjoint_star(const Symbol& a, double rho) {
    if (!(rho > 0.0)) throw Error(ErrorCode::InvalidValue, "adjoint_star needs rho > 0");
    const Symbol ca = a.conj();
    Symbol acc = ca;
    double fact = 1.0;
    for (int k = 1; k < rho; ++k) {
        fact *= k;
        const cplx coeff = 1.0 / (std::pow(kI, k) * fact);
        acc = acc + ca.dxi(k).dx(k) * coeff;
    }
    acc.set_order(a.order_m());
    acc.set_rho(a.rho());
    return acc;
}

VectorXc wave_packet(const Grid& g, int center, double width) {
    VectorXc p = VectorXc::Zero(g.n());
    for (int xi = -g.band(); xi <= g.band(); ++xi) {
        const double d = (xi - center) / width;
        p(g.index(xi)) = std::exp(-0.5 * d * d);
    }
    return p / p.norm();
}

std::vector<int> default_probe_centers(const Grid& g) {
    std::vector<int> centers;
    for (int k = 8; k <= g.n() / 4; k *= 2) centers.push_back(k);
    return centers;
}

OrderEstimate order_probe(const OperatorMatrix& A) { return order_probe(A, default_probe_centers(A.grid)); }

OrderEstimate order_probe(const OperatorMatrix& A, const std::vector<int>& centers) {
    return order_probe(A, centers, 1e-14);
}

OrderEstimate order_probe(const OperatorMatrix& A, const std::vector<int>& centers, double floor) {
    OrderEstimate est;
    std::vector<double> xs, ys;
    double biggest = 0.0;
    for (int k : centers) {
        const double yp = (A.entries * wave_packet(A.grid, k)).norm();
        const double ym = (A.entries * wave_packet(A.grid, -k)).norm();
        const double y = std::sqrt(0.5 * (yp * yp + ym * ym));
        est.probes.push_back(k);
        est.responses.push_back(y);
        biggest = std::max(biggest, y);
        if (y < floor) continue;
        xs.push_back(std::log(japanese_bracket(k)));
        ys.push_back(std::log(y));
    }
    est.usable = static_cast<int>(xs.size());
    if (biggest < floor || xs.size() < 2) {
        std::ostringstream os;
        os << "probe responses below " << floor << " (largest " << biggest << ", usable " << xs.size() << ")";
        throw Error(ErrorCode::DegenerateProbe, os.str());
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    est.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    est.intercept = (sy - est.slope * sx) / n;
    double r = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (est.intercept + est.slope * xs[i]);
        r += e * e;
    }
    est.residual = std::sqrt(r / n);
    est.k_low = centers.front();
    est.k_high = centers.back();
    return est;
}

Field bony_remainder(const Field& a, const Field& b, const Cutoff& c) {
    require_same_grid(a.grid(), b.grid(), "bony_remainder");
    Field prod = dealiased_product(a, b);
    return prod - paraproduct(a, b, c) - paraproduct(b, a, c);
}

ExtractedSymbol extract_symbol(const OperatorMatrix& A, const Cutoff& c, double order_m, double rho,
                               double threshold) {
    const Grid& g = A.grid;
    MatrixXc s = MatrixXc::Zero(g.n(), g.n());
    double lost = 0.0;
    for (int xi = -g.band(); xi <= g.band(); ++xi) {
        for (int xo = -g.band(); xo <= g.band(); ++xo) {
            const cplx e = A.entries(g.index(xo), g.index(xi));
            if (e == 0.0) continue;
            const int eta = xo - xi;
            const double w = g.on_lattice(eta) ? c(eta, xi) : 0.0;
            if (w > threshold)
                s(g.index(eta), g.index(xi)) = e / w;
            else
                lost = std::max(lost, std::abs(e));
        }
    }
    return {Symbol(g, s, order_m, rho), lost};
}

double spectral_norm(const MatrixXc& m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<MatrixXc> svd(m);
    return svd.singularValues()(0);
}

double sobolev_operator_norm(const OperatorMatrix& A, double s, double m) {
    const Grid& g = A.grid;
    MatrixXc w = A.entries;
    for (int r = 0; r < g.n(); ++r) {
        const double wr = std::pow(japanese_bracket(g.freq(r)), s);
        for (int col = 0; col < g.n(); ++col)
            w(r, col) *= wr / std::pow(japanese_bracket(g.freq(col)), s + m);
    }
    return spectral_norm(w);
}

double band_operator_norm(const OperatorMatrix& A, int band) {
    const Grid& g = A.grid;
    const int lo = g.index(-band), cols = 2 * band + 1;
    return spectral_norm(A.entries.middleCols(lo, cols));
}

}  // namespace pbrg
