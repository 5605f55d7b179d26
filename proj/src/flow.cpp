#include "pbrg/flow.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>

namespace pbrg {

double max_entry(const MatrixXc& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

MatrixXc expm(const MatrixXc& a) {
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const double theta13 = 5.371920351148152;
    const Eigen::Index n = a.rows();
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    if (norm1 > theta13) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
    const MatrixXc A = a / std::ldexp(1.0, s);
    const MatrixXc I = MatrixXc::Identity(n, n);
    const MatrixXc A2 = A * A;
    const MatrixXc A4 = A2 * A2;
    const MatrixXc A6 = A4 * A2;
    const MatrixXc U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
    const MatrixXc V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
    MatrixXc R = (V - U).partialPivLu().solve(V + U);
    for (int k = 0; k < s; ++k) R = R * R;
    return R;
}

std::vector<QuadNode> gauss_legendre16(double a, double b, int panels) {
    using Rule = boost::math::quadrature::gauss<double, 16>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    std::vector<QuadNode> out;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h, half = 0.5 * h;
        for (size_t i = 0; i < x.size(); ++i) {
            out.push_back({mid + half * x[i], half * w[i]});
            if (x[i] != 0.0) out.push_back({mid - half * x[i], half * w[i]});
        }
    }
    return out;
}

MatrixXc integrate_ode(const std::function<MatrixXc(double, const MatrixXc&)>& f, MatrixXc y, double t0,
                       double t1, double tol, OdeStats* stats) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
    OdeStats st;
    const double span = t1 - t0;
    if (span == 0.0) return y;
    const double dir = span > 0 ? 1.0 : -1.0;
    double t = t0;
    double h = dir * std::min(std::abs(span), 0.01);
    MatrixXc k1 = f(t, y);
    while (dir * (t1 - t) > 0.0) {
        if (dir * (t + h - t1) > 0.0) h = t1 - t;
        const MatrixXc k2 = f(t + c2 * h, y + h * (a21 * k1));
        const MatrixXc k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const MatrixXc k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const MatrixXc k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const MatrixXc k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const MatrixXc ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const MatrixXc k7 = f(t + h, ynew);
        const MatrixXc err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double scale = tol * (1.0 + std::max(max_entry(y), max_entry(ynew)));
        const double en = max_entry(err) / scale;
        if (en <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;
            ++st.accepted;
        } else {
            ++st.rejected;
        }
        const double fac = en == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2)));
        h *= fac;
        if (std::abs(h) < 1e-14 * std::abs(span)) throw Error(ErrorCode::NanDetected, "ODE step size underflow");
    }
    if (stats) *stats = st;
    return y;
}

FlowEvaluator::FlowEvaluator(MatrixXc generator) : p_(std::move(generator)) {
    const double scale = 1.0 + max_entry(p_);
    hermitian_ = max_entry(p_ - p_.adjoint()) <= 1e-14 * scale;
    if (hermitian_) {
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (p_ + p_.adjoint()));
        vecs_ = es.eigenvectors();
        vals_ = es.eigenvalues();
    }
}

MatrixXc FlowEvaluator::at(double tau) const {
    if (tau == 0.0) return MatrixXc::Identity(p_.rows(), p_.cols());
    if (!hermitian_) return expm(kI * tau * p_);
    VectorXc ph(vals_.size());
    for (Eigen::Index i = 0; i < vals_.size(); ++i) ph(i) = std::exp(kI * (tau * vals_(i)));
    return vecs_ * ph.asDiagonal() * vecs_.adjoint();
}

MatrixXc self_adjoint_part(const MatrixXc& m) { return 0.5 * (m + m.adjoint()); }

OperatorMatrix generator_matrix(const Symbol& p, const Cutoff& c, bool self_adjointify, double* dropped) {
    OperatorMatrix m = materialize(p, c);
    if (self_adjointify) {
        if (dropped) *dropped = spectral_norm(0.5 * (m.entries - m.entries.adjoint()));
        m.entries = self_adjoint_part(m.entries);
    } else if (dropped) {
        *dropped = 0.0;
    }
    return m;
}

namespace {

double largest_singular_value(const MatrixXc& m) {
    // power iteration on m^dagger m; enough for the stability guard
    VectorXc v = VectorXc::Ones(m.cols()) / std::sqrt(static_cast<double>(m.cols()));
    double sigma = 0.0;
    for (int it = 0; it < 60; ++it) {
        VectorXc w = m.adjoint() * (m * v);
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        const double next = std::sqrt(nw);
        v = w / nw;
        if (std::abs(next - sigma) <= 1e-12 * next) {
            sigma = next;
            break;
        }
        sigma = next;
    }
    return sigma;
}

}  // namespace

FlowOperator flow_build_matrix(const OperatorMatrix& generator, double tau, const FlowOptions& opt) {
    const Grid& g = generator.grid;
    FlowMethod method = opt.method;
    if (method == FlowMethod::Auto) method = g.n() <= 512 ? FlowMethod::MatrixExponential : FlowMethod::OdeIntegration;
    MatrixXc e;
    if (method == FlowMethod::MatrixExponential) {
        e = expm(kI * tau * generator.entries);
    } else {
        const MatrixXc ip = kI * generator.entries;
        e = integrate_ode([&ip](double, const MatrixXc& y) { return MatrixXc(ip * y); },
                          MatrixXc::Identity(g.n(), g.n()), 0.0, tau, opt.ode_tolerance);
    }
    const double im_norm = spectral_norm((generator.entries - generator.entries.adjoint()) / (2.0 * kI));
    const double bound = 2.0 * std::exp(opt.stability_constant * std::abs(tau) * im_norm);
    const double actual = largest_singular_value(e);
    if (!std::isfinite(actual) || actual > bound) {
        std::ostringstream os;
        os << "||exp(i tau T_p)|| = " << actual << " exceeds " << bound;
        throw Error(ErrorCode::GeneratorUnstable, os.str());
    }
    FlowOperator f{generator, tau, OperatorMatrix(g, e), method, 0.0, im_norm};
    return f;
}

FlowOperator flow_build(const Symbol& p, const Cutoff& c, double tau, const FlowOptions& opt) {
    double dropped = 0.0;
    OperatorMatrix gen = generator_matrix(p, c, opt.self_adjointify, &dropped);
    FlowOperator f = flow_build_matrix(gen, tau, opt);
    f.dropped_norm = dropped;
    return f;
}

OperatorMatrix conjugate(const Symbol& p, const Symbol& b, const Cutoff& c, double tau, const FlowOptions& opt) {
    const OperatorMatrix gen = generator_matrix(p, c, opt.self_adjointify);
    const OperatorMatrix tb = materialize(b, c);
    FlowEvaluator ev(gen.entries);
    return OperatorMatrix(p.grid(), ev.at(tau) * tb.entries * ev.at(-tau));
}

OperatorMatrix commutator_factor(const Symbol& p, const Symbol& b, const Cutoff& c, double tau,
                                 const FlowOptions& opt) {
    const OperatorMatrix tb = materialize(b, c);
    return tb - conjugate(p, b, c, -tau, opt);
}

OperatorMatrix commutator_integral(const Symbol& p, const Symbol& b, const Cutoff& c, double tau,
                                   const FlowOptions& opt, int panels) {
    const OperatorMatrix gen = generator_matrix(p, c, opt.self_adjointify);
    const MatrixXc tb = materialize(b, c).entries;
    const MatrixXc ip = kI * gen.entries;
    const MatrixXc bracket = ip * tb - tb * ip;
    FlowEvaluator ev(gen.entries);
    MatrixXc acc = MatrixXc::Zero(tb.rows(), tb.cols());
    for (const auto& q : gauss_legendre16(0.0, tau, panels)) acc += q.w * (ev.at(-q.x) * bracket * ev.at(q.x));
    return OperatorMatrix(p.grid(), acc);
}

double bch_truncation(const Symbol& p, const Symbol& b, const Cutoff& c, double tau, int K, const FlowOptions& opt) {
    if (K < 0 || K > 4) throw Error(ErrorCode::InvalidValue, "bch_truncation needs 0 <= K <= 4");
    const Grid& g = p.grid();
    const OperatorMatrix gen = generator_matrix(p, c, opt.self_adjointify);
    const MatrixXc ip = kI * gen.entries;
    const MatrixXc tb = materialize(b, c).entries;
    FlowEvaluator ev(gen.entries);
    const MatrixXc conj = ev.at(tau) * tb * ev.at(-tau);
    MatrixXc term = tb, series = tb;
    double fact = 1.0;
    for (int k = 1; k <= K; ++k) {
        term = ip * term - term * ip;
        fact *= k;
        series += (std::pow(tau, k) / fact) * term;
    }
    return band_operator_norm(OperatorMatrix(g, conj - series), g.n() / 4);
}

ComposeCheck flow_compose_check(const Symbol& p, const Symbol& p2, const Cutoff& c, double tau,
                                const FlowOptions& opt, double ode_tol) {
    const Grid& g = p.grid();
    const MatrixXc P = generator_matrix(p, c, opt.self_adjointify).entries;
    const MatrixXc P2 = generator_matrix(p2, c, opt.self_adjointify).entries;
    FlowEvaluator e1(P), e2(P2);
    ComposeCheck out;

    const MatrixXc product = e1.at(tau) * e2.at(tau);
    // d/ds H = i (P + F(s) P2 F(-s)) H
    auto rhs = [&](double s, const MatrixXc& h) {
        const MatrixXc gen = P + e1.at(s) * P2 * e1.at(-s);
        return MatrixXc(kI * (gen * h));
    };
    const MatrixXc h = integrate_ode(rhs, MatrixXc::Identity(g.n(), g.n()), 0.0, tau, ode_tol);
    out.composition = max_entry(h - product);

    // exp(i tau P) - exp(i tau P2) = int_0^tau exp(i(tau-r)P) i(P - P2) exp(i r P2) dr
    MatrixXc acc = MatrixXc::Zero(g.n(), g.n());
    const MatrixXc diff = kI * (P - P2);
    for (const auto& q : gauss_legendre16(0.0, tau, 2)) acc += q.w * (e1.at(tau - q.x) * diff * e2.at(q.x));
    out.difference = max_entry(e1.at(tau) - e2.at(tau) - acc);
    return out;
}

double flow_symbol_identity(const Symbol& p, const Cutoff& c, double tau, int band, int panels) {
    const Grid& g = p.grid();
    const MatrixXc P = materialize(p, c).entries;
    FlowEvaluator ev(P);
    const MatrixXc t1 = materialize(Symbol::multiplier(g, [](int) { return cplx(1.0); }, 0.0), c).entries;
    auto exp_symbol = [&](double s) { return p.map_pointwise([s](cplx z) { return std::exp(kI * s * z); }); };
    const MatrixXc lhs = ev.at(tau) * t1 - materialize(exp_symbol(tau), c).entries;
    MatrixXc acc = MatrixXc::Zero(g.n(), g.n());
    const MatrixXc iP = kI * P;
    for (const auto& q : gauss_legendre16(0.0, tau, panels)) {
        const Symbol es = exp_symbol(q.x);
        const Symbol ipes = p.times(es) * kI;
        const MatrixXc inner = iP * materialize(es, c).entries - materialize(ipes, c).entries;
        acc += q.w * (ev.at(tau - q.x) * inner);
    }
    const MatrixXc d = lhs - acc;
    double worst = 0.0;
    for (int xi = -band; xi <= band; ++xi) {
        if (std::abs(xi) <= c.little_b + 1.0) continue;
        worst = std::max(worst, d.col(g.index(xi)).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace pbrg
