#include "pbrg/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace pbrg {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFiniteMultiplier: return "NonFiniteMultiplier";
        case ErrorCode::DomainTooSmall: return "DomainTooSmall";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::DegenerateProbe: return "DegenerateProbe";
        case ErrorCode::GeneratorUnstable: return "GeneratorUnstable";
        case ErrorCode::SmallDivisor: return "SmallDivisor";
        case ErrorCode::NeumannDivergence: return "NeumannDivergence";
        case ErrorCode::SeriesStalled: return "SeriesStalled";
        case ErrorCode::NewtonDiverged: return "NewtonDiverged";
        case ErrorCode::SmallnessViolated: return "SmallnessViolated";
        case ErrorCode::TamenessViolated: return "TamenessViolated";
        case ErrorCode::NanDetected: return "NanDetected";
        case ErrorCode::SpectrumOverflow: return "SpectrumOverflow";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::TypeError: return "TypeError";
        case ErrorCode::MissingRequired: return "MissingRequired";
        case ErrorCode::DuplicateKey: return "DuplicateKey";
        case ErrorCode::InvalidValue: return "InvalidValue";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::TruncatedPayload: return "TruncatedPayload";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Grid::Grid(int n_points) : n_(n_points) {
    if (n_points < 8 || n_points % 2 != 0) {
        std::ostringstream os;
        os << "n_points must be even and >= 8, got " << n_points;
        throw Error(ErrorCode::InvalidValue, os.str());
    }
}

int Grid::lp_top() const {
    int k = 0;
    while ((1 << k) < n_ / 2) ++k;
    return k;
}

int Grid::dealias_band() const {
    int k = n_ / 3;
    if (3 * k >= n_) --k;
    return k;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (a != b) {
        std::ostringstream os;
        os << where << ": grids differ (" << a.n() << " vs " << b.n() << ")";
        throw Error(ErrorCode::GridMismatch, os.str());
    }
}

namespace {

// Plans are created once per (size, direction) and executed through the new-array
// interface, which is safe to call concurrently.
struct PlanCache {
    std::mutex mu;
    std::map<std::pair<int, int>, fftw_plan> plans;

    fftw_plan get(int n, int sign) {
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_pair(n, sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;
        auto* in = fftw_alloc_complex(n);
        auto* out = fftw_alloc_complex(n);
        fftw_plan p = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        plans.emplace(key, p);
        return p;
    }
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

void run_plan(int n, int sign, const cplx* in, cplx* out) {
    fftw_plan p = plan_cache().get(n, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

VectorXc fft_forward(const VectorXc& values) {
    const int n = static_cast<int>(values.size());
    VectorXc tmp(n);
    run_plan(n, FFTW_FORWARD, values.data(), tmp.data());
    VectorXc out(n);
    const double inv = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        int xi = i - n / 2;
        int k = ((xi % n) + n) % n;
        out(i) = tmp(k) * inv;
    }
    return out;
}

VectorXc fft_inverse(const VectorXc& spectrum) {
    const int n = static_cast<int>(spectrum.size());
    VectorXc std_order(n);
    for (int i = 0; i < n; ++i) {
        int xi = i - n / 2;
        int k = ((xi % n) + n) % n;
        std_order(k) = spectrum(i);
    }
    VectorXc out(n);
    run_plan(n, FFTW_BACKWARD, std_order.data(), out.data());
    return out;
}

// ---------------------------------------------------------------- Field

Field::Field(const Grid& g, VectorXc spectrum, bool is_real)
    : grid_(g), c_(std::move(spectrum)), is_real_(false) {
    if (c_.size() != g.n()) throw Error(ErrorCode::GridMismatch, "spectrum length differs from grid");
    set_real(is_real);
}

void Field::set_real(bool r) {
    is_real_ = r;
    if (!r) return;
    c_(0) = 0.0;  // Nyquist
    for (int xi = 0; xi <= grid_.band(); ++xi) {
        cplx a = c_(grid_.index(xi));
        cplx b = c_(grid_.index(-xi));
        cplx m = 0.5 * (a + std::conj(b));
        c_(grid_.index(xi)) = m;
        c_(grid_.index(-xi)) = std::conj(m);
    }
}

Field Field::zero(const Grid& g, bool is_real) { return Field(g, VectorXc::Zero(g.n()), is_real); }

Field Field::from_real_values(const Grid& g, const Eigen::VectorXd& values) {
    if (values.size() != g.n()) throw Error(ErrorCode::GridMismatch, "value count differs from grid");
    return Field(g, fft_forward(values.cast<cplx>()), true);
}

Field Field::from_values(const Grid& g, const VectorXc& values) {
    if (values.size() != g.n()) throw Error(ErrorCode::GridMismatch, "value count differs from grid");
    return Field(g, fft_forward(values), false);
}

Field Field::from_function(const Grid& g, const std::function<double(double)>& f) {
    Eigen::VectorXd v(g.n());
    for (int j = 0; j < g.n(); ++j) v(j) = f(g.node(j));
    return from_real_values(g, v);
}

Field Field::mode(const Grid& g, int xi, cplx amplitude) {
    VectorXc c = VectorXc::Zero(g.n());
    c(g.index(xi)) = amplitude;
    return Field(g, c, false);
}

VectorXc Field::values() const { return fft_inverse(c_); }

Eigen::VectorXd Field::real_values() const { return values().real(); }

Field Field::operator+(const Field& o) const {
    require_same_grid(grid_, o.grid_, "Field::operator+");
    return Field(grid_, c_ + o.c_, is_real_ && o.is_real_);
}

Field Field::operator-(const Field& o) const {
    require_same_grid(grid_, o.grid_, "Field::operator-");
    return Field(grid_, c_ - o.c_, is_real_ && o.is_real_);
}

Field Field::operator*(cplx s) const {
    return Field(grid_, c_ * s, is_real_ && s.imag() == 0.0);
}

Field Field::scaled(double s) const { return Field(grid_, c_ * s, is_real_); }

double Field::max_coef_diff(const Field& o) const {
    require_same_grid(grid_, o.grid_, "Field::max_coef_diff");
    return (c_ - o.c_).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------- LP blocks

double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double lp_low(double xi) { return 1.0 - smoothstep5(std::abs(xi) - 1.0); }

double lp_weight(int k, double xi) {
    if (k == 0) return lp_low(xi);
    return lp_low(std::ldexp(xi, -k)) - lp_low(std::ldexp(xi, -(k - 1)));
}

Field LpBlocks::sum() const {
    Field s = blocks.front();
    for (size_t k = 1; k < blocks.size(); ++k) s = s + blocks[k];
    return s;
}

LpBlocks lp_decompose(const Field& u) {
    LpBlocks out;
    const int top = u.grid().lp_top();
    for (int k = 0; k <= top; ++k) out.blocks.push_back(multiplier_apply(u, mult::lp_block(k)));
    return out;
}

// ---------------------------------------------------------------- multipliers

Field multiplier_apply(const Field& u, const Multiplier& m) {
    const Grid& g = u.grid();
    VectorXc c = u.spectrum();
    std::vector<cplx> mv(g.n());
    for (int i = 0; i < g.n(); ++i) {
        const int xi = g.freq(i);
        cplx mval = m(xi);
        if (c(i) != 0.0 && !(std::isfinite(mval.real()) && std::isfinite(mval.imag()))) {
            std::ostringstream os;
            os << "multiplier is not finite at xi = " << xi;
            throw Error(ErrorCode::NonFiniteMultiplier, os.str());
        }
        mv[i] = mval;
        c(i) = (c(i) == 0.0) ? cplx(0.0) : c(i) * mval;
    }
    bool hermitian = u.is_real();
    if (hermitian) {
        for (int xi = 0; xi <= g.band() && hermitian; ++xi) {
            cplx a = mv[g.index(xi)], b = mv[g.index(-xi)];
            if (std::abs(a - std::conj(b)) > 1e-13 * (1.0 + std::abs(a))) hermitian = false;
        }
    }
    return Field(g, c, hermitian);
}

double japanese_bracket(double xi) { return std::sqrt(1.0 + xi * xi); }

double dispersion_relation(double alpha, double xi) {
    if (xi == 0.0) return 0.0;
    return xi * std::pow(std::abs(xi), alpha - 1.0);
}

namespace mult {
Multiplier identity() {
    return [](int) { return cplx(1.0); };
}
Multiplier dx() {
    return [](int xi) { return cplx(0.0, xi); };
}
Multiplier abs_pow(double beta) {
    return [beta](int xi) {
        if (xi == 0) return cplx(beta == 0.0 ? 1.0 : 0.0);
        return cplx(std::pow(std::abs(static_cast<double>(xi)), beta));
    };
}
Multiplier dispersion(double alpha) {
    return [alpha](int xi) { return cplx(0.0, dispersion_relation(alpha, xi)); };
}
Multiplier dx_abs_pow(double beta) {
    return [beta](int xi) {
        if (xi == 0) return cplx(0.0);
        return cplx(0.0, xi * std::pow(std::abs(static_cast<double>(xi)), beta));
    };
}
Multiplier inv_dx() {
    return [](int xi) {
        if (xi == 0) return cplx(0.0);
        return cplx(0.0, -1.0 / xi);
    };
}
Multiplier japanese(double s) {
    return [s](int xi) { return cplx(std::pow(japanese_bracket(xi), s)); };
}
Multiplier lp_block(int k) {
    return [k](int xi) { return cplx(lp_weight(k, xi)); };
}
Multiplier free_propagator(double alpha, double t) {
    return [alpha, t](int xi) {
        double ph = -t * dispersion_relation(alpha, xi);
        return cplx(std::cos(ph), std::sin(ph));
    };
}
}  // namespace mult

// ---------------------------------------------------------------- norms

double norm_hs(const Field& u, double s) {
    const Grid& g = u.grid();
    double acc = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const double w = std::pow(japanese_bracket(g.freq(i)), 2.0 * s);
        acc += w * std::norm(u.spectrum()(i));
    }
    return std::sqrt(kTwoPi * acc);
}

double norm_hdot(const Field& u, double s) {
    const Grid& g = u.grid();
    double acc = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const int xi = g.freq(i);
        if (xi == 0) continue;
        acc += std::pow(std::abs(static_cast<double>(xi)), 2.0 * s) * std::norm(u.spectrum()(i));
    }
    return std::sqrt(kTwoPi * acc);
}

double norm_linf_spectrum(const VectorXc& spectrum) {
    return fft_inverse(spectrum).cwiseAbs().maxCoeff();
}

double norm_linf(const Field& u) { return norm_linf_spectrum(u.spectrum()); }

double norm_wk_inf(const Field& u, int k) {
    double acc = 0.0;
    Field d = u;
    for (int j = 0; j <= k; ++j) {
        acc += norm_linf(d);
        if (j < k) d = multiplier_apply(d, mult::dx());
    }
    return acc;
}

double norm_zygmund_spectrum(const Grid& g, const VectorXc& spectrum, double s) {
    double best = 0.0;
    for (int k = 0; k <= g.lp_top(); ++k) {
        VectorXc b(g.n());
        bool any = false;
        for (int i = 0; i < g.n(); ++i) {
            double w = lp_weight(k, g.freq(i));
            b(i) = spectrum(i) * w;
            any = any || (w != 0.0 && spectrum(i) != 0.0);
        }
        if (!any) continue;
        best = std::max(best, std::pow(2.0, k * s) * norm_linf_spectrum(b));
    }
    return best;
}

double norm_zygmund(const Field& u, double s) { return norm_zygmund_spectrum(u.grid(), u.spectrum(), s); }

double norm(const Field& u, const NormKind& kind) {
    switch (kind.kind) {
        case NormKind::Kind::Hs: return norm_hs(u, kind.s);
        case NormKind::Kind::Zygmund: return norm_zygmund(u, kind.s);
        case NormKind::Kind::Linf: return norm_linf(u);
        case NormKind::Kind::WkInf: return norm_wk_inf(u, kind.k);
    }
    return 0.0;
}

Field truncate_band(const Field& u, int band) {
    VectorXc c = u.spectrum();
    const Grid& g = u.grid();
    for (int i = 0; i < g.n(); ++i)
        if (std::abs(g.freq(i)) > band) c(i) = 0.0;
    return Field(g, c, u.is_real());
}

Field dealiased_product(const Field& a, const Field& b) {
    require_same_grid(a.grid(), b.grid(), "dealiased_product");
    const Grid& g = a.grid();
    const int k = g.dealias_band();
    VectorXc va = truncate_band(a, k).values();
    VectorXc vb = truncate_band(b, k).values();
    VectorXc prod = va.cwiseProduct(vb);
    Field out(g, fft_forward(prod), a.is_real() && b.is_real());
    return truncate_band(out, k);
}

}  // namespace pbrg
