#pragma once

// Discrete torus, Fourier transforms, Littlewood-Paley blocks, multipliers and norms.
//
// Conventions: x_j = 2*pi*j/N, u_hat(xi) = (1/N) sum_j u(x_j) exp(-i xi x_j),
// frequencies xi in {-N/2, ..., N/2-1}.  Spectral vectors are stored in increasing
// frequency order, so index i holds xi = i - N/2.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "pbrg/errors.hpp"

namespace pbrg {

using cplx = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

class Grid {
public:
    explicit Grid(int n_points);

    int n() const { return n_; }
    int kmin() const { return -n_ / 2; }
    int kmax() const { return n_ / 2 - 1; }
    // largest |xi| of the symmetric band (Nyquist excluded)
    int band() const { return n_ / 2 - 1; }
    int index(int xi) const { return xi + n_ / 2; }
    int freq(int i) const { return i - n_ / 2; }
    bool on_lattice(long xi) const { return xi >= kmin() && xi <= kmax(); }
    bool in_band(long xi) const { return xi >= -band() && xi <= band(); }
    double node(int j) const { return kTwoPi * j / n_; }
    double length() const { return kTwoPi; }
    // top Littlewood-Paley index K with 2^K >= N/2
    int lp_top() const;
    // 2/3-rule cutoff: largest K with 3K < N
    int dealias_band() const;

    bool operator==(const Grid& o) const { return n_ == o.n_; }
    bool operator!=(const Grid& o) const { return n_ != o.n_; }

private:
    int n_;
};

void require_same_grid(const Grid& a, const Grid& b, const char* where);

// Forward and inverse transforms between nodal values and increasing-order spectra.
VectorXc fft_forward(const VectorXc& values);
VectorXc fft_inverse(const VectorXc& spectrum);

class Field {
public:
    Field(const Grid& g, VectorXc spectrum, bool is_real);

    static Field zero(const Grid& g, bool is_real = true);
    static Field from_real_values(const Grid& g, const Eigen::VectorXd& values);
    static Field from_values(const Grid& g, const VectorXc& values);
    static Field from_function(const Grid& g, const std::function<double(double)>& f);
    static Field mode(const Grid& g, int xi, cplx amplitude = 1.0);

    const Grid& grid() const { return grid_; }
    const VectorXc& spectrum() const { return c_; }
    VectorXc& spectrum() { return c_; }
    bool is_real() const { return is_real_; }
    void set_real(bool r);

    cplx coef(int xi) const { return c_(grid_.index(xi)); }
    cplx& coef(int xi) { return c_(grid_.index(xi)); }

    VectorXc values() const;
    Eigen::VectorXd real_values() const;

    Field operator+(const Field& o) const;
    Field operator-(const Field& o) const;
    Field operator*(cplx s) const;
    Field scaled(double s) const;

    // max over frequencies of |c_a - c_b|
    double max_coef_diff(const Field& o) const;

private:
    Grid grid_;
    VectorXc c_;
    bool is_real_;
};

// Dyadic partition of unity with quintic smoothstep transition on [1,2].
double smoothstep5(double t);
double lp_low(double xi);                 // P_0(xi)
double lp_weight(int k, double xi);       // P_k(xi)

struct LpBlocks {
    std::vector<Field> blocks;
    Field sum() const;
};

LpBlocks lp_decompose(const Field& u);

using Multiplier = std::function<cplx(int)>;

Field multiplier_apply(const Field& u, const Multiplier& m);

namespace mult {
Multiplier identity();
Multiplier dx();                        // i xi
Multiplier abs_pow(double beta);        // |xi|^beta, 0 at xi = 0 for beta <= 0
Multiplier dispersion(double alpha);    // i xi |xi|^{alpha-1}
Multiplier dx_abs_pow(double beta);     // i xi |xi|^{beta}, 0 at xi = 0
Multiplier inv_dx();                    // 1/(i xi), 0 at xi = 0
Multiplier japanese(double s);          // <xi>^s
Multiplier lp_block(int k);
Multiplier free_propagator(double alpha, double t);  // exp(-i t xi |xi|^{alpha-1})
}  // namespace mult

double japanese_bracket(double xi);
double dispersion_relation(double alpha, double xi);  // xi |xi|^{alpha-1}

struct NormKind {
    enum class Kind { Hs, Zygmund, Linf, WkInf } kind;
    double s = 0.0;
    int k = 0;
    static NormKind hs(double s) { return {Kind::Hs, s, 0}; }
    static NormKind zygmund(double s) { return {Kind::Zygmund, s, 0}; }
    static NormKind linf() { return {Kind::Linf, 0.0, 0}; }
    static NormKind wk_inf(int k) { return {Kind::WkInf, 0.0, k}; }
};

double norm(const Field& u, const NormKind& kind);
double norm_hs(const Field& u, double s);
double norm_hdot(const Field& u, double s);
double norm_zygmund(const Field& u, double s);
double norm_linf(const Field& u);
double norm_wk_inf(const Field& u, int k);
// Zygmund norm of a nodal function given by its spectrum; used for symbol columns.
double norm_zygmund_spectrum(const Grid& g, const VectorXc& spectrum, double s);
double norm_linf_spectrum(const VectorXc& spectrum);

// Pointwise product with the 2/3 rule: inputs and output truncated to |xi| <= N/3.
Field dealiased_product(const Field& a, const Field& b);
Field truncate_band(const Field& u, int band);

}  // namespace pbrg
