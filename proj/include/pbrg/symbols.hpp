#pragma once

// Symbols a(x, xi) held as x-Fourier coefficients a_hat(eta, xi), admissible cutoffs
// psi^{B,b}, and the seminorms M^m_rho(a; n).

#include <cstdint>
#include <map>
#include <utility>

#include "pbrg/spectral.hpp"

namespace pbrg {

struct Cutoff {
    double big_b = 8.0;
    double little_b = 2.0;

    Cutoff() = default;
    Cutoff(double B, double b);

    double operator()(double eta, double xi) const;
};

double cutoff_eval(const Cutoff& c, double eta, double xi);

class Symbol {
public:
    Symbol(const Grid& g, MatrixXc coeffs, double order_m, double rho);

    static Symbol zero(const Grid& g, double order_m = 0.0, double rho = 0.0);
    // values(j, col) = a(x_j, xi) with col the increasing-frequency index of xi
    static Symbol from_tabulation(const Grid& g, const MatrixXc& values, double order_m, double rho);
    static Symbol from_function(const Grid& g, const std::function<cplx(double, int)>& f, double order_m,
                                double rho);
    static Symbol multiplier(const Grid& g, const std::function<cplx(int)>& m, double order_m);
    // a(x, xi) = u(x) * g(xi)
    static Symbol separable(const Field& u, const std::function<cplx(int)>& g, double order_m, double rho);
    static Symbol paraproduct(const Field& u, double rho);

    const Grid& grid() const { return grid_; }
    const MatrixXc& coeffs() const { return c_; }
    MatrixXc& coeffs() { return c_; }
    double order_m() const { return m_; }
    double rho() const { return rho_; }
    void set_order(double m) { m_ = m; }
    void set_rho(double r) { rho_ = r; }

    cplx coef(int eta, int xi) const { return c_(grid_.index(eta), grid_.index(xi)); }
    cplx& coef(int eta, int xi) { return c_(grid_.index(eta), grid_.index(xi)); }

    MatrixXc tabulate() const;
    // column xi as a field in x
    Field column(int xi) const;

    Symbol operator+(const Symbol& o) const;
    Symbol operator-(const Symbol& o) const;
    Symbol operator*(cplx s) const;
    // pointwise product in x for every xi (grid product of the tabulations)
    Symbol times(const Symbol& o) const;
    Symbol map_pointwise(const std::function<cplx(cplx)>& f) const;
    Symbol dx(int k = 1) const;
    // forward difference in xi, j times; the top column falls back to a backward difference
    Symbol dxi(int j = 1) const;
    Symbol conj() const;

    bool x_independent(double tol = 0.0) const;
    double max_abs() const { return c_.cwiseAbs().maxCoeff(); }

private:
    Grid grid_;
    MatrixXc c_;
    double m_;
    double rho_;
};

Symbol regularize(const Symbol& a, const Cutoff& c);

struct SeminormReport {
    std::map<std::pair<int, int>, double> values;  // (k, n) -> value
    double at(int k, int n) const { return values.at({k, n}); }
};

// x-regularity norm used inside the seminorm: W^{r,inf} for integer r, Zygmund C^r_* otherwise.
double x_norm(const Grid& g, const VectorXc& column_spectrum, double r);

double seminorm(const Symbol& a, double m, double rho, int n, int k);
SeminormReport seminorm_report(const Symbol& a, double m, double rho, int n_max, int k_max);

// Seeded random symbol supported where psi > 0 with 1 <= |eta| <= eta_max, coefficients
// decaying like |eta|^-2, scaled so that M^order_0(a; 0) = 1.
Symbol random_symbol(const Grid& g, double order, const Cutoff& c, std::uint64_t seed, int eta_max = 4);

}  // namespace pbrg
