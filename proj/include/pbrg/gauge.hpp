#pragma once

// Implicit symbol constructions: the commutator equation [T_p, D_alpha] = T_a, its
// time-dependent and exponential variants, and the conjugating gauge along a trajectory.
//
// Matrix conventions: D_alpha is the multiplier i xi |xi|^{alpha-1} and
//   L(P) = P D_alpha - D_alpha P,   L(P)(xi', xi) = i (d(xi) - d(xi')) P(xi', xi)
// with d(xi) = xi |xi|^{alpha-1}.  L kills the diagonal, so the eta = 0 row of a symbol
// (a Fourier multiplier) is the kernel and is reported rather than solved for.

#include "pbrg/flow.hpp"

namespace pbrg {

enum class GaugeRoute { ExplicitFormula, NeumannSeries, Newton };
const char* route_name(GaugeRoute r);

struct GaugeSolution {
    Symbol p;
    OperatorMatrix matrix;          // T_p
    GaugeRoute route = GaugeRoute::ExplicitFormula;
    double residual_norm = 0.0;     // max-entry of the defining equation on the support, eta != 0
    double off_support_norm = 0.0;  // max-entry of the left-hand side off the support
    double kernel_norm = 0.0;       // max-entry of the eta = 0 part of the data
    int iterations = 0;
    SeminormReport seminorm_report;
};

// d(xi) - d(xi + eta)
double commutator_denominator(double alpha, int xi, int eta);
MatrixXc dispersion_commutator(const MatrixXc& p, const Grid& g, double alpha);
// support of T_a off the diagonal: psi(xi' - xi, xi) > 0, xi' != xi, both in band
Eigen::MatrixXd offdiag_support(const Grid& g, const Cutoff& c);
double masked_max(const MatrixXc& m, const Eigen::MatrixXd& mask);
double unmasked_max(const MatrixXc& m, const Eigen::MatrixXd& mask);

// Entry-wise inverse of L on every off-diagonal entry where a is nonzero.
MatrixXc solve_commutator_matrix(const MatrixXc& a, const Grid& g, double alpha, double* kernel_norm = nullptr);

GaugeSolution solve_commutator(const Symbol& a, double alpha, const Cutoff& c,
                               GaugeRoute route = GaugeRoute::ExplicitFormula);

// (|xi|^{1-alpha}/alpha) d_x^{-1} applied to psi a
Symbol cole_hopf_parametrix(const Symbol& a, double alpha, const Cutoff& c);
// psi a - L(-parametrix(a)) : the Neumann remainder
Symbol commutator_remainder(const Symbol& a, double alpha, const Cutoff& c);

struct CommutatorBounds {
    double lhs = 0.0;     // M^{beta+1-alpha}_0(d_x p; 0)
    double rhs = 0.0;     // M^beta_0(a; 0) / (B[1-(1-1/B)^alpha])
    double lhs_xi = 0.0;  // M^{beta-alpha}_0(d_xi d_x p; 0)
    double rhs_xi = 0.0;
    bool holds() const { return lhs <= rhs && lhs_xi <= rhs_xi; }
};
CommutatorBounds commutator_bounds(const Symbol& p, const Symbol& a, double alpha, double beta, const Cutoff& c);

// min and max over on-support entries of |d(xi) - d(xi+eta)| / (|eta| max(|xi|,|xi+eta|)^{alpha-1})
std::pair<double, double> denominator_bracket(const Grid& g, double alpha, const Cutoff& c);

// Rank deficiency of L restricted to the support (including the diagonal), and the number
// of diagonal support entries it should equal.
struct KernelReport {
    int support_entries = 0;
    int rank = 0;
    int nullity = 0;
    int diagonal_entries = 0;
};
KernelReport commutator_kernel(const Grid& g, double alpha, const Cutoff& c);

// Fourth-order centred differences inside, one-sided second order at the two ends.
std::vector<MatrixXc> time_derivative(const std::vector<MatrixXc>& f, double dt);

struct TimeGaugeOptions {
    int j_max = 8;
    double tol = 1e-8;
    bool integrate_kernel = true;  // eta = 0 entries: -d_t p = a by the trapezoid rule
};

struct TimeGaugeResult {
    std::vector<MatrixXc> p;                // sum_j p_j per sample
    std::vector<double> increment_norms;    // max over samples of |p_j|, j = 0..J
    std::vector<double> residual_by_j;      // support residual of L(p) - d_t p = a after term j
    double residual_norm = 0.0;
    double kernel_residual = 0.0;
    double growth_ratio = 0.0;              // max_j |p_{j+1}| / |p_j|
    double k_hat = 0.0;                     // alpha * growth_ratio
    bool k_flag = false;                    // k_hat >= alpha
    int terms = 0;
};

// L(p) - d_t p = a on the off-diagonal support with p = sum_j p_j, L(p_{j+1}) = d_t p_j.
TimeGaugeResult solve_time_dependent(const std::vector<MatrixXc>& a, double dt, const Grid& g, double alpha,
                                     const Cutoff& c, const TimeGaugeOptions& opt = {});
std::vector<GaugeSolution> solve_time_dependent(const std::vector<Symbol>& a, double dt, double alpha,
                                                const Cutoff& c, const TimeGaugeOptions& opt = {});

struct NonlinearOptions {
    double epsilon = 0.05;
    double tol = 1e-9;
    int max_iter = 25;
};

// [expm(i T_p), D_alpha] = T_a on the support, by chord Newton with the exact inverse of
// the linearisation i L at p = 0.
GaugeSolution solve_nonlinear_exp(const Symbol& a, double alpha, const Cutoff& c, const NonlinearOptions& opt = {});
double nonlinear_bound_ratio(const GaugeSolution& s, const Symbol& a, double alpha);

struct ConjugatingOptions {
    int max_iter = 25;
    double tol = 1e-8;
    int j_max = 8;
};

struct ConjugatingGauge {
    std::vector<MatrixXc> p;         // T_p(t)
    std::vector<MatrixXc> e;         // psi (.) expm(i T_p(t))
    std::vector<MatrixXc> residual;  // E_t + [D, E] - E A(t), the residual operator on u
    std::vector<MatrixXc> a;         // A(t) = T_u d_x
    double support_residual = 0.0;
    double off_support_residual = 0.0;
    double growth_ratio = 0.0;
    double k_hat = 0.0;
    int iterations = 0;
};

// E_t + [D_alpha, E] - E T_u d_x = 0 on the support for E = psi (.) expm(i T_p).
ConjugatingGauge solve_conjugating(const std::vector<Field>& u, double dt, double alpha, const Cutoff& c,
                                   const ConjugatingOptions& opt = {});

// E restricted to |xi| > b, completed by the identity on the low modes
MatrixXc high_part_inverse(const MatrixXc& e, const Grid& g, const Cutoff& c);

}  // namespace pbrg
