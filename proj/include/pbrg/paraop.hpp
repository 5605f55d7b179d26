#pragma once

// Paradifferential operators T_a as dense matrices over the symmetric band, the
// symbolic calculus, and the wave-packet order probe.

#include "pbrg/symbols.hpp"

namespace pbrg {

struct OperatorMatrix {
    Grid grid;
    MatrixXc entries;  // (output xi', input xi), increasing-frequency indices

    OperatorMatrix(const Grid& g, MatrixXc m);
    static OperatorMatrix zero(const Grid& g);
    static OperatorMatrix identity(const Grid& g);
    static OperatorMatrix multiplier(const Grid& g, const Multiplier& m);

    Field apply(const Field& u) const;
    OperatorMatrix operator*(const OperatorMatrix& o) const;
    OperatorMatrix operator+(const OperatorMatrix& o) const;
    OperatorMatrix operator-(const OperatorMatrix& o) const;
    OperatorMatrix adjoint() const;
    double max_abs() const { return entries.cwiseAbs().maxCoeff(); }
};

struct OrderEstimate {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
    int k_low = 0;
    int k_high = 0;
    std::vector<int> probes;
    std::vector<double> responses;
    int usable = 0;  // probes above the floor that entered the fit
};

// psi(xi' - xi, xi) on in-band pairs, zero elsewhere
Eigen::MatrixXd support_weights(const Grid& g, const Cutoff& c);

OperatorMatrix materialize(const Symbol& a, const Cutoff& c);
Field apply(const Symbol& a, const Cutoff& c, const Field& u);
// Paraproduct T_a u for a = a(x), computed block-wise with FFT convolutions plus an
// explicit sum over the cutoff transition layer.
Field paraproduct(const Field& a, const Field& u, const Cutoff& c);

Symbol compose_sharp(const Symbol& a, const Symbol& b, double rho);
Symbol adjoint_star(const Symbol& a, double rho);

OrderEstimate order_probe(const OperatorMatrix& A);
OrderEstimate order_probe(const OperatorMatrix& A, const std::vector<int>& centers);
// Probes with response below floor are left out of the fit.
OrderEstimate order_probe(const OperatorMatrix& A, const std::vector<int>& centers, double floor);
std::vector<int> default_probe_centers(const Grid& g);
VectorXc wave_packet(const Grid& g, int center, double width = 4.0);

Field bony_remainder(const Field& a, const Field& b, const Cutoff& c = Cutoff());

// Inverse of materialization: divides by psi where psi > threshold; the remaining
// entries are reported as the max-entry of what could not be represented.
struct ExtractedSymbol {
    Symbol symbol;
    double unrepresented = 0.0;
};
ExtractedSymbol extract_symbol(const OperatorMatrix& A, const Cutoff& c, double order_m, double rho,
                               double threshold = 1e-3);

double spectral_norm(const MatrixXc& m);
// ||A||_{H^{s+m} -> H^s}
double sobolev_operator_norm(const OperatorMatrix& A, double s, double m);
// ||A||_{L^2 -> L^2} restricted to inputs with |xi| <= band
double band_operator_norm(const OperatorMatrix& A, int band);

}  // namespace pbrg
