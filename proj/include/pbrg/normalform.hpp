#pragma once

// Resonance function, bilinear Fourier multipliers and the quadratic normal form
// w = v + Pi_{chi1}(u, D^{1-alpha} v).

#include "pbrg/symbols.hpp"

namespace pbrg {

// (x1+x2)|x1+x2|^{alpha-1} - x1|x1|^{alpha-1} - x2|x2|^{alpha-1}
double resonance(double alpha, double xi1, double xi2);

// ratio |Omega| / (|xi_min| |xi_max|^{alpha-1}) over 1 <= |xi_i| <= n/4, xi1 + xi2 != 0,
// with xi3 = -(xi1 + xi2) taking part in min and max
std::pair<double, double> resonance_bracket(double alpha, int n);

struct Multiplier2 {
    Grid grid;
    MatrixXc values;  // (xi1, xi2) in increasing-frequency indices

    static Multiplier2 constant(const Grid& g, cplx v);
    cplx at(int xi1, int xi2) const { return values(grid.index(xi1), grid.index(xi2)); }
};

// sum over xi1 + xi2 = xi of chi(xi1, xi2) f1(xi1) f2(xi2), outputs kept in the band
Field multilinear_apply(const Multiplier2& chi, const Field& f1, const Field& f2);

// Energy normal form for the paralinear equation: with xi = xi1 + xi2 and r = <xi>^s/<xi2>^s,
//   b(xi1, xi2) = [xi2 psi(xi1, xi2) r - xi psi(xi1, xi) / r] / (2 Omega(xi1, xi2)),
// so that w = v + Pi_b(u, v) has no cubic terms in d/dt |w|^2.  chi1 = b |xi2|^{alpha-1}.
struct NormalFormTables {
    Multiplier2 chi;
    Multiplier2 chi1;
};
const NormalFormTables& build_chi1(const Grid& g, double s, double alpha, const Cutoff& c);

// The two-factor product formula as printed, for comparison against build_chi1.
Multiplier2 printed_chi(const Grid& g, double s, double alpha, const Cutoff& c);

struct MarcinkiewiczReport {
    double sup = 0.0;       // sup |chi|
    double d_xi1 = 0.0;     // sup |Delta_1 chi| |xi1|
    double d_xi2 = 0.0;     // sup |Delta_2 chi| |xi2|
    double far_sup = 0.0;   // sup |chi| over |xi2| >= 4 |xi1|
};
MarcinkiewiczReport marcinkiewicz(const Multiplier2& chi);

Field normal_form(const Field& u, const Field& v, double s, double alpha, const Cutoff& c);

}  // namespace pbrg
