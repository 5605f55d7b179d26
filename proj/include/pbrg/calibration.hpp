#pragma once

// Constants of estimates stated only up to an unspecified constant.  Each frozen value is
// the largest measurement on the calibration seeds times kSafety, rounded up; tools/calibrate
// reproduces the measurements and the tests check the estimates on disjoint seeds.

#include <cstdint>
#include <vector>

#include "pbrg/experiments.hpp"

namespace pbrg {

namespace calib {

inline constexpr double kSafety = 2.0;

inline constexpr std::uint64_t kCalibrationSeed = 1;
inline constexpr std::uint64_t kVerificationSeed = 1001;

inline constexpr double kCutoffDecay = 5.2e3;
inline constexpr double kZygmundSum = 2.0;
inline constexpr double kBony = 2.4;
inline constexpr double kOperatorNorm = 1.8;
inline constexpr double kFlowDifference = 1.2;
inline constexpr double kFlowZygmund = 2.3;
inline constexpr double kRemainder = 1.2;
inline constexpr double kNonlinear = 18.0;
inline constexpr double kMarcinkiewicz = 330.0;
inline constexpr double kNormalForm = 0.19;
inline constexpr double kHyperbolic = 2.5;
// also the exponent constant of the H^s growth bound
inline constexpr double kEnergyRatio = 0.15;

}  // namespace calib

// Resonance bracket: the ratio is 2 - 2^{2-alpha} at xi1 = xi2 and tends to alpha as
// xi_min / xi_max -> 0.
double resonance_lower(double alpha);
double resonance_upper(double alpha);

// Real field with independent Gaussian coefficients on k_min <= |xi| <= k_max.
Field random_band_limited(const Grid& g, int k_min, int k_max, std::uint64_t seed);

// sup over |eta| <= eta_max, j + k <= 2 of |D_xi^j D_eta^k psi| (1 + |xi|)^{j+k}
double measure_cutoff_decay(const Grid& g, const Cutoff& c, int eta_max);
// |sum_q u_q|_{C^r_*} (1 - 2^{-r}) / sup_q 2^{qr} |u_q|_inf over random dyadic blocks
double measure_zygmund_sum(const Grid& g, double r, std::uint64_t seed, int count);
// |ab - T_a b - T_b a|_{H^3.5} for |a|_{H^2} = |b|_{H^2} = 1
double measure_bony(const Grid& g, std::uint64_t seed, int count);
// |T_a|_{H^{s+m} -> H^s} for M^m_0(a) = 1 over s in {-1, 0, 2}, m in {-0.5, 0, 1}
double measure_operator_norm(const Grid& g, const Cutoff& c, std::uint64_t seed, int count);
// |exp(i tau T_p) - exp(i tau T_q)|_{H^delta -> L^2} / (tau M^delta_0(p - q))
double measure_flow_difference(const Grid& g, const Cutoff& c, std::uint64_t seed, int count, double tau,
                               double delta);
// |exp(i tau T_p) u|_{C^s_*} / |u|_{C^s_*}, s in {0.5, 1.5}
double measure_flow_zygmund(const Grid& g, const Cutoff& c, std::uint64_t seed, int count, double tau);
// B M^beta_0(r(a)) / M^beta_0(a) for the Cole-Hopf remainder over B in {4, 8, 16}
double measure_remainder(const Grid& g, double alpha, double beta, std::uint64_t seed, int count);
// (alpha M(d_x p) / M(a) - 1) / M(a) for the exponential gauge at the given data scale
double measure_nonlinear(const Grid& g, const std::vector<double>& alphas, double scale, std::uint64_t seed,
                         int count);
double measure_marcinkiewicz(const Grid& g, double s, const std::vector<double>& alphas, const Cutoff& c);
// |w - v|_{L^2} / (|u|_{C^{(3/2-alpha)^+}_*} |v|_{L^2}) with v = <D>^s u
double measure_normal_form(const Grid& g, double s, double alpha, const Cutoff& c, double scale,
                           std::uint64_t seed, int count);

struct EnsembleMeasure {
    double max_ratio = 0.0;
    double growth_constant = 0.0;
    double hyperbolic_constant = 0.0;
    double hermitian_residual = 0.0;
    double skew_residual = 0.0;
    double equivalence_constant = 0.0;
    int members = 0;
};

// Paralinear runs of the standard ensemble with the energy study on each member.
SimConfig energy_base_config();
EnsembleMeasure measure_energy_ensemble(const std::vector<double>& amplitudes, std::uint64_t seed,
                                        std::vector<EnergyStudy>* studies = nullptr);
// Same on the four families of an arbitrary paralinear base run at Sobolev index s.
EnsembleMeasure measure_energy_ensemble(const SimConfig& base, const std::vector<double>& amplitudes, double s,
                                        std::vector<EnergyStudy>* studies = nullptr);

}  // namespace pbrg
