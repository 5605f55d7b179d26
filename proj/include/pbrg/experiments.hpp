#pragma once

// Studies built on the solver and the gauge machinery: diagnostics, the normal-form energy
// estimate, the conjugation residual and blow-up scans.

#include <map>
#include <string>

#include "pbrg/gauge.hpp"
#include "pbrg/normalform.hpp"
#include "pbrg/solver.hpp"

namespace pbrg {

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double hamiltonian = 0.0;
    std::map<double, double> sobolev_norms;  // s -> |u|_{H^s}
    double lipschitz = 0.0;                  // |d_x u|_inf
    double weak_criterion = 0.0;             // ||D|^{2-alpha}(u^2)|_inf
    double sup_norm = 0.0;
};

DiagnosticsRecord diagnostics(const Field& u, double alpha, const std::vector<double>& s_list, double t = 0.0);
double weak_criterion(const Field& u, double alpha);
// |d_x D^{1-alpha}(u^2)|_inf
double energy_denominator(const Field& u, double alpha);

enum class Verdict { Bounded, Violated, Inconclusive };
const char* verdict_name(Verdict v);

struct EstimateReport {
    double fitted_constant = 0.0;
    double max_ratio = 0.0;
    double lsq_constant = 0.0;  // exp of the mean log-ratio
    int ensemble_size = 0;
    Verdict verdict = Verdict::Inconclusive;
};
EstimateReport make_report(const std::vector<double>& ratios, double fitted_constant, int ensemble_size);

// Standard ensemble: four initial families times the given amplitudes.
std::vector<SimConfig> standard_ensemble(const SimConfig& base, const std::vector<double>& amplitudes);

struct EnergySample {
    double t = 0.0;
    double dwdt = 0.0;         // d/dt |w|_{L^2}
    double dvdt = 0.0;         // d/dt |v|_{L^2}
    double denominator = 0.0;  // |d_x D^{1-alpha}(u^2)|_inf |v|_{L^2}
    double ratio = 0.0;        // |dwdt| / denominator
    double w_over_v = 0.0;
    double growth = 0.0;       // |u(t)|_{H^s} / |u_0|_{H^s}
    double weak_integral = 0.0;  // int_0^t ||D|^{2-alpha}(u^2)|_inf
};

struct EnergyStudy {
    std::vector<EnergySample> samples;
    double max_ratio = 0.0;
    double growth_constant = 0.0;       // max_t log(growth / K^2) / weak_integral, K = equivalence_constant
    double hermitian_residual = 0.0;    // max |T_p - T_p^dagger| on the support
    double skew_residual = 0.0;         // max |X + X^dagger| for the conjugated bracket X
    double equivalence_constant = 1.0;  // max(|w|/|v|, |v|/|w|)
};

// Per-sample normal-form energy analysis of a paralinear trajectory.
EnergyStudy energy_study(const Trajectory& tr, const SimConfig& cfg, double s, int gauge_stride = 1);

// Maximum ratio over an ensemble against a supplied constant.
EstimateReport energy_estimate_study(const std::vector<EnergyStudy>& ensemble, double fitted_constant);

// Matrix gauge of the energy estimate: L(P) = -(M + M^dagger), M = T_{u xi}
MatrixXc energy_gauge(const Field& u, double alpha, const Cutoff& c);
double bracket_skew_residual(const MatrixXc& p, const MatrixXc& h);

struct ConjugationStudy {
    std::vector<double> times;
    std::vector<double> slopes;          // order of the residual operator per probed sample
    double order = 0.0;                  // max slope
    double residual_constant = 0.0;      // max |r|_{H^s} / |w|_{H^s}
    double ellipticity_constant = 0.0;   // max |u|_{H^s} / (|w|_{H^s} + |P_0 u|_{L^2})
    double residual_norm = 0.0;          // max |r|_{L^2}
    double support_residual = 0.0;
    double k_hat = 0.0;
    int newton_iterations = 0;
    EstimateReport report;
};

ConjugationStudy conjugation_study(const Trajectory& tr, const SimConfig& cfg, const std::vector<double>& s_probes,
                                   int probe_stride = 1);

// Constant C in |u(t)|_{H^mu} <= exp(C int_0^t |d_x u|_inf) |u_0|_{H^mu}
double hyperbolic_growth_constant(const Trajectory& tr, double mu);

enum class BlowupClass { None, Lipschitz, SupNorm, Inconclusive };
const char* blowup_name(BlowupClass b);
BlowupClass classify_blowup(const Trajectory& tr);

struct ScanCell {
    double alpha = 0.0;
    double amplitude = 0.0;
    std::vector<int> grids;
    std::vector<BlowupClass> per_grid;
    std::vector<double> lipschitz_growth;
    std::vector<double> sup_growth;
    BlowupClass outcome = BlowupClass::Inconclusive;
    bool agree = false;
};

struct ScanOptions {
    InitialCondition family = InitialCondition::Cos1;
    std::vector<int> grids = {512, 1024};
    double t_end = 10.0;
    int samples = 100;
    Cutoff cutoff;
};

std::vector<ScanCell> blowup_scan(const std::vector<double>& alphas, const std::vector<double>& amplitudes,
                                  const ScanOptions& opt = {});
double scan_dt(int n_points, double alpha, double amplitude);
// cells violating monotonicity in the amplitude (ignoring inconclusive ones)
std::vector<std::pair<double, double>> scan_monotonicity_violations(const std::vector<ScanCell>& cells);

}  // namespace pbrg
