#pragma once

// Property suites shared by the command line verifiers and the acceptance binary.  Every
// assertion is recorded as a Check so failures can be reported uniformly.

#include <string>
#include <vector>

#include "pbrg/calibration.hpp"

namespace pbrg {

struct Check {
    std::string name;
    std::string relation;  // "<=", ">=" or "=="
    double actual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

Check check_le(std::string name, double actual, double bound);
Check check_ge(std::string name, double actual, double bound);
Check check_eq(std::string name, double actual, double expected);
bool all_pass(const std::vector<Check>& checks);
void append(std::vector<Check>& to, const std::vector<Check>& from);

struct SuiteParams {
    int n_points = 128;
    double alpha = 1.5;
    Cutoff cutoff;
    std::uint64_t seed = calib::kVerificationSeed;
    double epsilon = 0.05;
    int j_max = 8;
};

// least-squares slope of log y against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Linear commutator equation: residuals, route agreement and the seminorm bound.
std::vector<Check> gauge_linear_checks(const Grid& g, double alpha, const Cutoff& c, std::uint64_t seed);
// Exponential problem: Newton convergence, small-data agreement, the (1 + C eps)/alpha bound.
std::vector<Check> gauge_nonlinear_checks(const Grid& g, double alpha, const Cutoff& c, std::uint64_t seed,
                                          double epsilon);
std::vector<Check> gauge_suite(const SuiteParams& p);

std::vector<Check> calculus_order_checks(const Grid& g, const Cutoff& c, std::uint64_t seed);
std::vector<Check> calculus_suite(const SuiteParams& p);

std::vector<Check> flow_law_checks(const Grid& g, const Cutoff& c, std::uint64_t seed);
std::vector<Check> bch_checks(const Grid& g, const Cutoff& c, std::uint64_t seed);
std::vector<Check> flow_suite(const SuiteParams& p);

std::vector<Check> resonance_checks(int lattice_n);

// Full equation from 0.01 cos x on [0, 1]: relative drifts at the default step and their
// decay exponent over dt in {0.5, 0.25, 0.125}.
std::vector<Check> conservation_checks(int n_points, double alpha);

std::vector<Check> energy_checks(const EnsembleMeasure& m, const std::vector<EnergyStudy>& studies);

// Residual order of the conjugated paralinear flow at each aperture, its spread across the
// apertures, and the relative change of the residual constant when the samples double.
struct ConjugationRun {
    double big_b = 0.0;
    int samples = 0;
    ConjugationStudy study;
};
std::vector<ConjugationRun> conjugation_runs(const SimConfig& base, const std::vector<double>& apertures,
                                             const std::vector<int>& samples);
std::vector<Check> conjugation_checks(const std::vector<ConjugationRun>& runs);

// Growth spread across grids above which a cell is flagged grid sensitive.
inline constexpr double kGridSensitivity = 1.5;
bool grid_sensitive(const ScanCell& c);
std::vector<Check> scan_checks(const std::vector<ScanCell>& cells);

}  // namespace pbrg
