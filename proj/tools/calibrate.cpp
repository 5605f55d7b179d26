// Recomputes the measurements behind the frozen constants in pbrg/calibration.hpp.

#include <cstdio>

#include "pbrg/calibration.hpp"

using namespace pbrg;

namespace {

void row(const char* name, double calibration, double verification, double frozen) {
    std::printf("%-16s calibration %.6e  verification %.6e  frozen %.6e  suggested %.3g\n", name, calibration,
                verification, frozen, calibration * calib::kSafety);
}

}  // namespace

int main() {
    const auto sc = calib::kCalibrationSeed;
    const auto sv = calib::kVerificationSeed;
    const Grid g128(128);
    const Grid g64(64);
    const Cutoff c(8.0, 2.0);

    row("cutoff_decay", measure_cutoff_decay(g128, c, 4), measure_cutoff_decay(Grid(256), c, 4), calib::kCutoffDecay);
    double zc = 0.0, zv = 0.0;
    for (double r : {0.25, 0.5, 1.5}) {
        zc = std::max(zc, measure_zygmund_sum(g128, r, sc, 8));
        zv = std::max(zv, measure_zygmund_sum(g128, r, sv, 8));
    }
    row("zygmund_sum", zc, zv, calib::kZygmundSum);
    row("bony", measure_bony(g128, sc, 10), measure_bony(g128, sv, 10), calib::kBony);
    row("operator_norm", measure_operator_norm(Grid(256), c, sc, 5), measure_operator_norm(Grid(256), c, sv, 5),
        calib::kOperatorNorm);
    row("flow_difference", measure_flow_difference(g64, c, sc, 4, 0.5, 0.5),
        measure_flow_difference(g64, c, sv, 4, 0.5, 0.5), calib::kFlowDifference);
    row("flow_zygmund", measure_flow_zygmund(g64, c, sc, 4, 1.0), measure_flow_zygmund(g64, c, sv, 4, 1.0),
        calib::kFlowZygmund);
    double rc = 0.0, rv = 0.0;
    for (double alpha : {1.25, 1.5, 1.75, 2.5}) {
        rc = std::max(rc, measure_remainder(g128, alpha, 1.0, sc, 3));
        rv = std::max(rv, measure_remainder(g128, alpha, 1.0, sv, 3));
    }
    row("remainder", rc, rv, calib::kRemainder);
    const std::vector<double> alphas = {1.25, 1.5, 1.75, 2.5};
    row("nonlinear", measure_nonlinear(g128, alphas, 1e-2, sc, 2), measure_nonlinear(g128, alphas, 1e-2, sv, 2),
        calib::kNonlinear);
    row("marcinkiewicz", measure_marcinkiewicz(g128, 2.0, {1.25, 1.5, 1.75}, c),
        measure_marcinkiewicz(Grid(256), 2.0, {1.25, 1.5, 1.75}, c), calib::kMarcinkiewicz);
    row("normal_form", measure_normal_form(g128, 2.0, 1.5, c, 0.02, sc, 8),
        measure_normal_form(g128, 2.0, 1.5, c, 0.02, sv, 8), calib::kNormalForm);

    const EnsembleMeasure ec = measure_energy_ensemble({0.02, 0.04}, sc);
    const EnsembleMeasure ev = measure_energy_ensemble({0.005, 0.01, 0.02}, sv);
    row("energy_ratio", ec.max_ratio, ev.max_ratio, calib::kEnergyRatio);
    row("energy_growth", ec.growth_constant, ev.growth_constant, calib::kEnergyRatio);
    row("hyperbolic", ec.hyperbolic_constant, ev.hyperbolic_constant, calib::kHyperbolic);
    std::printf("energy residuals: hermitian %.2e skew %.2e equivalence %.4f\n",
                std::max(ec.hermitian_residual, ev.hermitian_residual), std::max(ec.skew_residual, ev.skew_residual),
                std::max(ec.equivalence_constant, ev.equivalence_constant));
    return 0;
}
