#pragma once

// The flow exp(i tau T_p), conjugation and commutator factorizations, BCH truncation,
// the flow-symbol identity and flow composition.

#include <functional>
#include <optional>

#include "pbrg/paraop.hpp"

namespace pbrg {

// Scaling and squaring with the degree-13 Pade approximant.
MatrixXc expm(const MatrixXc& a);

// Composite 16-point Gauss-Legendre rule on [a, b].
struct QuadNode {
    double x;
    double w;
};
std::vector<QuadNode> gauss_legendre16(double a, double b, int panels = 1);

// Dormand-Prince 5(4) for Y' = f(t, Y) with matrix state.
struct OdeStats {
    int accepted = 0;
    int rejected = 0;
};
MatrixXc integrate_ode(const std::function<MatrixXc(double, const MatrixXc&)>& f, MatrixXc y0, double t0,
                       double t1, double tol, OdeStats* stats = nullptr);

// exp(i tau P) for a fixed generator; Hermitian generators go through one eigendecomposition.
class FlowEvaluator {
public:
    explicit FlowEvaluator(MatrixXc generator);
    MatrixXc at(double tau) const;
    const MatrixXc& generator() const { return p_; }
    bool hermitian() const { return hermitian_; }

private:
    MatrixXc p_;
    bool hermitian_ = false;
    MatrixXc vecs_;
    Eigen::VectorXd vals_;
};

enum class FlowMethod { Auto, MatrixExponential, OdeIntegration };

struct FlowOptions {
    bool self_adjointify = false;
    FlowMethod method = FlowMethod::Auto;
    double stability_constant = 1.0;
    double ode_tolerance = 1e-11;
};

struct FlowOperator {
    OperatorMatrix generator;
    double tau = 0.0;
    OperatorMatrix matrix;
    FlowMethod method = FlowMethod::MatrixExponential;
    double dropped_norm = 0.0;   // ||(M - M^dagger)/2|| removed by self-adjointification
    double im_part_norm = 0.0;   // ||(G - G^dagger)/(2i)|| of the generator actually used
};

MatrixXc self_adjoint_part(const MatrixXc& m);
OperatorMatrix generator_matrix(const Symbol& p, const Cutoff& c, bool self_adjointify, double* dropped = nullptr);

FlowOperator flow_build(const Symbol& p, const Cutoff& c, double tau, const FlowOptions& opt = {});
FlowOperator flow_build_matrix(const OperatorMatrix& generator, double tau, const FlowOptions& opt = {});

OperatorMatrix conjugate(const Symbol& p, const Symbol& b, const Cutoff& c, double tau,
                         const FlowOptions& opt = {});
OperatorMatrix commutator_factor(const Symbol& p, const Symbol& b, const Cutoff& c, double tau,
                                 const FlowOptions& opt = {});
// int_0^tau exp(-i r P) [iP, T_b] exp(i r P) dr
OperatorMatrix commutator_integral(const Symbol& p, const Symbol& b, const Cutoff& c, double tau,
                                   const FlowOptions& opt = {}, int panels = 2);

double bch_truncation(const Symbol& p, const Symbol& b, const Cutoff& c, double tau, int K,
                      const FlowOptions& opt = {});

struct ComposeCheck {
    double composition = 0.0;  // max-entry discrepancy of the product against the ODE flow
    double difference = 0.0;   // max-entry discrepancy of the flow-difference identity
};
ComposeCheck flow_compose_check(const Symbol& p, const Symbol& p2, const Cutoff& c, double tau,
                                const FlowOptions& opt = {}, double ode_tol = 1e-8);

// Max-entry discrepancy of
//   exp(i tau T_p) T_1 - T_{e^{i tau p}} - int_0^tau exp(i(tau-s)T_p)(T_{ip} T_{e^{isp}} - T_{ip e^{isp}}) ds
// restricted to input columns b+1 < |xi| <= band.
double flow_symbol_identity(const Symbol& p, const Cutoff& c, double tau, int band, int panels = 2);

double max_entry(const MatrixXc& m);

}  // namespace pbrg
