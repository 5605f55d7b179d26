#pragma once

// Integrating-factor RK4 for u_t + N(u) + d_x |D|^{alpha-1} u = 0 on the torus, with
// N(u) = u u_x (2/3 dealiased) or the paraproduct T_u d_x u.

#include <cstdint>
#include <string>

#include "pbrg/paraop.hpp"

namespace pbrg {

enum class Equation { Full, Paralinear };
enum class InitialCondition { Cos1, Cos1Sin2, Bump, Random };

const char* equation_name(Equation e);
const char* init_name(InitialCondition i);
Equation parse_equation(const std::string& s);
InitialCondition parse_init(const std::string& s);

struct SimConfig {
    int n_points = 256;
    double alpha = 1.5;
    Cutoff cutoff;
    Equation equation = Equation::Full;
    double dt = 0.0;  // 0 selects default_dt
    double t_end = 1.0;
    bool dealias = true;
    InitialCondition init = InitialCondition::Cos1;
    double amplitude = 0.01;
    std::uint64_t seed = 0;
    int samples = 10;         // recorded states after t = 0
    bool adaptive = false;    // step-doubling control at relative error 1e-8
    bool nonlinear = true;    // false leaves the exact free evolution

    void validate() const;
    double step_size() const;
};

double default_dt(int n_points, double alpha);

// Real initial data scaled to sup-norm equal to the amplitude; the bump and random families
// are mean-free and band-limited.
Field initial_condition(const Grid& g, InitialCondition kind, double amplitude, std::uint64_t seed = 0);

Field nonlinear_term(const Field& u, const SimConfig& cfg);  // -N(u)
Field step(const Field& u, const SimConfig& cfg, double dt);
Field step(const Field& u, const SimConfig& cfg);

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> states;
    std::vector<double> sup_norms;
    std::vector<double> lipschitz;
    bool blowup_suspected = false;
    std::string blowup_reason;
    double last_valid_time = 0.0;
    double low_mode_residual = 0.0;  // paralinear runs: |u_hat(k,t) - e^{-itd(k)} u_hat(k,0)| for |k| <= 1
    long steps = 0;
    long rejected = 0;
};

Trajectory run(const SimConfig& cfg);
Trajectory run_from(const Field& u0, const SimConfig& cfg);

// u_lambda(x) = lambda^{alpha-1} u(lambda x) by relabelling xi -> lambda xi
Field rescale(const Field& u, int lambda, double alpha);

double mass(const Field& u);                      // int u^2
double hamiltonian(const Field& u, double alpha); // int |D^{(alpha-1)/2} u|^2 + (1/3) int u^3

}  // namespace pbrg
