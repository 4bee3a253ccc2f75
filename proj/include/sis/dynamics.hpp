#ifndef SIS_DYNAMICS_HPP
#define SIS_DYNAMICS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "sis/space_kernel.hpp"

namespace sis {

/// Per-atom infection probabilities; a state lives in Delta = [0,1]^n.
using StateVector = std::vector<double>;

enum class Regime { Subcritical, Critical, Supercritical };

const char* regime_name(Regime regime);

/// Recorded solution of the SIS flow. Every state lies in Delta; the
/// prevalence column is the mass-weighted mean infection probability.
struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;
    std::vector<double> prevalence;
    double max_overshoot = 0.0; // worst pre-clamp excursion outside Delta

    const StateVector& final_state() const { return states.back(); }
};

struct RegimeDiagnostics {
    Regime regime = Regime::Subcritical;
    double r0 = 0.0;
    double spectral_bound = 0.0;
    bool connected = false;
};

struct EquilibriumReport {
    StateVector g_star;
    double residual = 0.0; // ||F(g*)||_inf
    bool converged = false;
    std::size_t iterations = 0;
    enum class Method { FixedPoint, LongTimeIntegration } method = Method::FixedPoint;
    RegimeDiagnostics diagnostics;
};

/// SIS drift F(g)[i] = (1 - g_i) * (kappa g)_i - gamma_i * g_i.
/// Throws validation_error when g leaves Delta by more than 1e-9.
std::vector<double> vector_field(const KernelModel& model, std::span<const double> g);

/// Mass-weighted mean of a state: sum_i g_i mu_i / sum_i mu_i.
double prevalence(const KernelModel& model, std::span<const double> g);

/// Step size keeping explicit RK4 comfortably stable for this model.
double default_time_step(const KernelModel& model);

/// Classic fixed-step RK4 on [0, t_end], recording every step. Each
/// recorded state is clamped to Delta; a pre-clamp excursion beyond
/// 1e-9 aborts with convergence_error("step size too large") since
/// Delta is forward invariant for the exact flow. A zero initial
/// condition short-circuits to the constant-zero trajectory.
Trajectory integrate(const KernelModel& model, const StateVector& g0, double t_end, double dt);

/// integrate() with the default step size.
Trajectory integrate(const KernelModel& model, const StateVector& g0, double t_end);

/// Maximal equilibrium by the monotone fixed-point map
/// g <- T(g) / (gamma + T(g)) started from the all-ones state. The
/// iterates decrease pointwise to the largest root of F, mirroring the
/// flow started at 1. converged requires ||F(g*)||_inf <= 1e-10.
EquilibriumReport maximal_equilibrium(const KernelModel& model);

/// Cross-check: equilibrium estimate from integrating the flow started
/// at the all-ones state up to t_end.
EquilibriumReport equilibrium_by_integration(const KernelModel& model, double t_end);

/// Regime from the sign of the spectral bound at tolerance tau.
RegimeDiagnostics classify_regime(const KernelModel& model, double tau = 1e-9);

/// Closed-form one-group solution with time measured in recovery units.
/// For R0 != 1 this is the logistic solution
///   U(t) = (R0-1) / (R0 + ((R0-1)/V0 - R0) e^{-(R0-1) t}),
/// re-derived by separation of variables; at criticality
///   U(t) = 1 / (1/V0 + t).
double one_group_closed_form(double r0, double v0, double t);

/// Equilibrium family of the chain kernel: g(1) = alpha and
/// g(n+1) = ((2n-1)/(2n+2)) g(n)/(1 - g(n)), with the >= 1 cutoff to 0.
/// Iterated through v_n = 2n g(n), which keeps the alpha = 1/2 family
/// exactly at g(n) = 1/(2n) in floating point.
struct ChainEquilibrium {
    std::vector<double> values;
    double residual = 0.0;    // ||F(g)||_inf over coordinates 1..N-1
    bool hit_cutoff = false;  // some g(n) reached 1
    std::size_t first_cutoff = 0; // 1-based index of the first g(n) >= 1
};

ChainEquilibrium counterexample_equilibria(double alpha, std::size_t n);

} // namespace sis

#endif
