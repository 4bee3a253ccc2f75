#include "sis/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "sis/errors.hpp"
#include "sis/kernels.hpp"
#include "sis/spectral.hpp"

namespace sis {

const char* regime_name(Regime regime) {
    switch (regime) {
        case Regime::Subcritical: return "Subcritical";
        case Regime::Critical: return "Critical";
        case Regime::Supercritical: return "Supercritical";
    }
    return "unknown";
}

namespace {

constexpr double kDeltaSlack = 1e-9;

double delta_excursion(std::span<const double> g) {
    double worst = 0.0;
    for (double v : g) worst = std::max({worst, -v, v - 1.0});
    return worst;
}

// Drift evaluation without the Delta check; RK4 stage points may sit
// slightly outside Delta even though recorded states never do.
void drift(const KernelModel& model, std::span<const double> g, std::span<double> out) {
    matvec(model.kappa, g, out);
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] = (1.0 - g[i]) * out[i] - model.gamma[i] * g[i];
}

} // namespace

std::vector<double> vector_field(const KernelModel& model, std::span<const double> g) {
    if (g.size() != model.size())
        throw validation_error("state length does not match atom count");
    if (delta_excursion(g) > kDeltaSlack)
        throw validation_error("state leaves [0,1] beyond tolerance");
    std::vector<double> out(g.size());
    drift(model, g, out);
    return out;
}

double prevalence(const KernelModel& model, std::span<const double> g) {
    double mass = 0.0, infected = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        mass += model.space.weights[i];
        infected += g[i] * model.space.weights[i];
    }
    return infected / mass;
}

double default_time_step(const KernelModel& model) {
    const double gamma_sup = *std::max_element(model.gamma.begin(), model.gamma.end());
    const double rate = inf_norm(model.kappa) + gamma_sup;
    return std::min(0.01, 0.1 / rate);
}

Trajectory integrate(const KernelModel& model, const StateVector& g0, double t_end, double dt) {
    const std::size_t n = model.size();
    if (g0.size() != n) throw validation_error("initial state length does not match atom count");
    if (delta_excursion(g0) > 0.0) throw validation_error("initial state must lie in [0,1]");
    if (!(dt > 0.0)) throw validation_error("dt must be positive");
    if (t_end < 0.0) throw validation_error("t_end must be non-negative");

    const std::size_t steps =
        t_end == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));

    Trajectory traj;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.prevalence.reserve(steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(g0);
    traj.prevalence.push_back(prevalence(model, g0));

    const bool all_zero = std::all_of(g0.begin(), g0.end(), [](double v) { return v == 0.0; });
    if (all_zero) {
        // Disease-free start stays disease-free.
        for (std::size_t s = 1; s <= steps; ++s) {
            traj.times.push_back(std::min(static_cast<double>(s) * dt, t_end));
            traj.states.push_back(g0);
            traj.prevalence.push_back(0.0);
        }
        return traj;
    }

    StateVector u = g0;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);
    double t = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
        const double h = std::min(dt, t_end - t);
        if (h <= 0.0) break;
        drift(model, u, k1);
        for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + 0.5 * h * k1[i];
        drift(model, stage, k2);
        for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + 0.5 * h * k2[i];
        drift(model, stage, k3);
        for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + h * k3[i];
        drift(model, stage, k4);
        for (std::size_t i = 0; i < n; ++i)
            u[i] += h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);

        const double overshoot = delta_excursion(u);
        traj.max_overshoot = std::max(traj.max_overshoot, overshoot);
        if (overshoot > kDeltaSlack)
            throw convergence_error("step size too large: state left [0,1] beyond tolerance");
        for (double& v : u) v = std::clamp(v, 0.0, 1.0);

        t = std::min(t + h, t_end);
        traj.times.push_back(t);
        traj.states.push_back(u);
        traj.prevalence.push_back(prevalence(model, u));
    }
    return traj;
}

Trajectory integrate(const KernelModel& model, const StateVector& g0, double t_end) {
    return integrate(model, g0, t_end, default_time_step(model));
}

RegimeDiagnostics classify_regime(const KernelModel& model, double tau) {
    RegimeDiagnostics d;
    d.r0 = r0(model);
    d.spectral_bound = spectral_bound(model);
    d.connected = is_connected(model);
    if (d.spectral_bound > tau)
        d.regime = Regime::Supercritical;
    else if (d.spectral_bound < -tau)
        d.regime = Regime::Subcritical;
    else
        d.regime = Regime::Critical;
    return d;
}

EquilibriumReport maximal_equilibrium(const KernelModel& model) {
    const std::size_t n = model.size();
    constexpr double kStepTol = 1e-12;
    constexpr double kResidualTol = 1e-10;
    constexpr std::size_t kMaxIterations = 1000000;

    EquilibriumReport report;
    report.method = EquilibriumReport::Method::FixedPoint;

    StateVector g(n, 1.0);
    std::vector<double> tg(n);
    for (report.iterations = 1; report.iterations <= kMaxIterations; ++report.iterations) {
        matvec(model.kappa, g, tg);
        double step = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double next = tg[i] / (model.gamma[i] + tg[i]);
            step = std::max(step, g[i] - next);
            g[i] = next;
        }
        if (step < kStepTol) break;
    }

    const std::vector<double> f = vector_field(model, g);
    for (double v : f) report.residual = std::max(report.residual, std::abs(v));
    report.converged = report.residual <= kResidualTol;
    report.g_star = std::move(g);
    report.diagnostics = classify_regime(model);
    return report;
}

EquilibriumReport equilibrium_by_integration(const KernelModel& model, double t_end) {
    const Trajectory traj = integrate(model, StateVector(model.size(), 1.0), t_end);
    EquilibriumReport report;
    report.method = EquilibriumReport::Method::LongTimeIntegration;
    report.g_star = traj.final_state();
    report.iterations = traj.times.size() - 1;
    const std::vector<double> f = vector_field(model, report.g_star);
    for (double v : f) report.residual = std::max(report.residual, std::abs(v));
    report.converged = report.residual <= 1e-8; // looser than the fixed point
    report.diagnostics = classify_regime(model);
    return report;
}

double one_group_closed_form(double r0, double v0, double t) {
    if (r0 < 0.0) throw validation_error("R0 must be non-negative");
    if (!(v0 > 0.0 && v0 <= 1.0)) throw validation_error("V0 must lie in (0,1]");
    if (r0 == 1.0) return 1.0 / (1.0 / v0 + t);
    const double c = (r0 - 1.0) / v0 - r0;
    return (r0 - 1.0) / (r0 + c * std::exp(-(r0 - 1.0) * t));
}

ChainEquilibrium counterexample_equilibria(double alpha, std::size_t n) {
    if (alpha < 0.0 || alpha > 1.0) throw validation_error("alpha must lie in [0,1]");
    if (n < 2) throw validation_error("chain equilibrium needs N >= 2");

    ChainEquilibrium out;
    out.values.resize(n);

    // Work with v_k = 2k g(k): v_{k+1} = v_k (2k-1)/(2k - v_k). The
    // alpha = 1/2 family keeps v = 1 exactly, so g(k) = 1/(2k) holds
    // bitwise.
    double v = 2.0 * alpha;
    for (std::size_t k = 1; k <= n; ++k) {
        const double idx = static_cast<double>(k);
        if (v >= 2.0 * idx) { // g(k) >= 1: cutoff, zero from the next term
            if (!out.hit_cutoff) {
                out.hit_cutoff = true;
                out.first_cutoff = k;
            }
            out.values[k - 1] = v / (2.0 * idx);
            v = 0.0;
            continue;
        }
        out.values[k - 1] = v / (2.0 * idx);
        v = v * (2.0 * idx - 1.0) / (2.0 * idx - v);
    }

    // F residual over coordinates 1..N-1 of the truncated chain; the
    // last coordinate depends on the removed atom N+1 and is omitted.
    for (std::size_t k = 1; k + 1 <= n; ++k) {
        const double idx = static_cast<double>(k);
        const double rate = (2.0 * idx + 2.0) / (2.0 * idx - 1.0);
        const double g_k = out.values[k - 1];
        const double g_next = out.values[k];
        const double f = (1.0 - g_k) * rate * g_next - g_k;
        out.residual = std::max(out.residual, std::abs(f));
    }
    return out;
}

} // namespace sis
