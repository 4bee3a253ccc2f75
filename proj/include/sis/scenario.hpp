#ifndef SIS_SCENARIO_HPP
#define SIS_SCENARIO_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sis/dynamics.hpp"
#include "sis/space_kernel.hpp"
#include "sis/vaccination.hpp"

namespace sis {

// Scenario-file layer of the command-line frontend. Scenarios are JSON
// documents (schema in the README); numeric matrices may be inlined or
// referenced as CSV files relative to the scenario's directory. Reports
// serialize with fixed key order so identical scenarios produce
// byte-identical output.

struct OutputFlags {
    bool per_atom_series = false;
    bool prevalence_series = true;
    bool equilibrium = true;
    bool spectral_report = true;
};

struct InitialOnes {};
struct InitialEigenThreshold {
    double epsilon = 0.0;
};
using InitialCondition =
    std::variant<double, std::vector<double>, InitialOnes, InitialEigenThreshold>;

struct PerfectVaccination {
    std::vector<double> eta0; // broadcast when a scalar was given
    double eta0_scalar = 1.0;
    bool scalar = true;
};

struct MechanismVaccination {
    VaccineMechanism mechanism = VaccineMechanism::Leaky;
    VaccineSet vaccines;
    VaccinationPolicy policy;
};

using VaccinationBlock = std::variant<PerfectVaccination, MechanismVaccination>;

struct Scenario {
    KernelSpec kernel;
    InitialCondition initial_condition = InitialOnes{};
    double horizon = 0.0;
    std::optional<double> dt;
    OutputFlags outputs;
    std::optional<VaccinationBlock> vaccination;
    std::optional<std::string> lockdown_after; // CSV path of the after-graphon
    std::string directory;                     // resolved base for file references
};

/// Tolerances the CLI can override through SIS_TOL.
struct Tolerances {
    double spectral = 1e-10;
    double regime_tau = 1e-9;
};

Scenario load_scenario(const std::string& path);

/// Model described by the scenario's kernel block (vaccination not applied).
KernelModel scenario_model(const Scenario& scenario);

/// Initial state for a model, resolving "ones" and "eigen_threshold:eps".
StateVector resolve_initial_condition(const Scenario& scenario, const KernelModel& model);

/// Report text plus convergence status (drives the CLI's exit code 3).
struct ReportResult {
    std::string json;
    bool converged = true;
};

/// Analysis JSON (fixed key order). Chain kernels report the Gelfand
/// value of the infinite operator plus a truncated-spectrum caveat in
/// place of the nilpotent truncation's radius. The spectral and
/// equilibrium sections honor the scenario's output flags.
ReportResult analyze_to_json(const Scenario& scenario, const Tolerances& tol = {});

/// Equilibrium JSON including the full g* vector.
ReportResult equilibrium_to_json(const Scenario& scenario, const Tolerances& tol = {});

/// Vaccination JSON: perfect-vaccine before/after or leaky vs
/// all-or-nothing reproduction numbers for the product model.
std::string vaccinate_to_json(const Scenario& scenario, const Tolerances& tol = {});

/// Lockdown JSON for the scenario kernel vs the after-graphon (CSV path
/// argument wins over the scenario's lockdown block).
std::string lockdown_to_json(const Scenario& scenario, const std::string& after_csv_override,
                             const Tolerances& tol = {});

/// Chain equilibrium family JSON for the counterexample subcommand.
std::string counterexample_to_json(double alpha, std::size_t n);

/// Trajectory CSV: header t,prevalence[,u_1..u_n with per_atom].
std::string trajectory_to_csv(const Trajectory& trajectory, bool per_atom);

struct SimulationSummary {
    double final_prevalence = 0.0;
    std::optional<double> distance_to_equilibrium; // when equilibrium output is on
    bool equilibrium_converged = true;
};

/// Runs the scenario's simulation (applying any vaccination block) and
/// writes the trajectory CSV to out_path.
SimulationSummary run_simulation(const Scenario& scenario, const std::string& out_path,
                                 bool per_atom_flag);

} // namespace sis

#endif
