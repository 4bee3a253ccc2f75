#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sis/errors.hpp"
#include "sis/scenario.hpp"

namespace {

// Exit-code contract: 0 success, 2 validation failure, 3 non-convergence.
constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;

sis::Tolerances tolerances_from_env() {
    sis::Tolerances tol;
    if (const char* env = std::getenv("SIS_TOL")) {
        char* end = nullptr;
        const double value = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(value > 0.0))
            throw sis::validation_error("SIS_TOL must be a positive number");
        tol.spectral = value;
        tol.regime_tau = value;
    }
    return tol;
}

int dispatch(const std::function<int()>& body) {
    try {
        return body();
    } catch (const sis::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const sis::convergence_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::FILE* f = std::fopen(out_path.c_str(), "w");
    if (!f) throw sis::validation_error("cannot write file: " + out_path);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SIS kernel models: spectral analysis, simulation, and policy evaluation"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, after_path;
    bool per_atom = false;
    double alpha = 0.5;
    std::size_t chain_n = 100;

    auto* analyze = app.add_subcommand("analyze", "Spectral and equilibrium report as JSON");
    analyze->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    analyze->add_option("--out", out_path, "Write the report here instead of stdout");

    auto* simulate = app.add_subcommand("simulate", "Integrate the flow and write a CSV trajectory");
    simulate->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    simulate->add_option("--out", out_path, "Trajectory CSV path")->required();
    simulate->add_flag("--per-atom", per_atom, "Include per-atom columns");

    auto* equilibrium = app.add_subcommand("equilibrium", "Maximal equilibrium as JSON");
    equilibrium->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    equilibrium->add_option("--out", out_path, "Write the report here instead of stdout");

    auto* vaccinate = app.add_subcommand("vaccinate", "Vaccination reproduction numbers as JSON");
    vaccinate->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    vaccinate->add_option("--out", out_path, "Write the report here instead of stdout");

    auto* lockdown = app.add_subcommand("lockdown", "Lockdown comparison as JSON");
    lockdown->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    lockdown->add_option("--after", after_path, "After-graphon CSV (overrides the scenario)");
    lockdown->add_option("--out", out_path, "Write the report here instead of stdout");

    auto* counterexample =
        app.add_subcommand("counterexample", "Chain equilibrium family as JSON");
    counterexample->add_option("--alpha", alpha, "Seed value g(1) in [0,1]")->required();
    counterexample->add_option("--n", chain_n, "Truncation length")->required();
    counterexample->add_option("--out", out_path, "Write the report here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    return dispatch([&]() -> int {
        const sis::Tolerances tol = tolerances_from_env();
        if (analyze->parsed()) {
            const sis::ReportResult report =
                sis::analyze_to_json(sis::load_scenario(scenario_path), tol);
            emit(report.json, out_path);
            return report.converged ? 0 : kExitConvergence;
        }
        if (simulate->parsed()) {
            const sis::Scenario scenario = sis::load_scenario(scenario_path);
            const sis::SimulationSummary summary =
                sis::run_simulation(scenario, out_path, per_atom);
            std::printf("final_prevalence %.17g\n", summary.final_prevalence);
            if (summary.distance_to_equilibrium)
                std::printf("distance_to_equilibrium %.17g\n", *summary.distance_to_equilibrium);
            if (!summary.equilibrium_converged) return kExitConvergence;
            return 0;
        }
        if (equilibrium->parsed()) {
            const sis::ReportResult report =
                sis::equilibrium_to_json(sis::load_scenario(scenario_path), tol);
            emit(report.json, out_path);
            return report.converged ? 0 : kExitConvergence;
        }
        if (vaccinate->parsed()) {
            emit(sis::vaccinate_to_json(sis::load_scenario(scenario_path), tol), out_path);
            return 0;
        }
        if (lockdown->parsed()) {
            emit(sis::lockdown_to_json(sis::load_scenario(scenario_path), after_path, tol),
                 out_path);
            return 0;
        }
        emit(sis::counterexample_to_json(alpha, chain_n), out_path);
        return 0;
    });
}
