#include "sis/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "sis/errors.hpp"
#include "sis/lockdown.hpp"
#include "sis/spectral.hpp"

namespace sis {

using json = nlohmann::ordered_json;

namespace {

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open scenario file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("malformed JSON in " + path + ": " + e.what());
    }
    return doc;
}

std::string resolve_path(const Scenario& scenario, const std::string& ref) {
    std::filesystem::path p(ref);
    if (p.is_absolute() || scenario.directory.empty()) return ref;
    return (std::filesystem::path(scenario.directory) / p).string();
}

[[noreturn]] void fail(const std::string& message) { throw validation_error(message); }

double get_number(const json& node, const std::string& key) {
    if (!node.contains(key) || !node[key].is_number())
        fail("scenario field '" + key + "' must be a number");
    return node[key].get<double>();
}

double get_number_or(const json& node, const std::string& key, double fallback) {
    if (!node.contains(key)) return fallback;
    return get_number(node, key);
}

std::vector<double> as_vector(const json& node, const std::string& key) {
    std::vector<double> out;
    for (const auto& v : node) {
        if (!v.is_number()) fail("scenario field '" + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

// Scalars broadcast; arrays pass through; {"csv": path} loads a column.
std::vector<double> field_vector(const Scenario& scenario, const json& node,
                                 const std::string& key, std::size_t n,
                                 std::optional<double> fallback = {}) {
    if (!node.contains(key)) {
        if (fallback) return std::vector<double>(n, *fallback);
        fail("scenario kernel is missing field '" + key + "'");
    }
    const json& f = node[key];
    if (f.is_number()) return std::vector<double>(n, f.get<double>());
    if (f.is_array()) {
        auto v = as_vector(f, key);
        if (v.size() != n) fail("field '" + key + "' has wrong length");
        return v;
    }
    if (f.is_object() && f.contains("csv")) {
        auto v = load_column_csv(resolve_path(scenario, f["csv"].get<std::string>()));
        if (v.size() != n) fail("field '" + key + "' has wrong length");
        return v;
    }
    fail("field '" + key + "' must be a number, array, or {\"csv\": path}");
}

Matrix field_matrix(const Scenario& scenario, const json& node, const std::string& key) {
    if (!node.contains(key)) fail("scenario kernel is missing field '" + key + "'");
    const json& f = node[key];
    if (f.is_object() && f.contains("csv"))
        return load_matrix_csv(resolve_path(scenario, f["csv"].get<std::string>()));
    if (!f.is_array() || f.empty()) fail("field '" + key + "' must be a matrix");
    const std::size_t rows = f.size();
    const std::size_t cols = f[0].size();
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!f[i].is_array() || f[i].size() != cols) fail("field '" + key + "' is ragged");
        for (std::size_t j = 0; j < cols; ++j) {
            if (!f[i][j].is_number()) fail("field '" + key + "' must hold numbers");
            m(i, j) = f[i][j].get<double>();
        }
    }
    return m;
}

std::vector<double> optional_weights(const Scenario& scenario, const json& node, std::size_t n) {
    if (!node.contains("weights")) return {};
    return field_vector(scenario, node, "weights", n);
}

KernelSpec parse_kernel(Scenario& scenario, const json& node) {
    if (!node.is_object() || !node.contains("type")) fail("kernel block needs a 'type'");
    const std::string type = node["type"].get<std::string>();

    if (type == "matrix") {
        Matrix kappa = field_matrix(scenario, node, "kappa");
        const std::size_t n = kappa.rows();
        return MatrixSpec{std::move(kappa), field_vector(scenario, node, "gamma", n, 1.0)};
    }
    if (type == "graph") {
        Matrix adjacency = field_matrix(scenario, node, "adjacency");
        const std::size_t n = adjacency.rows();
        return GraphSpec{std::move(adjacency), field_vector(scenario, node, "beta", n, 1.0),
                         field_vector(scenario, node, "theta", n, 1.0),
                         field_vector(scenario, node, "gamma", n, 1.0)};
    }
    if (type == "graphon") {
        Matrix w = field_matrix(scenario, node, "w");
        const std::size_t n = w.rows();
        return GraphonSpec{std::move(w), optional_weights(scenario, node, n),
                           field_vector(scenario, node, "beta", n, 1.0),
                           field_vector(scenario, node, "theta", n, 1.0),
                           field_vector(scenario, node, "gamma", n, 1.0)};
    }
    if (type == "constant_graphon") {
        ConstantGraphonSpec spec;
        spec.p = get_number(node, "p");
        spec.n = static_cast<std::size_t>(get_number(node, "n"));
        spec.beta = get_number_or(node, "beta", 1.0);
        spec.theta = get_number_or(node, "theta", 1.0);
        spec.gamma = get_number_or(node, "gamma", 1.0);
        spec.weights = optional_weights(scenario, node, spec.n);
        return spec;
    }
    if (type == "sbm") {
        Matrix w = field_matrix(scenario, node, "w");
        const std::size_t n = w.rows();
        return SbmSpec{field_vector(scenario, node, "block_masses", n),
                       std::move(w),
                       field_vector(scenario, node, "beta", n, 1.0),
                       field_vector(scenario, node, "theta", n, 1.0),
                       field_vector(scenario, node, "gamma", n, 1.0)};
    }
    if (type == "geometric") {
        GeometricSpec spec;
        if (!node.contains("f")) fail("geometric kernel needs 'f' samples");
        spec.f_samples = as_vector(node["f"], "f");
        spec.beta = get_number_or(node, "beta", 1.0);
        spec.theta = get_number_or(node, "theta", 1.0);
        spec.gamma = get_number_or(node, "gamma", 1.0);
        return spec;
    }
    if (type == "counterexample_chain") {
        CounterexampleChainSpec spec;
        spec.n = static_cast<std::size_t>(get_number(node, "n"));
        spec.weights = optional_weights(scenario, node, spec.n);
        return spec;
    }
    fail("unknown kernel type: " + type);
}

InitialCondition parse_initial(const json& node) {
    if (node.is_number()) return node.get<double>();
    if (node.is_array()) {
        std::vector<double> v;
        for (const auto& x : node) v.push_back(x.get<double>());
        return v;
    }
    if (node.is_string()) {
        const std::string s = node.get<std::string>();
        if (s == "ones") return InitialOnes{};
        const std::string prefix = "eigen_threshold:";
        if (s.rfind(prefix, 0) == 0) {
            try {
                return InitialEigenThreshold{std::stod(s.substr(prefix.size()))};
            } catch (const std::exception&) {
                fail("cannot parse epsilon in '" + s + "'");
            }
        }
    }
    fail("initial_condition must be a number, array, \"ones\", or \"eigen_threshold:eps\"");
}

VaccinationBlock parse_vaccination(const Scenario& scenario, const json& node, std::size_t n) {
    if (!node.is_object() || !node.contains("mechanism"))
        fail("vaccination block needs a 'mechanism'");
    const std::string mech = node["mechanism"].get<std::string>();
    if (mech == "perfect") {
        PerfectVaccination perfect;
        if (!node.contains("eta0")) fail("perfect vaccination needs 'eta0'");
        if (node["eta0"].is_number()) {
            perfect.eta0_scalar = node["eta0"].get<double>();
            perfect.scalar = true;
            perfect.eta0.assign(n, perfect.eta0_scalar);
        } else {
            perfect.scalar = false;
            perfect.eta0 = as_vector(node["eta0"], "eta0");
        }
        return perfect;
    }

    MechanismVaccination block;
    if (mech == "leaky")
        block.mechanism = VaccineMechanism::Leaky;
    else if (mech == "all_or_nothing")
        block.mechanism = VaccineMechanism::AllOrNothing;
    else
        fail("unknown vaccination mechanism: " + mech);

    if (node.contains("coverage")) {
        // Compact one-vaccine form: type 0 is no-vaccine, type 1 carries
        // the scalar efficacy/reduction, coverage is eta(x, type 1).
        const std::vector<double> coverage = field_vector(scenario, node, "coverage", n);
        const std::vector<double> e = field_vector(scenario, node, "efficacy", n, 0.0);
        const std::vector<double> d =
            field_vector(scenario, node, "infectiousness_reduction", n, 0.0);
        block.vaccines.types = 2;
        block.vaccines.efficacy = Matrix(n, 2);
        block.vaccines.infectiousness_reduction = Matrix(n, 2);
        block.policy.eta = Matrix(n, 2);
        for (std::size_t x = 0; x < n; ++x) {
            block.vaccines.efficacy(x, 1) = e[x];
            block.vaccines.infectiousness_reduction(x, 1) = d[x];
            block.policy.eta(x, 0) = 1.0 - coverage[x];
            block.policy.eta(x, 1) = coverage[x];
        }
        return block;
    }

    block.vaccines.efficacy = field_matrix(scenario, node, "efficacy");
    block.vaccines.infectiousness_reduction =
        field_matrix(scenario, node, "infectiousness_reduction");
    if (node.contains("recovery")) block.vaccines.recovery = field_matrix(scenario, node, "recovery");
    block.policy.eta = field_matrix(scenario, node, "policy");
    block.vaccines.types = block.policy.eta.cols();
    return block;
}

} // namespace

Scenario load_scenario(const std::string& path) {
    const json doc = parse_file(path);
    Scenario scenario;
    scenario.directory = std::filesystem::path(path).parent_path().string();
    if (!doc.contains("kernel")) fail("scenario needs a 'kernel' block");
    scenario.kernel = parse_kernel(scenario, doc["kernel"]);

    if (doc.contains("initial_condition"))
        scenario.initial_condition = parse_initial(doc["initial_condition"]);
    scenario.horizon = get_number_or(doc, "horizon", 0.0);
    if (scenario.horizon < 0.0) fail("horizon must be non-negative");
    if (doc.contains("dt")) scenario.dt = get_number(doc, "dt");

    if (doc.contains("outputs")) {
        const json& out = doc["outputs"];
        scenario.outputs.per_atom_series = out.value("per_atom_series", false);
        scenario.outputs.prevalence_series = out.value("prevalence_series", true);
        scenario.outputs.equilibrium = out.value("equilibrium", true);
        scenario.outputs.spectral_report = out.value("spectral_report", true);
    }
    if (doc.contains("vaccination")) {
        const std::size_t n = build_kernel(scenario.kernel).size();
        scenario.vaccination = parse_vaccination(scenario, doc["vaccination"], n);
    }
    if (doc.contains("lockdown")) {
        const json& lock = doc["lockdown"];
        if (!lock.is_object() || !lock.contains("after"))
            fail("lockdown block needs an 'after' graphon reference");
        scenario.lockdown_after = resolve_path(scenario, lock["after"].get<std::string>());
    }
    return scenario;
}

KernelModel scenario_model(const Scenario& scenario) { return build_kernel(scenario.kernel); }

StateVector resolve_initial_condition(const Scenario& scenario, const KernelModel& model) {
    const std::size_t n = model.size();
    if (const auto* constant = std::get_if<double>(&scenario.initial_condition)) {
        if (*constant < 0.0 || *constant > 1.0) fail("initial_condition must lie in [0,1]");
        return StateVector(n, *constant);
    }
    if (const auto* vec = std::get_if<std::vector<double>>(&scenario.initial_condition)) {
        if (vec->size() != n) fail("initial_condition length does not match atom count");
        return *vec;
    }
    if (std::holds_alternative<InitialOnes>(scenario.initial_condition))
        return StateVector(n, 1.0);
    const auto eigen = std::get<InitialEigenThreshold>(scenario.initial_condition);
    return eigen_threshold(model, eigen.epsilon).w;
}

namespace {

json degrees_json(const KernelSpec& spec) {
    const DegreeReport report = degrees(spec);
    json j;
    j["min"] = *std::min_element(report.degrees.begin(), report.degrees.end());
    j["max"] = *std::max_element(report.degrees.begin(), report.degrees.end());
    j["mean_degree"] = report.mean_degree;
    return j;
}

json bounds_json(const KernelSpec& spec) {
    const R0Bounds bounds = r0_bounds(spec);
    json j;
    if (bounds.lower)
        j["lower"] = *bounds.lower;
    else
        j["lower"] = nullptr;
    j["upper"] = bounds.upper;
    return j;
}

json equilibrium_json(const EquilibriumReport& report, const KernelModel& model,
                      bool include_vector) {
    json j;
    double sup = 0.0, mean = 0.0;
    for (double v : report.g_star) sup = std::max(sup, v);
    mean = prevalence(model, report.g_star);
    j["sup"] = sup;
    j["mean"] = mean;
    j["residual"] = report.residual;
    j["converged"] = report.converged;
    j["iterations"] = report.iterations;
    j["method"] = report.method == EquilibriumReport::Method::FixedPoint
                      ? "fixed-point"
                      : "long-time-integration";
    if (include_vector) j["g_star"] = report.g_star;
    return j;
}

Regime regime_from_bound(double s, double tau) {
    if (s > tau) return Regime::Supercritical;
    if (s < -tau) return Regime::Subcritical;
    return Regime::Critical;
}

json spectral_json(const KernelModel& model, const Tolerances& tol, Regime& regime_out) {
    SpectralOptions opts;
    opts.tol = tol.spectral;
    const SpectralResult ngm = spectral_radius(next_generation_matrix(model), opts);
    const double s = spectral_bound(model, opts);
    regime_out = regime_from_bound(s, tol.regime_tau);
    json j;
    j["r0"] = ngm.radius;
    j["spectral_bound"] = s;
    j["certified"] = ngm.certified;
    j["iterations"] = ngm.iterations;
    if (!ngm.note.empty()) j["note"] = ngm.note;
    return j;
}

json analysis_json(const Scenario& scenario, const Tolerances& tol, bool& converged) {
    const KernelModel model = scenario_model(scenario);
    json j;
    j["atoms"] = model.size();
    j["total_mass"] = model.space.total_mass();
    j["connected"] = is_connected(model);

    const bool chain = std::holds_alternative<CounterexampleChainSpec>(scenario.kernel);
    if (chain) {
        // The truncated chain is nilpotent: its radius is 0 no matter
        // the truncation level, so it is not reported as R0.
        j["spectral"] = nullptr;
        j["caveat"] =
            "truncated-spectrum: the chain truncation is nilpotent; the Gelfand value "
            "below reflects the infinite operator";
        json gelfand;
        gelfand["n"] = 10000;
        gelfand["value"] = chain_gelfand_value(10000);
        j["gelfand"] = gelfand;
    } else if (scenario.outputs.spectral_report) {
        Regime regime = Regime::Subcritical;
        j["spectral"] = spectral_json(model, tol, regime);
        j["regime"] = regime_name(regime);
    }

    if (is_graphon_form(scenario.kernel)) {
        j["degrees"] = degrees_json(scenario.kernel);
        j["r0_bounds"] = bounds_json(scenario.kernel);
    }
    if (scenario.outputs.equilibrium) {
        const EquilibriumReport eq = maximal_equilibrium(model);
        j["equilibrium"] = equilibrium_json(eq, model, false);
        if (!eq.converged) {
            j["equilibrium"]["warning"] = "fixed-point iteration not converged";
            converged = false;
        }
    }
    return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write file: " + path);
    out << text;
}

void append_value(std::string& out, double v) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    out.append(buf, static_cast<std::size_t>(len));
}

} // namespace

ReportResult analyze_to_json(const Scenario& scenario, const Tolerances& tol) {
    ReportResult result;
    result.converged = true;
    result.json = dump(analysis_json(scenario, tol, result.converged));
    return result;
}

ReportResult equilibrium_to_json(const Scenario& scenario, const Tolerances& tol) {
    const KernelModel model = scenario_model(scenario);
    const EquilibriumReport report = maximal_equilibrium(model);
    json j;
    j["regime"] = regime_name(regime_from_bound(report.diagnostics.spectral_bound,
                                                tol.regime_tau));
    j["r0"] = report.diagnostics.r0;
    j["spectral_bound"] = report.diagnostics.spectral_bound;
    j["connected"] = report.diagnostics.connected;
    j["equilibrium"] = equilibrium_json(report, model, true);
    return ReportResult{dump(j), report.converged};
}

std::string vaccinate_to_json(const Scenario& scenario, const Tolerances& tol) {
    if (!scenario.vaccination) fail("scenario has no vaccination block");
    const KernelModel base = scenario_model(scenario);
    SpectralOptions opts;
    opts.tol = tol.spectral;

    json j;
    j["r0_base"] = r0(base, opts);
    if (const auto* perfect = std::get_if<PerfectVaccination>(&*scenario.vaccination)) {
        const KernelModel after = build_perfect_vaccine_model(base, perfect->eta0);
        j["mechanism"] = "perfect";
        j["r0_after"] = r0(after, opts);
        j["regime_after"] =
            regime_name(regime_from_bound(spectral_bound(after, opts), tol.regime_tau));
        return dump(j);
    }
    const auto& block = std::get<MechanismVaccination>(*scenario.vaccination);
    const VaccinatedR0Pair pair = r0_vaccinated_pair(base, block.vaccines, block.policy, opts);
    const ProductModel product =
        build_vaccinated_model(base, block.vaccines, block.policy, block.mechanism);
    j["mechanism"] = block.mechanism == VaccineMechanism::Leaky ? "leaky" : "all_or_nothing";
    j["r0_leaky"] = pair.leaky;
    j["r0_all_or_nothing"] = pair.all_or_nothing;
    j["r0_gap"] = std::abs(pair.leaky - pair.all_or_nothing);
    j["product_atoms"] = product.model.size();
    j["regime_after"] = regime_name(
        regime_from_bound(spectral_bound(product.model, opts), tol.regime_tau));
    return dump(j);
}

std::string lockdown_to_json(const Scenario& scenario, const std::string& after_csv_override,
                             const Tolerances&) {
    if (!is_graphon_form(scenario.kernel))
        fail("lockdown analysis needs a graphon-form kernel");
    std::string after_path = after_csv_override;
    if (after_path.empty() && scenario.lockdown_after) after_path = *scenario.lockdown_after;
    if (after_path.empty()) fail("lockdown analysis needs an after-graphon CSV");

    const GraphonView before = graphon_view(scenario.kernel);
    GraphonSpec after_spec{load_matrix_csv(after_path), before.weights, before.beta,
                           before.theta, before.gamma};
    const LockdownReport report = partial_lockdown_check(after_spec, scenario.kernel);

    json j;
    j["perfect"] = report.perfect;
    j["partial"] = report.partial;
    if (report.constant_c)
        j["constant_C"] = *report.constant_c;
    else
        j["constant_C"] = nullptr;
    j["sup_degree_after"] = report.sup_degree_after;
    j["mean_degree_before"] = report.mean_degree_before;
    j["r0_before"] = report.r0_before;
    j["r0_after"] = report.r0_after;
    if (report.lower_bound)
        j["lower_bound"] = *report.lower_bound;
    else
        j["lower_bound"] = nullptr;
    j["upper_bound"] = report.upper_bound;
    if (report.mass_rescaled)
        j["note"] = "weights were normalized to total mass 1 for the L1 norm";
    return dump(j);
}

std::string counterexample_to_json(double alpha, std::size_t n) {
    const ChainEquilibrium eq = counterexample_equilibria(alpha, n);
    json j;
    j["alpha"] = alpha;
    j["n"] = n;
    j["residual"] = eq.residual;
    j["hit_cutoff"] = eq.hit_cutoff;
    if (eq.hit_cutoff) j["first_cutoff"] = eq.first_cutoff;
    json gelfand;
    gelfand["n"] = 10000;
    gelfand["value"] = chain_gelfand_value(10000);
    j["gelfand"] = gelfand;
    j["values"] = eq.values;
    return dump(j);
}

std::string trajectory_to_csv(const Trajectory& trajectory, bool per_atom) {
    std::string out = "t,prevalence";
    if (per_atom)
        for (std::size_t i = 1; i <= trajectory.states.front().size(); ++i)
            out += ",u_" + std::to_string(i);
    out.push_back('\n');
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        append_value(out, trajectory.times[k]);
        out.push_back(',');
        append_value(out, trajectory.prevalence[k]);
        if (per_atom)
            for (double v : trajectory.states[k]) {
                out.push_back(',');
                append_value(out, v);
            }
        out.push_back('\n');
    }
    return out;
}

SimulationSummary run_simulation(const Scenario& scenario, const std::string& out_path,
                                 bool per_atom_flag) {
    const KernelModel base = scenario_model(scenario);
    const double horizon = scenario.horizon;

    KernelModel model = base;
    std::optional<ProductModel> product;
    std::optional<MechanismVaccination> block;
    if (scenario.vaccination) {
        if (const auto* perfect = std::get_if<PerfectVaccination>(&*scenario.vaccination)) {
            model = build_perfect_vaccine_model(base, perfect->eta0);
        } else {
            block = std::get<MechanismVaccination>(*scenario.vaccination);
            product = build_vaccinated_model(base, block->vaccines, block->policy,
                                             block->mechanism);
            model = product->model;
        }
    }

    StateVector g0;
    if (product) {
        // Vaccinated individuals start uninfected; the base initial
        // condition applies to the no-vaccine slots.
        const StateVector base_init = resolve_initial_condition(scenario, base);
        g0.assign(model.size(), 0.0);
        for (std::size_t x = 0; x < product->base_atoms; ++x)
            g0[product->index(x, 0)] = base_init[x];
    } else {
        g0 = resolve_initial_condition(scenario, model);
    }

    const double dt = scenario.dt.value_or(default_time_step(model));
    Trajectory traj = integrate(model, g0, horizon, dt);
    const StateVector final_engine_state = traj.final_state();
    if (product) {
        // Report infection probabilities, not the engine's v-variable.
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            traj.states[k] = infection_from_state(*product, block->vaccines, traj.states[k]);
            traj.prevalence[k] = total_prevalence(*product, traj.states[k]);
        }
    }

    const bool per_atom = per_atom_flag || scenario.outputs.per_atom_series;
    if (scenario.outputs.prevalence_series) {
        write_text(out_path, trajectory_to_csv(traj, per_atom));
    } else {
        // series suppressed: keep only the final snapshot
        Trajectory last;
        last.times = {traj.times.back()};
        last.states = {traj.states.back()};
        last.prevalence = {traj.prevalence.back()};
        write_text(out_path, trajectory_to_csv(last, per_atom));
    }

    SimulationSummary summary;
    summary.final_prevalence = traj.prevalence.back();
    if (scenario.outputs.equilibrium) {
        const EquilibriumReport eq = maximal_equilibrium(model);
        summary.equilibrium_converged = eq.converged;
        double gap = 0.0;
        for (std::size_t i = 0; i < model.size(); ++i)
            gap = std::max(gap, std::abs(final_engine_state[i] - eq.g_star[i]));
        summary.distance_to_equilibrium = gap;
    }
    return summary;
}

} // namespace sis
