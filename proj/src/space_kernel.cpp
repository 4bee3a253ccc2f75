#include "sis/space_kernel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sis/errors.hpp"
#include "sis/kernels.hpp"

namespace sis {

double DiscreteSpace::total_mass() const {
    double total = 0.0;
    for (double w : weights) total += w;
    return total;
}

namespace {

void require(bool condition, const std::string& message) {
    if (!condition) throw validation_error(message);
}

void check_space(const DiscreteSpace& space) {
    require(space.size() >= 1, "space must contain at least one atom");
    for (double w : space.weights)
        require(w >= 0.0 && std::isfinite(w), "negative or non-finite atom weight");
    require(space.total_mass() > 0.0, "total mass must be positive");
    require(space.labels.empty() || space.labels.size() == space.size(),
            "label count does not match atom count");
}

void check_rates(const Matrix& kappa, const std::vector<double>& gamma, std::size_t n) {
    require(kappa.square() && kappa.rows() == n, "kappa must be n x n");
    require(gamma.size() == n, "gamma length does not match atom count");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            require(kappa(i, j) >= 0.0 && std::isfinite(kappa(i, j)),
                    "negative transmission rate");
    for (double g : gamma)
        require(g > 0.0 && std::isfinite(g), "recovery rate not positive");
}

std::vector<double> broadcast(double value, std::size_t n) {
    return std::vector<double>(n, value);
}

void check_unit_interval(const Matrix& w, const std::string& what) {
    for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j)
            require(w(i, j) >= 0.0 && w(i, j) <= 1.0, what + " values must lie in [0,1]");
}

void check_symmetric(const Matrix& w, const std::string& what) {
    for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = i + 1; j < w.cols(); ++j)
            require(w(i, j) == w(j, i), what + " must be symmetric");
}

void check_nonnegative(const std::vector<double>& v, const std::string& what) {
    for (double x : v) require(x >= 0.0 && std::isfinite(x), what + " must be non-negative");
}

GraphonView checked_view(GraphonView view) {
    const std::size_t n = view.weights.size();
    require(n >= 1, "graphon needs at least one atom");
    require(view.w.square() && view.w.rows() == n, "W must be n x n");
    require(view.beta.size() == n && view.theta.size() == n && view.gamma.size() == n,
            "beta/theta/gamma length does not match atom count");
    check_unit_interval(view.w, "graphon");
    check_symmetric(view.w, "graphon");
    check_nonnegative(view.beta, "beta");
    check_nonnegative(view.theta, "theta");
    check_nonnegative(view.weights, "weights");
    return view;
}

KernelModel graphon_model(const GraphonView& view) {
    const std::size_t n = view.weights.size();
    Matrix kappa(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            kappa(i, j) = view.beta[i] * view.w(i, j) * view.theta[j] * view.weights[j];
    return make_kernel_model(DiscreteSpace{view.weights, {}}, std::move(kappa), view.gamma);
}

std::vector<double> equal_weights(std::size_t n) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

} // namespace

KernelModel make_kernel_model(DiscreteSpace space, Matrix kappa, std::vector<double> gamma) {
    check_space(space);
    check_rates(kappa, gamma, space.size());

    const std::size_t n = space.size();
    KernelModel model;
    model.density = Matrix(n, n);
    model.density_defined.assign(n, true);
    for (std::size_t j = 0; j < n; ++j) {
        const double mass = space.weights[j];
        if (mass > 0.0) {
            for (std::size_t i = 0; i < n; ++i) model.density(i, j) = kappa(i, j) / mass;
        } else {
            model.density_defined[j] = false;
        }
    }
    model.space = std::move(space);
    model.kappa = std::move(kappa);
    model.gamma = std::move(gamma);
    return model;
}

bool is_graphon_form(const KernelSpec& spec) {
    return std::holds_alternative<GraphonSpec>(spec) ||
           std::holds_alternative<ConstantGraphonSpec>(spec) ||
           std::holds_alternative<SbmSpec>(spec) ||
           std::holds_alternative<GeometricSpec>(spec);
}

GraphonView graphon_view(const KernelSpec& spec) {
    if (const auto* g = std::get_if<GraphonSpec>(&spec)) {
        std::vector<double> weights =
            g->weights.empty() ? equal_weights(g->w.rows()) : g->weights;
        return checked_view({g->w, std::move(weights), g->beta, g->theta, g->gamma});
    }
    if (const auto* c = std::get_if<ConstantGraphonSpec>(&spec)) {
        require(c->n >= 1, "constant graphon needs n >= 1");
        require(c->p >= 0.0 && c->p <= 1.0, "graphon values must lie in [0,1]");
        const std::size_t n = c->n;
        std::vector<double> weights = c->weights.empty() ? equal_weights(n) : c->weights;
        require(weights.size() == n, "weights length does not match n");
        return checked_view({Matrix(n, n, c->p), std::move(weights), broadcast(c->beta, n),
                             broadcast(c->theta, n), broadcast(c->gamma, n)});
    }
    if (const auto* s = std::get_if<SbmSpec>(&spec)) {
        return checked_view({s->w, s->block_masses, s->beta, s->theta, s->gamma});
    }
    if (const auto* geo = std::get_if<GeometricSpec>(&spec)) {
        const std::size_t n = geo->f_samples.size();
        require(n >= 1, "geometric graphon needs at least one sample");
        for (std::size_t m = 0; m < n; ++m) {
            require(geo->f_samples[m] >= 0.0 && geo->f_samples[m] <= 1.0,
                    "graphon values must lie in [0,1]");
            require(geo->f_samples[m] == geo->f_samples[(n - m) % n],
                    "geometric profile must be even (f(-x) = f(x))");
        }
        Matrix w(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                w(i, j) = geo->f_samples[(i + n - j) % n];
        return checked_view({std::move(w), equal_weights(n), broadcast(geo->beta, n),
                             broadcast(geo->theta, n), broadcast(geo->gamma, n)});
    }
    throw validation_error("kernel spec is not graphon-form");
}

KernelModel build_kernel(const KernelSpec& spec) {
    if (const auto* m = std::get_if<MatrixSpec>(&spec)) {
        const std::size_t n = m->transmission.rows();
        return make_kernel_model(DiscreteSpace{std::vector<double>(n, 1.0), {}},
                                 m->transmission, m->gamma);
    }
    if (const auto* g = std::get_if<GraphSpec>(&spec)) {
        const std::size_t n = g->adjacency.rows();
        require(g->adjacency.square(), "adjacency must be square");
        require(g->beta.size() == n && g->theta.size() == n && g->gamma.size() == n,
                "beta/theta/gamma length does not match vertex count");
        check_nonnegative(g->beta, "beta");
        check_nonnegative(g->theta, "theta");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                require(g->adjacency(i, j) == 0.0 || g->adjacency(i, j) == 1.0,
                        "adjacency entries must be 0 or 1");
        check_symmetric(g->adjacency, "adjacency");
        Matrix kappa(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                kappa(i, j) = g->beta[i] * g->theta[j] * g->adjacency(i, j);
        return make_kernel_model(DiscreteSpace{std::vector<double>(n, 1.0), {}},
                                 std::move(kappa), g->gamma);
    }
    if (const auto* chain = std::get_if<CounterexampleChainSpec>(&spec)) {
        const std::size_t n = chain->n;
        require(n >= 1, "chain needs at least one atom");
        std::vector<double> weights =
            chain->weights.empty() ? std::vector<double>(n, 1.0 / static_cast<double>(n))
                                   : chain->weights;
        require(weights.size() == n, "weights length does not match n");
        Matrix kappa(n, n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double atom = static_cast<double>(i + 1); // 1-based index
            kappa(i, i + 1) = (2.0 * atom + 2.0) / (2.0 * atom - 1.0);
        }
        return make_kernel_model(DiscreteSpace{std::move(weights), {}}, std::move(kappa),
                                 std::vector<double>(n, 1.0));
    }
    return graphon_model(graphon_view(spec));
}

std::vector<double> apply_transmission(const KernelModel& model, std::span<const double> g) {
    if (g.size() != model.size())
        throw validation_error("state length does not match atom count");
    std::vector<double> result(model.size());
    matvec(model.kappa, g, result);
    return result;
}

DegreeReport degrees(const KernelSpec& spec) {
    const GraphonView view = graphon_view(spec);
    const std::size_t n = view.weights.size();
    DegreeReport report;
    report.degrees.resize(n);
    matvec(view.w, view.weights, report.degrees);
    const double total = [&] {
        double t = 0.0;
        for (double w : view.weights) t += w;
        return t;
    }();
    require(total > 0.0, "total mass must be positive");
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += report.degrees[i] * view.weights[i];
    report.mean_degree = mean / total;
    return report;
}

namespace {

// Iterative Tarjan SCC over the support graph of kappa restricted to
// positive-mass atoms. Returns the number of components.
std::size_t count_sccs(const KernelModel& model, const std::vector<std::size_t>& atoms) {
    const std::size_t n = atoms.size();
    std::vector<int> index(n, -1), lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t components = 0;
    int next_index = 0;

    std::vector<std::size_t> position(model.size(), 0);
    for (std::size_t k = 0; k < n; ++k) position[atoms[k]] = k;
    std::vector<bool> is_atom(model.size(), false);
    for (std::size_t a : atoms) is_atom[a] = true;

    struct Frame {
        std::size_t v;
        std::size_t next_col;
    };
    std::vector<Frame> call_stack;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        call_stack.push_back({root, 0});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!call_stack.empty()) {
            Frame& frame = call_stack.back();
            const std::size_t row = atoms[frame.v];
            bool descended = false;
            while (frame.next_col < model.size()) {
                const std::size_t col = frame.next_col++;
                if (!is_atom[col] || model.kappa(row, col) <= 0.0) continue;
                const std::size_t w = position[col];
                if (index[w] == -1) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call_stack.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) lowlink[frame.v] = std::min(lowlink[frame.v], index[w]);
            }
            if (descended) continue;

            const std::size_t v = frame.v;
            call_stack.pop_back();
            if (!call_stack.empty())
                lowlink[call_stack.back().v] = std::min(lowlink[call_stack.back().v], lowlink[v]);
            if (lowlink[v] == index[v]) {
                ++components;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                } while (w != v);
            }
        }
    }
    return components;
}

} // namespace

bool is_connected(const KernelModel& model) {
    std::vector<std::size_t> atoms;
    for (std::size_t i = 0; i < model.size(); ++i)
        if (model.space.weights[i] > 0.0) atoms.push_back(i);
    if (atoms.size() <= 1) return true;
    return count_sccs(model, atoms) == 1;
}

ValidationReport validate(const KernelModel& model) {
    ValidationReport report;
    const std::size_t n = model.size();
    report.gamma_min = *std::min_element(model.gamma.begin(), model.gamma.end());
    report.gamma_max = *std::max_element(model.gamma.begin(), model.gamma.end());
    for (std::size_t i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (double v : model.kappa.row(i)) row_sum += v;
        report.sup_row_sum = std::max(report.sup_row_sum, row_sum);
    }
    for (double w : model.space.weights)
        if (w == 0.0) ++report.zero_mass_atoms;

    if (report.gamma_min <= 0.0) {
        report.ok = false;
        report.errors.push_back("recovery rate not positive");
    }
    if (min_entry(model.kappa) < 0.0) {
        report.ok = false;
        report.errors.push_back("negative transmission rate");
    }
    return report;
}

// --- CSV ---------------------------------------------------------------

namespace {

double parse_number(std::string_view token, const std::string& path) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw validation_error(path + ": cannot parse numeric field '" + std::string(token) + "'");
    return value;
}

std::vector<std::vector<double>> parse_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (start <= line.size()) {
            const std::size_t comma = line.find(',', start);
            const std::size_t stop = comma == std::string::npos ? line.size() : comma;
            row.push_back(parse_number({line.data() + start, stop - start}, path));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw validation_error(path + ": empty file");
    return rows;
}

void format_value(std::string& out, double v) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    out.append(buf, static_cast<std::size_t>(len));
}

} // namespace

Matrix load_matrix_csv(const std::string& path) {
    const auto rows = parse_rows(path);
    const std::size_t cols = rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols)
            throw validation_error(path + ": ragged rows in matrix CSV");
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::vector<double> load_column_csv(const std::string& path) {
    const auto rows = parse_rows(path);
    std::vector<double> column;
    column.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != 1)
            throw validation_error(path + ": expected a single column");
        column.push_back(row.front());
    }
    return column;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::string out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out.push_back(',');
            format_value(out, m(i, j));
        }
        out.push_back('\n');
    }
    std::ofstream file(path);
    if (!file) throw validation_error("cannot write file: " + path);
    file << out;
}

void write_column_csv(const std::string& path, std::span<const double> values) {
    std::string out;
    for (double v : values) {
        format_value(out, v);
        out.push_back('\n');
    }
    std::ofstream file(path);
    if (!file) throw validation_error("cannot write file: " + path);
    file << out;
}

} // namespace sis
