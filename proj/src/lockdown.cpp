#include "sis/lockdown.hpp"

#include <algorithm>
#include <cmath>

#include "sis/errors.hpp"
#include "sis/spectral.hpp"

namespace sis {

namespace {

struct GraphonNorms {
    double sup_beta_theta_over_gamma = 0.0; // everywhere sup
    std::optional<double> l1_gamma_over_beta_theta; // mu-probability integral
    bool rescaled = false;
};

GraphonNorms graphon_norms(const GraphonView& view) {
    GraphonNorms norms;
    const std::size_t n = view.weights.size();
    double total = 0.0;
    for (double w : view.weights) total += w;
    if (total <= 0.0) throw validation_error("total mass must be positive");
    norms.rescaled = std::abs(total - 1.0) > 1e-12;

    bool lower_defined = true;
    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double bt = view.beta[i] * view.theta[i];
        if (view.gamma[i] <= 0.0) throw validation_error("recovery rate not positive");
        norms.sup_beta_theta_over_gamma =
            std::max(norms.sup_beta_theta_over_gamma, bt / view.gamma[i]);
        if (view.weights[i] <= 0.0) continue; // null set, no L1 contribution
        if (bt <= 0.0) {
            lower_defined = false;
            continue;
        }
        l1 += view.gamma[i] / bt * (view.weights[i] / total);
    }
    if (lower_defined) norms.l1_gamma_over_beta_theta = l1;
    return norms;
}

double sup_degree(const DegreeReport& report) {
    return *std::max_element(report.degrees.begin(), report.degrees.end());
}

void check_same_grid(const GraphonView& after, const GraphonView& before) {
    if (after.weights.size() != before.weights.size())
        throw validation_error("lockdown pair must live on the same grid");
    for (std::size_t i = 0; i < after.weights.size(); ++i)
        if (std::abs(after.weights[i] - before.weights[i]) > 1e-12)
            throw validation_error("lockdown pair must share atom weights");
}

} // namespace

R0Bounds r0_bounds(const KernelSpec& spec) {
    const GraphonView view = graphon_view(spec);
    const GraphonNorms norms = graphon_norms(view);
    const DegreeReport deg = degrees(spec);

    R0Bounds bounds;
    bounds.upper = norms.sup_beta_theta_over_gamma * sup_degree(deg);
    if (norms.l1_gamma_over_beta_theta && *norms.l1_gamma_over_beta_theta > 0.0)
        bounds.lower = deg.mean_degree / *norms.l1_gamma_over_beta_theta;
    return bounds;
}

bool is_perfect_lockdown(const Matrix& w_after, const Matrix& w_before) {
    if (w_after.rows() != w_before.rows() || w_after.cols() != w_before.cols())
        throw validation_error("lockdown pair must live on the same grid");
    for (std::size_t i = 0; i < w_after.rows(); ++i)
        for (std::size_t j = 0; j < w_after.cols(); ++j)
            if (w_after(i, j) > w_before(i, j) + 1e-12) return false;
    return true;
}

LockdownReport partial_lockdown_check(const KernelSpec& spec_after,
                                      const KernelSpec& spec_before) {
    const GraphonView after = graphon_view(spec_after);
    const GraphonView before = graphon_view(spec_before);
    check_same_grid(after, before);

    const GraphonNorms norms = graphon_norms(before);
    const DegreeReport deg_after = degrees(spec_after);
    const DegreeReport deg_before = degrees(spec_before);

    LockdownReport report;
    report.mass_rescaled = norms.rescaled;
    report.perfect = is_perfect_lockdown(after.w, before.w);
    report.sup_degree_after = sup_degree(deg_after);
    report.mean_degree_before = deg_before.mean_degree;

    if (norms.l1_gamma_over_beta_theta) {
        if (*norms.l1_gamma_over_beta_theta <= 0.0 || norms.sup_beta_theta_over_gamma <= 0.0)
            throw validation_error("beta*theta vanishes; lockdown constant undefined");
        report.constant_c =
            1.0 / (norms.sup_beta_theta_over_gamma * *norms.l1_gamma_over_beta_theta);
        report.partial =
            report.sup_degree_after <= *report.constant_c * report.mean_degree_before + 1e-12;
    } else {
        throw validation_error("beta*theta vanishes at a positive-mass atom; lockdown constant undefined");
    }

    report.r0_before = r0(build_kernel(spec_before));
    report.r0_after = r0(build_kernel(spec_after));

    const R0Bounds bounds_after = r0_bounds(spec_after);
    report.lower_bound = bounds_after.lower;
    report.upper_bound = bounds_after.upper;
    return report;
}

} // namespace sis
