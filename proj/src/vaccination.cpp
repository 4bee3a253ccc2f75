#include "sis/vaccination.hpp"

#include <cmath>

#include "sis/errors.hpp"

namespace sis {

namespace {

void check_dimensions(const KernelModel& base, const VaccineSet& vaccines,
                      const VaccinationPolicy& policy) {
    const std::size_t n = base.size();
    const std::size_t m = vaccines.types;
    if (m == 0) throw validation_error("vaccine set must contain the no-vaccine type");
    const auto shaped = [&](const Matrix& mat) { return mat.rows() == n && mat.cols() == m; };
    if (!shaped(vaccines.efficacy) || !shaped(vaccines.infectiousness_reduction))
        throw validation_error("vaccine matrices must be n x m");
    if (!vaccines.recovery.empty() && !shaped(vaccines.recovery))
        throw validation_error("vaccine recovery matrix must be n x m");
    if (!shaped(policy.eta)) throw validation_error("policy matrix must be n x m");

    for (std::size_t x = 0; x < n; ++x) {
        if (vaccines.efficacy(x, 0) != 0.0 || vaccines.infectiousness_reduction(x, 0) != 0.0)
            throw validation_error("type 0 is the no-vaccine type and must have zero effect");
        double row = 0.0;
        for (std::size_t xi = 0; xi < m; ++xi) {
            const double e = vaccines.efficacy(x, xi);
            const double d = vaccines.infectiousness_reduction(x, xi);
            const double p = policy.eta(x, xi);
            if (e < 0.0 || e > 1.0 || d < 0.0 || d > 1.0)
                throw validation_error("vaccine parameters must lie in [0,1]");
            if (p < 0.0) throw validation_error("policy rows must be non-negative");
            if (!vaccines.recovery.empty() && vaccines.recovery(x, xi) <= 0.0)
                throw validation_error("recovery rate not positive");
            row += p;
        }
        if (std::abs(row - 1.0) > 1e-12)
            throw validation_error("policy rows must sum to 1");
    }
}

double recovery_rate(const KernelModel& base, const VaccineSet& vaccines, std::size_t x,
                     std::size_t xi) {
    return vaccines.recovery.empty() ? base.gamma[x] : vaccines.recovery(x, xi);
}

} // namespace

ProductModel build_vaccinated_model(const KernelModel& base, const VaccineSet& vaccines,
                                    const VaccinationPolicy& policy,
                                    VaccineMechanism mechanism) {
    check_dimensions(base, vaccines, policy);
    const std::size_t n = base.size();
    const std::size_t m = vaccines.types;
    const std::size_t nm = n * m;

    ProductModel product;
    product.mechanism = mechanism;
    product.base_atoms = n;
    product.types = m;
    product.eta = policy.eta;

    DiscreteSpace space;
    space.weights.resize(nm);
    std::vector<double> gamma(nm);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t xi = 0; xi < m; ++xi) {
            space.weights[x * m + xi] = base.space.weights[x] * policy.eta(x, xi);
            gamma[x * m + xi] = recovery_rate(base, vaccines, x, xi);
        }

    // Leaky: susceptibility factor (1 - e) at the target pair; the
    // all-or-nothing v-substitution moves it to the source pair.
    Matrix kappa(nm, nm);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t xi = 0; xi < m; ++xi) {
            const std::size_t row = x * m + xi;
            for (std::size_t y = 0; y < n; ++y)
                for (std::size_t zeta = 0; zeta < m; ++zeta) {
                    const double e = mechanism == VaccineMechanism::Leaky
                                         ? vaccines.efficacy(x, xi)
                                         : vaccines.efficacy(y, zeta);
                    kappa(row, y * m + zeta) = (1.0 - e) *
                                               (1.0 - vaccines.infectiousness_reduction(y, zeta)) *
                                               base.kappa(x, y) * policy.eta(y, zeta);
                }
        }

    product.model = make_kernel_model(std::move(space), std::move(kappa), std::move(gamma));
    return product;
}

namespace {

// Next-generation factor T on the product space: transmission with the
// infectiousness reduction and the source recovery time.
Matrix product_factor_t(const KernelModel& base, const VaccineSet& vaccines,
                        const VaccinationPolicy& policy) {
    const std::size_t n = base.size();
    const std::size_t m = vaccines.types;
    Matrix t(n * m, n * m);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t xi = 0; xi < m; ++xi) {
            const std::size_t row = x * m + xi;
            for (std::size_t y = 0; y < n; ++y)
                for (std::size_t zeta = 0; zeta < m; ++zeta)
                    t(row, y * m + zeta) = (1.0 - vaccines.infectiousness_reduction(y, zeta)) *
                                           base.kappa(x, y) * policy.eta(y, zeta) /
                                           recovery_rate(base, vaccines, y, zeta);
        }
    return t;
}

} // namespace

VaccinatedR0Pair r0_vaccinated_pair(const KernelModel& base, const VaccineSet& vaccines,
                                    const VaccinationPolicy& policy,
                                    const SpectralOptions& opts) {
    check_dimensions(base, vaccines, policy);
    const std::size_t n = base.size();
    const std::size_t m = vaccines.types;
    const Matrix t = product_factor_t(base, vaccines, policy);

    Matrix mt = t; // M T: susceptibility factor scales rows
    Matrix tm = t; // T M: susceptibility factor scales columns
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t xi = 0; xi < m; ++xi) {
            const std::size_t k = x * m + xi;
            const double factor = 1.0 - vaccines.efficacy(x, xi);
            for (std::size_t c = 0; c < n * m; ++c) mt(k, c) *= factor;
            for (std::size_t r = 0; r < n * m; ++r) tm(r, k) *= factor;
        }

    VaccinatedR0Pair pair;
    pair.leaky = spectral_radius(mt, opts).radius;
    pair.all_or_nothing = spectral_radius(tm, opts).radius;
    return pair;
}

double r0_vaccinated(const KernelModel& base, const VaccineSet& vaccines,
                     const VaccinationPolicy& policy, VaccineMechanism mechanism,
                     const SpectralOptions& opts) {
    const VaccinatedR0Pair pair = r0_vaccinated_pair(base, vaccines, policy, opts);
    return mechanism == VaccineMechanism::Leaky ? pair.leaky : pair.all_or_nothing;
}

KernelModel build_perfect_vaccine_model(const KernelModel& base, std::span<const double> eta0) {
    const std::size_t n = base.size();
    if (eta0.size() != n) throw validation_error("eta0 length does not match atom count");
    for (double v : eta0)
        if (v < 0.0 || v > 1.0) throw validation_error("eta0 must lie in [0,1]");
    Matrix kappa = base.kappa;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) kappa(i, j) *= eta0[j];
    return make_kernel_model(base.space, std::move(kappa), base.gamma);
}

double total_prevalence(const ProductModel& product, std::span<const double> u) {
    const std::size_t nm = product.model.size();
    if (u.size() != nm) throw validation_error("state length does not match product space");
    // Product weights already carry eta(x,xi) * mu_x.
    double infected = 0.0;
    double mass = 0.0;
    for (std::size_t k = 0; k < nm; ++k) {
        infected += u[k] * product.model.space.weights[k];
        mass += product.model.space.weights[k];
    }
    return infected / mass;
}

std::vector<double> infection_from_state(const ProductModel& product, const VaccineSet& vaccines,
                                         std::span<const double> state) {
    const std::size_t nm = product.model.size();
    if (state.size() != nm) throw validation_error("state length does not match product space");
    std::vector<double> u(state.begin(), state.end());
    if (product.mechanism == VaccineMechanism::AllOrNothing) {
        for (std::size_t x = 0; x < product.base_atoms; ++x)
            for (std::size_t xi = 0; xi < product.types; ++xi) {
                const std::size_t k = product.index(x, xi);
                u[k] *= 1.0 - vaccines.efficacy(x, xi);
            }
    }
    return u;
}

} // namespace sis
