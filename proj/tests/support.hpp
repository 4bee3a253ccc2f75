#ifndef SIS_TESTS_SUPPORT_HPP
#define SIS_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "sis/dynamics.hpp"
#include "sis/space_kernel.hpp"
#include "sis/spectral.hpp"

namespace sis::test {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_size(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Matrix random_nonnegative_matrix(Rng& rng, std::size_t n, double scale = 1.0) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = scale * uniform(rng, 0.0, 1.0);
    return m;
}

inline Matrix random_symmetric_graphon(Rng& rng, std::size_t n, double hi = 1.0) {
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) w(i, j) = w(j, i) = uniform(rng, 0.0, hi);
    return w;
}

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform(rng, lo, hi);
    return v;
}

inline std::vector<double> random_state(Rng& rng, std::size_t n) {
    return random_vector(rng, n, 0.0, 1.0);
}

/// Connected random model: dense positive kappa keeps the support graph
/// strongly connected. target_r0 rescales kappa so r0 lands there.
inline KernelModel random_connected_model(Rng& rng, std::size_t n, double target_r0) {
    Matrix kappa = random_nonnegative_matrix(rng, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) kappa(i, j) += 0.05; // keep it irreducible
    std::vector<double> gamma = random_vector(rng, n, 0.8, 1.5);
    std::vector<double> weights = random_vector(rng, n, 0.5, 1.5);
    KernelModel model = make_kernel_model(DiscreteSpace{std::move(weights), {}},
                                          std::move(kappa), std::move(gamma));
    const double current = r0(model);
    const double factor = target_r0 / current;
    Matrix scaled = model.kappa;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scaled(i, j) *= factor;
    return make_kernel_model(model.space, std::move(scaled), model.gamma);
}

inline double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double sup_distance(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace sis::test

#endif
