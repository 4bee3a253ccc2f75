#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sis/dynamics.hpp"
#include "sis/errors.hpp"
#include "sis/lockdown.hpp"
#include "sis/spectral.hpp"
#include "support.hpp"

using namespace sis;

namespace {

GraphonSpec random_graphon_spec(test::Rng& rng, std::size_t n, bool constant_rates) {
    GraphonSpec spec;
    spec.w = test::random_symmetric_graphon(rng, n);
    std::vector<double> weights = test::random_vector(rng, n, 0.2, 1.0);
    double total = 0.0;
    for (double w : weights) total += w;
    for (double& w : weights) w /= total;
    spec.weights = std::move(weights);
    if (constant_rates) {
        spec.beta.assign(n, 1.0);
        spec.theta.assign(n, 1.0);
        spec.gamma.assign(n, 1.0);
    } else {
        spec.beta = test::random_vector(rng, n, 0.2, 2.0);
        spec.theta = test::random_vector(rng, n, 0.2, 2.0);
        spec.gamma = test::random_vector(rng, n, 0.5, 1.5);
    }
    return spec;
}

} // namespace

TEST_CASE("is_perfect_lockdown") {
    test::Rng rng(31);
    const Matrix w = test::random_symmetric_graphon(rng, 6);
    CHECK(is_perfect_lockdown(w, w));

    Matrix halved = w;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) halved(i, j) *= 0.5;
    CHECK(is_perfect_lockdown(halved, w));

    Matrix raised = w;
    raised(2, 3) = raised(3, 2) = std::min(1.0, w(2, 3) + 0.1);
    CHECK_FALSE(is_perfect_lockdown(raised, w));

    CHECK_THROWS_AS((void)is_perfect_lockdown(Matrix(3, 3), Matrix(4, 4)), validation_error);
}

TEST_CASE("r0_bounds") {
    SUBCASE("constant graphon is tight") {
        const ConstantGraphonSpec spec{0.5, 6, 1.0, 1.0, 1.0, {}};
        const R0Bounds bounds = r0_bounds(spec);
        REQUIRE(bounds.lower.has_value());
        CHECK(*bounds.lower == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(bounds.upper == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(r0(build_kernel(spec)) == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("geometric graphon is tight regardless of the profile") {
        const std::size_t n = 20;
        std::vector<double> f(n);
        for (std::size_t m = 0; m < n; ++m)
            f[m] = 0.5 + 0.3 * std::cos(2.0 * std::numbers::pi * static_cast<double>(m) /
                                        static_cast<double>(n));
        // restore exact evenness after rounding
        for (std::size_t m = 1; m < n / 2; ++m) f[n - m] = f[m];
        const GeometricSpec spec{f, 2.0, 1.0, 1.0};
        const R0Bounds bounds = r0_bounds(spec);
        REQUIRE(bounds.lower.has_value());
        CHECK(*bounds.lower == doctest::Approx(bounds.upper).epsilon(1e-9));
        CHECK(r0(build_kernel(spec)) == doctest::Approx(bounds.upper).epsilon(1e-9));
    }
    SUBCASE("two-block SBM by hand") {
        Matrix w(2, 2);
        w(0, 0) = 1.0; w(0, 1) = w(1, 0) = 0.2; w(1, 1) = 0.4;
        const SbmSpec spec{{0.5, 0.5}, w, {1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}};
        const R0Bounds bounds = r0_bounds(spec);
        REQUIRE(bounds.lower.has_value());
        CHECK(*bounds.lower == doctest::Approx(0.45).epsilon(1e-12));
        CHECK(bounds.upper == doctest::Approx(0.6).epsilon(1e-12));
        // 2x2 eigenproblem: kappa = [[.5,.1],[.1,.2]], radius (0.7+sqrt(0.13))/2.
        const double expected = (0.7 + std::sqrt(0.13)) / 2.0;
        const double rho = r0(build_kernel(spec));
        CHECK(rho == doctest::Approx(expected).epsilon(1e-10));
        CHECK(*bounds.lower <= rho);
        CHECK(rho <= bounds.upper);
    }
    SUBCASE("sandwich on random graphon models") {
        test::Rng rng(32);
        for (int round = 0; round < 40; ++round) {
            const std::size_t n = test::uniform_size(rng, 2, 12);
            const GraphonSpec spec = random_graphon_spec(rng, n, round % 2 == 0);
            const R0Bounds bounds = r0_bounds(spec);
            const double rho = r0(build_kernel(spec));
            REQUIRE(bounds.lower.has_value());
            CHECK(*bounds.lower <= rho + 1e-9);
            CHECK(rho <= bounds.upper + 1e-9);
        }
    }
    SUBCASE("vanishing beta*theta at positive mass leaves the lower bound empty") {
        test::Rng rng(33);
        GraphonSpec spec = random_graphon_spec(rng, 4, false);
        spec.beta[2] = 0.0;
        const R0Bounds bounds = r0_bounds(spec);
        CHECK_FALSE(bounds.lower.has_value());
        CHECK(bounds.upper >= 0.0);
    }
}

TEST_CASE("partial_lockdown_check") {
    SUBCASE("constant rates give C = 1") {
        test::Rng rng(34);
        const GraphonSpec before = random_graphon_spec(rng, 8, true);
        const LockdownReport report = partial_lockdown_check(before, before);
        REQUIRE(report.constant_c.has_value());
        CHECK(*report.constant_c == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(report.r0_after == doctest::Approx(report.r0_before).epsilon(1e-12));
        CHECK(report.perfect);
    }
    SUBCASE("beta = 2 keeps C = 1") {
        test::Rng rng(35);
        GraphonSpec before = random_graphon_spec(rng, 6, true);
        before.beta.assign(6, 2.0);
        const LockdownReport report = partial_lockdown_check(before, before);
        REQUIRE(report.constant_c.has_value());
        // ||beta theta/gamma|| = 2, ||gamma/(beta theta)||_1 = 1/2.
        CHECK(*report.constant_c == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("heterogeneous rates give C below 1") {
        test::Rng rng(36);
        const GraphonSpec before = random_graphon_spec(rng, 8, false);
        const LockdownReport report = partial_lockdown_check(before, before);
        REQUIRE(report.constant_c.has_value());
        CHECK(*report.constant_c <= 1.0 + 1e-12);
    }
    SUBCASE("perfect lockdown reduces r0 and dominates trajectories") {
        test::Rng rng(37);
        for (int round = 0; round < 15; ++round) {
            const std::size_t n = test::uniform_size(rng, 2, 8);
            const GraphonSpec before = random_graphon_spec(rng, n, false);
            GraphonSpec after = before;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j)
                    after.w(i, j) = after.w(j, i) = after.w(i, j) * test::uniform(rng, 0.3, 1.0);
            const LockdownReport report = partial_lockdown_check(after, before);
            CHECK(report.perfect);
            CHECK(report.r0_after <= report.r0_before + 1e-9);

            const KernelModel before_model = build_kernel(before);
            const KernelModel after_model = build_kernel(after);
            const StateVector g0 = test::random_state(rng, n);
            const double dt = std::min(default_time_step(before_model),
                                       default_time_step(after_model));
            const Trajectory tb = integrate(before_model, g0, 3.0, dt);
            const Trajectory ta = integrate(after_model, g0, 3.0, dt);
            for (std::size_t k = 0; k < tb.states.size(); ++k)
                for (std::size_t i = 0; i < n; ++i)
                    CHECK(ta.states[k][i] <= tb.states[k][i] + 1e-8);
        }
    }
    SUBCASE("partial but non-perfect reduction still lowers r0") {
        test::Rng rng(38);
        int hits = 0;
        for (int round = 0; round < 40; ++round) {
            const std::size_t n = test::uniform_size(rng, 2, 8);
            const GraphonSpec before = random_graphon_spec(rng, n, true);
            GraphonSpec after = before;
            // flatten to a constant level below the old mean degree:
            // entries below the level get RAISED, so this is not perfect,
            // but the degree cap still holds.
            const double level = 0.8 * degrees(before).mean_degree;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) after.w(i, j) = level;
            const LockdownReport report = partial_lockdown_check(after, before);
            REQUIRE(report.partial);
            if (!report.perfect) ++hits;
            CHECK(report.r0_after <= report.r0_before + 1e-9);
        }
        CHECK(hits > 0);
    }
    SUBCASE("grid mismatch and degenerate rates") {
        test::Rng rng(39);
        const GraphonSpec a = random_graphon_spec(rng, 4, true);
        const GraphonSpec b = random_graphon_spec(rng, 5, true);
        CHECK_THROWS_AS((void)partial_lockdown_check(a, b), validation_error);

        GraphonSpec degenerate = a;
        degenerate.beta[1] = 0.0;
        CHECK_THROWS_AS((void)partial_lockdown_check(degenerate, degenerate),
                        validation_error);
    }
}

TEST_CASE("constant degree minimizes r0 at fixed mean degree") {
    test::Rng rng(40);
    const double p = 0.3;
    const ConstantGraphonSpec constant{p, 8, 1.0, 1.0, 1.0, {}};
    const double baseline = r0(build_kernel(constant));
    CHECK(baseline == doctest::Approx(p).epsilon(1e-10));
    for (int round = 0; round < 25; ++round) {
        const std::size_t n = test::uniform_size(rng, 2, 10);
        GraphonSpec spec = random_graphon_spec(rng, n, true);
        // normalize W to mean degree p
        const double mean = degrees(spec).mean_degree;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                spec.w(i, j) = std::min(1.0, spec.w(i, j) * p / mean);
        if (degrees(spec).mean_degree < p - 1e-12) continue; // clipped too hard
        CHECK(r0(build_kernel(spec)) >= p - 1e-9);
    }
}
