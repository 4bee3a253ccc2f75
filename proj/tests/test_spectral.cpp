#include <doctest.h>

#include <cmath>

#include "sis/errors.hpp"
#include "sis/kernels.hpp"
#include "sis/spectral.hpp"
#include "support.hpp"

using namespace sis;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

const double kRoot6 = std::sqrt(6.0);

KernelModel one_group(double k, double gamma) {
    return build_kernel(MatrixSpec{Matrix(1, 1, k), {gamma}});
}

} // namespace

TEST_CASE("spectral_radius on closed-form matrices") {
    SUBCASE("identity") {
        Matrix eye(3, 3);
        for (std::size_t i = 0; i < 3; ++i) eye(i, i) = 1.0;
        const SpectralResult r = spectral_radius(eye);
        CHECK(r.radius == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.certified);
        CHECK(r.cw_lower <= r.radius);
        CHECK(r.radius <= r.cw_upper);
    }
    SUBCASE("swap matrix has radius 2") {
        const SpectralResult r = spectral_radius(from_rows({{0.0, 2.0}, {2.0, 0.0}}));
        CHECK(r.radius == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(r.certified);
    }
    SUBCASE("2x2 with radius 1 + sqrt 6") {
        const SpectralResult r = spectral_radius(from_rows({{1.0, 2.0}, {3.0, 1.0}}));
        CHECK(r.radius == doctest::Approx(1.0 + kRoot6).epsilon(1e-11));
        CHECK(r.certified);
        CHECK(r.cw_upper - r.cw_lower <= 1e-10 * (1.0 + kRoot6) * 1.01);
    }
    SUBCASE("zero matrix") {
        const SpectralResult r = spectral_radius(Matrix(4, 4));
        CHECK(r.radius == doctest::Approx(0.0));
        CHECK(r.certified);
    }
    SUBCASE("nilpotent chain falls back with exact zero") {
        const KernelModel chain = build_kernel(CounterexampleChainSpec{8, {}});
        const SpectralResult r = spectral_radius(chain.kappa);
        CHECK(r.radius == 0.0);
        CHECK_FALSE(r.certified);
        CHECK(!r.note.empty());
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS((void)spectral_radius(from_rows({{1.0, -0.5}, {0.0, 1.0}})),
                        validation_error);
        CHECK_THROWS_AS((void)spectral_radius(Matrix(2, 3)), validation_error);
    }
}

TEST_CASE("reducible block-diagonal radius via fallback") {
    // diag blocks with radii 2 and 1; power iteration cannot certify.
    Matrix a(4, 4);
    a(0, 1) = a(1, 0) = 2.0;
    a(2, 3) = a(3, 2) = 1.0;
    const SpectralResult r = spectral_radius(a);
    CHECK(r.radius == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_FALSE(r.certified);
}

TEST_CASE("slow spectral gap certifies eventually") {
    // irreducible with gap ratio ~0.995: thousands of iterations, but
    // the bracket still contracts geometrically
    const double eps = 1e-6;
    Matrix a(2, 2);
    a(0, 0) = 2.0; a(0, 1) = eps;
    a(1, 0) = eps; a(1, 1) = 1.99;
    const double trace = a(0, 0) + a(1, 1);
    const double det = a(0, 0) * a(1, 1) - eps * eps;
    const double expected = 0.5 * (trace + std::sqrt(trace * trace - 4.0 * det));
    const SpectralResult r = spectral_radius(a);
    CHECK(r.radius == doctest::Approx(expected).epsilon(1e-10));
    CHECK(r.certified);
}

TEST_CASE("near-degenerate gap falls back to Gelfand squaring and stays accurate") {
    // gap ratio ~0.99995: the bracket decays sub-geometrically within
    // the checkpoint window, so repeated squaring carries the result
    const double eps = 1e-8;
    Matrix a(2, 2);
    a(0, 0) = 2.0; a(0, 1) = eps;
    a(1, 0) = eps; a(1, 1) = 1.9999;
    const double trace = a(0, 0) + a(1, 1);
    const double det = a(0, 0) * a(1, 1) - eps * eps;
    const double expected = 0.5 * (trace + std::sqrt(trace * trace - 4.0 * det));
    const SpectralResult r = spectral_radius(a);
    CHECK(r.radius == doctest::Approx(expected).epsilon(1e-9));
    CHECK_FALSE(r.certified);
    CHECK(r.cw_lower <= expected + 1e-12);
    CHECK(expected <= r.cw_upper + 1e-12);
}

TEST_CASE("r0 values") {
    CHECK(r0(one_group(2.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r0(build_kernel(ConstantGraphonSpec{0.5, 8, 1.0, 1.0, 1.0, {}})) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r0(build_kernel(MatrixSpec{from_rows({{1.0, 2.0}, {3.0, 1.0}}), {1.0, 1.0}})) ==
          doctest::Approx(1.0 + kRoot6).epsilon(1e-11));
    // gamma scales columns of the next-generation matrix.
    CHECK(r0(one_group(2.0, 4.0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("r0_effective") {
    const KernelModel model = one_group(2.0, 1.0);
    CHECK(r0_effective(model, std::vector<double>{1.0}) == doctest::Approx(2.0));
    CHECK(r0_effective(model, std::vector<double>{0.0}) == doctest::Approx(0.0));
    CHECK(r0_effective(model, std::vector<double>{0.5}) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)r0_effective(model, std::vector<double>{1.5}), validation_error);

    SUBCASE("equals r0 at the all-ones state") {
        test::Rng rng(88);
        for (int round = 0; round < 10; ++round) {
            const KernelModel m = test::random_connected_model(rng, 6, 1.7);
            CHECK(r0_effective(m, std::vector<double>(6, 1.0)) ==
                  doctest::Approx(r0(m)).epsilon(1e-9));
        }
    }
    SUBCASE("monotone in g") {
        test::Rng rng(89);
        for (int round = 0; round < 40; ++round) {
            const std::size_t n = test::uniform_size(rng, 2, 10);
            const KernelModel m = test::random_connected_model(rng, n, 2.0);
            std::vector<double> g = test::random_state(rng, n);
            std::vector<double> h = g;
            for (std::size_t i = 0; i < n; ++i)
                h[i] = std::min(1.0, h[i] + test::uniform(rng, 0.0, 1.0 - h[i]));
            CHECK(r0_effective(m, g) <= r0_effective(m, h) + 1e-9);
        }
    }
}

TEST_CASE("spectral_bound values") {
    CHECK(spectral_bound(one_group(2.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spectral_bound(one_group(0.5, 1.0)) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(spectral_bound(build_kernel(MatrixSpec{from_rows({{1.0, 2.0}, {3.0, 1.0}}),
                                                 {1.0, 1.0}})) ==
          doctest::Approx(kRoot6).epsilon(1e-10));
}

TEST_CASE("sign equivalence of spectral bound and r0 - 1") {
    test::Rng rng(90);
    for (int round = 0; round < 60; ++round) {
        const std::size_t n = test::uniform_size(rng, 2, 12);
        const double target = test::uniform(rng, 0.3, 3.0);
        const KernelModel m = test::random_connected_model(rng, n, target);
        const double s = spectral_bound(m);
        const double gap = r0(m) - 1.0;
        if (std::abs(s) <= 1e-8 || std::abs(gap) <= 1e-8) continue;
        CHECK(std::signbit(s) == std::signbit(gap));
    }
}

TEST_CASE("spectral bound upper estimate from r0") {
    // s(T - gamma) <= max(||gamma|| (R0 - 1), 0) + 1e-9
    test::Rng rng(91);
    for (int round = 0; round < 60; ++round) {
        const std::size_t n = test::uniform_size(rng, 2, 12);
        const KernelModel m = test::random_connected_model(rng, n, test::uniform(rng, 0.2, 3.0));
        double gamma_sup = 0.0;
        for (double g : m.gamma) gamma_sup = std::max(gamma_sup, g);
        CHECK(spectral_bound(m) <= std::max(gamma_sup * (r0(m) - 1.0), 0.0) + 1e-9);
    }
}

TEST_CASE("spectral radius monotone in the matrix") {
    test::Rng rng(92);
    for (int round = 0; round < 60; ++round) {
        const std::size_t n = test::uniform_size(rng, 1, 10);
        const Matrix a = test::random_nonnegative_matrix(rng, n);
        Matrix b = a;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) b(i, j) += test::uniform(rng, 0.0, 0.5);
        CHECK(spectral_radius(a).radius <= spectral_radius(b).radius + 1e-9);
    }
}

TEST_CASE("Collatz-Wielandt bracketing at arbitrary positive states") {
    test::Rng rng(93);
    for (int round = 0; round < 60; ++round) {
        const std::size_t n = test::uniform_size(rng, 2, 10);
        const KernelModel m = test::random_connected_model(rng, n, test::uniform(rng, 0.5, 2.5));
        const Matrix ngm = next_generation_matrix(m);
        const std::vector<double> x = test::random_vector(rng, n, 0.05, 2.0);
        std::vector<double> mx(n);
        matvec(ngm, x, mx);
        double lo = mx[0] / x[0], hi = lo;
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, mx[i] / x[i]);
            hi = std::max(hi, mx[i] / x[i]);
        }
        const double rho = r0(m);
        CHECK(lo <= rho + 1e-9);
        CHECK(rho <= hi + 1e-9);
    }
}

TEST_CASE("perron_vectors") {
    SUBCASE("constant row sums give the flat vector") {
        const KernelModel model = build_kernel(ConstantGraphonSpec{0.6, 5, 1.0, 1.0, 1.0, {}});
        const SpectralResult r = perron_vectors(model);
        for (double v : r.right_vector) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.certified);
    }
    SUBCASE("symmetric swap kernel") {
        const KernelModel model =
            build_kernel(MatrixSpec{from_rows({{0.0, 2.0}, {2.0, 0.0}}), {1.0, 1.0}});
        const SpectralResult r = perron_vectors(model);
        CHECK(r.right_vector[0] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.right_vector[1] == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("hand-solved 2x2 eigenvector") {
        const KernelModel model =
            build_kernel(MatrixSpec{from_rows({{1.0, 2.0}, {3.0, 1.0}}), {1.0, 1.0}});
        const SpectralResult r = perron_vectors(model);
        // (1 - rho) x + 2 y = 0 with rho = 1 + sqrt6: x/y = 2/sqrt6.
        CHECK(r.right_vector[1] == doctest::Approx(1.0));
        CHECK(r.right_vector[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-9));
        // left vector normalized against the right one
        double dot = 0.0;
        for (std::size_t i = 0; i < 2; ++i) dot += r.left_vector[i] * r.right_vector[i];
        CHECK(dot == doctest::Approx(1.0).epsilon(1e-12));
        // left Perron vector of the same matrix: swap the roles of 2 and 3.
        CHECK(r.left_vector[0] / r.left_vector[1] ==
              doctest::Approx(std::sqrt(3.0 / 2.0)).epsilon(1e-9));
    }
    SUBCASE("eigen residuals are small") {
        test::Rng rng(94);
        for (int round = 0; round < 15; ++round) {
            const std::size_t n = test::uniform_size(rng, 2, 15);
            const KernelModel m = test::random_connected_model(rng, n, 1.5);
            const SpectralResult r = perron_vectors(m);
            const Matrix ngm = next_generation_matrix(m);
            std::vector<double> mx(n);
            matvec(ngm, r.right_vector, mx);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(mx[i] == doctest::Approx(r.radius * r.right_vector[i]).epsilon(1e-7));
            for (double v : r.right_vector) CHECK(v > 0.0);
        }
    }
    SUBCASE("disconnected model is flagged") {
        Matrix kappa(4, 4);
        kappa(0, 1) = kappa(1, 0) = 2.0;
        kappa(2, 3) = kappa(3, 2) = 1.0;
        const KernelModel model = make_kernel_model(
            DiscreteSpace{std::vector<double>(4, 1.0), {}}, kappa, std::vector<double>(4, 1.0));
        const SpectralResult r = perron_vectors(model);
        CHECK_FALSE(r.certified);
        CHECK(!r.note.empty());
    }
    SUBCASE("zero radius has no Perron vector") {
        const KernelModel chain = build_kernel(CounterexampleChainSpec{4, {}});
        CHECK_THROWS_AS((void)perron_vectors(chain), convergence_error);
    }
}

TEST_CASE("eigen_threshold") {
    SUBCASE("one group closed form") {
        const ThresholdEigenpair pair = eigen_threshold(one_group(2.0, 1.0), 0.1);
        CHECK(pair.lambda == doctest::Approx(0.8).epsilon(1e-9));
        CHECK(pair.w[0] == doctest::Approx(0.05).epsilon(1e-12));
        CHECK(pair.residual <= 1e-8);
    }
    SUBCASE("lambda approaches the spectral bound as eps vanishes") {
        const KernelModel model = one_group(2.0, 1.0);
        const double s = spectral_bound(model);
        double previous_gap = 1e9;
        for (double eps : {0.2, 0.05, 0.01, 0.001}) {
            const double gap = std::abs(eigen_threshold(model, eps).lambda - s);
            CHECK(gap < previous_gap + 1e-12);
            previous_gap = gap;
        }
        CHECK(previous_gap < 5e-3);
    }
    SUBCASE("homogeneous gamma reduces to a scalar equation") {
        const KernelModel model =
            build_kernel(MatrixSpec{from_rows({{1.0, 2.0}, {3.0, 1.0}}), {1.0, 1.0}});
        const ThresholdEigenpair pair = eigen_threshold(model, 0.05);
        CHECK(pair.lambda ==
              doctest::Approx(0.95 * (1.0 + kRoot6) - 1.0).epsilon(1e-8));
        CHECK(pair.residual <= 1e-8);
    }
    SUBCASE("residual identity holds on random supercritical models") {
        test::Rng rng(95);
        for (int round = 0; round < 15; ++round) {
            const std::size_t n = test::uniform_size(rng, 2, 12);
            const KernelModel m = test::random_connected_model(rng, n, 2.0);
            const double eps = test::uniform(rng, 0.01, 0.3);
            const ThresholdEigenpair pair = eigen_threshold(m, eps);
            CHECK(pair.residual <= 1e-8);
            CHECK(pair.lambda > 0.0);
            CHECK(test::sup_norm(pair.w) == doctest::Approx(eps / 2.0));
        }
    }
    SUBCASE("subcritical model is rejected") {
        CHECK_THROWS_AS((void)eigen_threshold(one_group(0.5, 1.0), 0.1), convergence_error);
        // supercritical but not at this eps: (1-eps) * 1.25 < 1
        CHECK_THROWS_AS((void)eigen_threshold(one_group(1.25, 1.0), 0.5), convergence_error);
    }
}

TEST_CASE("chain Gelfand sequence") {
    CHECK(chain_gelfand_value(1) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(chain_gelfand_value(2) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-14));

    SUBCASE("matches the exact factorial product in log space") {
        // prod_{i<=n} (2i+2)/(2i-1) = 4^n n! (n+1)! / (2n)!
        for (std::size_t n : {1, 2, 5, 10, 100, 1000, 10000}) {
            const double nd = static_cast<double>(n);
            const double log_product = nd * std::log(4.0) + std::lgamma(nd + 1.0) +
                                       std::lgamma(nd + 2.0) - std::lgamma(2.0 * nd + 1.0);
            CHECK(chain_gelfand_value(n) ==
                  doctest::Approx(std::exp(log_product / nd)).epsilon(1e-11));
        }
    }
    SUBCASE("decreases towards 1") {
        double previous = chain_gelfand_value(1);
        for (std::size_t n : {2, 4, 8, 64, 512, 4096, 10000}) {
            const double value = chain_gelfand_value(n);
            CHECK(value < previous);
            CHECK(value > 1.0);
            previous = value;
        }
        CHECK(previous < 1.01);
    }
}
