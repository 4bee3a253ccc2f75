// Timing comparison between the OpenMP compute kernels and the serial
// reference, plus an integration throughput figure. The two variants
// must agree bitwise; the benchmark aborts if they do not.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "sis/dynamics.hpp"
#include "sis/kernels.hpp"
#include "sis/space_kernel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

sis::Matrix random_matrix(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    sis::Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = dist(rng);
    return m;
}

void bench_matvec(std::size_t n, std::mt19937_64& rng) {
    const sis::Matrix a = random_matrix(n, rng);
    std::vector<double> x(n, 1.0), y_serial(n), y_omp(n);
    const std::size_t reps = std::max<std::size_t>(1, 200000000 / (n * n));

    auto t0 = clock_type::now();
    for (std::size_t r = 0; r < reps; ++r) sis::matvec_serial(a, x, y_serial);
    const double serial = seconds_since(t0);

    t0 = clock_type::now();
    for (std::size_t r = 0; r < reps; ++r) sis::matvec(a, x, y_omp);
    const double parallel = seconds_since(t0);

    if (y_serial != y_omp) {
        std::fprintf(stderr, "matvec mismatch at n=%zu\n", n);
        std::exit(1);
    }
    const double flops = 2.0 * static_cast<double>(n) * static_cast<double>(n) *
                         static_cast<double>(reps);
    std::printf("matvec  n=%5zu  serial %8.3f ms  omp %8.3f ms  speedup %5.2fx  (%.2f GFLOP/s omp)\n",
                n, 1e3 * serial / reps, 1e3 * parallel / reps, serial / parallel,
                flops / parallel * 1e-9);
}

void bench_matmul(std::size_t n, std::mt19937_64& rng) {
    const sis::Matrix a = random_matrix(n, rng);
    const sis::Matrix b = random_matrix(n, rng);
    sis::Matrix out_serial, out_omp;

    auto t0 = clock_type::now();
    sis::matmul_serial(a, b, out_serial);
    const double serial = seconds_since(t0);

    t0 = clock_type::now();
    sis::matmul(a, b, out_omp);
    const double parallel = seconds_since(t0);

    if (out_serial != out_omp) {
        std::fprintf(stderr, "matmul mismatch at n=%zu\n", n);
        std::exit(1);
    }
    std::printf("matmul  n=%5zu  serial %8.3f ms  omp %8.3f ms  speedup %5.2fx\n", n,
                1e3 * serial, 1e3 * parallel, serial / parallel);
}

void bench_integrate(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    sis::Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) w(i, j) = w(j, i) = dist(rng);
    sis::GraphonSpec spec{std::move(w), {}, std::vector<double>(n, 1.0),
                          std::vector<double>(n, 1.0), std::vector<double>(n, 1.0)};
    const sis::KernelModel model = sis::build_kernel(spec);

    const auto t0 = clock_type::now();
    const sis::Trajectory traj = sis::integrate(model, sis::StateVector(n, 0.5), 10.0);
    const double elapsed = seconds_since(t0);
    std::printf("rk4     n=%5zu  %zu steps in %8.3f ms  (%.1f steps/ms)\n", n,
                traj.times.size() - 1, 1e3 * elapsed,
                static_cast<double>(traj.times.size() - 1) / (1e3 * elapsed));
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not available; both variants run serially\n");
#endif
    std::mt19937_64 rng(20240615);
    for (std::size_t n : {256, 512, 1024, 2048}) bench_matvec(n, rng);
    for (std::size_t n : {256, 512, 1024}) bench_matmul(n, rng);
    for (std::size_t n : {128, 512}) bench_integrate(n, rng);
    return 0;
}
