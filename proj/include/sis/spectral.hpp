#ifndef SIS_SPECTRAL_HPP
#define SIS_SPECTRAL_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "sis/matrix.hpp"
#include "sis/space_kernel.hpp"

namespace sis {

/// Certified spectral radius of a non-negative matrix.
///
/// When certified, the Collatz-Wielandt bracket [cw_lower, cw_upper]
/// encloses both the reported radius and the true one. Reducible inputs
/// fall back to Gelfand repeated squaring and report certified = false.
struct SpectralResult {
    double radius = 0.0;
    std::vector<double> right_vector; // non-negative, sup-norm 1
    std::vector<double> left_vector;  // empty unless requested; <left,right> = 1
    double cw_lower = 0.0;
    double cw_upper = 0.0;
    std::size_t iterations = 0;
    bool certified = false;
    std::string note; // non-empty on fallback or warnings
};

struct SpectralOptions {
    double tol = 1e-10;                  // bracket width <= tol * max(1, radius)
    std::size_t max_iterations = 1000000;
};

/// Power iteration with a diagonal shift and running Collatz-Wielandt
/// bounds. Throws validation_error for negative entries or a non-square
/// matrix.
SpectralResult spectral_radius(const Matrix& a, const SpectralOptions& opts = {});

/// Next-generation matrix M(i,j) = kappa(i,j) / gamma(j).
Matrix next_generation_matrix(const KernelModel& model);

/// Basic reproduction number r(M) of the next-generation matrix.
double r0(const KernelModel& model, const SpectralOptions& opts = {});

/// Spectral radius of diag(g) * M for g in [0,1]^n; equals r0 at g = 1.
double r0_effective(const KernelModel& model, std::span<const double> g,
                    const SpectralOptions& opts = {});

/// Spectral bound s(T - gamma), computed from the radius of the
/// entrywise non-negative shift kappa - diag(gamma) + ||gamma||_inf I.
double spectral_bound(const KernelModel& model, const SpectralOptions& opts = {});

/// Right and left Perron vectors of the next-generation matrix. If the
/// model is not connected the vectors need not be unique; the result is
/// then marked certified = false with a note. Throws convergence_error
/// when the radius vanishes (no Perron vector).
SpectralResult perron_vectors(const KernelModel& model, const SpectralOptions& opts = {});

/// Positive eigenpair (1 - eps) T(w) = (gamma + lambda) w with
/// ||w||_inf = eps/2, obtained by bisecting a |-> r(T_{(1-eps)k/(gamma+a)}).
struct ThresholdEigenpair {
    double epsilon = 0.0;
    double lambda = 0.0;
    std::vector<double> w;
    double residual = 0.0; // ||(1-eps) T(w) - (gamma+lambda) w||_inf
};

/// Requires the model to be supercritical at level eps, i.e.
/// (1-eps) * r0 > 1; throws convergence_error("not supercritical at
/// level eps") otherwise.
ThresholdEigenpair eigen_threshold(const KernelModel& model, double epsilon);

/// n-th Gelfand term (prod_{i=1..n} (2i+2)/(2i-1))^{1/n} of the infinite
/// chain operator, accumulated in log space. Tends to 1 from above,
/// which is the chain's reproduction number; the nilpotent truncation
/// carries no trace of it.
double chain_gelfand_value(std::size_t n);

} // namespace sis

#endif
