#ifndef SIS_LOCKDOWN_HPP
#define SIS_LOCKDOWN_HPP

#include <optional>

#include "sis/matrix.hpp"
#include "sis/space_kernel.hpp"

namespace sis {

/// Degree-based reproduction bounds for a graphon-form model:
///   mean_degree / ||gamma/(beta theta)||_1  <=  R0  <=
///   ||beta theta / gamma||_inf * sup degree.
/// The L1 norm uses mu normalized to total mass 1; lower is absent when
/// beta*theta vanishes at a positive-mass atom.
struct R0Bounds {
    std::optional<double> lower;
    double upper = 0.0;
};

R0Bounds r0_bounds(const KernelSpec& spec);

/// Comparison of a contact reduction policy W' against the baseline W.
/// perfect: entrywise W' <= W. partial: sup deg_{W'} <= C * d_W with
/// C = 1/(||beta theta/gamma||_inf ||gamma/(beta theta)||_1). Either
/// predicate guarantees R0(W') <= R0(W); only the perfect one also
/// dominates trajectories.
struct LockdownReport {
    bool perfect = false;
    bool partial = false;
    std::optional<double> constant_c;
    double sup_degree_after = 0.0;
    double mean_degree_before = 0.0;
    double r0_before = 0.0;
    double r0_after = 0.0;
    std::optional<double> lower_bound; // sandwich for the after-model
    double upper_bound = 0.0;
    bool mass_rescaled = false; // non-unit total mass was normalized
};

/// True iff W_after <= W_before entrywise (tolerance 1e-12). Throws on
/// grid mismatch.
bool is_perfect_lockdown(const Matrix& w_after, const Matrix& w_before);

/// Full report for a pair of graphon-form specs on the same space.
LockdownReport partial_lockdown_check(const KernelSpec& spec_after,
                                      const KernelSpec& spec_before);

} // namespace sis

#endif
