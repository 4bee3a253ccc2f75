#ifndef SIS_VACCINATION_HPP
#define SIS_VACCINATION_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "sis/matrix.hpp"
#include "sis/space_kernel.hpp"
#include "sis/spectral.hpp"

namespace sis {

/// Vaccine catalog over m types. Column 0 is the no-vaccine type: its
/// efficacy and infectiousness reduction are identically zero. recovery
/// may be empty, in which case the base model's gamma applies to every
/// type.
struct VaccineSet {
    std::size_t types = 0;
    Matrix efficacy;                  // n x m, e(x, xi) in [0,1]
    Matrix infectiousness_reduction;  // n x m, delta(x, xi) in [0,1]
    Matrix recovery;                  // n x m positive, or empty
};

/// Row-stochastic allocation: probability that atom x receives type xi.
struct VaccinationPolicy {
    Matrix eta; // n x m, rows sum to 1
};

enum class VaccineMechanism { Leaky, AllOrNothing };

/// Kernel model on the product space of (atom, vaccine type) pairs, with
/// product weights mu_x * eta(x, xi). Atoms with eta = 0 are kept at
/// zero mass so indexing stays rectangular. For the all-or-nothing
/// mechanism the state variable is the v-substitution v = u / (1-e);
/// both mechanisms then evolve inside Delta under the generic engine.
struct ProductModel {
    KernelModel model;
    VaccineMechanism mechanism = VaccineMechanism::Leaky;
    std::size_t base_atoms = 0;
    std::size_t types = 0;
    Matrix eta;

    std::size_t index(std::size_t atom, std::size_t type) const {
        return atom * types + type;
    }
};

ProductModel build_vaccinated_model(const KernelModel& base, const VaccineSet& vaccines,
                                    const VaccinationPolicy& policy,
                                    VaccineMechanism mechanism);

/// Reproduction number of the vaccinated model from the factor pair
/// T (transmission, infectiousness reduction and recovery) and M
/// (susceptibility reduction): r(TM) for all-or-nothing, r(MT) for
/// leaky. The two agree; see r0_vaccinated_pair to observe both.
double r0_vaccinated(const KernelModel& base, const VaccineSet& vaccines,
                     const VaccinationPolicy& policy, VaccineMechanism mechanism,
                     const SpectralOptions& opts = {});

struct VaccinatedR0Pair {
    double leaky = 0.0;
    double all_or_nothing = 0.0;
};

VaccinatedR0Pair r0_vaccinated_pair(const KernelModel& base, const VaccineSet& vaccines,
                                    const VaccinationPolicy& policy,
                                    const SpectralOptions& opts = {});

/// Fully immunizing vaccine: only the kernel column scaling by the
/// unvaccinated fraction eta0 survives. The result is a plain
/// KernelModel usable by every other module.
KernelModel build_perfect_vaccine_model(const KernelModel& base, std::span<const double> eta0);

/// Population share infected: sum u(x,xi) eta(x,xi) mu_x / total mass.
/// For all-or-nothing product models pass the u-variable (see
/// infection_from_state).
double total_prevalence(const ProductModel& product, std::span<const double> u);

/// Maps the engine state of a product model to infection probabilities:
/// identity for leaky, u = (1-e) v for all-or-nothing.
std::vector<double> infection_from_state(const ProductModel& product, const VaccineSet& vaccines,
                                         std::span<const double> state);

} // namespace sis

#endif
