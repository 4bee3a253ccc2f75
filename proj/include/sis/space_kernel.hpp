#ifndef SIS_SPACE_KERNEL_HPP
#define SIS_SPACE_KERNEL_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sis/matrix.hpp"

namespace sis {

/// Weighted finite feature set: atom i carries population mass weights[i].
/// Atoms with zero mass are allowed; the total mass must be positive.
struct DiscreteSpace {
    std::vector<double> weights;
    std::vector<std::string> labels; // empty = unnamed atoms

    std::size_t size() const { return weights.size(); }
    double total_mass() const;
};

/// Transmission model on a DiscreteSpace: kappa(i,j) is the transmission
/// rate onto atom i from the population at atom j, gamma(i) the recovery
/// rate of atom i. density(i,j) = kappa(i,j)/weights[j] where defined;
/// columns with zero mass are flagged in density_defined.
///
/// Immutable after construction; safe to share across threads.
struct KernelModel {
    DiscreteSpace space;
    Matrix kappa;
    std::vector<double> gamma;
    Matrix density;
    std::vector<bool> density_defined;

    std::size_t size() const { return space.size(); }
};

/// Validates invariants (kappa >= 0 square, gamma > 0, sizes agree,
/// total mass > 0) and fills the density fields.
KernelModel make_kernel_model(DiscreteSpace space, Matrix kappa, std::vector<double> gamma);

// --- Kernel families --------------------------------------------------

/// Raw finite-group model: kappa = K on atoms with unit weights
/// (counting measure).
struct MatrixSpec {
    Matrix transmission;
    std::vector<double> gamma;
};

/// Contact-graph model: kappa(i,j) = beta_i * theta_j * adjacency(i,j),
/// unit weights. Adjacency entries must be 0/1 and symmetric.
struct GraphSpec {
    Matrix adjacency;
    std::vector<double> beta;
    std::vector<double> theta;
    std::vector<double> gamma;
};

/// Graphon model sampled on the atom grid:
/// kappa(i,j) = beta_i * W(i,j) * theta_j * weights_j.
/// W must be symmetric with values in [0,1]. No interpolation is done;
/// discretization fidelity is the caller's responsibility.
struct GraphonSpec {
    Matrix w;
    std::vector<double> weights;
    std::vector<double> beta;
    std::vector<double> theta;
    std::vector<double> gamma;
};

/// Graphon with W constant equal to p; equal weights summing to 1 unless
/// weights are supplied.
struct ConstantGraphonSpec {
    double p = 0.0;
    std::size_t n = 0;
    double beta = 1.0;
    double theta = 1.0;
    double gamma = 1.0;
    std::vector<double> weights; // optional, size n
};

/// Stochastic block model: one atom per block, weights = block masses,
/// W the block contact matrix, scalar parameters per block.
struct SbmSpec {
    std::vector<double> block_masses;
    Matrix w;
    std::vector<double> beta;
    std::vector<double> theta;
    std::vector<double> gamma;
};

/// Geometric (circulant) graphon on the circle. Atoms sit at the midpoint
/// grid x_i = 2*pi*(i - 1/2)/n with equal weights 1/n. f_samples[m] holds
/// the contact profile at offset 2*pi*m/n, so W(i,j) = f_samples[(i-j) mod n].
/// Symmetry requires f_samples[m] == f_samples[(n-m) mod n].
struct GeometricSpec {
    std::vector<double> f_samples;
    double beta = 1.0;
    double theta = 1.0;
    double gamma = 1.0;
};

/// Truncation of the upper-triangular chain kernel kappa(i,{i+1}) =
/// (2i+2)/(2i-1), gamma = 1. Truncation makes the matrix nilpotent, so
/// its spectral radius says nothing about the infinite chain; see
/// chain_gelfand_value in the spectral module.
struct CounterexampleChainSpec {
    std::size_t n = 0;
    std::vector<double> weights; // optional; default uniform 1/n
};

using KernelSpec = std::variant<MatrixSpec, GraphSpec, GraphonSpec, ConstantGraphonSpec,
                                SbmSpec, GeometricSpec, CounterexampleChainSpec>;

/// True for the families built from a graphon (Graphon, ConstantGraphon,
/// SBM, Geometric); those support degrees() and the lockdown analyses.
bool is_graphon_form(const KernelSpec& spec);

/// Uniform per-atom view of a graphon-form spec.
struct GraphonView {
    Matrix w;
    std::vector<double> weights;
    std::vector<double> beta;
    std::vector<double> theta;
    std::vector<double> gamma;
};

/// Expands a graphon-form spec to per-atom arrays. Throws validation_error
/// for non-graphon specs.
GraphonView graphon_view(const KernelSpec& spec);

/// Builds the KernelModel for any kernel family, validating the spec.
KernelModel build_kernel(const KernelSpec& spec);

// --- Operations --------------------------------------------------------

/// Transmission operator: result[i] = sum_j kappa(i,j) * g[j].
/// Row-parallel, deterministic.
std::vector<double> apply_transmission(const KernelModel& model, std::span<const double> g);

/// Per-atom degree deg(i) = sum_j W(i,j) * weights_j and the mean degree
/// d = sum_i deg(i) * weights_i / total mass.
struct DegreeReport {
    std::vector<double> degrees;
    double mean_degree = 0.0;
};

/// Degrees of a graphon-form spec. Throws validation_error otherwise.
DegreeReport degrees(const KernelSpec& spec);

/// Connectivity in the sense of irreducibility: the directed support
/// graph (edge i -> j iff kappa(i,j) > 0) restricted to positive-mass
/// atoms is strongly connected. Implemented with Tarjan's SCC search.
bool is_connected(const KernelModel& model);

struct ValidationReport {
    bool ok = true;
    double gamma_min = 0.0;
    double gamma_max = 0.0;
    double sup_row_sum = 0.0; // sup_i sum_j kappa(i,j)
    std::size_t zero_mass_atoms = 0;
    std::vector<std::string> errors;
};

/// Reports rate ranges and flags violations (gamma <= 0, kappa < 0)
/// without throwing.
ValidationReport validate(const KernelModel& model);

// --- CSV interfaces ----------------------------------------------------
// All file parsing for kernel data lives here. Matrices are dense CSV
// (one row per atom, comma-separated non-negative reals); weights and
// gamma are single-column CSV. Values are written with enough digits to
// round-trip exactly.

Matrix load_matrix_csv(const std::string& path);
std::vector<double> load_column_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);
void write_column_csv(const std::string& path, std::span<const double> values);

} // namespace sis

#endif
