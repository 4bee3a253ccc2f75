#ifndef SIS_KERNELS_HPP
#define SIS_KERNELS_HPP

#include <span>

#include "sis/matrix.hpp"

namespace sis {

// Dense compute kernels. Each has an OpenMP row-parallel variant (the
// default entry point) and a serial reference. Parallelism is over rows
// only and each row is accumulated in index order, so the two variants
// return bitwise-identical results for any thread count.

/// y = A x, OpenMP over rows.
void matvec(const Matrix& a, std::span<const double> x, std::span<double> y);

/// y = A x, single-threaded reference.
void matvec_serial(const Matrix& a, std::span<const double> x, std::span<double> y);

/// out = A B, OpenMP over rows of A.
void matmul(const Matrix& a, const Matrix& b, Matrix& out);

/// out = A B, single-threaded reference.
void matmul_serial(const Matrix& a, const Matrix& b, Matrix& out);

} // namespace sis

#endif
