#include "sis/kernels.hpp"

#include <cassert>
#include <cmath>
#include <cstdint>

namespace sis {

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            t(j, i) = a(i, j);
    return t;
}

double max_entry(const Matrix& a) {
    if (a.empty()) return 0.0;
    const double* p = a.data();
    double m = p[0];
    for (std::size_t k = 1; k < a.rows() * a.cols(); ++k)
        if (p[k] > m) m = p[k];
    return m;
}

double min_entry(const Matrix& a) {
    if (a.empty()) return 0.0;
    const double* p = a.data();
    double m = p[0];
    for (std::size_t k = 1; k < a.rows() * a.cols(); ++k)
        if (p[k] < m) m = p[k];
    return m;
}

double inf_norm(const Matrix& a) {
    double norm = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (double v : a.row(i)) s += std::abs(v);
        if (s > norm) norm = s;
    }
    return norm;
}

namespace {

inline double row_dot(std::span<const double> row, std::span<const double> x) {
    double acc = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * x[j];
    return acc;
}

} // namespace

void matvec_serial(const Matrix& a, std::span<const double> x, std::span<double> y) {
    assert(x.size() == a.cols() && y.size() == a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = row_dot(a.row(i), x);
}

void matvec(const Matrix& a, std::span<const double> x, std::span<double> y) {
    assert(x.size() == a.cols() && y.size() == a.rows());
    const std::int64_t n = static_cast<std::int64_t>(a.rows());
#pragma omp parallel for schedule(static) if (n > 128)
    for (std::int64_t i = 0; i < n; ++i)
        y[static_cast<std::size_t>(i)] = row_dot(a.row(static_cast<std::size_t>(i)), x);
}

namespace {

inline void matmul_row(const Matrix& a, const Matrix& b, Matrix& out, std::size_t i) {
    const std::span<double> dst = out.row(i);
    for (std::size_t j = 0; j < b.cols(); ++j) dst[j] = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        const std::span<const double> brow = b.row(k);
        for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aik * brow[j];
    }
}

} // namespace

void matmul_serial(const Matrix& a, const Matrix& b, Matrix& out) {
    assert(a.cols() == b.rows());
    out = Matrix(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) matmul_row(a, b, out, i);
}

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
    assert(a.cols() == b.rows());
    out = Matrix(a.rows(), b.cols());
    const std::int64_t n = static_cast<std::int64_t>(a.rows());
#pragma omp parallel for schedule(static) if (n > 32)
    for (std::int64_t i = 0; i < n; ++i) matmul_row(a, b, out, static_cast<std::size_t>(i));
}

} // namespace sis
