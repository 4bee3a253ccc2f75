#ifndef SIS_MATRIX_HPP
#define SIS_MATRIX_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace sis {

/// Dense row-major matrix of doubles. The only matrix type used in the
/// project; desk scale (n <= 5000) keeps dense storage simple and fast.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, value) {}

    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return values_.empty(); }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) {
        return {values_.data() + i * cols_, cols_};
    }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

Matrix transpose(const Matrix& a);

/// Largest entry (0 for an empty matrix).
double max_entry(const Matrix& a);

/// Smallest entry (0 for an empty matrix).
double min_entry(const Matrix& a);

/// Operator infinity norm: max over rows of sum of absolute entries.
double inf_norm(const Matrix& a);

} // namespace sis

#endif
