#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fuelcast {

/// Dense row-major matrix of doubles. Sizes here are small (days x fuel
/// types, or covariance blocks up to ~10x10), so no attempt is made at
/// blocking or vectorized kernels.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, value) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix identity(std::size_t n);

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    std::vector<double> col(std::size_t c) const;

    /// Copy of rows [first, first + count).
    Matrix slice_rows(std::size_t first, std::size_t count) const;

    std::span<const double> data() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace fuelcast
