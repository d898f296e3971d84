#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smartfog {

// Row-major dense matrix of doubles.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double> column(std::size_t c) const;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    DenseMatrix vectors;         // column j pairs with values[j]
    int sweeps = 0;
};

struct JacobiOptions {
    double off_diagonal_tolerance = 1e-10;
    int max_sweeps = 100;
};

// Cyclic Jacobi rotations for a dense symmetric matrix. Each eigenvector is
// unit length with its largest-magnitude component positive. Throws
// NumericalError if the off-diagonal norm does not fall below tolerance.
EigenDecomposition jacobi_eigen(const DenseMatrix& symmetric, const JacobiOptions& options = {});

} // namespace smartfog
