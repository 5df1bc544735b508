#pragma once

#include <cstddef>
#include <vector>

namespace fairtransport {

/// Dense row-major matrix of doubles. Deliberately minimal: the engine needs
/// predictable memory layout and a fixed summation order more than it needs
/// expression templates.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
    }
};

enum class ExecPolicy { Serial, Parallel };

}  // namespace fairtransport
