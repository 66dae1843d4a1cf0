#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace vuq {

// Sample matrices are stored row-major so each realisation is a contiguous span.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline std::span<const double> row_span(const Matrix& m, Eigen::Index r) {
    return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline std::span<double> row_span(Matrix& m, Eigen::Index r) {
    return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

enum class Direction { GE, LE };

}  // namespace vuq
