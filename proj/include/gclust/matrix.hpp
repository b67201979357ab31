#pragma once

#include <cstddef>
#include <vector>

namespace gclust {

// Dense row-major matrix of doubles. All engine math is 64-bit: tests rely on
// deterministic summation order and finite-difference gradient checks, both of
// which are fragile in single precision.
//
// Rows are contiguous; matmul kernels below iterate so that inner loops walk
// contiguous memory and vectorize under -O3 without any blocking machinery.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double* operator[](int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
    const double* operator[](int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }

    std::size_t size() const { return data.size(); }
};

// a (m×p) · b (p×n). Throws std::invalid_argument on shape mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

// aᵀ (p×m becomes m×p) · b: computes a.transpose() * b without forming the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

// a · bᵀ: computes a * b.transpose() without forming the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

// Column sums as a length-cols vector.
std::vector<double> column_sums(const Matrix& m);

// Adds v to every row in place; v.size() must equal m.cols.
void add_row_vector(Matrix& m, const std::vector<double>& v);

// True iff every entry is finite (no NaN/Inf).
bool all_finite(const Matrix& m);

}  // namespace gclust
