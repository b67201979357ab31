#include "gclust/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace gclust {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols == b.rows, "matmul: inner dimensions differ");
    Matrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = a[i];
        double* orow = out[i];
        for (int k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b[k];
            for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    require(a.rows == b.rows, "matmul_tn: row counts differ");
    Matrix out(a.cols, b.cols);
    for (int k = 0; k < a.rows; ++k) {
        const double* arow = a[k];
        const double* brow = b[k];
        for (int i = 0; i < a.cols; ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* orow = out[i];
            for (int j = 0; j < b.cols; ++j) orow[j] += aki * brow[j];
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    require(a.cols == b.cols, "matmul_nt: column counts differ");
    Matrix out(a.rows, b.rows);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = a[i];
        double* orow = out[i];
        for (int j = 0; j < b.rows; ++j) {
            const double* brow = b[j];
            double acc = 0.0;
            for (int k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
            orow[j] = acc;
        }
    }
    return out;
}

std::vector<double> column_sums(const Matrix& m) {
    std::vector<double> sums(static_cast<std::size_t>(m.cols), 0.0);
    for (int i = 0; i < m.rows; ++i) {
        const double* row = m[i];
        for (int j = 0; j < m.cols; ++j) sums[j] += row[j];
    }
    return sums;
}

void add_row_vector(Matrix& m, const std::vector<double>& v) {
    require(static_cast<int>(v.size()) == m.cols, "add_row_vector: length mismatch");
    for (int i = 0; i < m.rows; ++i) {
        double* row = m[i];
        for (int j = 0; j < m.cols; ++j) row[j] += v[j];
    }
}

bool all_finite(const Matrix& m) {
    for (double x : m.data)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace gclust
