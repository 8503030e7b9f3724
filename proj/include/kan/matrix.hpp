#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace kan {

// Dense row-major matrix of 64-bit reals. The single numeric carrier for
// designs X, layer activations, and flattened coefficient matrices.
// Immutable-by-convention after construction in multi-threaded contexts.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // length rows * cols

    Matrix() = default;

    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> values) {
        Matrix m;
        m.rows = values.size();
        m.cols = m.rows ? values.begin()->size() : 0;
        m.data.reserve(m.rows * m.cols);
        for (const auto& row : values) {
            if (row.size() != m.cols)
                throw std::invalid_argument("Matrix::from_rows: ragged rows");
            m.data.insert(m.data.end(), row.begin(), row.end());
        }
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double& at(std::size_t i, std::size_t j) {
        if (i >= rows || j >= cols) throw std::out_of_range("Matrix::at");
        return data[i * cols + j];
    }
    double at(std::size_t i, std::size_t j) const {
        if (i >= rows || j >= cols) throw std::out_of_range("Matrix::at");
        return data[i * cols + j];
    }

    const double* row(std::size_t i) const { return data.data() + i * cols; }
    double* row(std::size_t i) { return data.data() + i * cols; }

    bool empty() const { return rows == 0 || cols == 0; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

// sqrt(sum a_ij^2)
double frobenius_norm(const Matrix& a);

Matrix transpose(const Matrix& a);

// y = A x, x has length A.cols
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);

// Gram matrix A^T A (cols x cols)
Matrix gram(const Matrix& a);

// A A^T (rows x rows)
Matrix outer_gram(const Matrix& a);

}  // namespace kan
