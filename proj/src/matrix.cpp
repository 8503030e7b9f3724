#include "kan/matrix.hpp"

namespace kan {

double frobenius_norm(const Matrix& a) {
    double sum = 0.0;
    for (double v : a.data) sum += v * v;
    return std::sqrt(sum);
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j)
            t(j, i) = a(i, j);
    return t;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (x.size() != a.cols) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* r = a.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) acc += r[j] * x[j];
        y[i] = acc;
    }
    return y;
}

Matrix gram(const Matrix& a) {
    Matrix g(a.cols, a.cols);
    for (std::size_t k = 0; k < a.rows; ++k) {
        const double* r = a.row(k);
        for (std::size_t i = 0; i < a.cols; ++i) {
            if (r[i] == 0.0) continue;
            for (std::size_t j = i; j < a.cols; ++j) g(i, j) += r[i] * r[j];
        }
    }
    for (std::size_t i = 0; i < a.cols; ++i)
        for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
    return g;
}

Matrix outer_gram(const Matrix& a) {
    Matrix g(a.rows, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ri = a.row(i);
        for (std::size_t j = i; j < a.rows; ++j) {
            const double* rj = a.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += ri[k] * rj[k];
            g(i, j) = acc;
            g(j, i) = acc;
        }
    }
    return g;
}

}  // namespace kan
