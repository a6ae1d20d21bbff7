#include "curvedborn/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace cborn {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Matrix operator*(const Matrix &x, const Matrix &y) {
    if (x.cols != y.rows)
        throw std::invalid_argument("matrix product: shape mismatch");
    Matrix z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int k = 0; k < x.cols; ++k) {
            const cplx v = x(i, k);
            if (v == cplx{})
                continue;
            const cplx *yr = &y.a[static_cast<std::size_t>(k) * y.cols];
            cplx *zr = &z.a[static_cast<std::size_t>(i) * z.cols];
            for (int j = 0; j < y.cols; ++j)
                zr[j] += v * yr[j];
        }
    }
    return z;
}

Matrix operator+(const Matrix &x, const Matrix &y) {
    assert(x.rows == y.rows && x.cols == y.cols);
    Matrix z = x;
    for (std::size_t i = 0; i < z.a.size(); ++i)
        z.a[i] += y.a[i];
    return z;
}

Matrix operator-(const Matrix &x, const Matrix &y) {
    assert(x.rows == y.rows && x.cols == y.cols);
    Matrix z = x;
    for (std::size_t i = 0; i < z.a.size(); ++i)
        z.a[i] -= y.a[i];
    return z;
}

Matrix adjoint(const Matrix &x) {
    Matrix z(x.cols, x.rows);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j)
            z(j, i) = std::conj(x(i, j));
    return z;
}

Matrix kron(const Matrix &x, const Matrix &y) {
    Matrix z(x.rows * y.rows, x.cols * y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) {
            const cplx v = x(i, j);
            if (v == cplx{})
                continue;
            for (int p = 0; p < y.rows; ++p)
                for (int q = 0; q < y.cols; ++q)
                    z(i * y.rows + p, j * y.cols + q) = v * y(p, q);
        }
    return z;
}

double frobenius_norm(const Matrix &x) {
    double s = 0.0;
    for (const cplx &v : x.a)
        s += std::norm(v);
    return std::sqrt(s);
}

double max_abs(const Matrix &x) {
    double s = 0.0;
    for (const cplx &v : x.a)
        s = std::max(s, std::abs(v));
    return s;
}

double hermiticity_residual(const Matrix &x) {
    assert(x.square());
    double s = 0.0;
    for (int i = 0; i < x.rows; ++i)
        for (int j = i; j < x.cols; ++j)
            s = std::max(s, std::abs(x(i, j) - std::conj(x(j, i))));
    return s;
}

bool is_unitary(const Matrix &x, double tol) {
    if (!x.square())
        return false;
    return max_abs(adjoint(x) * x - Matrix::identity(x.rows)) <= tol;
}

namespace {

double off_diagonal_norm(const Matrix &m) {
    double s = 0.0;
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j)
            if (i != j)
                s += std::norm(m(i, j));
    return std::sqrt(s);
}

} // namespace

std::vector<double> hermitian_eigenvalues(Matrix x) {
    assert(x.square());
    const int n = x.rows;
    if (n == 0)
        return {};
    if (n == 1)
        return {x(0, 0).real()};

    const double scale = std::max(1.0, frobenius_norm(x));
    const double stop = 1e-15 * scale;
    for (int sweep = 0; sweep < 60; ++sweep) {
        if (off_diagonal_norm(x) <= stop)
            break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = x(p, q);
                const double h = std::abs(apq);
                if (h <= 1e-300)
                    continue;
                // Phase factor turns the 2x2 block real, then a real Jacobi
                // rotation annihilates it.
                const cplx phase = apq / h;
                const double app = x(p, p).real();
                const double aqq = x(q, q).real();
                const double tau = (aqq - app) / (2.0 * h);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // Columns: [p q] <- [p q] * [[c, s*phase], [-s*conj(phase), c]]
                for (int i = 0; i < n; ++i) {
                    const cplx xip = x(i, p);
                    const cplx xiq = x(i, q);
                    x(i, p) = c * xip - s * std::conj(phase) * xiq;
                    x(i, q) = s * phase * xip + c * xiq;
                }
                for (int j = 0; j < n; ++j) {
                    const cplx xpj = x(p, j);
                    const cplx xqj = x(q, j);
                    x(p, j) = c * xpj - s * phase * xqj;
                    x(q, j) = s * std::conj(phase) * xpj + c * xqj;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i)
        eig[i] = x(i, i).real();
    std::sort(eig.begin(), eig.end());
    return eig;
}

double min_hermitian_eigenvalue(Matrix x) {
    const std::vector<double> eig = hermitian_eigenvalues(std::move(x));
    return eig.empty() ? 0.0 : eig.front();
}

void apply_digit_gate(std::span<cplx> amps, int n_digits, int radix,
                      std::span<const int> digits, const Matrix &g) {
    const int k = static_cast<int>(digits.size());
    int gate_dim = 1;
    for (int i = 0; i < k; ++i)
        gate_dim *= radix;
    assert(g.rows == gate_dim && g.cols == gate_dim);

    std::vector<std::size_t> strides(k);
    for (int i = 0; i < k; ++i) {
        std::size_t s = 1;
        for (int j = 0; j < digits[i]; ++j)
            s *= radix;
        strides[i] = s;
    }
    // Offset within amps of each gate-local basis state.
    std::vector<std::size_t> sub(gate_dim);
    for (int t = 0; t < gate_dim; ++t) {
        std::size_t off = 0;
        int v = t;
        for (int i = 0; i < k; ++i) {
            off += static_cast<std::size_t>(v % radix) * strides[i];
            v /= radix;
        }
        sub[t] = off;
    }
    // Strides for the untouched digits.
    std::vector<std::size_t> rest_strides;
    rest_strides.reserve(n_digits - k);
    for (int d = 0; d < n_digits; ++d) {
        if (std::find(digits.begin(), digits.end(), d) == digits.end()) {
            std::size_t s = 1;
            for (int j = 0; j < d; ++j)
                s *= radix;
            rest_strides.push_back(s);
        }
    }
    std::size_t rest_count = amps.size() / static_cast<std::size_t>(gate_dim);

    std::vector<cplx> in(gate_dim), out(gate_dim);
    for (std::size_t rc = 0; rc < rest_count; ++rc) {
        std::size_t base = 0;
        std::size_t v = rc;
        for (std::size_t s : rest_strides) {
            base += (v % radix) * s;
            v /= radix;
        }
        for (int t = 0; t < gate_dim; ++t)
            in[t] = amps[base + sub[t]];
        for (int r = 0; r < gate_dim; ++r) {
            cplx acc{};
            const cplx *row = &g.a[static_cast<std::size_t>(r) * gate_dim];
            for (int t = 0; t < gate_dim; ++t)
                acc += row[t] * in[t];
            out[r] = acc;
        }
        for (int t = 0; t < gate_dim; ++t)
            amps[base + sub[t]] = out[t];
    }
}

} // namespace cborn
