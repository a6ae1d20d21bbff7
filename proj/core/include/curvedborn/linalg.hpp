#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cborn {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major.  Sized for desk-scale operators
/// (dimensions up to a few thousand); no sparse path.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<cplx> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}

    static Matrix identity(int n);

    cplx &operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    const cplx &operator()(int r, int c) const {
        return a[static_cast<std::size_t>(r) * cols + c];
    }
    bool square() const { return rows == cols; }
};

Matrix operator*(const Matrix &x, const Matrix &y);
Matrix operator+(const Matrix &x, const Matrix &y);
Matrix operator-(const Matrix &x, const Matrix &y);
Matrix adjoint(const Matrix &x);
Matrix kron(const Matrix &x, const Matrix &y);

double frobenius_norm(const Matrix &x);
double max_abs(const Matrix &x);
double hermiticity_residual(const Matrix &x);
bool is_unitary(const Matrix &x, double tol);

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi sweeps, ascending.
/// Adequate for the dense verification sizes used here (n <= ~300).
std::vector<double> hermitian_eigenvalues(Matrix x);
double min_hermitian_eigenvalue(Matrix x);

/// Applies gate `g` to the digits listed in `digits` of a mixed-radix array
/// `amps` with `n_digits` digits of uniform radix `radix` (little-endian:
/// digit i has stride radix^i).  `g` must be square with dim radix^k where
/// k = digits.size().  Digits need not be sorted but must be distinct.
void apply_digit_gate(std::span<cplx> amps, int n_digits, int radix,
                      std::span<const int> digits, const Matrix &g);

} // namespace cborn
