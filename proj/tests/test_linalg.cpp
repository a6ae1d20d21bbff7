#include <doctest.h>

#include <cmath>

#include "curvedborn/linalg.hpp"
#include "curvedborn/rng.hpp"

using namespace cborn;

namespace {

Matrix random_hermitian(int n, Rng &rng) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = rng.gaussian();
        for (int j = i + 1; j < n; ++j) {
            m(i, j) = rng.gaussian_cplx();
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

} // namespace

TEST_CASE("matrix algebra basics") {
    Matrix a(2, 2);
    a(0, 0) = {0.0, 1.0};
    a(0, 1) = 2.0;
    a(1, 0) = -1.0;
    a(1, 1) = {3.0, -0.5};
    const Matrix id = Matrix::identity(2);
    CHECK(max_abs(a * id - a) == 0.0);
    CHECK(adjoint(a)(1, 0) == std::conj(a(0, 1)));
    CHECK(frobenius_norm(id) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("kron matches block structure") {
    Matrix a(2, 2), b(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    b(0, 1) = cplx{0.0, 1.0};
    b(1, 0) = 1.0;
    const Matrix k = kron(a, b);
    CHECK(k.rows == 4);
    CHECK(k(0, 1) == cplx{0.0, 1.0});
    CHECK(k(2, 3) == cplx{0.0, 2.0});
    CHECK(k(3, 2) == cplx{2.0, 0.0});
}

TEST_CASE("hermitian eigenvalues: known spectra") {
    Matrix pauli_x(2, 2);
    pauli_x(0, 1) = 1.0;
    pauli_x(1, 0) = 1.0;
    const auto eig = hermitian_eigenvalues(pauli_x);
    CHECK(eig[0] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(eig[1] == doctest::Approx(1.0).epsilon(1e-13));

    Matrix y(2, 2);
    y(0, 1) = cplx{0.0, -1.0};
    y(1, 0) = cplx{0.0, 1.0};
    const auto eig_y = hermitian_eigenvalues(y);
    CHECK(eig_y[0] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(eig_y[1] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("hermitian eigenvalues: trace and psd checks of random matrices") {
    Rng rng(11);
    for (int n : {3, 8, 20}) {
        const Matrix m = random_hermitian(n, rng);
        const auto eig = hermitian_eigenvalues(m);
        double trace = 0.0;
        for (int i = 0; i < n; ++i)
            trace += m(i, i).real();
        double eig_sum = 0.0;
        for (double v : eig)
            eig_sum += v;
        CHECK(eig_sum == doctest::Approx(trace).epsilon(1e-11));

        // m^dagger m is positive semidefinite
        const Matrix psd = adjoint(m) * m;
        CHECK(min_hermitian_eigenvalue(psd) >= -1e-10);
    }
}

TEST_CASE("digit gate application matches dense kron") {
    Rng rng(7);
    const int d = 3, n = 3;
    Matrix g(d, d);
    for (auto &v : g.a)
        v = rng.gaussian_cplx();
    std::vector<cplx> amps(27);
    for (auto &v : amps)
        v = rng.gaussian_cplx();

    // apply on middle digit; oracle contracts the index by hand
    std::vector<cplx> expected(27);
    for (int i = 0; i < 27; ++i) {
        const int d0 = i % 3, d1 = (i / 3) % 3, d2 = i / 9;
        for (int k = 0; k < 3; ++k)
            expected[i] += g(d1, k) * amps[d0 + 3 * k + 9 * d2];
    }
    std::vector<int> digits{1};
    apply_digit_gate(amps, n, d, digits, g);
    for (int i = 0; i < 27; ++i)
        CHECK(std::abs(amps[i] - expected[i]) < 1e-14);
}

TEST_CASE("two-digit gate with reversed digit order transposes the pair") {
    Rng rng(13);
    const int d = 2;
    Matrix g(4, 4);
    for (auto &v : g.a)
        v = rng.gaussian_cplx();
    std::vector<cplx> a1 = {1.0, 2.0, 3.0, 4.0};
    std::vector<cplx> a2 = a1;
    std::vector<int> fwd{0, 1}, rev{1, 0};
    apply_digit_gate(a1, 2, d, fwd, g);
    // reversed digits = conjugating the gate by the swap permutation
    Matrix swapped(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            swapped((r >> 1) | ((r & 1) << 1), (c >> 1) | ((c & 1) << 1)) = g(r, c);
    apply_digit_gate(a2, 2, d, rev, swapped);
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(a1[i] - a2[i]) < 1e-14);
}
