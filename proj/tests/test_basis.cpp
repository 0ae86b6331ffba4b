// test_basis.cpp — generator basis, vectorization, and Kossakowski transforms
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "roqs/basis.hpp"
#include "roqs/ensembles.hpp"
#include "roqs/types.hpp"
#include "support/helpers.hpp"

using namespace roqs;
using basis::devectorize;
using basis::su_generators;
using basis::transform_kossakowski;
using basis::vectorize;

namespace {

// plain Kronecker product, kept local so the vec identity test does not lean
// on the library's own superoperator assembly
Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

TEST_CASE("su(2) generators come out as the scaled Pauli matrices in order") {
    auto gb = su_generators(2);
    REQUIRE(gb.generators.size() == 3);
    CHECK(gb.system_dim == 2);
    const double s = 1.0 / std::sqrt(2.0);

    // symmetric pair first
    CHECK(std::abs(gb.generators[0](0, 1) - Complex(s, 0.0)) < 1e-15);
    CHECK(std::abs(gb.generators[0](1, 0) - Complex(s, 0.0)) < 1e-15);
    CHECK(std::abs(gb.generators[0](0, 0)) < 1e-15);
    // then the antisymmetric pair
    CHECK(std::abs(gb.generators[1](0, 1) - Complex(0.0, -s)) < 1e-15);
    CHECK(std::abs(gb.generators[1](1, 0) - Complex(0.0, s)) < 1e-15);
    // then the diagonal generator
    CHECK(std::abs(gb.generators[2](0, 0) - Complex(s, 0.0)) < 1e-15);
    CHECK(std::abs(gb.generators[2](1, 1) - Complex(-s, 0.0)) < 1e-15);
    CHECK(std::abs(gb.generators[2](0, 1)) < 1e-15);
}

TEST_CASE("su(3) generators are orthonormal, traceless, and Hermitian") {
    auto gb = su_generators(3);
    REQUIRE(gb.generators.size() == 8);
    for (std::size_t a = 0; a < gb.generators.size(); ++a) {
        const Matrix& sa = gb.generators[a];
        CHECK((sa - sa.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(std::abs(sa.trace()) < 1e-15);
        for (std::size_t b = 0; b < gb.generators.size(); ++b) {
            Complex hs = (sa.adjoint() * gb.generators[b]).trace();
            double expect = a == b ? 1.0 : 0.0;
            CHECK(std::abs(hs - expect) < 1e-14);
        }
    }
}

TEST_CASE("large generator basis spot-checked for orthonormality") {
    auto gb = su_generators(50);
    REQUIRE(gb.generators.size() == 2499);
    ensembles::StreamRng rng({991, 1});
    for (int trial = 0; trial < 100; ++trial) {
        auto a = static_cast<std::size_t>(rng.raw() % gb.generators.size());
        auto b = static_cast<std::size_t>(rng.raw() % gb.generators.size());
        Complex hs = (gb.generators[a].adjoint() * gb.generators[b]).trace();
        double expect = a == b ? 1.0 : 0.0;
        CHECK(std::abs(hs - expect) < 1e-13);
    }
}

TEST_CASE("generators span the traceless Hermitian matrices") {
    const int n = 5;
    auto gb = su_generators(n);
    ensembles::StreamRng rng({991, 2});

    // random Hermitian matrix with the trace projected out
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
    Matrix h = (a + a.adjoint()) / 2.0;
    h -= (h.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);

    Matrix rebuilt = Matrix::Zero(n, n);
    for (const Matrix& s : gb.generators) rebuilt += (s.adjoint() * h).trace() * s;
    CHECK((rebuilt - h).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("vectorize stacks columns and devectorize inverts it exactly") {
    Matrix m(2, 2);
    m(0, 0) = Complex(1.0, 0.5);
    m(0, 1) = Complex(2.0, -1.0);
    m(1, 0) = Complex(3.0, 0.25);
    m(1, 1) = Complex(4.0, 0.0);

    Vector v = vectorize(m);
    REQUIRE(v.size() == 4);
    // (i, j) -> j*n + i: columns concatenated
    CHECK(v(0) == m(0, 0));
    CHECK(v(1) == m(1, 0));
    CHECK(v(2) == m(0, 1));
    CHECK(v(3) == m(1, 1));

    Matrix back = devectorize(v);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("vectorization turns two-sided products into Kronecker products") {
    // vec(A rho B) = (B^T (x) A) vec(rho) under column stacking
    for (int n : {2, 3, 4}) {
        ensembles::StreamRng rng({991, static_cast<std::uint64_t>(10 + n)});
        Matrix a = ensembles::sample_ginibre(n, rng);
        Matrix b = ensembles::sample_ginibre(n, rng);
        Matrix rho = ensembles::sample_ginibre(n, rng);
        Vector lhs = vectorize(a * rho * b);
        Vector rhs = kron(b.transpose(), a) * vectorize(rho);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("vectorize and devectorize reject malformed shapes") {
    Matrix rect = Matrix::Zero(2, 3);
    CHECK_THROWS_AS(vectorize(rect), invalid_input);
    Vector v = Vector::Zero(5);
    CHECK_THROWS_AS(devectorize(v), invalid_input);
    CHECK_THROWS_AS(su_generators(1), invalid_input);
    CHECK_THROWS_AS(su_generators(0), invalid_input);
}

TEST_CASE("kossakowski transform is a unitary conjugation") {
    const int m = 8;
    ensembles::StreamRng rng({991, 30});
    Matrix x = ensembles::sample_ginibre(m, rng);
    Matrix k = x * x.adjoint();  // Hermitian PSD test matrix

    SUBCASE("identity leaves K untouched") {
        Matrix same = transform_kossakowski(k, Matrix::Identity(m, m));
        CHECK((same - k).cwiseAbs().maxCoeff() < 1e-15);
    }

    SUBCASE("haar conjugation preserves trace and spectrum") {
        Matrix u = ensembles::sample_haar_unitary(m, rng);
        Matrix kt = transform_kossakowski(k, u);
        CHECK(std::abs(kt.trace().real() - k.trace().real()) <
              1e-10 * std::abs(k.trace().real()));
        Eigen::SelfAdjointEigenSolver<Matrix> before(k), after(kt);
        for (int i = 0; i < m; ++i)
            CHECK(std::abs(before.eigenvalues()(i) - after.eigenvalues()(i)) < 1e-8);
    }

    SUBCASE("non-unitary and mismatched arguments are rejected") {
        Matrix not_u = Matrix::Identity(m, m) * 1.5;
        CHECK_THROWS_AS(transform_kossakowski(k, not_u), invalid_input);
        Matrix small = Matrix::Identity(m - 1, m - 1);
        CHECK_THROWS_AS(transform_kossakowski(k, small), invalid_input);
    }
}
