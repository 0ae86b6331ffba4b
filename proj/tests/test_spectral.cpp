// test_spectral.cpp — biorthonormal decomposition, nonorthogonality metrics,
// and eigenvalue perturbation against hand-computable cases
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "doctest.h"
#include "roqs/basis.hpp"
#include "roqs/ensembles.hpp"
#include "roqs/liouvillian.hpp"
#include "roqs/spectral.hpp"
#include "roqs/types.hpp"
#include "support/helpers.hpp"

using namespace roqs;
using spectral::decompose;
using spectral::SpectralDecomposition;

namespace {

liouville::Superoperator dephasing_superoperator() {
    Matrix k = Matrix::Zero(3, 3);
    k(2, 2) = 2.0;
    return liouville::build_superoperator(
        liouville::make_model(Matrix::Zero(2, 2), k));
}

}  // namespace

TEST_CASE("eigenvalue ordering puts the slow modes first") {
    auto dec = decompose(dephasing_superoperator());
    REQUIRE(dec.eigenvalues.size() == 4);
    CHECK(std::abs(dec.eigenvalues(0)) < 1e-10);
    CHECK(std::abs(dec.eigenvalues(1)) < 1e-10);
    CHECK(std::abs(dec.eigenvalues(2) - Complex(-2.0, 0.0)) < 1e-10);
    CHECK(std::abs(dec.eigenvalues(3) - Complex(-2.0, 0.0)) < 1e-10);
    // the kernel is two-dimensional (populations never mix), so the gap read
    // off the second eigenvalue is zero, not the coherence decay rate
    CHECK(spectral::spectral_gap(dec) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("hermitian matrices decompose with orthonormal modes") {
    ensembles::StreamRng rng({8100, 0});
    Matrix a = ensembles::sample_ginibre(9, rng);
    Matrix h = (a + a.adjoint()) / 2.0;
    auto dec = decompose(h);
    auto k = spectral::petermann_factors(dec);
    for (int m = 0; m < k.size(); ++m) {
        CHECK(k(m) >= 1.0 - 1e-12);
        CHECK(k(m) < 1.0 + 1e-10);
        // left and right coincide up to the normalization phase
        Complex overlap = dec.left.col(m).dot(dec.right.col(m));
        CHECK(std::abs(overlap - Complex(1.0, 0.0)) < 1e-10);
        CHECK(std::abs(std::abs(dec.left.col(m).dot(dec.right.col(m))) -
                       dec.left.col(m).norm() * dec.right.col(m).norm()) < 1e-10);
    }
}

TEST_CASE("decomposition satisfies residual and biorthonormality bounds") {
    auto model = testsupport::random_model(10, 8200, true);
    auto sup = liouville::build_superoperator(model);
    auto dec = decompose(sup);
    const double lnorm = dec.operator_norm;
    REQUIRE(dec.eigenvalues.size() == 100);

    for (int m = 0; m < 100; ++m) {
        Vector resid = sup.matrix * dec.right.col(m) - dec.eigenvalues(m) * dec.right.col(m);
        CHECK(resid.norm() < 1e-8 * lnorm);
        Vector lresid = sup.matrix.adjoint() * dec.left.col(m) -
                        std::conj(dec.eigenvalues(m)) * dec.left.col(m);
        CHECK(lresid.norm() < 1e-8 * lnorm * dec.left.col(m).norm());
    }

    // biorthonormality across all pairs with nondegenerate eigenvalues
    Matrix overlap = dec.left.adjoint() * dec.right;
    for (int m = 0; m < 100; ++m) {
        CHECK(std::abs(overlap(m, m) - Complex(1.0, 0.0)) < 1e-8);
        for (int n = 0; n < 100; ++n) {
            if (n == m) continue;
            if (std::abs(dec.eigenvalues(m) - dec.eigenvalues(n)) < 1e-6 * lnorm) continue;
            CHECK(std::abs(overlap(m, n)) < 1e-7);
        }
    }

    // structural facts: a zero mode exists and the spectrum is conjugate-closed
    CHECK(std::abs(dec.eigenvalues(0)) < 1e-8 * lnorm);
    for (int m = 0; m < 100; ++m) {
        double best = 1e300;
        for (int n = 0; n < 100; ++n)
            best = std::min(best,
                            std::abs(dec.eigenvalues(n) - std::conj(dec.eigenvalues(m))));
        CHECK(best < 1e-8 * lnorm);
    }

    // gap agrees with an independent sort of the eigenvalue real parts
    std::vector<double> re(100);
    for (int m = 0; m < 100; ++m) re[m] = dec.eigenvalues(m).real();
    std::sort(re.begin(), re.end(), std::greater<>());
    CHECK(spectral::spectral_gap(dec) == doctest::Approx(-re[1]).epsilon(1e-10));
}

TEST_CASE("petermann factor of a 2x2 Jordan-like matrix is exactly two") {
    // [[0, 1], [0, -1]] has eigenvectors (1,0) and (1,-sqrt(2)/2)... the
    // left/right Gram computation gives K = 2 for both modes
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = Complex(1.0, 0.0);
    m(1, 1) = Complex(-1.0, 0.0);
    auto dec = decompose(m);
    auto k = spectral::petermann_factors(dec);
    REQUIRE(k.size() == 2);
    CHECK(k(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(k(1) == doctest::Approx(2.0).epsilon(1e-12));

    // invariance under arbitrary rescaling of the raw eigenvectors: rebuild the
    // factors from scaled copies normalized the same way
    for (int mode = 0; mode < 2; ++mode) {
        Vector r = dec.right.col(mode) * Complex(3.0, -2.0);
        Vector l = dec.left.col(mode) * Complex(0.1, 0.7);
        Complex ov = l.dot(r);
        l /= std::conj(ov);  // restore <l|r> = 1
        double manual = r.squaredNorm() * l.squaredNorm();
        CHECK(manual == doctest::Approx(k(mode)).epsilon(1e-8));
    }
}

TEST_CASE("quality factors follow the eigenvalue geometry") {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = Complex(-1.0, 2.0);
    m(1, 1) = Complex(-1.0, -2.0);
    m(2, 2) = Complex(-3.0, 0.0);
    auto dec = decompose(m);
    auto q = spectral::q_factors(dec);
    REQUIRE(q.size() == 3);
    // modes sorted: (-1, +-2i) first (ascending Im puts -2i before +2i), then -3
    CHECK(q(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q(2) == doctest::Approx(0.0).epsilon(1e-12));

    // zero modes have undefined Q
    auto qdeph = spectral::q_factors(decompose(dephasing_superoperator()));
    CHECK(std::isnan(qdeph(0)));
    CHECK(std::isnan(qdeph(1)));
    CHECK(qdeph(2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("nearest-neighbour spacings measure complex-plane distances") {
    Vector eigs(3);
    eigs << Complex(0.0, 0.0), Complex(-1.0, 0.0), Complex(-1.5, 0.0);
    auto s = spectral::nn_spacings(eigs);
    REQUIRE(s.size() == 3);
    CHECK(s(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s(1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s(2) == doctest::Approx(0.5).epsilon(1e-14));

    // a conjugate pair caps its own spacing at the 2|Im| separation
    Vector pair(2);
    pair << Complex(-1.0, 0.3), Complex(-1.0, -0.3);
    auto sp = spectral::nn_spacings(pair);
    CHECK(sp(0) == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("empirical ccdf counts the fraction at or above each grid point") {
    std::vector<double> values = {-2.0, -1.0, 0.0};
    std::vector<double> grid = {-3.0, -1.0, 0.5};
    auto c = spectral::empirical_ccdf(values, grid);
    REQUIRE(c.size() == 3);
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(c[1] == doctest::Approx(2.0 / 3.0));
    CHECK(c[2] == doctest::Approx(0.0));
    // monotone non-increasing along an ascending grid
    CHECK(c[0] >= c[1]);
    CHECK(c[1] >= c[2]);
}

TEST_CASE("pdf histograms integrate to one") {
    SUBCASE("linear bins on uniform data") {
        ensembles::StreamRng rng({8300, 0});
        std::vector<double> u(20000);
        for (double& x : u) x = rng.uniform();
        auto h = spectral::pdf_histogram(u, 20, false);
        REQUIRE(h.density.size() == 20);
        REQUIRE(h.edges.size() == 21);
        CHECK(h.excluded == 0);
        double mass = 0.0;
        for (std::size_t b = 0; b < h.density.size(); ++b) {
            mass += h.density[b] * (h.edges[b + 1] - h.edges[b]);
            CHECK(h.density[b] == doctest::Approx(1.0).epsilon(0.15));
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("log bins drop non-positive samples and report the count") {
        std::vector<double> vals = {1.0, 2.0, 4.0, 8.0, 0.0, -3.0};
        auto h = spectral::pdf_histogram(vals, 3, true);
        CHECK(h.excluded == 2);
        double mass = 0.0;
        for (std::size_t b = 0; b < h.density.size(); ++b)
            mass += h.density[b] * (h.edges[b + 1] - h.edges[b]);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
            CHECK(h.edges[b] > 0.0);
    }
}

TEST_CASE("steady-state distance vanishes for unital generators") {
    // a real symmetric Kossakowski matrix gives jump operators closed under
    // the adjoint, whose fixed point is maximally mixed
    const int n = 4;
    ensembles::StreamRng rng({8400, 0});
    Matrix g(n * n - 1, n * n - 1);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(rng.normal(), 0.0);
    Matrix k = ensembles::build_kossakowski(g, n);
    auto dec = decompose(liouville::build_superoperator(
        liouville::make_model(Matrix::Zero(n, n), k)));
    CHECK(spectral::steady_state_distance(dec) < 1e-8);
}

TEST_CASE("perturbing superoperator matches a difference of full assemblies") {
    const int n = 3;
    auto model = testsupport::random_model(n, 8500, true);
    ensembles::StreamRng rng({8501, 0});
    Matrix v = ensembles::sample_gue_hamiltonian(n, rng);

    auto dl = spectral::build_delta_superoperator(v, model.hbar);
    auto base = liouville::build_superoperator(model);
    auto shifted_model = liouville::make_model(model.hamiltonian + v, model.kossakowski,
                                               model.alpha, model.hbar);
    auto shifted = liouville::build_superoperator(shifted_model);
    Matrix diff = shifted.matrix - base.matrix;
    CHECK((dl.matrix - diff).cwiseAbs().maxCoeff() < 1e-12);

    // still trace-preserving, and vanishes for V = 0
    Vector left = dl.matrix.adjoint() * basis::vectorize(Matrix::Identity(n, n));
    CHECK(left.norm() < 1e-12 * std::max(1.0, dl.matrix.norm()));
    auto zero = spectral::build_delta_superoperator(Matrix::Zero(n, n), 1.0);
    CHECK(zero.matrix.cwiseAbs().maxCoeff() == 0.0);

    Matrix vbad = v;
    vbad(0, 1) += Complex(0.0, 0.5);
    vbad(1, 0) += Complex(0.0, 0.5);  // breaks Hermiticity
    CHECK_THROWS_AS(spectral::build_delta_superoperator(vbad, 1.0), invalid_input);
}

TEST_CASE("spectral norm of the perturbation comes from the eigenvalue spread") {
    ensembles::StreamRng rng({8600, 0});
    Matrix v = ensembles::sample_gue_hamiltonian(5, rng);
    double fast = spectral::delta_spectral_norm(v, 2.0);

    auto dl = spectral::build_delta_superoperator(v, 2.0);
    Eigen::ComplexEigenSolver<Matrix> es(dl.matrix);
    double dense = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(fast == doctest::Approx(dense).epsilon(1e-10));
}

TEST_CASE("second-order shifts track exact eigenvalues to cubic order") {
    // well-separated diagonal base matrix keeps the series honest
    const int d = 8;
    Matrix l0 = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) l0(i, i) = Complex(-1.0 * i - 0.5, 0.3 * i);
    ensembles::StreamRng rng({8700, 0});
    Matrix a = ensembles::sample_ginibre(d, rng);
    Matrix dl = (a + a.adjoint()) / 2.0;

    auto dec = decompose(l0);
    auto zero = spectral::perturb_eigenvalues(dec, Matrix::Zero(d, d));
    CHECK(zero.shifts.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(zero.excluded_terms == 0);

    auto exact_sorted = [&](double eps) {
        Eigen::ComplexEigenSolver<Matrix> es(l0 + eps * dl);
        std::vector<Complex> e(es.eigenvalues().data(),
                               es.eigenvalues().data() + d);
        return e;
    };
    auto nearest = [](const std::vector<Complex>& pool, Complex target) {
        Complex best = pool.front();
        for (Complex c : pool)
            if (std::abs(c - target) < std::abs(best - target)) best = c;
        return best;
    };

    // residual after subtracting the predicted shift decays like eps^3
    double resid_full = 0.0, resid_half = 0.0;
    const double eps = 1e-2;
    for (int pass = 0; pass < 2; ++pass) {
        double e = pass == 0 ? eps : eps / 2.0;
        auto pred = spectral::perturb_eigenvalues(dec, (e * dl).eval());
        auto exact = exact_sorted(e);
        double worst = 0.0;
        for (int m = 0; m < d; ++m) {
            Complex predicted = dec.eigenvalues(m) + pred.shifts(m);
            worst = std::max(worst, std::abs(nearest(exact, predicted) - predicted));
        }
        (pass == 0 ? resid_full : resid_half) = worst;
    }
    double ratio = resid_full / resid_half;
    CHECK(ratio > 6.0);
    CHECK(ratio < 10.0);

    // first-order diagonal terms sum to Tr[dL], here eps * Tr[dl]
    auto pred = spectral::perturb_eigenvalues(dec, (eps * dl).eval());
    Complex first_sum = pred.first_order.sum();
    Complex trace = eps * dl.trace();
    CHECK(std::abs(first_sum - trace) < 1e-10 * std::max(1.0, std::abs(trace)));
}

TEST_CASE("first-order shifts satisfy the nonorthogonality bound") {
    auto model = testsupport::random_model(4, 8800, true, 1.0);
    auto dec = decompose(liouville::build_superoperator(model));
    ensembles::StreamRng rng({8801, 0});
    Matrix v = ensembles::sample_gue_hamiltonian(4, rng) / 10.0;
    auto dl = spectral::build_delta_superoperator(v, model.hbar);
    double dl_norm = spectral::delta_spectral_norm(v, model.hbar);

    auto res = spectral::perturb_eigenvalues(dec, dl.matrix);
    auto k = spectral::petermann_factors(dec);
    for (int m = 0; m < res.first_order.size(); ++m) {
        if (dec.flagged[static_cast<std::size_t>(m)]) continue;
        // |<L|dL|R>| <= ||L|| ||dL|| ||R|| = sqrt(K_m) ||dL||
        CHECK(std::abs(res.first_order(m)) <=
              std::sqrt(k(m)) * dl_norm * (1.0 + 1e-8));
    }
}

TEST_CASE("degenerate base spectra register excluded correction terms") {
    Matrix l0 = Matrix::Zero(4, 4);
    l0(0, 0) = Complex(-1.0, 0.0);
    l0(1, 1) = Complex(-1.0, 0.0);  // exact degeneracy
    l0(2, 2) = Complex(-2.0, 0.0);
    l0(3, 3) = Complex(-5.0, 0.0);
    ensembles::StreamRng rng({8900, 0});
    Matrix a = ensembles::sample_ginibre(4, rng);
    Matrix dl = (a + a.adjoint()) / 2.0;
    auto res = spectral::perturb_eigenvalues(decompose(l0), dl);
    CHECK(res.excluded_terms > 0);
    for (int m = 0; m < 4; ++m) CHECK(std::isfinite(res.shifts(m).real()));
}
