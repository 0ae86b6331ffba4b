// test_liouvillian.cpp — generator assembly against closed forms and the
// term-by-term right-hand-side oracle
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "roqs/basis.hpp"
#include "roqs/ensembles.hpp"
#include "roqs/liouvillian.hpp"
#include "roqs/types.hpp"
#include "support/helpers.hpp"

using namespace roqs;
using liouville::apply_rhs_direct;
using liouville::build_superoperator;
using liouville::build_superoperator_naive;
using liouville::jump_operators;
using liouville::LindbladModel;
using liouville::make_model;
using liouville::make_model_unchecked;

namespace {

std::vector<Complex> sorted_eigs(const Matrix& m) {
    Eigen::ComplexEigenSolver<Matrix> es(m);
    std::vector<Complex> out(es.eigenvalues().data(),
                             es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() < b.imag();
    });
    return out;
}

// pure-dephasing qubit: K weights only the sigma_z generator, with trace 2
LindbladModel dephasing_model() {
    Matrix k = Matrix::Zero(3, 3);
    k(2, 2) = 2.0;
    return make_model(Matrix::Zero(2, 2), k);
}

}  // namespace

TEST_CASE("model validation rejects malformed inputs") {
    Matrix h_bad = Matrix::Zero(2, 2);
    h_bad(0, 1) = Complex(1.0, 0.0);  // not Hermitian
    Matrix k_ok = Matrix::Identity(3, 3) * (2.0 / 3.0);
    CHECK_THROWS_AS(make_model(h_bad, k_ok), invalid_input);

    Matrix k_wrong_trace = Matrix::Identity(3, 3);  // trace 3 for N = 2
    CHECK_THROWS_AS(make_model(Matrix::Zero(2, 2), k_wrong_trace), invalid_input);

    Matrix k_not_psd = Matrix::Zero(3, 3);
    k_not_psd(0, 0) = 3.0;
    k_not_psd(1, 1) = -1.0;  // trace still 2, but indefinite
    CHECK_THROWS_AS(make_model(Matrix::Zero(2, 2), k_not_psd), invalid_input);

    Matrix k_not_herm = Matrix::Identity(3, 3) * (2.0 / 3.0);
    k_not_herm(0, 1) = Complex(0.0, 0.5);
    CHECK_THROWS_AS(make_model(Matrix::Zero(2, 2), k_not_herm), invalid_input);

    Matrix k_wrong_size = Matrix::Identity(4, 4);
    CHECK_THROWS_AS(make_model(Matrix::Zero(2, 2), k_wrong_size), invalid_input);
}

TEST_CASE("pure dephasing reproduces its closed-form spectrum") {
    auto sup = build_superoperator(dephasing_model());
    auto eigs = sorted_eigs(sup.matrix);
    REQUIRE(eigs.size() == 4);
    // exact spectrum is {0, 0, -2, -2}
    CHECK(std::abs(eigs[0]) < 1e-10);
    CHECK(std::abs(eigs[1]) < 1e-10);
    CHECK(std::abs(eigs[2] - Complex(-2.0, 0.0)) < 1e-10);
    CHECK(std::abs(eigs[3] - Complex(-2.0, 0.0)) < 1e-10);
    CHECK(sup.trace_residual < 1e-12);
}

TEST_CASE("pure Hamiltonian evolution gives a purely imaginary spectrum") {
    // K = 0 through the unchecked constructor; H = diag(0.7, -0.3) makes the
    // coherence frequencies +-(0.7 + 0.3) = +-1
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 0.7;
    h(1, 1) = -0.3;
    auto model = make_model_unchecked(h, Matrix::Zero(3, 3));
    auto sup = build_superoperator(model);
    auto eigs = sorted_eigs(sup.matrix);
    for (const Complex& ev : eigs) CHECK(std::abs(ev.real()) < 1e-12);
    std::vector<double> imag;
    for (const Complex& ev : eigs) imag.push_back(ev.imag());
    std::sort(imag.begin(), imag.end());
    CHECK(std::abs(imag[0] + 1.0) < 1e-12);
    CHECK(std::abs(imag[1]) < 1e-12);
    CHECK(std::abs(imag[2]) < 1e-12);
    CHECK(std::abs(imag[3] - 1.0) < 1e-12);
}

TEST_CASE("direct right-hand side agrees with the assembled matrix") {
    for (int n = 2; n <= 5; ++n) {
        auto model = testsupport::random_model(n, /*seed=*/7100 + n, /*gue_h=*/true);
        auto sup = build_superoperator(model);
        double lnorm = sup.matrix.norm();
        ensembles::StreamRng rng({7200, static_cast<std::uint64_t>(n)});
        for (int trial = 0; trial < 5; ++trial) {
            Matrix a = ensembles::sample_ginibre(n, rng);
            Matrix rho = (a + a.adjoint()) / 2.0;  // generic Hermitian argument
            Vector via_matrix = sup.matrix * basis::vectorize(rho);
            Vector via_direct = basis::vectorize(apply_rhs_direct(model, rho));
            double scale = lnorm * rho.norm();
            CHECK((via_matrix - via_direct).norm() < 1e-10 * scale);
        }
    }
}

TEST_CASE("the generator preserves trace and Hermiticity term by term") {
    auto model = testsupport::random_model(6, 7301, true);
    ensembles::StreamRng rng({7302, 0});
    Matrix a = ensembles::sample_ginibre(6, rng);
    Matrix rho = (a + a.adjoint()) / 2.0;
    Matrix drho = apply_rhs_direct(model, rho);
    CHECK(std::abs(drho.trace()) < 1e-12 * drho.norm());
    CHECK((drho - drho.adjoint()).cwiseAbs().maxCoeff() < 1e-10 * drho.norm());

    // dephasing fixed point: the maximally mixed state does not move
    Matrix still = apply_rhs_direct(dephasing_model(), Matrix::Identity(2, 2) / 2.0);
    CHECK(still.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("assembled generators satisfy the structural invariants") {
    for (double nu : {0.0, 1.0}) {  // 0 selects the Ginibre draw in the helper
        auto model = testsupport::random_model(8, 7400 + static_cast<int>(nu), true, nu);
        auto sup = build_superoperator(model);
        double lnorm = sup.matrix.norm();

        // left zero row: vec(I)^dag L = 0 (trace preservation)
        Vector left = sup.matrix.adjoint() * basis::vectorize(Matrix::Identity(8, 8));
        CHECK(left.norm() < 1e-12 * lnorm);
        CHECK(sup.trace_residual < 1e-10);

        auto eigs = sorted_eigs(sup.matrix);
        // dissipativity: no eigenvalue in the right half plane
        for (const Complex& ev : eigs) CHECK(ev.real() < 1e-8 * lnorm);
        // reality of the generator: spectrum closed under conjugation
        for (const Complex& ev : eigs) {
            double best = 1e300;
            for (const Complex& other : eigs)
                best = std::min(best, std::abs(other - std::conj(ev)));
            CHECK(best < 1e-8 * lnorm);
        }
    }
}

TEST_CASE("fast assembly matches the explicit double-sum reference") {
    for (double nu : {0.0, 1.0}) {
        for (int n : {2, 3, 4}) {
            auto model = testsupport::random_model(n, 7500 + n, true, nu);
            auto fast = build_superoperator(model);
            Matrix naive = build_superoperator_naive(model);
            double scale = std::max(1.0, naive.norm());
            CHECK((fast.matrix - naive).norm() < 1e-13 * scale);
        }
    }
}

TEST_CASE("jump operators reconstruct the dissipator") {
    auto model = testsupport::random_model(4, 7600, false);
    auto jumps = jump_operators(model);
    REQUIRE(!jumps.rates.empty());
    for (double c : jumps.rates) CHECK(c >= 0.0);

    ensembles::StreamRng rng({7601, 0});
    Matrix a = ensembles::sample_ginibre(4, rng);
    Matrix rho = (a + a.adjoint()) / 2.0;

    double pref = (model.alpha / model.hbar) * (model.alpha / model.hbar);
    Matrix dissipator = Matrix::Zero(4, 4);
    for (std::size_t i = 0; i < jumps.ops.size(); ++i) {
        const Matrix& l = jumps.ops[i];
        dissipator += pref * jumps.rates[i] *
                      (l * rho * l.adjoint() -
                       0.5 * (l.adjoint() * l * rho + rho * l.adjoint() * l));
    }
    // H = 0 in this model, so the dissipator is the whole right-hand side
    Matrix reference = apply_rhs_direct(model, rho);
    CHECK((dissipator - reference).cwiseAbs().maxCoeff() <
          1e-12 * std::max(1.0, reference.cwiseAbs().maxCoeff()));
}

TEST_CASE("superoperator binary dump round-trips exactly") {
    namespace fs = std::filesystem;
    auto model = testsupport::random_model(3, 7700, true);
    auto sup = build_superoperator(model);
    fs::path path = fs::temp_directory_path() / "roqs_test_sup.bin";
    liouville::dump_superoperator(sup, path.string());
    Matrix back = liouville::load_superoperator(path.string());
    REQUIRE(back.rows() == sup.matrix.rows());
    CHECK((back - sup.matrix).cwiseAbs().maxCoeff() == 0.0);
    fs::remove(path);
    CHECK_THROWS_AS(liouville::load_superoperator((path / "missing").string()),
                    computation_error);
}

TEST_CASE("model fingerprints are stable and content-sensitive") {
    auto model = testsupport::random_model(3, 7800, true);
    auto once = liouville::model_fingerprint(model);
    auto twice = liouville::model_fingerprint(model);
    CHECK(once == twice);

    auto modified = model;
    modified.hamiltonian(0, 0) += 1e-6;
    CHECK(liouville::model_fingerprint(modified) != once);

    auto rescaled = model;
    rescaled.alpha *= 2.0;
    CHECK(liouville::model_fingerprint(rescaled) != once);

    auto sup = build_superoperator(model);
    CHECK(sup.model_fingerprint == once);
}
