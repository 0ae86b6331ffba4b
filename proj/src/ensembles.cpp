// ensembles.cpp — sampler implementations
#include "roqs/ensembles.hpp"

#include <algorithm>
#include <cmath>

namespace roqs::ensembles {

namespace {

constexpr double pi = 3.141592653589793238462643383279;

void check_dim(int n, const char* what) {
    if (n < 1) throw invalid_input(std::string(what) + ": dimension must be positive");
}

}  // namespace

TailRegime classify_tail(double nu) {
    if (!(nu > 0.0)) throw invalid_input("classify_tail: nu must be positive");
    if (nu <= 2.0) return TailRegime::extremely_heavy;
    if (nu <= 4.0) return TailRegime::heavy;
    if (nu <= 30.0) return TailRegime::moderately_heavy;
    return TailRegime::light;
}

std::string regime_label(TailRegime regime) {
    switch (regime) {
        case TailRegime::extremely_heavy: return "EHT";
        case TailRegime::heavy: return "HT";
        case TailRegime::moderately_heavy: return "MHT";
        case TailRegime::light: return "LT";
    }
    return "?";
}

double student_t_pdf(double x, double nu) {
    if (!(nu > 0.0)) throw invalid_input("student_t_pdf: nu must be positive");
    double log_norm = 0.5 * std::log(2.0 / (nu * pi)) + std::lgamma(0.5 * (nu + 1.0)) -
                      std::lgamma(0.5 * nu);
    return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(2.0 * x * x / nu));
}

double ginue_entry_pdf(double x) { return std::exp(-x * x) / std::sqrt(pi); }

Matrix sample_ginibre(int rows, int cols, StreamRng& rng) {
    check_dim(rows, "sample_ginibre");
    check_dim(cols, "sample_ginibre");
    const double s = 1.0 / std::sqrt(2.0);
    Matrix x(rows, cols);
    // column-major fill so the draw order matches Eigen's storage order
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i)
            x(i, j) = Complex(s * rng.normal(), s * rng.normal());
    return x;
}

Matrix sample_ginibre(int n, StreamRng& rng) { return sample_ginibre(n, n, rng); }

Matrix sample_ginibre(int n, SeedSpec seed) {
    StreamRng rng(seed);
    return sample_ginibre(n, n, rng);
}

Matrix sample_student_t_matrix(int n, double nu, StreamRng& rng) {
    check_dim(n, "sample_student_t_matrix");
    if (!(nu > 0.0)) throw invalid_input("sample_student_t_matrix: nu must be positive");
    Matrix x(n, n);
    auto draw = [&]() {
        double g = rng.normal();
        double w = rng.chi_squared(nu);
        return g / std::sqrt(2.0 * w / nu);
    };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double re = draw();
            double im = draw();
            x(i, j) = Complex(re, im);
        }
    return x;
}

Matrix sample_student_t_matrix(int n, double nu, SeedSpec seed) {
    StreamRng rng(seed);
    return sample_student_t_matrix(n, nu, rng);
}

Matrix build_kossakowski(const Matrix& x, int system_dim) {
    check_dim(system_dim, "build_kossakowski");
    const int m = system_dim * system_dim - 1;
    if (x.rows() != m || x.cols() != m)
        throw invalid_input("build_kossakowski: X must be (N^2-1) x (N^2-1)");
    Matrix gram = x * x.adjoint();
    double tr = gram.real().trace();
    if (!(tr > 0.0))
        throw invalid_input("build_kossakowski: Tr[X X^dag] must be positive");
    Matrix k = (static_cast<double>(system_dim) / tr) * gram;
    // exact Hermitian symmetrization; the Gram product is Hermitian up to rounding
    return 0.5 * (k + k.adjoint());
}

Matrix sample_gue_hamiltonian(int n, StreamRng& rng) {
    check_dim(n, "sample_gue_hamiltonian");
    Matrix x = sample_ginibre(n, n, rng);
    Matrix h = (x + x.adjoint()) / std::sqrt(2.0 * n);
    return 0.5 * (h + h.adjoint());
}

Matrix sample_gue_hamiltonian(int n, SeedSpec seed) {
    StreamRng rng(seed);
    return sample_gue_hamiltonian(n, rng);
}

Matrix sample_haar_unitary(int n, StreamRng& rng) {
    check_dim(n, "sample_haar_unitary");
    Matrix z = sample_ginibre(n, n, rng);
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // absorb the R-diagonal phases so the distribution is exactly Haar
    for (int j = 0; j < n; ++j) {
        Complex d = r(j, j);
        double a = std::abs(d);
        q.col(j) *= (a > 0.0) ? d / a : Complex(1.0, 0.0);
    }
    return q;
}

Matrix sample_haar_pure_state(int n, StreamRng& rng) {
    Matrix u = sample_haar_unitary(n, rng);
    Vector psi = u.col(0);
    return psi * psi.adjoint();
}

Matrix sample_haar_pure_state(int n, SeedSpec seed) {
    StreamRng rng(seed);
    return sample_haar_pure_state(n, rng);
}

double estimate_tail_index(const std::vector<double>& samples, int k) {
    if (k < 10) throw invalid_input("estimate_tail_index: k must be at least 10");
    std::vector<double> mags;
    mags.reserve(samples.size());
    for (double s : samples) {
        double a = std::abs(s);
        if (a > 0.0) mags.push_back(a);
    }
    if (mags.size() < static_cast<std::size_t>(k) + 1)
        throw invalid_input("estimate_tail_index: need more than k nonzero samples");
    std::partial_sort(mags.begin(), mags.begin() + k + 1, mags.end(),
                      std::greater<double>());
    double acc = 0.0;
    for (int i = 0; i < k; ++i) acc += std::log(mags[i] / mags[k]);
    if (!(acc > 0.0))
        throw computation_error("estimate_tail_index: degenerate order statistics");
    return static_cast<double>(k) / acc;
}

int default_hill_k(std::size_t sample_count) {
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(sample_count))));
}

}  // namespace roqs::ensembles
