// helpers.hpp — shared oracles for the test suite: KS tests, an adaptive
// Runge-Kutta integrator of the direct right-hand side, and a model factory.
// These deliberately avoid the code paths they are used to check.
#pragma once

#include "roqs/ensembles.hpp"
#include "roqs/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace testsupport {

// asymptotic Kolmogorov survival function Q(x) = 2 sum_k (-1)^{k-1} e^{-2k^2x^2}
inline double kolmogorov_q(double x) {
    if (x < 0.2) return 1.0;
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * x * x);
        q += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::min(1.0, std::max(0.0, q));
}

// one-sample KS p-value against a continuous CDF (Stephens' small-n correction)
template <class Cdf>
double ks_p_value(std::vector<double> samples, Cdf cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return kolmogorov_q((std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d);
}

inline double ks_p_value_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(a.size()) -
                                 static_cast<double>(j) / static_cast<double>(b.size())));
    }
    double ne = static_cast<double>(a.size()) * static_cast<double>(b.size()) /
                static_cast<double>(a.size() + b.size());
    return kolmogorov_q((std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d);
}

// adaptive Runge-Kutta-Fehlberg 4(5) on d(rho)/dt evaluated term-by-term;
// independent of the spectral-expansion propagator it is used to validate
inline roqs::Matrix integrate_rhs(const roqs::liouville::LindbladModel& model,
                                  roqs::Matrix rho, double t0, double t1,
                                  double tol = 1e-9) {
    using roqs::Matrix;
    auto f = [&](const Matrix& y) { return roqs::liouville::apply_rhs_direct(model, y); };
    double t = t0;
    double h = std::min(1e-2, (t1 - t0) / 4.0 + 1e-12);
    while (t < t1) {
        h = std::min(h, t1 - t);
        Matrix k1 = f(rho);
        Matrix k2 = f(rho + h * (k1 / 4.0));
        Matrix k3 = f(rho + h * (3.0 / 32 * k1 + 9.0 / 32 * k2));
        Matrix k4 =
            f(rho + h * (1932.0 / 2197 * k1 - 7200.0 / 2197 * k2 + 7296.0 / 2197 * k3));
        Matrix k5 = f(rho + h * (439.0 / 216 * k1 - 8.0 * k2 + 3680.0 / 513 * k3 -
                                 845.0 / 4104 * k4));
        Matrix k6 = f(rho + h * (-8.0 / 27 * k1 + 2.0 * k2 - 3544.0 / 2565 * k3 +
                                 1859.0 / 4104 * k4 - 11.0 / 40 * k5));
        Matrix y5 = rho + h * (16.0 / 135 * k1 + 6656.0 / 12825 * k3 +
                               28561.0 / 56430 * k4 - 9.0 / 50 * k5 + 2.0 / 55 * k6);
        Matrix y4 = rho + h * (25.0 / 216 * k1 + 1408.0 / 2565 * k3 +
                               2197.0 / 4104 * k4 - 1.0 / 5 * k5);
        double err = (y5 - y4).norm();
        double scale = tol * std::max(1.0, rho.norm());
        if (err <= scale) {
            t += h;
            rho = y5;
        }
        double factor = err > 0.0 ? 0.9 * std::pow(scale / err, 0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, factor));
        if (h < 1e-14) throw roqs::computation_error("integrate_rhs: step underflow");
    }
    return rho;
}

// random valid model; nu = 0 selects the Ginibre-driven interaction
inline roqs::liouville::LindbladModel random_model(int n, std::uint64_t seed, bool gue_h,
                                                   double nu = 0.0) {
    using namespace roqs::ensembles;
    StreamRng rng({seed, 404});
    const int m = n * n - 1;
    roqs::Matrix x = nu > 0.0 ? sample_student_t_matrix(m, nu, rng) : sample_ginibre(m, rng);
    roqs::Matrix k = build_kossakowski(x, n);
    roqs::Matrix h = gue_h ? sample_gue_hamiltonian(n, rng)
                           : roqs::Matrix::Zero(n, n).eval();
    return roqs::liouville::make_model(h, k);
}

// random pure density matrix from the same stream family
inline roqs::Matrix random_pure_state(int n, std::uint64_t seed) {
    roqs::ensembles::StreamRng rng({seed, 405});
    return roqs::ensembles::sample_haar_pure_state(n, rng);
}

}  // namespace testsupport
