// spectral.cpp — decomposition, pairing, and spectral metrics
#include "roqs/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace roqs::spectral {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

std::vector<int> canonical_order(const Vector& lam) {
    std::vector<int> idx(static_cast<std::size_t>(lam.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        double ra = lam(a).real(), rb = lam(b).real();
        if (ra != rb) return ra > rb;
        double ia = std::abs(lam(a).imag()), ib = std::abs(lam(b).imag());
        if (ia != ib) return ia < ib;
        return lam(a).imag() < lam(b).imag();
    });
    return idx;
}

}  // namespace

SpectralDecomposition decompose(const Matrix& matrix) {
    if (matrix.rows() != matrix.cols())
        throw invalid_input("decompose: matrix must be square");
    const auto dim = matrix.rows();

    Eigen::ComplexEigenSolver<Matrix> right_solver(matrix, true);
    if (right_solver.info() != Eigen::Success)
        throw computation_error("decompose: right eigensolver failed");
    Eigen::ComplexEigenSolver<Matrix> left_solver(matrix.adjoint(), true);
    if (left_solver.info() != Eigen::Success)
        throw computation_error("decompose: adjoint eigensolver failed");

    SpectralDecomposition dec;
    dec.dim = static_cast<int>(dim);
    dec.operator_norm = matrix.norm();
    dec.eigenvalues.resize(dim);
    dec.right.resize(dim, dim);
    dec.left.resize(dim, dim);
    dec.flagged.assign(static_cast<std::size_t>(dim), false);

    auto order = canonical_order(right_solver.eigenvalues());
    for (Eigen::Index m = 0; m < dim; ++m) {
        dec.eigenvalues(m) = right_solver.eigenvalues()(order[static_cast<std::size_t>(m)]);
        dec.right.col(m) = right_solver.eigenvectors().col(order[static_cast<std::size_t>(m)]);
        dec.right.col(m).normalize();
    }

    // candidate left vectors: column w of the adjoint problem at eigenvalue mu
    // satisfies w^dag L = conj(mu) w^dag, i.e. it belongs with lambda = conj(mu)
    const Vector& mu = left_solver.eigenvalues();
    const Matrix& w = left_solver.eigenvectors();
    const double match_tol = std::max(1e-6 * dec.operator_norm, 1e-300);
    std::vector<bool> used(static_cast<std::size_t>(dim), false);

    for (Eigen::Index m = 0; m < dim; ++m) {
        const Complex lam = dec.eigenvalues(m);
        // nearest unused candidate by eigenvalue distance
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < dim; ++c) {
            if (used[static_cast<std::size_t>(c)]) continue;
            double d = std::abs(std::conj(mu(c)) - lam);
            if (d < best_dist) {
                best_dist = d;
                best = static_cast<int>(c);
            }
        }
        // inside a degenerate cluster eigenvalue distance cannot discriminate;
        // rank all candidates within the tolerance by actual overlap
        if (best >= 0 && best_dist <= match_tol) {
            double best_overlap = -1.0;
            for (Eigen::Index c = 0; c < dim; ++c) {
                if (used[static_cast<std::size_t>(c)]) continue;
                if (std::abs(std::conj(mu(c)) - lam) > match_tol) continue;
                double ov = std::abs(w.col(c).dot(dec.right.col(m)));
                if (ov > best_overlap) {
                    best_overlap = ov;
                    best = static_cast<int>(c);
                }
            }
        }
        if (best < 0) {
            dec.flagged[static_cast<std::size_t>(m)] = true;
            dec.left.col(m).setZero();
            continue;
        }
        used[static_cast<std::size_t>(best)] = true;
        if (best_dist > match_tol) dec.flagged[static_cast<std::size_t>(m)] = true;

        Vector wcol = w.col(best).normalized();
        Complex overlap = wcol.dot(dec.right.col(m));  // <w|r>
        if (std::abs(overlap) < 1e-10) {
            dec.flagged[static_cast<std::size_t>(m)] = true;
            dec.left.col(m) = wcol;
            continue;
        }
        dec.left.col(m) = wcol / std::conj(overlap);  // now <left|right> = 1
    }
    return dec;
}

SpectralDecomposition decompose(const liouville::Superoperator& sup) {
    return decompose(sup.matrix);
}

double spectral_gap(const SpectralDecomposition& dec) {
    if (dec.eigenvalues.size() < 2)
        throw invalid_input("spectral_gap: need at least two eigenvalues");
    return std::max(0.0, -dec.eigenvalues(1).real());
}

RealVector petermann_factors(const SpectralDecomposition& dec) {
    RealVector k(dec.eigenvalues.size());
    for (Eigen::Index m = 0; m < k.size(); ++m)
        k(m) = dec.right.col(m).squaredNorm() * dec.left.col(m).squaredNorm();
    return k;
}

RealVector q_factors(const SpectralDecomposition& dec) {
    const double floor = 1e-12 * dec.operator_norm;
    RealVector q(dec.eigenvalues.size());
    for (Eigen::Index m = 0; m < q.size(); ++m) {
        double re = dec.eigenvalues(m).real();
        q(m) = (std::abs(re) > floor)
                   ? std::abs(dec.eigenvalues(m).imag() / (2.0 * re))
                   : nan_value;
    }
    return q;
}

RealVector nn_spacings(const Vector& eigenvalues) {
    const auto n = eigenvalues.size();
    if (n < 2) throw invalid_input("nn_spacings: need at least two eigenvalues");
    RealVector out(n);
    for (Eigen::Index m = 0; m < n; ++m) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == m) continue;
            best = std::min(best, std::abs(eigenvalues(m) - eigenvalues(j)));
        }
        out(m) = best;
    }
    return out;
}

RealVector nn_spacings(const SpectralDecomposition& dec) {
    return nn_spacings(dec.eigenvalues);
}

std::vector<double> empirical_ccdf(const std::vector<double>& values,
                                   const std::vector<double>& grid) {
    if (values.empty()) throw invalid_input("empirical_ccdf: empty sample set");
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(grid.size());
    for (double g : grid) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), g);
        out.push_back(static_cast<double>(sorted.end() - it) /
                      static_cast<double>(sorted.size()));
    }
    return out;
}

Histogram pdf_histogram(const std::vector<double>& values, int bins, bool log_bins) {
    if (values.empty()) throw invalid_input("pdf_histogram: empty sample set");
    if (bins < 1) throw invalid_input("pdf_histogram: need at least one bin");
    Histogram h;
    std::vector<double> kept;
    kept.reserve(values.size());
    if (log_bins) {
        for (double v : values) {
            if (v > 0.0)
                kept.push_back(v);
            else
                ++h.excluded;
        }
        if (kept.empty())
            throw invalid_input("pdf_histogram: no positive samples for log binning");
    } else {
        kept = values;
    }
    auto [mn_it, mx_it] = std::minmax_element(kept.begin(), kept.end());
    double lo = *mn_it, hi = *mx_it;
    if (lo == hi) {  // degenerate sample: widen to a tiny finite bin
        double pad = (lo == 0.0) ? 1e-12 : std::abs(lo) * 1e-12;
        lo -= pad;
        hi += pad;
    }
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    if (log_bins) {
        double llo = std::log(lo), lhi = std::log(hi);
        for (int b = 0; b <= bins; ++b)
            h.edges[static_cast<std::size_t>(b)] =
                std::exp(llo + (lhi - llo) * b / static_cast<double>(bins));
        h.edges.front() = lo;
        h.edges.back() = hi;
    } else {
        for (int b = 0; b <= bins; ++b)
            h.edges[static_cast<std::size_t>(b)] =
                lo + (hi - lo) * b / static_cast<double>(bins);
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    for (double v : kept) {
        auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
        auto b = static_cast<std::size_t>(
            std::clamp<std::ptrdiff_t>(it - h.edges.begin() - 1, 0, bins - 1));
        ++counts[b];
    }
    h.density.resize(static_cast<std::size_t>(bins));
    const double total = static_cast<double>(kept.size());
    for (int b = 0; b < bins; ++b) {
        double width = h.edges[static_cast<std::size_t>(b) + 1] - h.edges[static_cast<std::size_t>(b)];
        h.density[static_cast<std::size_t>(b)] =
            static_cast<double>(counts[static_cast<std::size_t>(b)]) / (total * width);
    }
    return h;
}

double steady_state_distance(const SpectralDecomposition& dec) {
    auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(dec.dim))));
    if (n * n != dec.dim)
        throw invalid_input("steady_state_distance: dimension is not a perfect square");
    Matrix rho = Eigen::Map<const Matrix>(dec.right.col(0).data(), n, n);
    Complex tr = rho.trace();
    if (std::abs(tr) < 1e-12) return nan_value;
    rho /= tr;
    Matrix herm = 0.5 * (rho + rho.adjoint()) - Matrix::Identity(n, n) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

liouville::Superoperator build_delta_superoperator(const Matrix& v, double hbar) {
    if (v.rows() != v.cols()) throw invalid_input("build_delta_superoperator: V must be square");
    if (!(hbar > 0.0)) throw invalid_input("build_delta_superoperator: hbar must be positive");
    if ((v - v.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw invalid_input("build_delta_superoperator: V is not Hermitian");
    const auto n = v.rows();
    const Complex scale = Complex(0.0, -1.0) / hbar;
    Matrix dl = Matrix::Zero(n * n, n * n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index i2 = 0; i2 < n; ++i2)
                dl(j * n + i, j * n + i2) += scale * v(i, i2);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index j2 = 0; j2 < n; ++j2)
                dl(j * n + i, j2 * n + i) -= scale * v(j2, j);
    liouville::Superoperator sup;
    sup.system_dim = static_cast<int>(n);
    sup.matrix = std::move(dl);
    sup.model_fingerprint = 0;
    return sup;
}

double delta_spectral_norm(const Matrix& v, double hbar) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(v, Eigen::EigenvaluesOnly);
    return (es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff()) / hbar;
}

PerturbationResult perturb_eigenvalues(const SpectralDecomposition& dec, const Matrix& dl) {
    const auto dim = dec.eigenvalues.size();
    if (dl.rows() != dim || dl.cols() != dim)
        throw invalid_input("perturb_eigenvalues: dimension mismatch");
    // overlap matrix M(m, n) = <L_m| dL |R_n>
    Matrix overlaps = dec.left.adjoint() * dl * dec.right;
    PerturbationResult res;
    res.shifts.resize(dim);
    res.first_order.resize(dim);
    const double denom_floor = 1e-12 * dec.operator_norm;
    for (Eigen::Index m = 0; m < dim; ++m) {
        Complex first = overlaps(m, m);
        Complex second = 0.0;
        for (Eigen::Index n = 0; n < dim; ++n) {
            if (n == m) continue;
            Complex denom = dec.eigenvalues(m) - dec.eigenvalues(n);
            if (std::abs(denom) < denom_floor) {
                ++res.excluded_terms;
                continue;
            }
            second += overlaps(m, n) * overlaps(n, m) / denom;
        }
        res.first_order(m) = first;
        res.shifts(m) = first + second;
    }
    return res;
}

}  // namespace roqs::spectral
