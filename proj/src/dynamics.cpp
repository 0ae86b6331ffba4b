// dynamics.cpp — propagation, entropies, fitting, sensitivity metrics
#include "roqs/dynamics.hpp"

#include "roqs/ensembles.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace roqs::dynamics {

namespace {

void check_grid(const TimeGrid& grid) {
    if (grid.points.size() < 2) throw invalid_input("TimeGrid: need at least two points");
    if (grid.points.front() != 0.0) throw invalid_input("TimeGrid: first point must be 0");
    for (std::size_t i = 1; i < grid.points.size(); ++i)
        if (!(grid.points[i] > grid.points[i - 1]))
            throw invalid_input("TimeGrid: points must be strictly increasing");
}

void check_density_matrix(const Matrix& rho, const char* who) {
    if (rho.rows() != rho.cols()) throw invalid_input(std::string(who) + ": rho must be square");
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-6)
        throw invalid_input(std::string(who) + ": trace of rho must be 1");
}

// entropy of a probability vector; tiny negatives are clipped, real negatives rejected
double entropy_from_weights(const RealVector& w, const char* who) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        double p = w(i);
        if (p < -1e-8)
            throw invalid_input(std::string(who) + ": state has a significant negative eigenvalue");
        if (p > 1e-14) s -= p * std::log(p);
    }
    return s;
}

// mode coefficients of the initial state, plus the weight on flagged modes
Vector initial_coefficients(const spectral::SpectralDecomposition& dec, const Matrix& rho0,
                            bool* unreliable) {
    Vector c = dec.left.adjoint() * basis::vectorize(rho0);
    if (unreliable) {
        double total = c.cwiseAbs().sum();
        double bad = 0.0;
        for (Eigen::Index m = 0; m < c.size(); ++m)
            if (dec.flagged[static_cast<std::size_t>(m)]) bad += std::abs(c(m));
        *unreliable = total > 0.0 && bad > 1e-6 * total;
    }
    return c;
}

Matrix state_at(const spectral::SpectralDecomposition& dec, const Vector& coeff, double t,
                double* herm_resid) {
    Vector amp(coeff.size());
    for (Eigen::Index m = 0; m < coeff.size(); ++m)
        amp(m) = coeff(m) * std::exp(dec.eigenvalues(m) * t);
    Matrix rho = basis::devectorize(dec.right * amp);
    if (herm_resid) {
        double r = 0.5 * (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        *herm_resid = std::max(*herm_resid, r);
    }
    return 0.5 * (rho + rho.adjoint());
}

}  // namespace

TimeGrid uniform_grid(double t_end, int points) {
    if (points < 2) throw invalid_input("uniform_grid: need at least two points");
    if (!(t_end > 0.0)) throw invalid_input("uniform_grid: t_end must be positive");
    TimeGrid grid;
    grid.points.resize(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        grid.points[static_cast<std::size_t>(i)] =
            t_end * static_cast<double>(i) / static_cast<double>(points - 1);
    grid.points.front() = 0.0;
    return grid;
}

std::vector<Matrix> evolve(const spectral::SpectralDecomposition& dec, const Matrix& rho0,
                           const TimeGrid& grid) {
    check_grid(grid);
    check_density_matrix(rho0, "evolve");
    Vector c = initial_coefficients(dec, rho0, nullptr);
    std::vector<Matrix> out;
    out.reserve(grid.points.size());
    for (double t : grid.points) out.push_back(state_at(dec, c, t, nullptr));
    return out;
}

double von_neumann_entropy(const Matrix& rho) {
    check_density_matrix(rho, "von_neumann_entropy");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()),
                                             Eigen::EigenvaluesOnly);
    return entropy_from_weights(es.eigenvalues(), "von_neumann_entropy");
}

double relative_entropy_coherence(const Matrix& rho) {
    check_density_matrix(rho, "relative_entropy_coherence");
    RealVector diag = rho.diagonal().real();
    double s_diag = entropy_from_weights(diag, "relative_entropy_coherence");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()),
                                             Eigen::EigenvaluesOnly);
    double s_full = entropy_from_weights(es.eigenvalues(), "relative_entropy_coherence");
    return s_diag - s_full;
}

TrajectoryRecord propagate_coherence(const spectral::SpectralDecomposition& dec,
                                     const Matrix& rho0, const TimeGrid& grid) {
    check_grid(grid);
    check_density_matrix(rho0, "propagate_coherence");
    TrajectoryRecord rec;
    rec.grid = grid;
    Vector c = initial_coefficients(dec, rho0, &rec.unreliable);
    rec.coherence.reserve(grid.points.size());
    rec.entropy.reserve(grid.points.size());
    for (double t : grid.points) {
        Matrix rho = state_at(dec, c, t, &rec.hermiticity_residual);
        rec.trace_error =
            std::max(rec.trace_error, std::abs(rho.trace() - Complex(1.0, 0.0)));
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
        double min_eig = es.eigenvalues().minCoeff();
        if (min_eig < 0.0) rec.positivity_error = std::max(rec.positivity_error, -min_eig);
        double s_full = entropy_from_weights(es.eigenvalues(), "propagate_coherence");
        double s_diag = entropy_from_weights(rho.diagonal().real(), "propagate_coherence");
        rec.entropy.push_back(s_full);
        rec.coherence.push_back(s_diag - s_full);
    }
    return rec;
}

FitResult fit_coherence_time(const TimeGrid& grid, const std::vector<double>& coherence) {
    check_grid(grid);
    const std::size_t n = grid.points.size();
    if (coherence.size() != n)
        throw invalid_input("fit_coherence_time: series/grid size mismatch");
    if (n < 8) throw invalid_input("fit_coherence_time: need at least 8 points");

    // initialization from the data shape
    double c0 = coherence.back();
    double a = coherence.front() - c0;
    double t2 = 0.5 * grid.points.back();
    const double knee = c0 + a / std::exp(1.0);
    for (std::size_t i = 0; i < n; ++i)
        if (coherence[i] < knee) {
            if (grid.points[i] > 0.0) t2 = grid.points[i];
            break;
        }
    if (!(t2 > 0.0)) t2 = 0.5 * grid.points.back();

    auto cost = [&](double pa, double pt, double pc) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = pa * std::exp(-grid.points[i] / pt) + pc - coherence[i];
            acc += r * r;
        }
        return acc;
    };

    double lambda = 1e-3;
    double current = cost(a, t2, c0);
    bool converged = false;
    for (int iter = 0; iter < 200 && !converged; ++iter) {
        // accumulate J^T J and J^T r for the three parameters
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            double e = std::exp(-grid.points[i] / t2);
            double r = a * e + c0 - coherence[i];
            Eigen::Vector3d j(e, a * e * grid.points[i] / (t2 * t2), 1.0);
            jtj += j * j.transpose();
            jtr += j * r;
        }
        bool accepted = false;
        for (int tries = 0; tries < 12 && !accepted; ++tries) {
            Eigen::Matrix3d damped = jtj;
            for (int d = 0; d < 3; ++d)
                damped(d, d) += lambda * std::max(jtj(d, d), 1e-30);
            Eigen::Vector3d step = damped.ldlt().solve(-jtr);
            double na = a + step(0), nt = t2 + step(1), nc = c0 + step(2);
            if (nt > 0.0) {
                double trial = cost(na, nt, nc);
                if (trial <= current) {
                    double rel = std::max({std::abs(step(0)) / (std::abs(a) + 1e-30),
                                           std::abs(step(1)) / (std::abs(t2) + 1e-30),
                                           std::abs(step(2)) / (std::abs(c0) + 1e-30)});
                    a = na;
                    t2 = nt;
                    c0 = nc;
                    current = trial;
                    lambda = std::max(lambda * 0.1, 1e-12);
                    accepted = true;
                    if (rel < 1e-8) converged = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (!accepted) break;  // no descent direction left
    }

    FitResult fit;
    fit.amplitude = a;
    fit.coherence_time = t2;
    fit.offset = c0;
    fit.rms_residual = std::sqrt(current / static_cast<double>(n));
    fit.converged = converged && t2 > 0.0;
    return fit;
}

PerturbationMetrics coherence_perturbation_metrics(const std::vector<double>& c0,
                                                   const std::vector<double>& cv,
                                                   const TimeGrid& grid, double t2_ref) {
    check_grid(grid);
    if (c0.size() != grid.points.size() || cv.size() != grid.points.size())
        throw invalid_input("coherence_perturbation_metrics: series/grid size mismatch");
    if (!(t2_ref > 0.0))
        throw invalid_input("coherence_perturbation_metrics: reference T2 must be positive");
    const double horizon = 2.0 * t2_ref;
    if (grid.points.back() < horizon * (1.0 - 1e-12))
        throw invalid_input("coherence_perturbation_metrics: grid does not span [0, 2 T2]");

    auto integrand = [&](std::size_t i) {
        double r = std::log(std::max(cv[i], 1e-12) / std::max(c0[i], 1e-12));
        return r * r;
    };
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < grid.points.size(); ++i) {
        double t0 = grid.points[i], t1 = grid.points[i + 1];
        if (t0 >= horizon) break;
        double f0 = integrand(i), f1 = integrand(i + 1);
        if (t1 > horizon) {  // clip the final segment at the horizon
            double w = (horizon - t0) / (t1 - t0);
            f1 = f0 + w * (f1 - f0);
            t1 = horizon;
        }
        acc += 0.5 * (f0 + f1) * (t1 - t0);
    }

    PerturbationMetrics out;
    out.delta_ce = acc / horizon;
    FitResult fv = fit_coherence_time(grid, cv);
    out.delta_t2 = std::abs(fv.coherence_time - t2_ref);
    out.delta_t2_relative = out.delta_t2 / t2_ref;
    return out;
}

Matrix make_perturbation(int n, ensembles::StreamRng& rng) {
    return ensembles::sample_gue_hamiltonian(n, rng) / 10.0;
}

Matrix make_perturbation(int n, ensembles::SeedSpec seed) {
    ensembles::StreamRng rng(seed);
    return make_perturbation(n, rng);
}

GridChoice choose_time_grid(const spectral::SpectralDecomposition& dec, const Matrix& rho0,
                            int target_points) {
    check_density_matrix(rho0, "choose_time_grid");
    if (target_points < 2) throw invalid_input("choose_time_grid: need at least two points");
    const double cap = 1e6;

    // middle element in descending order, so the zero modes at the top of the
    // spectrum do not masquerade as the typical decay rate (ascending index
    // n/2 would return 0 for the dephasing spectrum {0, 0, -2, -2})
    std::vector<double> res(static_cast<std::size_t>(dec.eigenvalues.size()));
    for (Eigen::Index m = 0; m < dec.eigenvalues.size(); ++m)
        res[static_cast<std::size_t>(m)] = dec.eigenvalues(m).real();
    std::size_t mid = (res.size() - 1) / 2;
    std::nth_element(res.begin(), res.begin() + static_cast<std::ptrdiff_t>(mid), res.end());
    double median = res[mid];

    GridChoice out;
    if (std::abs(median) < 1e-300) {  // purely oscillatory spectrum never decays
        out.hit_cap = true;
        out.grid = uniform_grid(cap, target_points);
        return out;
    }

    Vector c = initial_coefficients(dec, rho0, nullptr);
    double ce0 = relative_entropy_coherence(rho0);
    const double threshold = std::max(1e-3 * ce0, 1e-15);
    double t_end = 10.0 / std::abs(median);
    while (t_end < cap) {
        Matrix rho = state_at(dec, c, t_end, nullptr);
        double ce = 0.0;
        // evaluate C_E defensively: a slightly unphysical tail state should
        // stop the doubling rather than abort the sweep
        try {
            ce = relative_entropy_coherence(rho);
        } catch (const invalid_input&) {
            break;
        }
        if (ce < threshold) break;
        t_end *= 2.0;
    }
    if (t_end >= cap) {
        t_end = cap;
        out.hit_cap = true;
    }
    out.grid = uniform_grid(t_end, target_points);
    return out;
}

}  // namespace roqs::dynamics
