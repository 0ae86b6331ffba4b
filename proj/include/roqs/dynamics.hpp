// dynamics.hpp — spectral propagation, coherence metrics, and sensitivity
//
// Density matrices evolve through the biorthonormal expansion
//   rho(t) = sum_m e^{lambda_m t} R_m <L_m|vec(rho0)>.
// The observables are the relative entropy of coherence C_E = S(diag rho) -
// S(rho) and the von Neumann entropy S, both in nats.  Coherence times come
// from a three-parameter exponential fit, and sensitivity to a Hamiltonian
// perturbation is summarized by |T2' - T2| and the time-averaged squared
// log-ratio of the two coherence trajectories.
#pragma once

#include <vector>

#include "roqs/rng.hpp"
#include "roqs/spectral.hpp"
#include "roqs/types.hpp"

namespace roqs::dynamics {

struct TimeGrid {
    std::vector<double> points;  // starts at 0, strictly increasing
};

TimeGrid uniform_grid(double t_end, int points);

struct TrajectoryRecord {
    TimeGrid grid;
    std::vector<double> coherence;  // C_E(t)
    std::vector<double> entropy;    // S(t)
    double trace_error = 0.0;       // max |Tr rho(t) - 1|
    double positivity_error = 0.0;  // max |most negative eigenvalue|
    double hermiticity_residual = 0.0;  // max anti-Hermitian part before symmetrization
    bool unreliable = false;  // flagged modes carried > 1e-6 of the initial weight
};

struct FitResult {
    double amplitude = 0.0;
    double coherence_time = 0.0;
    double offset = 0.0;
    double rms_residual = 0.0;
    bool converged = false;
};

// rho(t) at every grid point; each state is symmetrized before being returned
std::vector<Matrix> evolve(const spectral::SpectralDecomposition& dec,
                           const Matrix& rho0, const TimeGrid& grid);

// S(diag rho) - S(rho), natural logarithm; eigenvalues below 1e-14 contribute 0
double relative_entropy_coherence(const Matrix& rho);
double von_neumann_entropy(const Matrix& rho);

// evolve + per-point metrics in one pass
TrajectoryRecord propagate_coherence(const spectral::SpectralDecomposition& dec,
                                     const Matrix& rho0, const TimeGrid& grid);

// least-squares fit of C_E(t) = A exp(-t/T2) + C0 (Levenberg-Marquardt);
// non-convergence yields converged = false with best-effort parameters
FitResult fit_coherence_time(const TimeGrid& grid, const std::vector<double>& coherence);

struct PerturbationMetrics {
    double delta_t2 = 0.0;           // |T2_V - T2_0|
    double delta_t2_relative = 0.0;  // |T2_V - T2_0| / T2_0
    double delta_ce = 0.0;           // (1/2T2) int_0^{2T2} ln^2(C_V/C_0) dt
};

// both series must share a grid spanning at least [0, 2 t2_ref]; series are
// floored at 1e-12 before the log-ratio
PerturbationMetrics coherence_perturbation_metrics(const std::vector<double>& c0,
                                                   const std::vector<double>& cv,
                                                   const TimeGrid& grid, double t2_ref);

// independent GUE draw scaled by 1/10 (second moments 1/100 of the base draw)
Matrix make_perturbation(int n, ensembles::StreamRng& rng);
Matrix make_perturbation(int n, ensembles::SeedSpec seed);

// uniform grid on [0, t_end]: t_end doubles from 10/|median Re lambda| until
// the propagated C_E falls below 1e-3 of C_E(0), capped at 1e6 time units
struct GridChoice {
    TimeGrid grid;
    bool hit_cap = false;  // no-decay flag
};
GridChoice choose_time_grid(const spectral::SpectralDecomposition& dec,
                            const Matrix& rho0, int target_points);

}  // namespace roqs::dynamics
