// spectral.hpp — biorthonormal eigendecomposition and spectral statistics
//
// decompose() produces right and left eigenvector sets of a (generally
// non-normal) superoperator, paired mode-by-mode and normalized to
// <left_m|right_m> = 1.  On top of that sit the scalar diagnostics: spectral
// gap, Petermann factors, quality factors, nearest-neighbour spacings,
// CCDF/PDF estimators, and second-order eigenvalue perturbation.
#pragma once

#include <cstddef>
#include <vector>

#include "roqs/liouvillian.hpp"
#include "roqs/types.hpp"

namespace roqs::spectral {

struct SpectralDecomposition {
    int dim = 0;               // matrix dimension (N^2 for a Liouvillian)
    Vector eigenvalues;        // sorted: descending Re, then ascending |Im|, then Im
    Matrix right;              // columns, unit Euclidean norm
    Matrix left;               // columns, scaled so <left_m|right_m> = 1
    std::vector<bool> flagged; // near-defective or unmatched left/right pairs
    double operator_norm = 0;  // Frobenius norm of the input, tolerance reference
};

// full dense decomposition; left vectors come from the adjoint eigenproblem,
// matched to right modes by eigenvalue proximity (overlap-ranked inside
// degenerate clusters) and rescaled.  Modes whose left/right overlap is below
// 1e-10 before rescaling are flagged near-defective, not fatal.
SpectralDecomposition decompose(const Matrix& matrix);
SpectralDecomposition decompose(const liouville::Superoperator& sup);

// Delta_lambda = max(0, -Re lambda_2); clamped against rounding noise
double spectral_gap(const SpectralDecomposition& dec);

// K_m = <R_m|R_m><L_m|L_m> under <L_m|R_m> = 1; >= 1 up to rounding.
// Values at flagged modes are computed but carry no meaning.
RealVector petermann_factors(const SpectralDecomposition& dec);

// Q = |Im lambda / (2 Re lambda)| where |Re lambda| > 1e-12 * norm; NaN elsewhere
RealVector q_factors(const SpectralDecomposition& dec);

// per-mode minimum complex-plane distance to any other eigenvalue
RealVector nn_spacings(const Vector& eigenvalues);
RealVector nn_spacings(const SpectralDecomposition& dec);

// CCDF(g) = fraction of values >= g for each grid point
std::vector<double> empirical_ccdf(const std::vector<double>& values,
                                   const std::vector<double>& grid);

struct Histogram {
    std::vector<double> edges;    // bins+1 ascending edges
    std::vector<double> density;  // per-bin density, integral one over kept samples
    std::size_t excluded = 0;     // non-positive samples dropped under log binning
};

// density-normalized histogram; log_bins uses geometric edges over the
// positive samples (needed to resolve heavy-tailed data)
Histogram pdf_histogram(const std::vector<double>& values, int bins, bool log_bins);

// trace distance of the (trace-normalized) right zero mode from I/N;
// NaN when the zero mode carries no trace
double steady_state_distance(const SpectralDecomposition& dec);

// dL = -(i/hbar)(I (x) V - V^T (x) I), the superoperator difference induced
// by H -> H + V; equals build_superoperator(H+V,K) - build_superoperator(H,K)
liouville::Superoperator build_delta_superoperator(const Matrix& v, double hbar);

// spectral norm of dL from the eigenvalues of V: (max_j v_j - min_j v_j)/hbar
// (dL is normal, so no large SVD is needed)
double delta_spectral_norm(const Matrix& v, double hbar);

struct PerturbationResult {
    Vector shifts;                // first plus second order, per mode
    Vector first_order;           // diagonal term alone
    std::size_t excluded_terms = 0;  // quasi-degenerate denominators skipped
};

// second-order eigenvalue shifts
//   d lambda_m = <L_m|dL|R_m> + sum_{n != m} <L_m|dL|R_n><L_n|dL|R_m>/(lambda_m - lambda_n)
// terms with |lambda_m - lambda_n| < 1e-12 * norm are skipped and counted
PerturbationResult perturb_eigenvalues(const SpectralDecomposition& dec,
                                       const Matrix& dl);

}  // namespace roqs::spectral
