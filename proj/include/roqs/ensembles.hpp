// ensembles.hpp — random-matrix and random-state samplers plus tail diagnostics
//
// Samples every stochastic object the experiments need: complex Ginibre
// matrices, entrywise Student-t matrices (scale-mixture construction),
// Gram-normalized Kossakowski matrices, GUE Hamiltonians, Haar unitaries and
// Haar pure states.  Also provides the entry PDFs, the tail-regime
// classification of the t parameter nu, and a Hill tail-index estimator.
#pragma once

#include <string>
#include <vector>

#include "roqs/rng.hpp"
#include "roqs/types.hpp"

namespace roqs::ensembles {

// tail regimes of the t parameter: the boundaries mark loss of moments
// (variance at nu = 2, fourth moment at nu = 4) and practical convergence to
// Gaussian behaviour beyond nu = 30
enum class TailRegime { extremely_heavy, heavy, moderately_heavy, light };

TailRegime classify_tail(double nu);
std::string regime_label(TailRegime regime);

// entry PDF of the scaled Student-t distribution with parameter nu
// (normalized so the nu > 2 variance is nu / (2(nu-2)))
double student_t_pdf(double x, double nu);

// entry PDF of Ginibre real/imaginary parts: exp(-x^2)/sqrt(pi)
double ginue_entry_pdf(double x);

// square complex Ginibre matrix; real and imaginary parts are N(0, 1/2)
Matrix sample_ginibre(int n, StreamRng& rng);
Matrix sample_ginibre(int rows, int cols, StreamRng& rng);
Matrix sample_ginibre(int n, SeedSpec seed);

// square matrix with independent scaled-t real/imaginary parts, sampled via
// the Gaussian scale mixture  x = g / sqrt(2 w / nu),  w ~ chi^2_nu
Matrix sample_student_t_matrix(int n, double nu, StreamRng& rng);
Matrix sample_student_t_matrix(int n, double nu, SeedSpec seed);

// Gram-normalized Kossakowski matrix K = N X X^dag / Tr[X X^dag].
// X must be (N^2-1) x (N^2-1) for system dimension N.
Matrix build_kossakowski(const Matrix& x, int system_dim);

// GUE Hamiltonian H = (X + X^dag)/sqrt(2 n) from one Ginibre draw
Matrix sample_gue_hamiltonian(int n, StreamRng& rng);
Matrix sample_gue_hamiltonian(int n, SeedSpec seed);

// Haar-distributed unitary via QR of a Ginibre draw with the diagonal phase
// correction that makes the factorization unique
Matrix sample_haar_unitary(int n, StreamRng& rng);

// density matrix |psi><psi| with |psi> the first column of a Haar unitary
Matrix sample_haar_pure_state(int n, StreamRng& rng);
Matrix sample_haar_pure_state(int n, SeedSpec seed);

// Hill estimator over the k largest absolute values:
//   k / sum_{i=1..k} ln(|x|_(i) / |x|_(k+1))
// Zero entries are dropped before ranking; requires k >= 10 and more than k
// nonzero samples.
double estimate_tail_index(const std::vector<double>& samples, int k);

// conventional default k = ceil(sqrt(sample count))
int default_hill_k(std::size_t sample_count);

}  // namespace roqs::ensembles
