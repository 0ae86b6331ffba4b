// liouvillian.hpp — GKSL generator assembly and direct right-hand-side oracle
//
// A LindbladModel is (H, K, alpha, hbar) over the canonical SU(N) generator
// basis of basis::su_generators(N); any other generator basis is equivalent to
// a unitary rotation of K (see basis::transform_kossakowski), so the basis is
// kept implicit instead of storing N^2-1 dense matrices per model.
//
// build_superoperator assembles the N^2 x N^2 matrix
//   L = -(i/hbar) (I (x) H - H^T (x) I)
//       + (alpha/hbar)^2 sum_kl K_kl [ S_k* (x) S_l
//                                      - 1/2 (I (x) S_k^dag S_l + S_l^T S_k* (x) I) ]
// in the column-stacking convention, via the spectral factorization of K
// (eigenvalues below 1e-12*N dropped).  apply_rhs_direct evaluates the same
// generator term-by-term on a density matrix without any Kronecker machinery
// and serves as the module's independent correctness oracle.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roqs/basis.hpp"
#include "roqs/types.hpp"

namespace roqs::liouville {

struct LindbladModel {
    int system_dim = 0;
    Matrix hamiltonian;  // N x N, Hermitian
    Matrix kossakowski;  // (N^2-1) x (N^2-1), Hermitian PSD, Tr = N
    double alpha = 1.0;
    double hbar = 1.0;
};

struct Superoperator {
    int system_dim = 0;
    Matrix matrix;  // N^2 x N^2
    std::uint64_t model_fingerprint = 0;
    double trace_residual = 0.0;  // measured |vec(I)^dag L| / ||L||, always checked
};

// validating constructor: Hermiticity of H and K, K PSD, Tr[K] = N
LindbladModel make_model(Matrix hamiltonian, Matrix kossakowski, double alpha = 1.0,
                         double hbar = 1.0);

// test-only bypass admitting unnormalized or zero K (unitary-limit oracles)
LindbladModel make_model_unchecked(Matrix hamiltonian, Matrix kossakowski,
                                   double alpha = 1.0, double hbar = 1.0);

// effective jump operators from the factorization K = sum_a c_a v_a v_a^dag:
// L_a = sum_l conj(v_a)_l S_l with rate c_a, eigenvalues below 1e-12*N dropped
struct JumpOperators {
    std::vector<double> rates;
    std::vector<Matrix> ops;
};
JumpOperators jump_operators(const LindbladModel& model);

// fast assembly (one Gram GEMM plus an index reshuffle); verifies the
// trace-preservation identity vec(I)^dag L = 0 before returning
Superoperator build_superoperator(const LindbladModel& model);

// reference assembly via the explicit double sum over (k, l); small N only
Matrix build_superoperator_naive(const LindbladModel& model);

// d(rho)/dt evaluated term-by-term (commutator plus double sum)
Matrix apply_rhs_direct(const LindbladModel& model, const Matrix& rho);

// order-independent content hash of (N, alpha, hbar, H, K)
std::uint64_t model_fingerprint(const LindbladModel& model);

// binary round trip: one unsigned 64-bit dimension, then row-major complex
// doubles, little-endian
void dump_superoperator(const Superoperator& sup, const std::string& path);
Matrix load_superoperator(const std::string& path);

}  // namespace roqs::liouville
