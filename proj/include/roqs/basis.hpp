// basis.hpp — SU(N) generator basis and column-stacking vectorization
#pragma once

#include <vector>

#include "roqs/types.hpp"

namespace roqs::basis {

// ordered set of the n^2-1 generalized Gell-Mann matrices, each Hermitian,
// traceless, and unit Hilbert-Schmidt norm
struct GeneratorBasis {
    int system_dim = 0;
    std::vector<Matrix> generators;
};

// canonical ordering: all symmetric pairs (E_jk + E_kj)/sqrt(2), then all
// antisymmetric pairs -i(E_jk - E_kj)/sqrt(2), both lexicographic in (j, k)
// with j < k, then the n-1 diagonal matrices
GeneratorBasis su_generators(int n);

// column stacking: entry (i, j) maps to index j*n + i
Vector vectorize(const Matrix& rho);
Matrix devectorize(const Vector& v);

// basis change of the interaction operators acts on K as U K U^dag
Matrix transform_kossakowski(const Matrix& k, const Matrix& u);

}  // namespace roqs::basis
