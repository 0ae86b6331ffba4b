// liouvillian.cpp — superoperator assembly, direct RHS, binary round trip
#include "roqs/liouvillian.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace roqs::liouville {

namespace {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

// sparse N^2 x (N^2-1) matrix whose column a is vec(S_a) for the canonical
// generator ordering; each generator has at most N nonzero entries
SparseMatrix generator_columns(int n) {
    const int m = n * n - 1;
    SparseMatrix s(n * n, m);
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(3 * static_cast<std::size_t>(m));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    int col = 0;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k, ++col) {
            trip.emplace_back(k * n + j, col, Complex(inv_sqrt2, 0.0));
            trip.emplace_back(j * n + k, col, Complex(inv_sqrt2, 0.0));
        }
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k, ++col) {
            trip.emplace_back(k * n + j, col, Complex(0.0, -inv_sqrt2));
            trip.emplace_back(j * n + k, col, Complex(0.0, inv_sqrt2));
        }
    for (int l = 1; l < n; ++l, ++col) {
        double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
        for (int j = 0; j < l; ++j) trip.emplace_back(j * n + j, col, Complex(norm, 0.0));
        trip.emplace_back(l * n + l, col, Complex(-l * norm, 0.0));
    }
    s.setFromTriplets(trip.begin(), trip.end());
    return s;
}

void validate(const LindbladModel& model) {
    const int n = model.system_dim;
    const int m = n * n - 1;
    if (n < 2) throw invalid_input("LindbladModel: system dimension must be at least 2");
    if (model.hamiltonian.rows() != n || model.hamiltonian.cols() != n)
        throw invalid_input("LindbladModel: H must be N x N");
    if (model.kossakowski.rows() != m || model.kossakowski.cols() != m)
        throw invalid_input("LindbladModel: K must be (N^2-1) x (N^2-1)");
    if (!(model.hbar > 0.0)) throw invalid_input("LindbladModel: hbar must be positive");
    if (model.alpha < 0.0) throw invalid_input("LindbladModel: alpha must be non-negative");
    double herm_h = (model.hamiltonian - model.hamiltonian.adjoint()).cwiseAbs().maxCoeff();
    if (herm_h > 1e-10) throw invalid_input("LindbladModel: H is not Hermitian");
    double herm_k = (model.kossakowski - model.kossakowski.adjoint()).cwiseAbs().maxCoeff();
    if (herm_k > 1e-10) throw invalid_input("LindbladModel: K is not Hermitian");
    double tr_err = std::abs(model.kossakowski.trace() - Complex(n, 0.0));
    if (tr_err > 1e-10) throw invalid_input("LindbladModel: Tr[K] must equal N");
    Eigen::SelfAdjointEigenSolver<Matrix> es(model.kossakowski, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw invalid_input("LindbladModel: K is not positive semidefinite");
}

// factorization of K with small eigenvalues dropped; returns (rates, vectors)
std::pair<RealVector, Matrix> factor_kossakowski(const Matrix& k, int n) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    if (es.info() != Eigen::Success)
        throw computation_error("build_superoperator: Kossakowski eigensolver failed");
    const double cutoff = 1e-12 * n;
    std::vector<int> keep;
    for (int a = 0; a < es.eigenvalues().size(); ++a)
        if (es.eigenvalues()(a) >= cutoff) keep.push_back(a);
    RealVector rates(keep.size());
    Matrix vecs(k.rows(), keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        rates(static_cast<Eigen::Index>(i)) = es.eigenvalues()(keep[i]);
        vecs.col(static_cast<Eigen::Index>(i)) = es.eigenvectors().col(keep[i]);
    }
    return {std::move(rates), std::move(vecs)};
}

std::uint64_t fnv1a(std::uint64_t h, const unsigned char* data, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t hash_matrix(std::uint64_t h, const Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            double parts[2] = {m(i, j).real(), m(i, j).imag()};
            h = fnv1a(h, reinterpret_cast<const unsigned char*>(parts), sizeof parts);
        }
    return h;
}

}  // namespace

LindbladModel make_model(Matrix hamiltonian, Matrix kossakowski, double alpha, double hbar) {
    LindbladModel model;
    model.system_dim = static_cast<int>(hamiltonian.rows());
    model.hamiltonian = std::move(hamiltonian);
    model.kossakowski = std::move(kossakowski);
    model.alpha = alpha;
    model.hbar = hbar;
    validate(model);
    return model;
}

LindbladModel make_model_unchecked(Matrix hamiltonian, Matrix kossakowski, double alpha,
                                   double hbar) {
    LindbladModel model;
    model.system_dim = static_cast<int>(hamiltonian.rows());
    model.hamiltonian = std::move(hamiltonian);
    model.kossakowski = std::move(kossakowski);
    model.alpha = alpha;
    model.hbar = hbar;
    return model;
}

JumpOperators jump_operators(const LindbladModel& model) {
    const int n = model.system_dim;
    auto [rates, vecs] = factor_kossakowski(model.kossakowski, n);
    auto gens = basis::su_generators(n).generators;
    JumpOperators out;
    out.rates.assign(rates.data(), rates.data() + rates.size());
    out.ops.reserve(static_cast<std::size_t>(rates.size()));
    for (Eigen::Index a = 0; a < rates.size(); ++a) {
        Matrix op = Matrix::Zero(n, n);
        for (std::size_t l = 0; l < gens.size(); ++l)
            op += std::conj(vecs(static_cast<Eigen::Index>(l), a)) * gens[l];
        out.ops.push_back(std::move(op));
    }
    return out;
}

Superoperator build_superoperator(const LindbladModel& model) {
    const int n = model.system_dim;
    const int nn = n * n;
    const Complex im(0.0, 1.0);
    const double g = (model.alpha / model.hbar) * (model.alpha / model.hbar);

    // dissipator via the factorized Gram form:
    //   G2 = S K_eff* S^dag  with  G2[c n + r, c' n + r'] = sum_kl K_kl* S_k[r,c] S_l*[r',c']
    // reshuffling G2 gives the jump term, partially tracing it gives
    // A = sum_kl K_kl S_k^dag S_l for the anticommutator
    auto [rates, vecs] = factor_kossakowski(model.kossakowski, n);
    Matrix k_eff;
    if (rates.size() == model.kossakowski.rows()) {
        k_eff = model.kossakowski;
    } else {
        k_eff = vecs * rates.asDiagonal() * vecs.adjoint();
    }
    SparseMatrix s = generator_columns(n);
    SparseMatrix s_adj = SparseMatrix(s.adjoint());
    Matrix kc = k_eff.conjugate();
    Matrix right = kc * s_adj;
    Matrix g2 = s * right;

    Matrix l = Matrix::Zero(nn, nn);
    for (int j2 = 0; j2 < n; ++j2)
        for (int i2 = 0; i2 < n; ++i2)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    l(j * n + i, j2 * n + i2) = g * g2(i2 * n + i, j2 * n + j);

    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Complex acc = 0.0;
            for (int p = 0; p < n; ++p) acc += g2(j * n + p, i * n + p);
            a(i, j) = acc;
        }

    // -1/2 (I (x) A + A^T (x) I), plus the Hamiltonian commutator part
    const Matrix& h = model.hamiltonian;
    const Complex hscale = -im / model.hbar;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int i2 = 0; i2 < n; ++i2) {
                // I (x) (.): block-diagonal action on the row index
                l(j * n + i, j * n + i2) += -0.5 * g * a(i, i2) + hscale * h(i, i2);
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int j2 = 0; j2 < n; ++j2) {
                // (.)^T (x) I: block action on the column index
                l(j * n + i, j2 * n + i) += -0.5 * g * a(j2, j) - hscale * h(j2, j);
            }

    // trace preservation must hold exactly by construction; verify before returning
    Eigen::RowVectorXcd left_null = Eigen::RowVectorXcd::Zero(nn);
    for (int i = 0; i < n; ++i) left_null += l.row(i * n + i);
    double lnorm = l.norm();
    if (lnorm > 0.0 && left_null.norm() > 1e-10 * lnorm)
        throw computation_error("build_superoperator: trace-preservation identity violated");

    Superoperator sup;
    sup.system_dim = n;
    sup.matrix = std::move(l);
    sup.model_fingerprint = model_fingerprint(model);
    sup.trace_residual = lnorm > 0.0 ? left_null.norm() / lnorm : 0.0;
    return sup;
}

Matrix build_superoperator_naive(const LindbladModel& model) {
    const int n = model.system_dim;
    const Complex im(0.0, 1.0);
    const double g = (model.alpha / model.hbar) * (model.alpha / model.hbar);
    auto gens = basis::su_generators(n).generators;
    const Matrix& k = model.kossakowski;
    const Matrix eye = Matrix::Identity(n, n);

    auto kron = [n](const Matrix& a, const Matrix& b) {
        Matrix out(n * n, n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out.block(i * n, j * n, n, n) = a(i, j) * b;
        return out;
    };

    Matrix l = kron(eye, model.hamiltonian) - kron(model.hamiltonian.transpose(), eye);
    l *= -im / model.hbar;
    for (std::size_t kk = 0; kk < gens.size(); ++kk)
        for (std::size_t ll = 0; ll < gens.size(); ++ll) {
            Complex w = g * k(static_cast<Eigen::Index>(kk), static_cast<Eigen::Index>(ll));
            if (w == Complex(0.0, 0.0)) continue;
            Matrix sk_sl = gens[kk].adjoint() * gens[ll];
            l += w * (kron(gens[kk].conjugate(), gens[ll]) -
                      0.5 * (kron(eye, sk_sl) + kron(sk_sl.transpose(), eye)));
        }
    return l;
}

Matrix apply_rhs_direct(const LindbladModel& model, const Matrix& rho) {
    const int n = model.system_dim;
    if (rho.rows() != n || rho.cols() != n)
        throw invalid_input("apply_rhs_direct: rho must be N x N");
    const Complex im(0.0, 1.0);
    const double g = (model.alpha / model.hbar) * (model.alpha / model.hbar);
    auto gens = basis::su_generators(n).generators;
    const Matrix& k = model.kossakowski;

    Matrix out = (-im / model.hbar) *
                 (model.hamiltonian * rho - rho * model.hamiltonian);
    for (std::size_t kk = 0; kk < gens.size(); ++kk)
        for (std::size_t ll = 0; ll < gens.size(); ++ll) {
            Complex w = g * k(static_cast<Eigen::Index>(kk), static_cast<Eigen::Index>(ll));
            if (w == Complex(0.0, 0.0)) continue;
            Matrix sk_sl = gens[kk].adjoint() * gens[ll];
            out += w * (gens[ll] * rho * gens[kk].adjoint() -
                        0.5 * (sk_sl * rho + rho * sk_sl));
        }
    return out;
}

std::uint64_t model_fingerprint(const LindbladModel& model) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::uint64_t n = static_cast<std::uint64_t>(model.system_dim);
    h = fnv1a(h, reinterpret_cast<const unsigned char*>(&n), sizeof n);
    double scalars[2] = {model.alpha, model.hbar};
    h = fnv1a(h, reinterpret_cast<const unsigned char*>(scalars), sizeof scalars);
    h = hash_matrix(h, model.hamiltonian);
    h = hash_matrix(h, model.kossakowski);
    return h;
}

void dump_superoperator(const Superoperator& sup, const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "binary dump assumes a little-endian host");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw computation_error("dump_superoperator: cannot open " + path);
    std::uint64_t dim = static_cast<std::uint64_t>(sup.matrix.rows());
    out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    for (Eigen::Index r = 0; r < sup.matrix.rows(); ++r)
        for (Eigen::Index c = 0; c < sup.matrix.cols(); ++c) {
            double parts[2] = {sup.matrix(r, c).real(), sup.matrix(r, c).imag()};
            out.write(reinterpret_cast<const char*>(parts), sizeof parts);
        }
    if (!out) throw computation_error("dump_superoperator: write failed for " + path);
}

Matrix load_superoperator(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw computation_error("load_superoperator: cannot open " + path);
    std::uint64_t dim = 0;
    in.read(reinterpret_cast<char*>(&dim), sizeof dim);
    if (!in || dim == 0 || dim > (1ULL << 20))
        throw computation_error("load_superoperator: bad dimension field in " + path);
    Matrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            double parts[2];
            in.read(reinterpret_cast<char*>(parts), sizeof parts);
            m(r, c) = Complex(parts[0], parts[1]);
        }
    if (!in) throw computation_error("load_superoperator: truncated file " + path);
    return m;
}

}  // namespace roqs::liouville
