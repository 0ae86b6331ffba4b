// basis.cpp — generator construction and vectorization
#include "roqs/basis.hpp"

#include <cmath>

namespace roqs::basis {

GeneratorBasis su_generators(int n) {
    if (n < 2) throw invalid_input("su_generators: dimension must be at least 2");
    GeneratorBasis out;
    out.system_dim = n;
    out.generators.reserve(static_cast<std::size_t>(n) * n - 1);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            Matrix s = Matrix::Zero(n, n);
            s(j, k) = inv_sqrt2;
            s(k, j) = inv_sqrt2;
            out.generators.push_back(std::move(s));
        }
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            Matrix s = Matrix::Zero(n, n);
            s(j, k) = Complex(0.0, -inv_sqrt2);
            s(k, j) = Complex(0.0, inv_sqrt2);
            out.generators.push_back(std::move(s));
        }
    for (int l = 1; l < n; ++l) {
        // first l entries +1, entry l gets -l, normalized to unit HS norm
        Matrix s = Matrix::Zero(n, n);
        double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
        for (int j = 0; j < l; ++j) s(j, j) = norm;
        s(l, l) = -static_cast<double>(l) * norm;
        out.generators.push_back(std::move(s));
    }
    return out;
}

Vector vectorize(const Matrix& rho) {
    if (rho.rows() != rho.cols()) throw invalid_input("vectorize: matrix must be square");
    // Eigen stores column-major, so the reshape is exactly column stacking
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix devectorize(const Vector& v) {
    auto len = v.size();
    auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(len))));
    if (n * n != len) throw invalid_input("devectorize: length must be a perfect square");
    return Eigen::Map<const Matrix>(v.data(), n, n);
}

Matrix transform_kossakowski(const Matrix& k, const Matrix& u) {
    if (k.rows() != k.cols() || u.rows() != u.cols() || k.rows() != u.rows())
        throw invalid_input("transform_kossakowski: K and U must be square and same size");
    double unitary_err =
        (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    if (unitary_err > 1e-10)
        throw invalid_input("transform_kossakowski: U is not unitary");
    return u * k * u.adjoint();
}

}  // namespace roqs::basis
