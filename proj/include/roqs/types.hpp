// types.hpp — shared matrix aliases and error types
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace roqs {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// thrown when an input violates a documented precondition
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// thrown when a numerical routine cannot produce a usable result
struct computation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace roqs
