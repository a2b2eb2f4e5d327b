#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rilc {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

// Raised when a plant that must be stable has a pole on or outside the unit circle.
class UnstablePlantError : public std::runtime_error {
public:
    UnstablePlantError(const std::string& what, std::complex<double> pole)
        : std::runtime_error(what), pole_(pole) {}

    std::complex<double> pole() const noexcept { return pole_; }

private:
    std::complex<double> pole_;
};

// Raised when an iterative numerical routine (eigensolver, root finder) fails to converge.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rilc
