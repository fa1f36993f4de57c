#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace nscf {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Relative tolerance used for norm "equality" comparisons unless a caller
// supplies its own.
inline constexpr double kDefaultTol = 1e-9;

// Default margin for Birkhoff orthogonality decisions.
inline constexpr double kDefaultOrthoTol = 1e-7;

// A linear functional acting through the bilinear pairing
// <f, phi> = sum_i phi.coeffs[i] * f[i].
struct Functional {
  CVec coeffs;

  std::size_t dim() const { return static_cast<std::size_t>(coeffs.size()); }
  cplx apply(const CVec& f) const { return (coeffs.array() * f.array()).sum(); }
};

}  // namespace nscf
