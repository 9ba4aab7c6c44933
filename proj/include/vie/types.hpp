// SPDX-License-Identifier: Apache-2.0

#ifndef VIE_TYPES_HPP
#define VIE_TYPES_HPP

#include <array>
#include <complex>
#include <Eigen/Dense>

namespace vie
{

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Physical point in the unit box; only the first d coordinates are used.
using Point = std::array<double, 3>;

}  // namespace vie

#endif  // VIE_TYPES_HPP
