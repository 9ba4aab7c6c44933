// SPDX-License-Identifier: Apache-2.0

#ifndef VIE_SPECIAL_FUNCTIONS_HPP
#define VIE_SPECIAL_FUNCTIONS_HPP

#include "vie/types.hpp"

namespace vie
{

// Argument at which the Hankel evaluation switches from the power series (evaluated in
// extended precision) to the large-argument asymptotic expansion.
inline constexpr double kHankelSeriesLimit = 14.0;

// Hankel functions of the first kind H_0^(1)(x), H_1^(1)(x) = J + iY for real x > 0,
// accurate to roughly 1e-13 relative.
Complex Hankel1Order0(double x);
Complex Hankel1Order1(double x);

}  // namespace vie

#endif  // VIE_SPECIAL_FUNCTIONS_HPP
