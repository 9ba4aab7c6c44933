// SPDX-License-Identifier: Apache-2.0

#ifndef VIE_NESTED_DISSECTION_HPP
#define VIE_NESTED_DISSECTION_HPP

#include <cstdint>
#include <vector>
#include "vie/grid.hpp"

namespace vie
{

// Geometric nested dissection of the grid points for couplings within |j - i|_inf <= 1:
// each box is split by a single coordinate plane across its longest axis, the two halves
// are ordered recursively and the separator plane goes last. Boxes with at most
// `leaf_size` points keep lexicographic order. Returns point indices in elimination order.
std::vector<std::int64_t> NestedDissectionOrder(const Grid &grid, int leaf_size = 16);

// Expands a point ordering to unknowns: the d components of each point are consecutive.
std::vector<std::int64_t> UnknownOrder(const Grid &grid,
                                       const std::vector<std::int64_t> &point_order);

}  // namespace vie

#endif  // VIE_NESTED_DISSECTION_HPP
