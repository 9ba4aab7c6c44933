// SPDX-License-Identifier: Apache-2.0

#include "vie/nested_dissection.hpp"

#include <array>

namespace vie
{

namespace
{

struct IndexBox
{
  std::array<int, 3> lo{1, 1, 1};
  std::array<int, 3> hi{1, 1, 1};
};

void AppendBox(const Grid &grid, const IndexBox &box, std::vector<std::int64_t> &order)
{
  MultiIndex i{grid.dim, {1, 1, 1}};
  for (i[0] = box.lo[0]; i[0] <= box.hi[0]; ++i[0])
    for (i[1] = box.lo[1]; i[1] <= box.hi[1]; ++i[1])
      for (i[2] = box.lo[2]; i[2] <= box.hi[2]; ++i[2])
        order.push_back(PointIndex(grid, i));
}

void Dissect(const Grid &grid, const IndexBox &box, int leaf_size,
             std::vector<std::int64_t> &order)
{
  std::int64_t volume = 1;
  int axis = 0;
  int longest = 0;
  for (int a = 0; a < grid.dim; ++a)
  {
    const int extent = box.hi[a] - box.lo[a] + 1;
    if (extent <= 0)
    {
      return;
    }
    volume *= extent;
    if (extent > longest)
    {
      longest = extent;
      axis = a;
    }
  }
  if (volume <= leaf_size || longest < 3)
  {
    AppendBox(grid, box, order);
    return;
  }
  const int mid = (box.lo[axis] + box.hi[axis]) / 2;
  IndexBox left = box, right = box, separator = box;
  left.hi[axis] = mid - 1;
  right.lo[axis] = mid + 1;
  separator.lo[axis] = separator.hi[axis] = mid;
  Dissect(grid, left, leaf_size, order);
  Dissect(grid, right, leaf_size, order);
  AppendBox(grid, separator, order);
}

}  // namespace

std::vector<std::int64_t> NestedDissectionOrder(const Grid &grid, int leaf_size)
{
  IndexBox box;
  for (int a = 0; a < grid.dim; ++a)
  {
    box.hi[a] = grid.n;
  }
  std::vector<std::int64_t> order;
  order.reserve(grid.NumPoints());
  Dissect(grid, box, leaf_size, order);
  return order;
}

std::vector<std::int64_t> UnknownOrder(const Grid &grid,
                                       const std::vector<std::int64_t> &point_order)
{
  const std::int64_t np = grid.NumPoints();
  std::vector<std::int64_t> out;
  out.reserve(point_order.size() * grid.dim);
  for (auto p : point_order)
  {
    for (int c = 0; c < grid.dim; ++c)
    {
      out.push_back(c * np + p);
    }
  }
  return out;
}

}  // namespace vie
