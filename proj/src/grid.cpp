// SPDX-License-Identifier: Apache-2.0

#include "vie/grid.hpp"

#include <cmath>
#include <numbers>
#include "vie/error.hpp"

namespace vie
{

Grid Grid::Make(int dim, int n, double k)
{
  Require(dim == 2 || dim == 3, "grid dimension must be 2 or 3");
  Require(n >= 1, "grid must have at least one point per axis");
  Require(k > 0.0 && std::isfinite(k), "wave number must be positive");
  return Grid{dim, n, 1.0 / (n + 1), k};
}

std::int64_t Grid::NumPoints() const
{
  std::int64_t count = 1;
  for (int a = 0; a < dim; ++a)
  {
    count *= n;
  }
  return count;
}

int PointCategory::Id() const
{
  int id = 0;
  for (int a = 0; a < dim; ++a)
  {
    id = 3 * id + static_cast<int>(tag[a]);
  }
  return id;
}

PointCategory PointCategory::FromId(int dim, int id)
{
  PointCategory c{dim, {}};
  for (int a = dim - 1; a >= 0; --a)
  {
    c.tag[a] = static_cast<AxisTag>(id % 3);
    id /= 3;
  }
  return c;
}

int PointCategory::Count(int dim)
{
  return dim == 2 ? 9 : 27;
}

std::string PointCategory::ToString() const
{
  std::string s;
  for (int a = 0; a < dim; ++a)
  {
    s += (tag[a] == AxisTag::Low) ? 'L' : (tag[a] == AxisTag::High) ? 'H' : 'I';
  }
  return s;
}

Grid BuildGrid(int dim, double k, double ppw)
{
  Require(dim == 2 || dim == 3, "grid dimension must be 2 or 3");
  Require(k > 0.0 && std::isfinite(k), "wave number must be positive");
  Require(ppw >= 2.0, "need at least 2 points per wavelength");
  const long points = std::lround(ppw * k / (2.0 * std::numbers::pi));
  const int n = static_cast<int>(points) - 1;
  Require(n >= 3, "grid too coarse: n = " + std::to_string(n) +
                      " is below the 3 points needed by a 3-wide stencil");
  return Grid::Make(dim, n, k);
}

bool IsValid(const Grid &grid, const MultiIndex &i)
{
  if (i.dim != grid.dim)
  {
    return false;
  }
  for (int a = 0; a < grid.dim; ++a)
  {
    if (i[a] < 1 || i[a] > grid.n)
    {
      return false;
    }
  }
  return true;
}

PointCategory Classify(const Grid &grid, const MultiIndex &i)
{
  PointCategory c{grid.dim, {}};
  for (int a = 0; a < grid.dim; ++a)
  {
    c.tag[a] = (i[a] == 1)        ? AxisTag::Low
               : (i[a] == grid.n) ? AxisTag::High
                                  : AxisTag::Interior;
  }
  return c;
}

std::vector<MultiIndex> Neighborhood(const Grid &grid, const MultiIndex &i)
{
  std::array<int, 3> lo{1, 1, 1}, hi{1, 1, 1};
  for (int a = 0; a < grid.dim; ++a)
  {
    lo[a] = std::max(1, i[a] - 1);
    hi[a] = std::min(grid.n, i[a] + 1);
  }
  std::vector<MultiIndex> out;
  out.reserve(grid.dim == 2 ? 9 : 27);
  MultiIndex j{grid.dim, {1, 1, 1}};
  for (j[0] = lo[0]; j[0] <= hi[0]; ++j[0])
    for (j[1] = lo[1]; j[1] <= hi[1]; ++j[1])
      for (j[2] = lo[2]; j[2] <= hi[2]; ++j[2])
        out.push_back(j);
  return out;
}

std::int64_t PointIndex(const Grid &grid, const MultiIndex &i)
{
  std::int64_t p = 0;
  for (int a = 0; a < grid.dim; ++a)
  {
    p = p * grid.n + (i[a] - 1);
  }
  return p;
}

MultiIndex PointFromIndex(const Grid &grid, std::int64_t p)
{
  MultiIndex i{grid.dim, {1, 1, 1}};
  for (int a = grid.dim - 1; a >= 0; --a)
  {
    i[a] = static_cast<int>(p % grid.n) + 1;
    p /= grid.n;
  }
  return i;
}

std::int64_t Flatten(const Grid &grid, int component, const MultiIndex &i)
{
  return component * grid.NumPoints() + PointIndex(grid, i);
}

std::pair<int, MultiIndex> Unflatten(const Grid &grid, std::int64_t index)
{
  const std::int64_t np = grid.NumPoints();
  return {static_cast<int>(index / np), PointFromIndex(grid, index % np)};
}

}  // namespace vie
