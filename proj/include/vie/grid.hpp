// SPDX-License-Identifier: Apache-2.0

#ifndef VIE_GRID_HPP
#define VIE_GRID_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace vie
{

// Uniform Cartesian grid over the unit square/cube with n interior points per axis and
// spacing h = 1/(n+1). Grid point i (1-based multi-index) sits at x = i*h.
struct Grid
{
  int dim = 2;
  int n = 1;
  double h = 0.5;
  double k = 1.0;  // background wave number

  // Validates d in {2,3}, n >= 1, k > 0.
  static Grid Make(int dim, int n, double k);

  std::int64_t NumPoints() const;
  std::int64_t NumUnknowns() const { return dim * NumPoints(); }

  friend bool operator==(const Grid &, const Grid &) = default;
};

// 1-based multi-index; only the first `dim` coordinates are meaningful.
struct MultiIndex
{
  int dim = 2;
  std::array<int, 3> c{1, 1, 1};

  int operator[](int axis) const { return c[axis]; }
  int &operator[](int axis) { return c[axis]; }

  friend bool operator==(const MultiIndex &, const MultiIndex &) = default;
};

enum class AxisTag : std::uint8_t
{
  Low = 0,       // i_axis == 1
  Interior = 1,  // 2 <= i_axis <= n-1
  High = 2       // i_axis == n
};

// Per-axis position tags. There are exactly 3^d categories; Id() enumerates them.
struct PointCategory
{
  int dim = 2;
  std::array<AxisTag, 3> tag{AxisTag::Interior, AxisTag::Interior, AxisTag::Interior};

  int Id() const;
  static PointCategory FromId(int dim, int id);
  static int Count(int dim);
  std::string ToString() const;

  friend bool operator==(const PointCategory &, const PointCategory &) = default;
};

// Chooses n with n + 1 = round(ppw * k / (2 pi)); rejects n < 3.
Grid BuildGrid(int dim, double k, double ppw);

bool IsValid(const Grid &grid, const MultiIndex &i);

PointCategory Classify(const Grid &grid, const MultiIndex &i);

// All in-bounds j with |j - i|_inf <= 1, lexicographic in (j1, ..., jd).
std::vector<MultiIndex> Neighborhood(const Grid &grid, const MultiIndex &i);

// Lexicographic position of i among the n^d points (i1 slowest).
std::int64_t PointIndex(const Grid &grid, const MultiIndex &i);
MultiIndex PointFromIndex(const Grid &grid, std::int64_t p);

// Component-major flattening of (component in [0, d), i) onto [0, d n^d).
std::int64_t Flatten(const Grid &grid, int component, const MultiIndex &i);
std::pair<int, MultiIndex> Unflatten(const Grid &grid, std::int64_t index);

// Calls f(i) for every grid point in PointIndex order.
template <typename F>
void ForEachPoint(const Grid &grid, F &&f)
{
  MultiIndex i{grid.dim, {1, 1, 1}};
  const int n = grid.n;
  if (grid.dim == 2)
  {
    for (i[0] = 1; i[0] <= n; ++i[0])
      for (i[1] = 1; i[1] <= n; ++i[1])
        f(i);
  }
  else
  {
    for (i[0] = 1; i[0] <= n; ++i[0])
      for (i[1] = 1; i[1] <= n; ++i[1])
        for (i[2] = 1; i[2] <= n; ++i[2])
          f(i);
  }
}

}  // namespace vie

#endif  // VIE_GRID_HPP
