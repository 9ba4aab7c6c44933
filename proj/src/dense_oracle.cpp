// SPDX-License-Identifier: Apache-2.0

#include "vie/dense_oracle.hpp"

#include <Eigen/LU>
#include "vie/error.hpp"

namespace vie
{

CMatrix DenseAssemble(const ConvTable &table, const MediumFields &medium,
                      std::int64_t limit)
{
  const Grid &grid = table.GetGrid();
  Require(medium.m.grid == grid, "medium sampled on a different grid");
  Require(static_cast<int>(medium.p.size()) == grid.dim, "need d p-fields");
  const std::int64_t size = grid.NumUnknowns();
  if (size > limit)
  {
    throw InvalidArgument("dense oracle refuses " + std::to_string(size) +
                          " unknowns (limit " + std::to_string(limit) + ")");
  }
  const int dim = grid.dim;
  const std::int64_t np = grid.NumPoints();
  const double k2 = grid.k * grid.k;
  CMatrix a = CMatrix::Identity(size, size);
  for (std::int64_t pj = 0; pj < np; ++pj)
  {
    const MultiIndex j = PointFromIndex(grid, pj);
    const Complex mj = medium.m.values[pj];
    for (std::int64_t pi = 0; pi < np; ++pi)
    {
      const MultiIndex i = PointFromIndex(grid, pi);
      std::array<int, 3> delta{0, 0, 0};
      for (int x = 0; x < dim; ++x)
      {
        delta[x] = i[x] - j[x];
      }
      const Complex g = k2 * table(ConvTable::kG, delta) * mj;
      for (int r = 0; r < dim; ++r)
      {
        const Complex ga = table(ConvTable::Gradient(r), delta);
        a(r * np + pi, r * np + pj) += g;
        for (int c = 0; c < dim; ++c)
        {
          a(r * np + pi, c * np + pj) += ga * medium.p[c].values[pj];
        }
      }
    }
  }
  return a;
}

CVector DenseSolve(const CMatrix &a, const CVector &b, double min_rcond)
{
  Require(a.rows() == a.cols(), "dense solve needs a square matrix");
  Require(a.rows() == b.size(), "right-hand side has the wrong length");
  Eigen::PartialPivLU<CMatrix> lu(a);
  // The condition estimate is unreliable once a pivot is exactly zero.
  const double rcond = lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0 ? 0.0 : lu.rcond();
  if (!(rcond >= min_rcond))
  {
    throw NumericalError("dense system is numerically singular (rcond " +
                         std::to_string(rcond) + ")");
  }
  return lu.solve(b);
}

}  // namespace vie
