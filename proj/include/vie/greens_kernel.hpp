// SPDX-License-Identifier: Apache-2.0

#ifndef VIE_GREENS_KERNEL_HPP
#define VIE_GREENS_KERNEL_HPP

#include <array>
#include <vector>
#include "vie/grid.hpp"
#include "vie/types.hpp"

namespace vie
{

// Outgoing Helmholtz kernel: e^{ik|x|}/(4 pi |x|) in 3D, (i/4) H_0^(1)(k|x|) in 2D.
Complex HelmholtzKernel(int dim, double k, const Point &x);

// Gradient of the kernel; entries beyond dim are zero.
std::array<Complex, 3> KernelGradient(int dim, double k, const Point &x);

// How the near-diagonal table entries are computed. Entries with |delta|_inf <= radius
// hold the integral of the kernel over the grid cell centred at delta*h; the singular
// part of the self cell is integrated in closed form, everything else by adaptive
// tensor Gauss-Legendre cubature.
struct CorrectionSpec
{
  int radius = 1;
  double relative_tolerance = 1e-12;
  int gauss_order = 8;
  int max_depth = 14;
};

// Integral of kernel `kernel_id` (0 = G, 1+a = dG/dx_a) over the cell of side h
// centred at offset*h.
Complex CellIntegral(int dim, double k, double h, int kernel_id,
                     const std::array<int, 3> &offset, const CorrectionSpec &spec);

// Toeplitz symbols of G and G^1..G^d on the difference lattice {-(n-1)..n-1}^d.
class ConvTable
{
public:
  static constexpr int kG = 0;
  static int Gradient(int axis) { return 1 + axis; }

  ConvTable(const Grid &grid, int radius, std::vector<std::vector<Complex>> data);

  const Grid &GetGrid() const { return grid_; }
  int CorrectionRadius() const { return radius_; }
  int NumKernels() const { return static_cast<int>(data_.size()); }
  int Extent() const { return 2 * grid_.n - 1; }

  // Entry for lattice offset delta (|delta_a| <= n-1).
  Complex operator()(int kernel_id, const std::array<int, 3> &delta) const
  {
    return data_[kernel_id][Offset(delta)];
  }
  Complex operator()(int kernel_id, int d0, int d1, int d2 = 0) const
  {
    return (*this)(kernel_id, {d0, d1, d2});
  }

  const std::vector<Complex> &Data(int kernel_id) const { return data_[kernel_id]; }

  std::size_t Offset(const std::array<int, 3> &delta) const
  {
    const std::size_t ext = static_cast<std::size_t>(Extent());
    std::size_t idx = 0;
    for (int a = 0; a < grid_.dim; ++a)
    {
      idx = idx * ext + static_cast<std::size_t>(delta[a] + grid_.n - 1);
    }
    return idx;
  }

private:
  Grid grid_;
  int radius_;
  std::vector<std::vector<Complex>> data_;
};

// Far entries h^d * kernel(delta h); entries with |delta|_inf <= spec.radius replaced by
// cell integrals. Throws NumericalError if a cell integral misses its tolerance.
ConvTable BuildTables(const Grid &grid, const CorrectionSpec &spec = {});

}  // namespace vie

#endif  // VIE_GREENS_KERNEL_HPP
