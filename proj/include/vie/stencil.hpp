// SPDX-License-Identifier: Apache-2.0

#ifndef VIE_STENCIL_HPP
#define VIE_STENCIL_HPP

#include <array>
#include <iosfwd>
#include <vector>
#include "vie/greens_kernel.hpp"
#include "vie/grid.hpp"
#include "vie/types.hpp"

namespace vie
{

using Offset = std::array<int, 3>;

// Per-axis coordinate range of a template. Interior axes are relative to the anchor
// point; boundary axes hold absolute grid coordinates.
struct AxisRange
{
  int lo = 0;
  int hi = 0;
  bool absolute = false;
};

// Neighbourhood tau and enlarged complement tau^c shared by every grid point of one
// category. Coordinates live in the template frame; both lists are lexicographic.
struct Template
{
  PointCategory category;
  int n = 0;
  std::array<AxisRange, 3> tau_range{};
  std::array<AxisRange, 3> complement_range{};
  std::vector<Offset> tau;
  std::vector<Offset> complement;
  int center = 0;  // position of the anchor point inside tau

  // Absolute grid index of template coordinate `coord` for anchor point i.
  MultiIndex Absolute(const MultiIndex &i, const Offset &coord) const;
};

Template BuildTemplate(const Grid &grid, const PointCategory &category);

// Local block [k^2 G_tt (+) ... | G^a_tt stacked] (d|tau| x (d+1)|tau|) and the nonlocal
// block M with the same structure over tau^c (d|tau| x (d+1)|tau^c|).
struct LocalBlocks
{
  CMatrix local;
  CMatrix nonlocal;
};

LocalBlocks AssembleBlocks(const Template &tmpl, const ConvTable &table);

// Columns of M for the complement offsets [first, first + count), in the same
// block layout as the full M.
CMatrix AssembleNonlocalColumns(const Template &tmpl, const ConvTable &table,
                                std::size_t first, std::size_t count);

// Left singular structure of a wide matrix fed in column blocks. Column blocks are
// folded into the triangular factor of a QR of M^*, so memory stays O(rows^2 + block).
class LeftSvdAccumulator
{
public:
  explicit LeftSvdAccumulator(int rows);

  void AddColumns(const CMatrix &columns);

  struct Result
  {
    CMatrix left_vectors;          // rows x rows, columns by decreasing singular value
    Eigen::VectorXd singular_values;  // length rows, decreasing (zeros for a null space)
  };
  Result Finish();

private:
  void Compress();

  int rows_;
  CMatrix stack_;  // rows of M^* (or the current R factor)
  Eigen::Index used_ = 0;
};

struct AlphaResult
{
  CMatrix alpha;                  // d|tau| x d, alpha^* alpha = I
  Eigen::VectorXd smallest;       // the d smallest singular values of M (increasing)
  Eigen::VectorXd singular_values;  // all singular values, decreasing
};

// alpha = conj(left singular vectors of the d smallest singular values), so that the
// literal transpose alpha^T M has Frobenius norm sqrt(sum of those sigma^2).
AlphaResult ComputeAlpha(const CMatrix &nonlocal, int dim);
AlphaResult AlphaFromSvd(const LeftSvdAccumulator::Result &svd, int dim);

// beta = A_loc^T alpha (literal transpose).
CMatrix ComputeBeta(const CMatrix &local, const CMatrix &alpha);

struct StencilPair
{
  CMatrix alpha;
  CMatrix beta;
  Eigen::VectorXd sigma;  // d smallest singular values of M, increasing
  double sigma_max = 0.0;
};

struct StencilEntry
{
  Template tmpl;
  StencilPair stencil;
};

// One (template, stencil) pair per point category.
class StencilLibrary
{
public:
  StencilLibrary(const Grid &grid, std::vector<StencilEntry> entries);

  const Grid &GetGrid() const { return grid_; }
  std::size_t Size() const { return entries_.size(); }
  const StencilEntry &At(const PointCategory &c) const { return entries_.at(c.Id()); }
  const StencilEntry &ForPoint(const MultiIndex &i) const { return At(Classify(grid_, i)); }
  const std::vector<StencilEntry> &Entries() const { return entries_; }

  // One line per category: name, |tau|, |tau^c|, sigma_max, the d smallest sigma.
  void WriteSingularValues(std::ostream &os) const;

private:
  Grid grid_;
  std::vector<StencilEntry> entries_;
};

// Rotates alpha's columns (unitarily) so the d x d block on the anchor point is
// Hermitian positive semidefinite; the span and all norms are unchanged.
CMatrix AlignAlpha(const CMatrix &alpha, int center, int tau_size, int dim);

struct StencilOptions
{
  // When false, stencils are fitted to the operator without the gradient term (p = 0):
  // M keeps only its k^2 G blocks, which are identical across components, and alpha is
  // the block-diagonal diag(gamma, ..., gamma) built from the scalar optimum gamma.
  bool gradient_block = true;
};

StencilLibrary BuildLibrary(const Grid &grid, const ConvTable &table,
                            const StencilOptions &options = {});

}  // namespace vie

#endif  // VIE_STENCIL_HPP
