// SPDX-License-Identifier: Apache-2.0

#include "vie/stencil.hpp"

#include <exception>
#include <iomanip>
#include <ostream>
#include <Eigen/QR>
#include <Eigen/SVD>
#include "vie/error.hpp"

namespace vie
{

namespace
{

constexpr std::size_t kColumnBlock = 2048;

std::vector<Offset> Enumerate(int dim, const std::array<AxisRange, 3> &range)
{
  std::vector<Offset> out;
  Offset c{0, 0, 0};
  const int hi2 = dim == 3 ? range[2].hi : 0;
  const int lo2 = dim == 3 ? range[2].lo : 0;
  for (c[0] = range[0].lo; c[0] <= range[0].hi; ++c[0])
    for (c[1] = range[1].lo; c[1] <= range[1].hi; ++c[1])
      for (c[2] = lo2; c[2] <= hi2; ++c[2])
        out.push_back(c);
  return out;
}

Offset Difference(int dim, const Offset &a, const Offset &b)
{
  Offset d{0, 0, 0};
  for (int x = 0; x < dim; ++x)
  {
    d[x] = a[x] - b[x];
  }
  return d;
}

}  // namespace

MultiIndex Template::Absolute(const MultiIndex &i, const Offset &coord) const
{
  MultiIndex j{i.dim, {1, 1, 1}};
  for (int a = 0; a < i.dim; ++a)
  {
    j[a] = tau_range[a].absolute ? coord[a] : i[a] + coord[a];
  }
  return j;
}

Template BuildTemplate(const Grid &grid, const PointCategory &category)
{
  Require(grid.n >= 4, "stencil templates need n >= 4");
  Require(category.dim == grid.dim, "category dimension does not match the grid");
  const int n = grid.n;
  Template t;
  t.category = category;
  t.n = n;
  Offset anchor{0, 0, 0};
  for (int a = 0; a < grid.dim; ++a)
  {
    switch (category.tag[a])
    {
      case AxisTag::Interior:
        t.tau_range[a] = {-1, 1, false};
        t.complement_range[a] = {-(n - 2), n - 2, false};
        anchor[a] = 0;
        break;
      case AxisTag::Low:
        t.tau_range[a] = {1, 2, true};
        t.complement_range[a] = {1, n, true};
        anchor[a] = 1;
        break;
      case AxisTag::High:
        t.tau_range[a] = {n - 1, n, true};
        t.complement_range[a] = {1, n, true};
        anchor[a] = n;
        break;
    }
  }
  t.tau = Enumerate(grid.dim, t.tau_range);
  for (const auto &c : Enumerate(grid.dim, t.complement_range))
  {
    bool inside = true;
    for (int a = 0; a < grid.dim; ++a)
    {
      inside = inside && c[a] >= t.tau_range[a].lo && c[a] <= t.tau_range[a].hi;
    }
    if (!inside)
    {
      t.complement.push_back(c);
    }
  }
  for (std::size_t s = 0; s < t.tau.size(); ++s)
  {
    if (t.tau[s] == anchor)
    {
      t.center = static_cast<int>(s);
    }
  }
  return t;
}

CMatrix AssembleNonlocalColumns(const Template &tmpl, const ConvTable &table,
                                std::size_t first, std::size_t count)
{
  const Grid &grid = table.GetGrid();
  Require(grid.n == tmpl.n, "template and table were built for different grids");
  Require(first + count <= tmpl.complement.size(), "complement range out of bounds");
  const int dim = grid.dim;
  const Eigen::Index T = static_cast<Eigen::Index>(tmpl.tau.size());
  const Eigen::Index C = static_cast<Eigen::Index>(count);
  const double k2 = grid.k * grid.k;
  CMatrix out = CMatrix::Zero(dim * T, (dim + 1) * C);
  for (Eigen::Index j = 0; j < C; ++j)
  {
    const Offset &c = tmpl.complement[first + j];
    for (Eigen::Index s = 0; s < T; ++s)
    {
      const Offset delta = Difference(dim, tmpl.tau[s], c);
      const Complex g = k2 * table(ConvTable::kG, delta);
      for (int a = 0; a < dim; ++a)
      {
        out(a * T + s, a * C + j) = g;
        out(a * T + s, dim * C + j) = table(ConvTable::Gradient(a), delta);
      }
    }
  }
  return out;
}

LocalBlocks AssembleBlocks(const Template &tmpl, const ConvTable &table)
{
  const Grid &grid = table.GetGrid();
  Require(grid.n == tmpl.n, "template and table were built for different grids");
  const int dim = grid.dim;
  const Eigen::Index T = static_cast<Eigen::Index>(tmpl.tau.size());
  const double k2 = grid.k * grid.k;
  LocalBlocks blocks;
  blocks.local = CMatrix::Zero(dim * T, (dim + 1) * T);
  for (Eigen::Index s = 0; s < T; ++s)
  {
    for (Eigen::Index t = 0; t < T; ++t)
    {
      const Offset delta = Difference(dim, tmpl.tau[s], tmpl.tau[t]);
      const Complex g = k2 * table(ConvTable::kG, delta);
      for (int a = 0; a < dim; ++a)
      {
        blocks.local(a * T + s, a * T + t) = g;
        blocks.local(a * T + s, dim * T + t) = table(ConvTable::Gradient(a), delta);
      }
    }
  }
  blocks.nonlocal = AssembleNonlocalColumns(tmpl, table, 0, tmpl.complement.size());
  return blocks;
}

LeftSvdAccumulator::LeftSvdAccumulator(int rows) : rows_(rows)
{
  Require(rows >= 1, "accumulator needs at least one row");
}

void LeftSvdAccumulator::AddColumns(const CMatrix &columns)
{
  Require(columns.rows() == rows_, "column block has the wrong number of rows");
  const Eigen::Index needed = used_ + columns.cols();
  if (stack_.rows() < needed)
  {
    stack_.conservativeResize(std::max<Eigen::Index>(needed, 2 * rows_), rows_);
  }
  stack_.middleRows(used_, columns.cols()) = columns.adjoint();
  used_ = needed;
  if (used_ > 4 * rows_ + static_cast<Eigen::Index>(kColumnBlock))
  {
    Compress();
  }
}

void LeftSvdAccumulator::Compress()
{
  if (used_ <= rows_)
  {
    return;
  }
  Eigen::HouseholderQR<CMatrix> qr(stack_.topRows(used_));
  stack_.topRows(rows_) = qr.matrixQR().topRows(rows_).triangularView<Eigen::Upper>();
  used_ = rows_;
}

LeftSvdAccumulator::Result LeftSvdAccumulator::Finish()
{
  Compress();
  Result result;
  result.singular_values = Eigen::VectorXd::Zero(rows_);
  if (used_ == 0)
  {
    result.left_vectors = CMatrix::Identity(rows_, rows_);
    return result;
  }
  // M = R^* Q^*, so the left singular vectors of M are those of R^*.
  const CMatrix reduced = stack_.topRows(used_).adjoint();
  Eigen::JacobiSVD<CMatrix> svd(reduced, Eigen::ComputeFullU);
  if (svd.info() != Eigen::Success)
  {
    throw NumericalError("SVD of the nonlocal block failed");
  }
  result.left_vectors = svd.matrixU();
  result.singular_values.head(svd.singularValues().size()) = svd.singularValues();
  return result;
}

AlphaResult AlphaFromSvd(const LeftSvdAccumulator::Result &svd, int dim)
{
  const Eigen::Index rows = svd.left_vectors.rows();
  Require(rows >= dim, "nonlocal block needs at least d rows");
  AlphaResult out;
  out.alpha.resize(rows, dim);
  out.smallest.resize(dim);
  for (int e = 0; e < dim; ++e)
  {
    out.alpha.col(e) = svd.left_vectors.col(rows - 1 - e).conjugate();
    out.smallest[e] = svd.singular_values[rows - 1 - e];
  }
  out.singular_values = svd.singular_values;
  return out;
}

AlphaResult ComputeAlpha(const CMatrix &nonlocal, int dim)
{
  LeftSvdAccumulator acc(static_cast<int>(nonlocal.rows()));
  for (Eigen::Index c = 0; c < nonlocal.cols(); c += kColumnBlock)
  {
    const Eigen::Index w = std::min<Eigen::Index>(kColumnBlock, nonlocal.cols() - c);
    acc.AddColumns(nonlocal.middleCols(c, w));
  }
  return AlphaFromSvd(acc.Finish(), dim);
}

CMatrix ComputeBeta(const CMatrix &local, const CMatrix &alpha)
{
  Require(local.rows() == alpha.rows(), "local block and alpha do not conform");
  return local.transpose() * alpha;
}

CMatrix AlignAlpha(const CMatrix &alpha, int center, int tau_size, int dim)
{
  CMatrix block(dim, dim);
  for (int c = 0; c < dim; ++c)
  {
    block.row(c) = alpha.row(c * tau_size + center);
  }
  // block = X S Y^*; rotating by Y X^* leaves X S X^*.
  Eigen::JacobiSVD<CMatrix> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return alpha * (svd.matrixV() * svd.matrixU().adjoint());
}

StencilLibrary::StencilLibrary(const Grid &grid, std::vector<StencilEntry> entries)
  : grid_(grid), entries_(std::move(entries))
{
  Require(static_cast<int>(entries_.size()) == PointCategory::Count(grid.dim),
          "library needs one entry per category");
}

void StencilLibrary::WriteSingularValues(std::ostream &os) const
{
  const auto flags = os.flags();
  os << std::scientific << std::setprecision(6);
  for (const auto &entry : entries_)
  {
    os << entry.tmpl.category.ToString() << ' ' << entry.tmpl.tau.size() << ' '
       << entry.tmpl.complement.size() << ' ' << entry.stencil.sigma_max;
    for (Eigen::Index e = 0; e < entry.stencil.sigma.size(); ++e)
    {
      os << ' ' << entry.stencil.sigma[e];
    }
    os << '\n';
  }
  os.flags(flags);
}

namespace
{

// alpha = diag(gamma, ..., gamma), gamma the scalar optimum for the k^2 G block alone,
// with its phase fixed so that gamma is real and non-negative at the anchor.
void FitGradientFree(const Template &t, const ConvTable &table, int dim, StencilPair &out)
{
  const int T = static_cast<int>(t.tau.size());
  LeftSvdAccumulator acc(T);
  for (std::size_t c = 0; c < t.complement.size(); c += kColumnBlock / 2)
  {
    const std::size_t w = std::min(kColumnBlock / 2, t.complement.size() - c);
    acc.AddColumns(AssembleNonlocalColumns(t, table, c, w).topLeftCorner(T, w));
  }
  const AlphaResult scalar = AlphaFromSvd(acc.Finish(), 1);
  CVector gamma = scalar.alpha.col(0);
  const Complex anchor = gamma[t.center];
  if (std::abs(anchor) > 0.0)
  {
    gamma *= std::conj(anchor) / std::abs(anchor);
  }
  out.alpha = CMatrix::Zero(dim * T, dim);
  for (int a = 0; a < dim; ++a)
  {
    out.alpha.block(a * T, a, T, 1) = gamma;
  }
  out.sigma = Eigen::VectorXd::Constant(dim, scalar.smallest[0]);
  out.sigma_max = scalar.singular_values[0];
}

}  // namespace

StencilLibrary BuildLibrary(const Grid &grid, const ConvTable &table,
                            const StencilOptions &options)
{
  Require(table.GetGrid() == grid, "table was built for a different grid");
  const int count = PointCategory::Count(grid.dim);
  std::vector<StencilEntry> entries(count);
  std::vector<std::exception_ptr> errors(count);

#pragma omp parallel for schedule(dynamic, 1)
  for (int id = 0; id < count; ++id)
  {
    try
    {
      StencilEntry &entry = entries[id];
      entry.tmpl = BuildTemplate(grid, PointCategory::FromId(grid.dim, id));
      const Template &t = entry.tmpl;
      const int T = static_cast<int>(t.tau.size());

      CMatrix local = CMatrix::Zero(grid.dim * T, (grid.dim + 1) * T);
      {
        Template local_only = t;
        local_only.complement.clear();
        local = AssembleBlocks(local_only, table).local;
      }
      if (options.gradient_block)
      {
        LeftSvdAccumulator acc(grid.dim * T);
        for (std::size_t c = 0; c < t.complement.size(); c += kColumnBlock / 2)
        {
          const std::size_t w = std::min(kColumnBlock / 2, t.complement.size() - c);
          acc.AddColumns(AssembleNonlocalColumns(t, table, c, w));
        }
        const AlphaResult alpha = AlphaFromSvd(acc.Finish(), grid.dim);
        entry.stencil.alpha = AlignAlpha(alpha.alpha, t.center, T, grid.dim);
        entry.stencil.sigma = alpha.smallest;
        entry.stencil.sigma_max = alpha.singular_values[0];
      }
      else
      {
        FitGradientFree(t, table, grid.dim, entry.stencil);
      }
      entry.stencil.beta = ComputeBeta(local, entry.stencil.alpha);
    }
    catch (...)
    {
      errors[id] = std::current_exception();
    }
  }
  for (const auto &e : errors)
  {
    if (e)
    {
      std::rethrow_exception(e);
    }
  }
  return StencilLibrary(grid, std::move(entries));
}

}  // namespace vie
