// SPDX-License-Identifier: Apache-2.0

#include "vie/sparsifier.hpp"

#include <array>
#include <ostream>
#include <sstream>
#include <umfpack.h>
#include "vie/nested_dissection.hpp"

namespace vie
{

namespace
{

const double *Packed(const Complex *p)
{
  return reinterpret_cast<const double *>(p);
}

double *Packed(Complex *p)
{
  return reinterpret_cast<double *>(p);
}

std::string StatusText(long status)
{
  switch (status)
  {
    case UMFPACK_ERROR_out_of_memory:
      return "out of memory";
    case UMFPACK_ERROR_invalid_matrix:
      return "invalid matrix";
    case UMFPACK_ERROR_invalid_permutation:
      return "invalid permutation";
    case UMFPACK_WARNING_singular_matrix:
      return "singular matrix";
    default:
      return "status " + std::to_string(status);
  }
}

// Finds the first exactly zero entry of U's diagonal and maps it back to its column.
long LocateZeroPivot(void *numeric, long size)
{
  std::vector<SuiteSparse_long> q(size);
  std::vector<Complex> diag(size);
  SuiteSparse_long do_recip = 0;
  const long status = umfpack_zl_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr,
                                             nullptr, nullptr, nullptr, nullptr, q.data(),
                                             Packed(diag.data()), nullptr, &do_recip,
                                             nullptr, numeric);
  if (status != UMFPACK_OK)
  {
    return -1;
  }
  for (long k = 0; k < size; ++k)
  {
    if (diag[k] == Complex(0.0))
    {
      return q[k];
    }
  }
  return -1;
}

}  // namespace

SparseSystem AssembleSparse(const Grid &grid, const StencilLibrary &library,
                            const MediumFields &medium)
{
  Require(library.GetGrid() == grid, "stencil library built for a different grid");
  Require(medium.m.grid == grid, "medium sampled on a different grid");
  Require(static_cast<int>(medium.p.size()) == grid.dim, "need d p-fields");
  const int dim = grid.dim;
  const std::int64_t np = grid.NumPoints();

  std::vector<Eigen::Triplet<Complex, long>> triplets;
  triplets.reserve(static_cast<std::size_t>(np) * dim * dim * (dim == 2 ? 9 : 27));
  ForEachPoint(grid, [&](const MultiIndex &i) {
    const StencilEntry &entry = library.ForPoint(i);
    const Template &t = entry.tmpl;
    const CMatrix &alpha = entry.stencil.alpha;
    const CMatrix &beta = entry.stencil.beta;
    const int T = static_cast<int>(t.tau.size());
    const std::int64_t pi = PointIndex(grid, i);
    for (int s = 0; s < T; ++s)
    {
      const std::int64_t pj = PointIndex(grid, t.Absolute(i, t.tau[s]));
      const Complex m = medium.m.values[pj];
      for (int e = 0; e < dim; ++e)
      {
        const Complex bw = beta(dim * T + s, e);
        for (int c = 0; c < dim; ++c)
        {
          const Complex v = alpha(c * T + s, e) + beta(c * T + s, e) * m +
                            bw * medium.p[c].values[pj];
          triplets.emplace_back(e * np + pi, c * np + pj, v);
        }
      }
    }
  });
  SparseSystem system{grid, SparseMatrix(grid.NumUnknowns(), grid.NumUnknowns())};
  system.matrix.setFromTriplets(triplets.begin(), triplets.end());
  system.matrix.makeCompressed();
  return system;
}

void WriteCoordinateText(const SparseSystem &system, std::ostream &os)
{
  std::ostringstream line;
  line.precision(17);
  for (long col = 0; col < system.matrix.outerSize(); ++col)
  {
    for (SparseMatrix::InnerIterator it(system.matrix, col); it; ++it)
    {
      line.str("");
      line << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' '
           << it.value().imag() << '\n';
      os << line.str();
    }
  }
}

SparseFactorization::SparseFactorization(const SparseMatrix &matrix, Ordering ordering,
                                         const std::vector<long> &column_order)
  : matrix_(matrix), size_(matrix.rows())
{
  Require(matrix.rows() == matrix.cols(), "sparse LU needs a square matrix");
  matrix_.makeCompressed();
  const auto *ap = matrix_.outerIndexPtr();
  const auto *ai = matrix_.innerIndexPtr();
  const double *ax = Packed(matrix_.valuePtr());

  std::array<double, UMFPACK_CONTROL> control{};
  std::array<double, UMFPACK_INFO> info{};
  umfpack_zl_defaults(control.data());
  control[UMFPACK_IRSTEP] = 0;
  long status = 0;
  if (ordering == Ordering::NestedDissection)
  {
    Require(static_cast<long>(column_order.size()) == size_,
            "nested dissection needs a column order of full length");
    control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
    control[UMFPACK_SINGLETONS] = 0;
    status = umfpack_zl_qsymbolic(size_, size_, ap, ai, ax, nullptr, column_order.data(),
                                  &symbolic_, control.data(), info.data());
  }
  else
  {
    control[UMFPACK_ORDERING] = UMFPACK_ORDERING_AMD;
    status = umfpack_zl_symbolic(size_, size_, ap, ai, ax, nullptr, &symbolic_,
                                 control.data(), info.data());
  }
  if (status != UMFPACK_OK)
  {
    throw NumericalError("sparse symbolic analysis failed: " + StatusText(status));
  }
  status = umfpack_zl_numeric(ap, ai, ax, nullptr, symbolic_, &numeric_, control.data(),
                              info.data());
  if (status == UMFPACK_WARNING_singular_matrix)
  {
    const long column = LocateZeroPivot(numeric_, size_);
    umfpack_zl_free_numeric(&numeric_);
    umfpack_zl_free_symbolic(&symbolic_);
    throw SingularPivotError("sparse LU met a zero pivot at unknown " + std::to_string(column),
                             column);
  }
  if (status != UMFPACK_OK)
  {
    umfpack_zl_free_symbolic(&symbolic_);
    throw NumericalError("sparse numeric factorization failed: " + StatusText(status));
  }
  stats_.nnz_l = info[UMFPACK_LNZ];
  stats_.nnz_u = info[UMFPACK_UNZ];
  stats_.flops = info[UMFPACK_FLOPS];
  stats_.peak_memory_bytes = info[UMFPACK_PEAK_MEMORY] * info[UMFPACK_SIZE_OF_UNIT];
  stats_.rcond = info[UMFPACK_RCOND];
}

SparseFactorization::~SparseFactorization()
{
  if (numeric_ != nullptr)
  {
    umfpack_zl_free_numeric(&numeric_);
  }
  if (symbolic_ != nullptr)
  {
    umfpack_zl_free_symbolic(&symbolic_);
  }
}

SparseFactorization::SparseFactorization(SparseFactorization &&other) noexcept
  : matrix_(std::move(other.matrix_)), size_(other.size_), symbolic_(other.symbolic_),
    numeric_(other.numeric_), stats_(other.stats_)
{
  other.symbolic_ = nullptr;
  other.numeric_ = nullptr;
  other.size_ = 0;
}

SparseFactorization &SparseFactorization::operator=(SparseFactorization &&other) noexcept
{
  if (this != &other)
  {
    this->~SparseFactorization();
    matrix_ = std::move(other.matrix_);
    size_ = other.size_;
    symbolic_ = other.symbolic_;
    numeric_ = other.numeric_;
    stats_ = other.stats_;
    other.symbolic_ = nullptr;
    other.numeric_ = nullptr;
    other.size_ = 0;
  }
  return *this;
}

CVector SparseFactorization::Solve(const CVector &b) const
{
  Require(numeric_ != nullptr, "factorization is empty");
  Require(b.size() == size_, "right-hand side has the wrong length");
  std::array<double, UMFPACK_CONTROL> control{};
  std::array<double, UMFPACK_INFO> info{};
  umfpack_zl_defaults(control.data());
  control[UMFPACK_IRSTEP] = 0;
  CVector x(size_);
  const long status = umfpack_zl_solve(
      UMFPACK_A, matrix_.outerIndexPtr(), matrix_.innerIndexPtr(), Packed(matrix_.valuePtr()),
      nullptr, Packed(x.data()), nullptr, Packed(b.data()), nullptr, numeric_, control.data(),
      info.data());
  if (status != UMFPACK_OK)
  {
    throw NumericalError("sparse triangular solve failed: " + StatusText(status));
  }
  return x;
}

SparseFactorization Factorize(const SparseSystem &system, Ordering ordering)
{
  std::vector<long> order;
  if (ordering == Ordering::NestedDissection)
  {
    const auto unknowns = UnknownOrder(system.grid, NestedDissectionOrder(system.grid));
    order.assign(unknowns.begin(), unknowns.end());
  }
  try
  {
    return SparseFactorization(system.matrix, ordering, order);
  }
  catch (const SingularPivotError &e)
  {
    if (e.Column() < 0)
    {
      throw;
    }
    const auto [component, i] = Unflatten(system.grid, e.Column());
    std::ostringstream msg;
    msg << "sparse LU met a zero pivot at component " << component + 1 << ", point (";
    for (int a = 0; a < system.grid.dim; ++a)
    {
      msg << (a ? "," : "") << i[a];
    }
    msg << ")";
    throw SingularPivotError(msg.str(), e.Column());
  }
}

Preconditioner::Preconditioner(const StencilLibrary &library,
                               SparseFactorization factorization)
  : grid_(library.GetGrid()), factorization_(std::move(factorization))
{
  Require(factorization_.Size() == grid_.NumUnknowns(),
          "factorization does not match the stencil grid");
  for (const auto &entry : library.Entries())
  {
    alpha_t_.push_back(entry.stencil.alpha.transpose());
  }
  const std::int64_t np = grid_.NumPoints();
  category_.reserve(np);
  gather_offset_.reserve(np + 1);
  gather_offset_.push_back(0);
  ForEachPoint(grid_, [&](const MultiIndex &i) {
    const StencilEntry &entry = library.ForPoint(i);
    category_.push_back(entry.tmpl.category.Id());
    for (const auto &coord : entry.tmpl.tau)
    {
      gather_.push_back(PointIndex(grid_, entry.tmpl.Absolute(i, coord)));
    }
    gather_offset_.push_back(static_cast<std::int64_t>(gather_.size()));
  });
}

CVector Preconditioner::Sparsify(const CVector &r) const
{
  const int dim = grid_.dim;
  const std::int64_t np = grid_.NumPoints();
  Require(r.size() == grid_.NumUnknowns(), "residual has the wrong length");
  CVector out(r.size());
  for (std::int64_t p = 0; p < np; ++p)
  {
    const CMatrix &at = alpha_t_[category_[p]];
    const std::int64_t first = gather_offset_[p];
    const int T = static_cast<int>(gather_offset_[p + 1] - first);
    for (int e = 0; e < dim; ++e)
    {
      Complex sum = 0.0;
      for (int c = 0; c < dim; ++c)
      {
        const Complex *rc = r.data() + c * np;
        for (int s = 0; s < T; ++s)
        {
          sum += at(e, c * T + s) * rc[gather_[first + s]];
        }
      }
      out[e * np + p] = sum;
    }
  }
  return out;
}

CVector Preconditioner::Apply(const CVector &r) const
{
  return factorization_.Solve(Sparsify(r));
}

VectorField Precondition(const Preconditioner &preconditioner, const VectorField &r)
{
  Require(r.grid == preconditioner.GetGrid(), "residual lives on a different grid");
  return {r.grid, preconditioner.Apply(r.values)};
}

}  // namespace vie
