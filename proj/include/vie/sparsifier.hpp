// SPDX-License-Identifier: Apache-2.0

#ifndef VIE_SPARSIFIER_HPP
#define VIE_SPARSIFIER_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>
#include <Eigen/SparseCore>
#include "vie/error.hpp"
#include "vie/medium.hpp"
#include "vie/stencil.hpp"

namespace vie
{

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor, long>;

// Sparse approximation of the dense system: for every grid point i the d equations
//   alpha^T E_tau + beta^T P_i E_tau = alpha^T g_tau,
// with P_i the local medium matrix [diag m (x d); p^1 .. p^d]. Row e*n^d + i holds
// equation e of point i; columns follow Flatten.
struct SparseSystem
{
  Grid grid;
  SparseMatrix matrix;
};

SparseSystem AssembleSparse(const Grid &grid, const StencilLibrary &library,
                            const MediumFields &medium);

// Coordinate text export: "row col re im" per nonzero, 0-based.
void WriteCoordinateText(const SparseSystem &system, std::ostream &os);

enum class Ordering
{
  NestedDissection,  // geometric nested dissection, symmetric pivoting strategy
  Amd                // the solver's own AMD ordering
};

struct FactorStats
{
  double nnz_l = 0.0;
  double nnz_u = 0.0;
  double flops = 0.0;
  double peak_memory_bytes = 0.0;
  double rcond = 0.0;
};

// Raised when the factorization meets an exactly zero pivot; `column` is the unknown
// (Flatten index) whose pivot vanished.
class SingularPivotError : public NumericalError
{
public:
  SingularPivotError(const std::string &what, long column)
    : NumericalError(what), column_(column) {}
  long Column() const { return column_; }

private:
  long column_;
};

// Exact sparse LU (multifrontal, UMFPACK) behind a fill-reducing ordering. Solve is
// const and safe to call concurrently.
class SparseFactorization
{
public:
  SparseFactorization(const SparseMatrix &matrix, Ordering ordering,
                      const std::vector<long> &column_order = {});
  ~SparseFactorization();
  SparseFactorization(SparseFactorization &&) noexcept;
  SparseFactorization &operator=(SparseFactorization &&) noexcept;
  SparseFactorization(const SparseFactorization &) = delete;
  SparseFactorization &operator=(const SparseFactorization &) = delete;

  CVector Solve(const CVector &b) const;
  const FactorStats &Stats() const { return stats_; }
  long Size() const { return size_; }

private:
  SparseMatrix matrix_;  // UMFPACK needs the matrix again at solve time
  long size_ = 0;
  void *symbolic_ = nullptr;
  void *numeric_ = nullptr;
  FactorStats stats_;
};

// Factorizes the assembled system; nested dissection uses the grid geometry.
SparseFactorization Factorize(const SparseSystem &system,
                              Ordering ordering = Ordering::NestedDissection);

// The sparsifying preconditioner z = S^{-1} (alpha^T r_tau)_i.
class Preconditioner
{
public:
  Preconditioner(const StencilLibrary &library, SparseFactorization factorization);

  const Grid &GetGrid() const { return grid_; }
  const SparseFactorization &Factorization() const { return factorization_; }

  // Right-hand side of the sparse system: per point i, the d values alpha_i^T r_tau_i.
  CVector Sparsify(const CVector &r) const;
  CVector Apply(const CVector &r) const;

private:
  Grid grid_;
  SparseFactorization factorization_;
  std::vector<CMatrix> alpha_t_;                  // per category, alpha^T (d x d|tau|)
  std::vector<int> category_;                     // per point
  std::vector<std::int64_t> gather_;              // per point, |tau| neighbour indices
  std::vector<std::int64_t> gather_offset_;       // CSR offsets into gather_
};

VectorField Precondition(const Preconditioner &preconditioner, const VectorField &r);

}  // namespace vie

#endif  // VIE_SPARSIFIER_HPP
