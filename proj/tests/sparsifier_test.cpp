// SPDX-License-Identifier: Apache-2.0

#include <sstream>
#include <thread>
#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>
#include "test_support.hpp"
#include "vie/dense_oracle.hpp"
#include "vie/error.hpp"
#include "vie/fast_apply.hpp"
#include "vie/sparsifier.hpp"

namespace vie
{
namespace
{

using testing::RandomSmoothProfile;
using testing::RandomVector;
using testing::RelativeError;
using testing::VacuumFields;

constexpr double kTwoPi = 6.283185307179586;

struct Fixture
{
  Grid grid;
  ConvTable table;
  StencilLibrary library;
};

Fixture MakeSetup(int dim, int n, double k_over_2pi, const StencilOptions &options = {})
{
  const Grid g = Grid::Make(dim, n, kTwoPi * k_over_2pi);
  ConvTable t = BuildTables(g);
  StencilLibrary lib = BuildLibrary(g, t, options);
  return {g, std::move(t), std::move(lib)};
}

SparseMatrix Identity(long size)
{
  SparseMatrix a(size, size);
  a.setIdentity();
  return a;
}

// Diagonally dominant random matrix with a 5-point pattern on a size x 1 line.
SparseMatrix RandomDominant(long size, std::uint64_t seed)
{
  const CVector v = RandomVector(4 * size, seed);
  std::vector<Eigen::Triplet<Complex, long>> trip;
  for (long i = 0; i < size; ++i)
  {
    trip.emplace_back(i, i, 6.0 + v[i]);
    if (i + 1 < size)
      trip.emplace_back(i, i + 1, v[size + i]);
    if (i > 0)
      trip.emplace_back(i, i - 1, v[2 * size + i]);
    trip.emplace_back(i, (i * 7 + 3) % size, 0.5 * v[3 * size + i]);
  }
  SparseMatrix a(size, size);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

std::vector<long> NaturalOrder(long size)
{
  std::vector<long> q(size);
  for (long i = 0; i < size; ++i)
    q[i] = i;
  return q;
}

CMatrix ToDense(const SparseMatrix &a)
{
  return CMatrix(a);
}

TEST(AssembleSparse, VacuumSystemIsTheSparsifyMap)
{
  const Fixture s = MakeSetup(2, 11, 2.0);
  const SparseSystem sys = AssembleSparse(s.grid, s.library, VacuumFields(s.grid));
  const Preconditioner pre(s.library, Factorize(sys));
  // With m = 0 the operator is the identity, g = E solves it, and S E = alpha^T E_tau.
  const CVector e = RandomVector(s.grid.NumUnknowns(), 3);
  EXPECT_LT(RelativeError(sys.matrix * e, pre.Sparsify(e)), 1e-14);
}

TEST(AssembleSparse, SizeAndRowSparsity)
{
  for (int dim : {2, 3})
  {
    const Fixture s = MakeSetup(dim, 6, 1.0);
    const SparseSystem sys =
        AssembleSparse(s.grid, s.library, SampleMedium(RandomSmoothProfile(5), s.grid));
    const long unknowns = s.grid.NumUnknowns();
    ASSERT_EQ(sys.matrix.rows(), unknowns);
    ASSERT_EQ(sys.matrix.cols(), unknowns);
    const long per_row = dim * (dim == 2 ? 9 : 27);
    EXPECT_LE(sys.matrix.nonZeros(), unknowns * per_row);
    const SparseMatrix rows = sys.matrix.transpose();
    for (long r = 0; r < unknowns; ++r)
    {
      EXPECT_LE(rows.outerIndexPtr()[r + 1] - rows.outerIndexPtr()[r], per_row);
    }
  }
}

// Swapping the two axes of a 2D grid together with the two field components maps the
// system for m onto the system for the transposed medium. Here p = 0.
TEST(AssembleSparse, ComponentRelabelingPermutesTheSystem)
{
  const Fixture s = MakeSetup(2, 8, 1.5);
  const Grid &g = s.grid;
  MediumFields med = VacuumFields(g);
  MediumFields med_t = VacuumFields(g);
  const ScalarField m = SampleM(RandomSmoothProfile(9, 0.6), g);
  ForEachPoint(g, [&](const MultiIndex &i) {
    MultiIndex it = i;
    std::swap(it[0], it[1]);
    med.m.values[PointIndex(g, i)] = m.values[PointIndex(g, i)];
    med_t.m.values[PointIndex(g, it)] = m.values[PointIndex(g, i)];
  });
  const CMatrix a = ToDense(AssembleSparse(g, s.library, med).matrix);
  const CMatrix b = ToDense(AssembleSparse(g, s.library, med_t).matrix);
  auto relabel = [&](long idx) {
    auto [c, i] = Unflatten(g, idx);
    std::swap(i[0], i[1]);
    return Flatten(g, 1 - c, i);
  };
  double worst = 0.0;
  for (long r = 0; r < a.rows(); ++r)
  {
    for (long c = 0; c < a.cols(); ++c)
    {
      worst = std::max(worst, std::abs(b(relabel(r), relabel(c)) - a(r, c)));
    }
  }
  EXPECT_LT(worst, 1e-10 * a.cwiseAbs().maxCoeff());
}

TEST(AssembleSparse, GradientFreeStencilsDecoupleComponents)
{
  for (int dim : {2, 3})
  {
    const Fixture s = MakeSetup(dim, 6, 1.0, StencilOptions{false});
    MediumFields med = SampleMedium(RandomSmoothProfile(11), s.grid);
    for (auto &p : med.p)
      p.values.setZero();
    const SparseMatrix a = AssembleSparse(s.grid, s.library, med).matrix;
    const long np = s.grid.NumPoints();
    long cross = 0;
    for (long col = 0; col < a.outerSize(); ++col)
    {
      for (SparseMatrix::InnerIterator it(a, col); it; ++it)
      {
        if (it.row() / np != col / np && it.value() != Complex(0.0))
          ++cross;
      }
    }
    EXPECT_EQ(cross, 0) << "d = " << dim;
    const CMatrix dense = ToDense(a);
    const CMatrix first = dense.topLeftCorner(np, np);
    for (int c = 1; c < dim; ++c)
    {
      EXPECT_LT((dense.block(c * np, c * np, np, np) - first).norm(), 1e-13 * first.norm());
    }
  }
}

TEST(AssembleSparse, Deterministic)
{
  const Fixture s = MakeSetup(2, 9, 1.5);
  const MediumFields med = SampleMedium(RandomSmoothProfile(2), s.grid);
  const SparseMatrix a = AssembleSparse(s.grid, s.library, med).matrix;
  const SparseMatrix b = AssembleSparse(s.grid, s.library, med).matrix;
  ASSERT_EQ(a.nonZeros(), b.nonZeros());
  EXPECT_TRUE(std::equal(a.valuePtr(), a.valuePtr() + a.nonZeros(), b.valuePtr()));
  EXPECT_TRUE(std::equal(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros(), b.innerIndexPtr()));
}

TEST(AssembleSparse, RejectsMismatchedInputs)
{
  const Fixture s = MakeSetup(2, 6, 1.0);
  const Grid other = Grid::Make(2, 7, s.grid.k);
  EXPECT_THROW(AssembleSparse(other, s.library, VacuumFields(other)), InvalidArgument);
  EXPECT_THROW(AssembleSparse(s.grid, s.library, VacuumFields(other)), InvalidArgument);
}

TEST(WriteCoordinateText, RoundTrips)
{
  const Fixture s = MakeSetup(2, 5, 1.0);
  const SparseSystem sys =
      AssembleSparse(s.grid, s.library, SampleMedium(RandomSmoothProfile(4), s.grid));
  std::stringstream text;
  WriteCoordinateText(sys, text);
  std::vector<Eigen::Triplet<Complex, long>> trip;
  long row = 0, col = 0;
  double re = 0.0, im = 0.0;
  while (text >> row >> col >> re >> im)
  {
    trip.emplace_back(row, col, Complex(re, im));
  }
  EXPECT_EQ(static_cast<long>(trip.size()), sys.matrix.nonZeros());
  SparseMatrix back(sys.matrix.rows(), sys.matrix.cols());
  back.setFromTriplets(trip.begin(), trip.end());
  EXPECT_EQ((back - sys.matrix).norm(), 0.0);
}

TEST(SparseFactorization, IdentitySolvesExactly)
{
  const long size = 50;
  const CVector b = RandomVector(size, 1);
  for (Ordering o : {Ordering::NestedDissection, Ordering::Amd})
  {
    const SparseFactorization f(Identity(size), o, NaturalOrder(size));
    EXPECT_EQ((f.Solve(b) - b).norm(), 0.0);
  }
}

TEST(SparseFactorization, SmallResidualOnDominantMatrix)
{
  const long size = 400;
  const SparseMatrix a = RandomDominant(size, 7);
  const CVector b = RandomVector(size, 8);
  for (Ordering o : {Ordering::NestedDissection, Ordering::Amd})
  {
    const SparseFactorization f(a, o, NaturalOrder(size));
    const CVector x = f.Solve(b);
    EXPECT_LT((a * x - b).norm() / b.norm(), 1e-10);
    EXPECT_GT(f.Stats().nnz_l, 0.0);
    EXPECT_GT(f.Stats().rcond, 0.0);
  }
}

TEST(SparseFactorization, ZeroColumnReportsItsPivot)
{
  const long size = 30;
  SparseMatrix a = Identity(size);
  a.coeffRef(17, 17) = 0.0;
  a.prune(Complex(0.0));
  a.coeffRef(3, 17) = 0.0;  // keep the column structurally present but numerically zero
  try
  {
    SparseFactorization f(a, Ordering::Amd);
    FAIL() << "singular matrix factorized";
  }
  catch (const SingularPivotError &e)
  {
    EXPECT_EQ(e.Column(), 17);
  }
}

TEST(Factorize, SingularPivotNamesComponentAndPoint)
{
  const Grid g = Grid::Make(2, 4, 3.0);
  const MultiIndex bad{2, {2, 3, 1}};
  SparseSystem sys{g, Identity(g.NumUnknowns())};
  const long col = Flatten(g, 1, bad);
  sys.matrix.coeffRef(col, col) = 0.0;
  try
  {
    Factorize(sys);
    FAIL() << "singular system factorized";
  }
  catch (const SingularPivotError &e)
  {
    EXPECT_EQ(e.Column(), col);
    EXPECT_NE(std::string(e.what()).find("component 2, point (2,3)"), std::string::npos)
        << e.what();
  }
}

TEST(Factorize, OrderingsAgree)
{
  const Fixture s = MakeSetup(2, 15, 2.0);
  const SparseSystem sys =
      AssembleSparse(s.grid, s.library, SampleMedium(RandomSmoothProfile(6), s.grid));
  const CVector b = RandomVector(s.grid.NumUnknowns(), 2);
  const CVector x_nd = Factorize(sys, Ordering::NestedDissection).Solve(b);
  const CVector x_amd = Factorize(sys, Ordering::Amd).Solve(b);
  EXPECT_LT(RelativeError(x_amd, x_nd), 1e-10);
  EXPECT_LT((sys.matrix * x_nd - b).norm() / b.norm(), 1e-10);
}

TEST(Preconditioner, InvertsTheVacuumOperator)
{
  for (int dim : {2, 3})
  {
    const Fixture s = MakeSetup(dim, dim == 2 ? 12 : 6, 1.5);
    const MediumFields vac = VacuumFields(s.grid);
    const Preconditioner pre(s.library, Factorize(AssembleSparse(s.grid, s.library, vac)));
    const SystemOperator op(s.table, vac);
    const VectorField e{s.grid, RandomVector(s.grid.NumUnknowns(), 13)};
    EXPECT_LT(RelativeError(Precondition(pre, op.Apply(e)).values, e.values), 1e-8);
  }
}

TEST(Preconditioner, SolvesTheSparseSystem)
{
  const Fixture s = MakeSetup(2, 12, 2.0);
  const SparseSystem sys =
      AssembleSparse(s.grid, s.library, SampleMedium(RandomSmoothProfile(21), s.grid));
  const Preconditioner pre(s.library, Factorize(sys));
  const CVector r = RandomVector(s.grid.NumUnknowns(), 22);
  const CVector z = pre.Apply(r);
  const CVector rhs = pre.Sparsify(r);
  EXPECT_LT((sys.matrix * z - rhs).norm() / rhs.norm(), 1e-10);
}

TEST(Preconditioner, Linear)
{
  const Fixture s = MakeSetup(2, 10, 1.5);
  const Preconditioner pre(
      s.library,
      Factorize(AssembleSparse(s.grid, s.library, SampleMedium(RandomSmoothProfile(1), s.grid))));
  const CVector x = RandomVector(s.grid.NumUnknowns(), 1);
  const CVector y = RandomVector(s.grid.NumUnknowns(), 2);
  const Complex a(0.3, -1.2), b(-2.0, 0.5);
  const CVector lhs = pre.Apply(a * x + b * y);
  EXPECT_LT(RelativeError(lhs, a * pre.Apply(x) + b * pre.Apply(y)), 1e-12);
}

// Eigenvalues of the preconditioned dense operator cluster around 1.
TEST(Preconditioner, ClustersTheSpectrum)
{
  const Fixture s = MakeSetup(2, 9, 1.5);
  const MediumFields med = SampleMedium(RandomSmoothProfile(17, 0.7), s.grid);
  const Preconditioner pre(s.library, Factorize(AssembleSparse(s.grid, s.library, med)));
  const CMatrix a = DenseAssemble(s.table, med);
  CMatrix pa(a.rows(), a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c)
  {
    pa.col(c) = pre.Apply(a.col(c));
  }
  const CVector lambda = Eigen::ComplexEigenSolver<CMatrix>(pa, false).eigenvalues();
  long near = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
  {
    if (std::abs(lambda[i] - 1.0) <= 0.5)
      ++near;
  }
  EXPECT_GE(static_cast<double>(near) / lambda.size(), 0.9);
}

TEST(Preconditioner, ConcurrentAppliesAgree)
{
  const Fixture s = MakeSetup(2, 14, 2.0);
  const Preconditioner pre(
      s.library,
      Factorize(AssembleSparse(s.grid, s.library, SampleMedium(RandomSmoothProfile(8), s.grid))));
  std::vector<CVector> inputs, serial, parallel(4);
  for (int t = 0; t < 4; ++t)
  {
    inputs.push_back(RandomVector(s.grid.NumUnknowns(), 40 + t));
    serial.push_back(pre.Apply(inputs.back()));
  }
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t)
  {
    workers.emplace_back([&, t] { parallel[t] = pre.Apply(inputs[t]); });
  }
  for (auto &w : workers)
    w.join();
  for (int t = 0; t < 4; ++t)
  {
    EXPECT_EQ((parallel[t] - serial[t]).norm(), 0.0);
  }
}

TEST(Preconditioner, RejectsMismatchedFactorization)
{
  const Fixture s = MakeSetup(2, 6, 1.0);
  EXPECT_THROW(Preconditioner(s.library, SparseFactorization(Identity(10), Ordering::Amd)),
               InvalidArgument);
}

}  // namespace
}  // namespace vie
