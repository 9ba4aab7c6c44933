// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <functional>
#include <gtest/gtest.h>
#include "vie/error.hpp"
#include "vie/greens_kernel.hpp"
#include "vie/special_functions.hpp"

namespace vie
{
namespace
{

constexpr double kPi = 3.141592653589793;

// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
struct GaussRule
{
  std::vector<double> x, w;
  explicit GaussRule(int n) : x(n), w(n)
  {
    for (int i = 0; i < n; ++i)
    {
      double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it)
      {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k)
        {
          const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double step = p1 / dp;
        z -= step;
        if (std::abs(step) < 1e-16)
          break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

// Composite Gauss rule over [a, b]: 8 equal panels of 24 points.
Complex Integrate1(const std::function<Complex(double)> &f, double a, double b)
{
  static const GaussRule rule(24);
  constexpr int kPanels = 8;
  Complex sum = 0.0;
  const double len = (b - a) / kPanels;
  for (int p = 0; p < kPanels; ++p)
  {
    const double lo = a + p * len;
    for (std::size_t i = 0; i < rule.x.size(); ++i)
    {
      sum += 0.5 * len * rule.w[i] * f(lo + 0.5 * len * (rule.x[i] + 1.0));
    }
  }
  return sum;
}

Complex Integrate2(const std::function<Complex(double, double)> &f, double a0, double b0,
                   double a1, double b1)
{
  return Integrate1([&](double u) { return Integrate1([&](double v) { return f(u, v); }, a1, b1); },
                    a0, b0);
}

// Cell integrals by the divergence theorem: every face stays away from the origin (or
// the flux through a small sphere around it vanishes), so the face integrands are smooth
// and plain Gauss rules converge fast. This is independent of the library's cubature.
//
// For a radial f, div(x F(r) / r^d) = f with F(r) = int_0^r s^(d-1) f(s) ds.
Complex RadialPotential(int dim, double k, double r)
{
  const Complex i(0.0, 1.0);
  if (dim == 3)
  {
    // int_0^r s e^{iks} ds / (4 pi)
    return (std::exp(i * k * r) * (r / (i * k) + 1.0 / (k * k)) - 1.0 / (k * k)) / (4.0 * kPi);
  }
  // int_0^r s (i/4) H0(ks) ds = (i/4) (r H1(kr)/k + 2i/(pi k^2))
  return 0.25 * i * (r * Hankel1Order1(k * r) / k + 2.0 * i / (kPi * k * k));
}

Complex OracleCellG(int dim, double k, double h, const std::array<int, 3> &delta)
{
  Complex total = 0.0;
  for (int axis = 0; axis < dim; ++axis)
  {
    for (int side : {-1, 1})
    {
      const double face = (delta[axis] + 0.5 * side) * h;
      const int u = (axis + 1) % dim, v = (axis + 2) % dim;
      if (dim == 2)
      {
        total += Integrate1(
            [&](double t) {
              Point x{0.0, 0.0, 0.0};
              x[axis] = face;
              x[u] = t;
              const double r = std::hypot(x[0], x[1]);
              return RadialPotential(2, k, r) * (x[axis] * side) / (r * r);
            },
            (delta[u] - 0.5) * h, (delta[u] + 0.5) * h);
      }
      else
      {
        total += Integrate2(
            [&](double s, double t) {
              Point x{0.0, 0.0, 0.0};
              x[axis] = face;
              x[u] = s;
              x[v] = t;
              const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
              return RadialPotential(3, k, r) * (x[axis] * side) / (r * r * r);
            },
            (delta[u] - 0.5) * h, (delta[u] + 0.5) * h, (delta[v] - 0.5) * h,
            (delta[v] + 0.5) * h);
      }
    }
  }
  return total;
}

// int_cell dG/dx_a = flux of G through the two faces normal to a.
Complex OracleCellGradient(int dim, double k, double h, int a, const std::array<int, 3> &delta)
{
  Complex total = 0.0;
  for (int side : {-1, 1})
  {
    const double face = (delta[a] + 0.5 * side) * h;
    const int u = (a + 1) % dim, v = (a + 2) % dim;
    if (dim == 2)
    {
      total += static_cast<double>(side) *
               Integrate1(
                   [&](double t) {
                     Point x{0.0, 0.0, 0.0};
                     x[a] = face;
                     x[u] = t;
                     return HelmholtzKernel(2, k, x);
                   },
                   (delta[u] - 0.5) * h, (delta[u] + 0.5) * h);
    }
    else
    {
      total += static_cast<double>(side) *
               Integrate2(
                   [&](double s, double t) {
                     Point x{0.0, 0.0, 0.0};
                     x[a] = face;
                     x[u] = s;
                     x[v] = t;
                     return HelmholtzKernel(3, k, x);
                   },
                   (delta[u] - 0.5) * h, (delta[u] + 0.5) * h, (delta[v] - 0.5) * h,
                   (delta[v] + 0.5) * h);
    }
  }
  return total;
}

TEST(HelmholtzKernel, ThreeDimensionalValues)
{
  const Complex g = HelmholtzKernel(3, 2 * kPi, {1.0, 0.0, 0.0});
  EXPECT_NEAR(g.real(), 1.0 / (4 * kPi), 1e-15);
  EXPECT_NEAR(g.imag(), 0.0, 1e-15);
  // Tiny k approaches the Laplace kernel.
  const Complex laplace = HelmholtzKernel(3, 1e-9, {0.3, -0.4, 0.0});
  EXPECT_NEAR(std::abs(laplace - Complex(1.0 / (4 * kPi * 0.5), 0.0)), 0.0, 1e-9);
}

TEST(HelmholtzKernel, TwoDimensionalValue)
{
  // k|x| = 1: (i/4)(J0(1) + i Y0(1))
  const Complex g = HelmholtzKernel(2, 2.0, {0.3, 0.4, 0.0});
  const Complex expected = Complex(0.0, 0.25) * Complex(0.76519768655796655145, 0.088256964215676957983);
  EXPECT_NEAR(std::abs(g - expected), 0.0, 1e-14);
}

TEST(HelmholtzKernel, RejectsOrigin)
{
  EXPECT_THROW(HelmholtzKernel(3, 1.0, {0.0, 0.0, 0.0}), InvalidArgument);
  EXPECT_THROW(KernelGradient(2, 1.0, {0.0, 0.0, 0.0}), InvalidArgument);
}

TEST(KernelGradient, UnitRadiusClosedForm)
{
  const auto g = KernelGradient(3, 2 * kPi, {1.0, 0.0, 0.0});
  const Complex expected = Complex(-1.0, 2 * kPi) / (4 * kPi);
  EXPECT_NEAR(std::abs(g[0] - expected), 0.0, 1e-14);
  EXPECT_EQ(g[1], Complex(0.0));
  EXPECT_EQ(g[2], Complex(0.0));
}

TEST(KernelGradient, MatchesCentralDifferencesAndIsOdd)
{
  const double step = 1e-5;
  const std::vector<Point> points{{0.3, -0.2, 0.1}, {0.05, 0.02, -0.07}, {1.1, 0.4, 0.9}};
  for (int dim : {2, 3})
  {
    for (double k : {1.0, 20.0, 60.0})
    {
      for (Point x : points)
      {
        if (dim == 2)
          x[2] = 0.0;
        const auto grad = KernelGradient(dim, k, x);
        Point mx{-x[0], -x[1], -x[2]};
        const auto grad_m = KernelGradient(dim, k, mx);
        double scale = 0.0;
        for (int a = 0; a < dim; ++a)
          scale = std::max(scale, std::abs(grad[a]));
        for (int a = 0; a < dim; ++a)
        {
          Point xp = x, xm = x;
          xp[a] += step;
          xm[a] -= step;
          const Complex fd =
              (HelmholtzKernel(dim, k, xp) - HelmholtzKernel(dim, k, xm)) / (2 * step);
          EXPECT_LE(std::abs(fd - grad[a]), 1e-6 * scale) << dim << "D k=" << k;
          EXPECT_EQ(grad_m[a], -grad[a]);
        }
      }
    }
  }
}

TEST(BuildTables, ParityHoldsExhaustively)
{
  for (int dim : {2, 3})
  {
    for (int n : {3, 4, 6})
    {
      const Grid g = Grid::Make(dim, n, 7.0);
      const ConvTable t = BuildTables(g);
      const int r = n - 1;
      for (int a = -r; a <= r; ++a)
        for (int b = -r; b <= r; ++b)
          for (int c = (dim == 3 ? -r : 0); c <= (dim == 3 ? r : 0); ++c)
          {
            const std::array<int, 3> d{a, b, c};
            const std::array<int, 3> neg{-a, -b, -c};
            EXPECT_EQ(t(ConvTable::kG, d), t(ConvTable::kG, neg));
            for (int ax = 0; ax < dim; ++ax)
            {
              std::array<int, 3> flip = d;
              flip[ax] = -flip[ax];
              EXPECT_EQ(t(ConvTable::Gradient(ax), d), -t(ConvTable::Gradient(ax), flip));
              for (int other = 0; other < dim; ++other)
              {
                if (other == ax)
                  continue;
                std::array<int, 3> mirror = d;
                mirror[other] = -mirror[other];
                EXPECT_EQ(t(ConvTable::Gradient(ax), d), t(ConvTable::Gradient(ax), mirror));
              }
            }
          }
    }
  }
}

TEST(BuildTables, FarEntriesAreScaledKernelSamples)
{
  for (int dim : {2, 3})
  {
    const Grid g = Grid::Make(dim, 9, 11.0);
    const ConvTable t = BuildTables(g);
    const double hd = std::pow(g.h, dim);
    for (const std::array<int, 3> d : {std::array<int, 3>{2, 0, 0}, {-3, 5, 0}, {8, -8, 0},
                                       {1, 2, 0}})
    {
      std::array<int, 3> delta = d;
      if (dim == 3)
        delta[2] = d[0] == 2 ? 0 : 1;
      const Point x{delta[0] * g.h, delta[1] * g.h, delta[2] * g.h};
      EXPECT_EQ(t(ConvTable::kG, delta), hd * HelmholtzKernel(dim, g.k, x));
      const auto grad = KernelGradient(dim, g.k, x);
      for (int a = 0; a < dim; ++a)
      {
        EXPECT_EQ(t(ConvTable::Gradient(a), delta), hd * grad[a]);
      }
    }
  }
}

TEST(BuildTables, SelfGradientEntriesVanish)
{
  for (int dim : {2, 3})
  {
    const ConvTable t = BuildTables(Grid::Make(dim, 5, 9.0));
    for (int a = 0; a < dim; ++a)
    {
      EXPECT_EQ(t(ConvTable::Gradient(a), {0, 0, 0}), Complex(0.0));
    }
  }
}

TEST(BuildTables, ThreeDimensionalSelfEntryLowFrequencyLimit)
{
  // Integral of 1/(4 pi |y|) over the unit cube centred at the origin.
  const double cube = 0.18940053877;
  const Grid g = Grid::Make(3, 9, 1e-4);
  const ConvTable t = BuildTables(g);
  const Complex self = t(ConvTable::kG, {0, 0, 0});
  EXPECT_NEAR(self.real() / (g.h * g.h), cube, 1e-10);
}

TEST(BuildTables, NearEntriesMatchDivergenceTheoremOracle)
{
  for (int dim : {2, 3})
  {
    for (double k : {3.0, 25.0})
    {
      const Grid g = Grid::Make(dim, 7, k);
      const ConvTable t = BuildTables(g);
      for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b)
          for (int c = 0; c <= (dim == 3 ? 1 : 0); ++c)
          {
            const std::array<int, 3> d{a, b, c};
            const Complex g_ref = OracleCellG(dim, k, g.h, d);
            EXPECT_LE(std::abs(t(ConvTable::kG, d) - g_ref), 1e-10 * std::abs(g_ref))
                << dim << "D k=" << k << " delta " << a << b << c;
            for (int ax = 0; ax < dim; ++ax)
            {
              if (d[ax] == 0)
                continue;  // zero by parity, checked elsewhere
              const Complex ref = OracleCellGradient(dim, k, g.h, ax, d);
              EXPECT_LE(std::abs(t(ConvTable::Gradient(ax), d) - ref), 1e-10 * std::abs(ref))
                  << dim << "D k=" << k << " axis " << ax << " delta " << a << b << c;
            }
          }
    }
  }
}

// A fourth-order discrete Helmholtz operator applied to far table entries at a fixed
// physical point: the residual relative to k^2 G must fall at least like h^2.
TEST(BuildTables, FarSamplesSatisfyHelmholtzEquation)
{
  for (int dim : {2, 3})
  {
    const double k = 8.0;
    std::vector<double> residual;
    for (int n : (dim == 2 ? std::vector<int>{19, 39, 79} : std::vector<int>{9, 19, 39}))
    {
      const Grid g = Grid::Make(dim, n, k);
      const ConvTable t = BuildTables(g);
      const int m = (n + 1) / 4;  // x = (0.25, 0.25[, 0.25])
      const std::array<int, 3> centre{m, m, dim == 3 ? m : 0};
      for (int kid = 0; kid <= dim; ++kid)
      {
        Complex lap = 0.0;
        for (int a = 0; a < dim; ++a)
        {
          auto at = [&](int s) {
            std::array<int, 3> d = centre;
            d[a] += s;
            return t(kid, d);
          };
          lap += (-at(-2) + 16.0 * at(-1) - 30.0 * at(0) + 16.0 * at(1) - at(2)) /
                 (12.0 * g.h * g.h);
        }
        const Complex v = t(kid, centre);
        if (kid == 0)
          residual.push_back(std::abs(lap + k * k * v) / std::abs(k * k * v));
      }
    }
    EXPECT_LT(residual[1], residual[0] / 4.0) << dim << "D";
    EXPECT_LT(residual[2], residual[1] / 4.0) << dim << "D";
  }
}

TEST(BuildTables, RejectsUnsupportedRadius)
{
  CorrectionSpec spec;
  spec.radius = 2;
  EXPECT_THROW(BuildTables(Grid::Make(2, 5, 1.0), spec), InvalidArgument);
}

TEST(BuildTables, RadiusZeroKeepsPointSamplesOffTheDiagonal)
{
  CorrectionSpec spec;
  spec.radius = 0;
  const Grid g = Grid::Make(2, 5, 4.0);
  const ConvTable t = BuildTables(g, spec);
  const Point x{g.h, 0.0, 0.0};
  EXPECT_EQ(t(ConvTable::kG, {1, 0, 0}), g.h * g.h * HelmholtzKernel(2, g.k, x));
  EXPECT_NE(t(ConvTable::kG, {0, 0, 0}), Complex(0.0));
}

}  // namespace
}  // namespace vie
