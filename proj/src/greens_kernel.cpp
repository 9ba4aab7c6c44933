// SPDX-License-Identifier: Apache-2.0

#include "vie/greens_kernel.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include "vie/error.hpp"
#include "vie/special_functions.hpp"

namespace vie
{

namespace
{

constexpr double kPi = std::numbers::pi;

double Norm(int dim, const Point &x)
{
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a)
  {
    r2 += x[a] * x[a];
  }
  return std::sqrt(r2);
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_q.
struct GaussRule
{
  std::vector<double> nodes, weights;

  explicit GaussRule(int q) : nodes(q), weights(q)
  {
    for (int i = 0; i < q; ++i)
    {
      double x = std::cos(kPi * (i + 0.75) / (q + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it)
      {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= q; ++j)
        {
          const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = q * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16)
        {
          break;
        }
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    for (int i = 0; i < q / 2; ++i)
    {
      nodes[q - 1 - i] = -nodes[i];
      weights[q - 1 - i] = weights[i];
    }
    if (q % 2 == 1)
    {
      nodes[q / 2] = 0.0;
    }
  }
};

struct Box
{
  Point lo{0.0, 0.0, 0.0};
  double side = 1.0;
};

using Integrand = std::function<Complex(const Point &)>;

class AdaptiveCubature
{
public:
  AdaptiveCubature(int dim, const CorrectionSpec &spec)
    : dim_(dim), rule_(spec.gauss_order), max_depth_(spec.max_depth),
      rel_tol_(spec.relative_tolerance)
  {
  }

  Complex Integrate(const Integrand &f, const Box &box) const
  {
    const auto magnitude = [&f](const Point &x) { return Complex(std::abs(f(x)), 0.0); };
    const double scale = std::abs(Rule(magnitude, box));
    if (scale == 0.0)
    {
      return 0.0;
    }
    return Refine(f, box, Rule(f, box), rel_tol_ * scale, 0);
  }

private:
  Complex Rule(const Integrand &f, const Box &box) const
  {
    const int q = static_cast<int>(rule_.nodes.size());
    const double half = 0.5 * box.side;
    Complex sum = 0.0;
    Point x{0.0, 0.0, 0.0};
    std::array<int, 3> idx{0, 0, 0};
    const int total = dim_ == 2 ? q * q : q * q * q;
    for (int t = 0; t < total; ++t)
    {
      int rem = t;
      double w = 1.0;
      for (int a = dim_ - 1; a >= 0; --a)
      {
        idx[a] = rem % q;
        rem /= q;
        x[a] = box.lo[a] + half * (1.0 + rule_.nodes[idx[a]]);
        w *= rule_.weights[idx[a]];
      }
      sum += w * f(x);
    }
    return sum * std::pow(half, dim_);
  }

  std::vector<Box> Children(const Box &box) const
  {
    std::vector<Box> out;
    const double half = 0.5 * box.side;
    const int count = 1 << dim_;
    for (int c = 0; c < count; ++c)
    {
      Box child{box.lo, half};
      for (int a = 0; a < dim_; ++a)
      {
        if (c & (1 << a))
        {
          child.lo[a] += half;
        }
      }
      out.push_back(child);
    }
    return out;
  }

  Complex Refine(const Integrand &f, const Box &box, Complex coarse, double tol,
                 int depth) const
  {
    const auto children = Children(box);
    std::vector<Complex> fine(children.size());
    Complex sum = 0.0;
    for (std::size_t c = 0; c < children.size(); ++c)
    {
      fine[c] = Rule(f, children[c]);
      sum += fine[c];
    }
    if (std::abs(sum - coarse) <= tol)
    {
      return sum;
    }
    if (depth >= max_depth_)
    {
      throw NumericalError("cell quadrature did not reach its tolerance");
    }
    Complex refined = 0.0;
    const double child_tol = tol / std::sqrt(static_cast<double>(children.size()));
    for (std::size_t c = 0; c < children.size(); ++c)
    {
      refined += Refine(f, children[c], fine[c], child_tol, depth + 1);
    }
    return refined;
  }

  int dim_;
  GaussRule rule_;
  int max_depth_;
  double rel_tol_;
};

// Closed-form integral of the kernel's singular part over the centred cell of side h:
// 1/(4 pi r) in 3D, -ln(r)/(2 pi) in 2D.
double SingularSelfIntegral(int dim, double h)
{
  const double a = 0.5 * h;
  if (dim == 3)
  {
    // int_{[0,1]^3} 1/r = 3 ln(1+sqrt3) - (3/2) ln 2 - pi/4
    const double unit = 3.0 * std::log(1.0 + std::sqrt(3.0)) - 1.5 * std::log(2.0) - kPi / 4.0;
    return 8.0 * a * a * unit / (4.0 * kPi);
  }
  // int_{[0,1]^2} ln r = ln(2)/2 + pi/4 - 3/2
  const double unit = 0.5 * std::log(2.0) + kPi / 4.0 - 1.5;
  return -4.0 * a * a * (std::log(a) + unit) / (2.0 * kPi);
}

// Kernel minus its singular part; bounded at the origin.
Complex RegularPart(int dim, double k, const Point &x)
{
  const double r = Norm(dim, x);
  if (dim == 3)
  {
    const double s = std::sin(0.5 * k * r);
    return Complex(-2.0 * s * s, std::sin(k * r)) / (4.0 * kPi * r);
  }
  return HelmholtzKernel(2, k, x) + std::log(r) / (2.0 * kPi);
}

Complex KernelComponent(int dim, double k, int kernel_id, const Point &x)
{
  if (kernel_id == ConvTable::kG)
  {
    return HelmholtzKernel(dim, k, x);
  }
  return KernelGradient(dim, k, x)[kernel_id - 1];
}

}  // namespace

Complex HelmholtzKernel(int dim, double k, const Point &x)
{
  const double r = Norm(dim, x);
  if (r == 0.0)
  {
    throw InvalidArgument("Helmholtz kernel is singular at the origin");
  }
  if (dim == 3)
  {
    return std::exp(Complex(0.0, k * r)) / (4.0 * kPi * r);
  }
  return Complex(0.0, 0.25) * Hankel1Order0(k * r);
}

std::array<Complex, 3> KernelGradient(int dim, double k, const Point &x)
{
  const double r = Norm(dim, x);
  if (r == 0.0)
  {
    throw InvalidArgument("kernel gradient is singular at the origin");
  }
  // radial derivative dG/dr; gradient = dG/dr * x / r
  Complex radial;
  if (dim == 3)
  {
    radial = (Complex(0.0, k * r) - 1.0) * std::exp(Complex(0.0, k * r)) / (4.0 * kPi * r * r);
  }
  else
  {
    radial = Complex(0.0, -0.25 * k) * Hankel1Order1(k * r);
  }
  std::array<Complex, 3> g{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a)
  {
    g[a] = radial * (x[a] / r);
  }
  return g;
}

Complex CellIntegral(int dim, double k, double h, int kernel_id,
                     const std::array<int, 3> &offset, const CorrectionSpec &spec)
{
  bool self = true;
  Box cell{{0.0, 0.0, 0.0}, h};
  for (int a = 0; a < dim; ++a)
  {
    cell.lo[a] = (offset[a] - 0.5) * h;
    self = self && offset[a] == 0;
  }
  if (kernel_id != ConvTable::kG && offset[kernel_id - 1] == 0)
  {
    return 0.0;  // integrand odd in x_a over a cell symmetric in x_a
  }
  AdaptiveCubature cubature(dim, spec);
  if (!self)
  {
    return cubature.Integrate([&](const Point &x) { return KernelComponent(dim, k, kernel_id, x); },
                              cell);
  }
  return SingularSelfIntegral(dim, h) +
         cubature.Integrate([&](const Point &x) { return RegularPart(dim, k, x); }, cell);
}

ConvTable::ConvTable(const Grid &grid, int radius, std::vector<std::vector<Complex>> data)
  : grid_(grid), radius_(radius), data_(std::move(data))
{
  Require(static_cast<int>(data_.size()) == grid.dim + 1, "table needs d+1 kernels");
}

ConvTable BuildTables(const Grid &grid, const CorrectionSpec &spec)
{
  Require(spec.radius == 0 || spec.radius == 1, "correction radius must be 0 or 1");
  const int dim = grid.dim;
  const int n = grid.n;
  const int ext = 2 * n - 1;
  const std::size_t total = dim == 2 ? std::size_t(ext) * ext : std::size_t(ext) * ext * ext;
  const double volume = std::pow(grid.h, dim);
  std::vector<std::vector<Complex>> data(dim + 1, std::vector<Complex>(total));

  auto offset_of = [&](std::size_t idx)
  {
    std::array<int, 3> delta{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a)
    {
      delta[a] = static_cast<int>(idx % ext) - (n - 1);
      idx /= ext;
    }
    return delta;
  };

#pragma omp parallel for schedule(dynamic, 256)
  for (std::size_t idx = 0; idx < total; ++idx)
  {
    const auto delta = offset_of(idx);
    int inf_norm = 0;
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a)
    {
      inf_norm = std::max(inf_norm, std::abs(delta[a]));
      x[a] = delta[a] * grid.h;
    }
    if (inf_norm > spec.radius)
    {
      data[0][idx] = volume * HelmholtzKernel(dim, grid.k, x);
      const auto grad = KernelGradient(dim, grid.k, x);
      for (int a = 0; a < dim; ++a)
      {
        data[1 + a][idx] = volume * grad[a];
      }
    }
  }

  // Near-diagonal entries: integrate the cells with non-negative offsets and fill the
  // mirror images by parity (G even, G^a odd in axis a and even in the others).
  const int r = spec.radius;
  for (int i0 = 0; i0 <= r; ++i0)
    for (int i1 = 0; i1 <= r; ++i1)
      for (int i2 = 0; i2 <= (dim == 3 ? r : 0); ++i2)
      {
        const std::array<int, 3> delta{i0, i1, i2};
        if (i0 > n - 1 || i1 > n - 1 || i2 > n - 1)
        {
          continue;
        }
        std::vector<Complex> values(dim + 1);
        for (int kid = 0; kid <= dim; ++kid)
        {
          values[kid] = CellIntegral(dim, grid.k, grid.h, kid, delta, spec);
        }
        for (int signs = 0; signs < (1 << dim); ++signs)
        {
          std::array<int, 3> mirrored = delta;
          for (int a = 0; a < dim; ++a)
          {
            if (signs & (1 << a))
            {
              mirrored[a] = -mirrored[a];
            }
          }
          std::size_t idx = 0;
          for (int a = 0; a < dim; ++a)
          {
            idx = idx * ext + static_cast<std::size_t>(mirrored[a] + n - 1);
          }
          data[0][idx] = values[0];
          for (int a = 0; a < dim; ++a)
          {
            const bool flipped = (signs & (1 << a)) && delta[a] != 0;
            data[1 + a][idx] = flipped ? -values[1 + a] : values[1 + a];
          }
        }
      }
  return ConvTable(grid, spec.radius, std::move(data));
}

}  // namespace vie
