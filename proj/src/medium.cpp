// SPDX-License-Identifier: Apache-2.0

#include "vie/medium.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include "vie/error.hpp"

namespace vie
{

namespace
{

constexpr double kSupportTolerance = 1e-8;
constexpr double kMinOneMinusM = 0.1;
constexpr int kPerturbationModes = 8;

// Quintic smoothstep on [0,1] (C2 at both ends) and its derivative.
double Smoothstep(double t)
{
  if (t <= 0.0)
    return 0.0;
  if (t >= 1.0)
    return 1.0;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double SmoothstepDerivative(double t)
{
  if (t <= 0.0 || t >= 1.0)
    return 0.0;
  const double s = t * (1.0 - t);
  return 30.0 * s * s;
}

// Plateau profile along one axis and its derivative.
std::pair<double, double> Ramp(const MediumProfile &p, double x)
{
  const double mid = 0.5 * (p.box_lower + p.box_upper);
  if (x <= mid)
  {
    const double t = (x - p.box_lower) / p.ramp_width;
    return {Smoothstep(t), SmoothstepDerivative(t) / p.ramp_width};
  }
  const double t = (p.box_upper - x) / p.ramp_width;
  return {Smoothstep(t), -SmoothstepDerivative(t) / p.ramp_width};
}

struct CosineMode
{
  std::array<int, 3> q{0, 0, 0};
  double weight = 0.0;
  double phase = 0.0;
};

// Uniform double in [0,1) from the top 53 bits; independent of the standard library's
// distribution implementation.
double Uniform01(std::mt19937_64 &rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<CosineMode> PerturbationModes(std::uint64_t seed, int dim)
{
  std::mt19937_64 rng(seed);
  std::vector<CosineMode> modes(kPerturbationModes);
  double total = 0.0;
  for (auto &mode : modes)
  {
    do
    {
      for (int a = 0; a < dim; ++a)
      {
        mode.q[a] = static_cast<int>(rng() % 5) - 2;
      }
    } while (mode.q[0] == 0 && mode.q[1] == 0 && mode.q[2] == 0);
    mode.weight = 0.5 + 0.5 * Uniform01(rng);
    mode.phase = 2.0 * std::numbers::pi * Uniform01(rng);
    total += mode.weight;
  }
  for (auto &mode : modes)
  {
    mode.weight /= total;
  }
  return modes;
}

// r(x) and its gradient for the perturbed box.
std::pair<double, std::array<double, 3>> Perturbation(const std::vector<CosineMode> &modes,
                                                      int dim, const Point &x)
{
  double r = 0.0;
  std::array<double, 3> grad{0.0, 0.0, 0.0};
  for (const auto &mode : modes)
  {
    double arg = mode.phase;
    for (int a = 0; a < dim; ++a)
    {
      arg += 2.0 * std::numbers::pi * mode.q[a] * x[a];
    }
    r += mode.weight * std::cos(arg);
    const double s = -mode.weight * std::sin(arg);
    for (int a = 0; a < dim; ++a)
    {
      grad[a] += s * 2.0 * std::numbers::pi * mode.q[a];
    }
  }
  return {r, grad};
}

struct ValueAndGradient
{
  Complex value;
  std::array<Complex, 3> grad;
};

ValueAndGradient GaussianLens(const MediumProfile &p, int dim, const Point &x)
{
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a)
  {
    r2 += (x[a] - p.center[a]) * (x[a] - p.center[a]);
  }
  const double r = std::sqrt(r2);
  const double span = p.taper_outer - p.taper_inner;
  const double taper = 1.0 - Smoothstep((r - p.taper_inner) / span);
  const double dtaper = -SmoothstepDerivative((r - p.taper_inner) / span) / span;
  const double gauss = std::exp(-r2 / (p.width * p.width));
  ValueAndGradient out{p.amplitude * gauss * taper, {}};
  for (int a = 0; a < dim; ++a)
  {
    const double dx = x[a] - p.center[a];
    double g = -2.0 * dx / (p.width * p.width) * gauss * taper;
    if (dtaper != 0.0)
    {
      g += gauss * dtaper * dx / r;
    }
    out.grad[a] = p.amplitude * g;
  }
  return out;
}

ValueAndGradient SmoothedBox(const MediumProfile &p, int dim, const Point &x)
{
  std::array<std::pair<double, double>, 3> ramps{};
  double prod = 1.0;
  for (int a = 0; a < dim; ++a)
  {
    ramps[a] = Ramp(p, x[a]);
    prod *= ramps[a].first;
  }
  ValueAndGradient out{p.amplitude * prod, {}};
  for (int a = 0; a < dim; ++a)
  {
    double g = ramps[a].second;
    for (int b = 0; b < dim; ++b)
    {
      if (b != a)
      {
        g *= ramps[b].first;
      }
    }
    out.grad[a] = p.amplitude * g;
  }
  return out;
}

ValueAndGradient PerturbedBox(const MediumProfile &p, int dim, const Point &x,
                              const std::vector<CosineMode> &modes)
{
  const auto box = SmoothedBox(p, dim, x);
  const auto [r, dr] = Perturbation(modes, dim, x);
  const double factor = 1.0 + p.delta * r;
  ValueAndGradient out{box.value * factor, {}};
  for (int a = 0; a < dim; ++a)
  {
    out.grad[a] = box.grad[a] * factor + box.value * (p.delta * dr[a]);
  }
  return out;
}

ValueAndGradient Evaluate(const MediumProfile &p, int dim, const Point &x,
                          const std::vector<CosineMode> &modes, bool need_gradient)
{
  switch (p.kind)
  {
    case ProfileKind::GaussianLens:
      return GaussianLens(p, dim, x);
    case ProfileKind::SmoothedBox:
      return SmoothedBox(p, dim, x);
    case ProfileKind::PerturbedBox:
      return PerturbedBox(p, dim, x, modes);
    case ProfileKind::Custom:
    {
      Require(static_cast<bool>(p.custom_m), "custom profile has no m(x) callback");
      ValueAndGradient out{p.custom_m(x), {}};
      if (need_gradient)
      {
        Require(static_cast<bool>(p.custom_gradient),
                "custom profile has no gradient callback");
        out.grad = p.custom_gradient(x);
      }
      return out;
    }
  }
  throw InvalidArgument("unknown profile kind");
}

void ValidateProfile(const MediumProfile &p)
{
  Require(p.width > 0.0, "profile width must be positive");
  Require(p.taper_outer > p.taper_inner, "taper_outer must exceed taper_inner");
  Require(p.ramp_width > 0.0, "ramp width must be positive");
  Require(p.box_lower + p.ramp_width <= p.box_upper - p.ramp_width,
          "box ramps overlap");
}

Point GridPoint(const Grid &grid, const MultiIndex &i)
{
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < grid.dim; ++a)
  {
    x[a] = i[a] * grid.h;
  }
  return x;
}

bool InOuterLayers(const Grid &grid, const MultiIndex &i)
{
  for (int a = 0; a < grid.dim; ++a)
  {
    if (i[a] <= 2 || i[a] >= grid.n - 1)
    {
      return true;
    }
  }
  return false;
}

}  // namespace

ScalarField ScalarField::Zero(const Grid &grid)
{
  return {grid, CVector::Zero(grid.NumPoints())};
}

VectorField VectorField::Zero(const Grid &grid)
{
  return {grid, CVector::Zero(grid.NumUnknowns())};
}

std::string ToString(ProfileKind kind)
{
  switch (kind)
  {
    case ProfileKind::GaussianLens:
      return "GAUSSIAN_LENS";
    case ProfileKind::SmoothedBox:
      return "SMOOTHED_BOX";
    case ProfileKind::PerturbedBox:
      return "PERTURBED_BOX";
    case ProfileKind::Custom:
      return "CUSTOM";
  }
  return "UNKNOWN";
}

ProfileKind ProfileKindFromString(const std::string &name)
{
  for (auto kind : {ProfileKind::GaussianLens, ProfileKind::SmoothedBox,
                    ProfileKind::PerturbedBox, ProfileKind::Custom})
  {
    if (ToString(kind) == name)
    {
      return kind;
    }
  }
  throw InvalidArgument("unknown profile kind '" + name + "'");
}

Complex EvaluateM(const MediumProfile &profile, int dim, const Point &x)
{
  ValidateProfile(profile);
  const auto modes = profile.kind == ProfileKind::PerturbedBox
                         ? PerturbationModes(profile.seed, dim)
                         : std::vector<CosineMode>{};
  return Evaluate(profile, dim, x, modes, false).value;
}

std::array<Complex, 3> EvaluateGradM(const MediumProfile &profile, int dim, const Point &x)
{
  ValidateProfile(profile);
  const auto modes = profile.kind == ProfileKind::PerturbedBox
                         ? PerturbationModes(profile.seed, dim)
                         : std::vector<CosineMode>{};
  return Evaluate(profile, dim, x, modes, true).grad;
}

ScalarField SampleM(const MediumProfile &profile, const Grid &grid)
{
  ValidateProfile(profile);
  const auto modes = profile.kind == ProfileKind::PerturbedBox
                         ? PerturbationModes(profile.seed, grid.dim)
                         : std::vector<CosineMode>{};
  ScalarField m = ScalarField::Zero(grid);
  const bool check_support = profile.kind != ProfileKind::Custom;
  ForEachPoint(grid,
               [&](const MultiIndex &i)
               {
                 const Complex value =
                     Evaluate(profile, grid.dim, GridPoint(grid, i), modes, false).value;
                 if (check_support && InOuterLayers(grid, i) &&
                     std::abs(value) > kSupportTolerance)
                 {
                   throw InvalidArgument(
                       "medium profile is not supported inside the domain at n = " +
                       std::to_string(grid.n) + ": |m| = " +
                       std::to_string(std::abs(value)) + " on the outer grid layers");
                 }
                 if (std::abs(1.0 - value) < kMinOneMinusM)
                 {
                   throw InvalidArgument("medium profile has |1 - m| < 0.1");
                 }
                 m.values[PointIndex(grid, i)] = value;
               });
  return m;
}

std::vector<ScalarField> FiniteDifferenceGradient(const ScalarField &f)
{
  const Grid &grid = f.grid;
  Require(grid.n >= 5, "fourth-order finite differences need n >= 5");
  const int n = grid.n;
  std::vector<ScalarField> grad(grid.dim, ScalarField::Zero(grid));
  for (int a = 0; a < grid.dim; ++a)
  {
    ForEachPoint(grid,
                 [&](const MultiIndex &i)
                 {
                   auto at = [&](int shift)
                   {
                     MultiIndex j = i;
                     j[a] += shift;
                     return f.values[PointIndex(grid, j)];
                   };
                   const int s = i[a];
                   Complex d;
                   if (s == 1)
                     d = -25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4);
                   else if (s == 2)
                     d = -3.0 * at(-1) - 10.0 * at(0) + 18.0 * at(1) - 6.0 * at(2) + at(3);
                   else if (s == n - 1)
                     d = 3.0 * at(1) + 10.0 * at(0) - 18.0 * at(-1) + 6.0 * at(-2) - at(-3);
                   else if (s == n)
                     d = 25.0 * at(0) - 48.0 * at(-1) + 36.0 * at(-2) - 16.0 * at(-3) + 3.0 * at(-4);
                   else
                     d = at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2);
                   grad[a].values[PointIndex(grid, i)] = d / (12.0 * grid.h);
                 });
  }
  return grad;
}

std::vector<ScalarField> SampleP(const MediumProfile &profile, const Grid &grid)
{
  const ScalarField m = SampleM(profile, grid);
  std::vector<ScalarField> p;
  if (profile.kind == ProfileKind::Custom && !profile.custom_gradient)
  {
    p = FiniteDifferenceGradient(m);
  }
  else
  {
    const auto modes = profile.kind == ProfileKind::PerturbedBox
                           ? PerturbationModes(profile.seed, grid.dim)
                           : std::vector<CosineMode>{};
    p.assign(grid.dim, ScalarField::Zero(grid));
    ForEachPoint(grid,
                 [&](const MultiIndex &i)
                 {
                   const auto grad =
                       Evaluate(profile, grid.dim, GridPoint(grid, i), modes, true).grad;
                   for (int a = 0; a < grid.dim; ++a)
                   {
                     p[a].values[PointIndex(grid, i)] = grad[a];
                   }
                 });
  }
  for (auto &pa : p)
  {
    pa.values.array() /= (1.0 - m.values.array());
  }
  return p;
}

MediumFields SampleMedium(const MediumProfile &profile, const Grid &grid)
{
  return {SampleM(profile, grid), SampleP(profile, grid)};
}

VectorField IncidentPlaneWave(const Grid &grid)
{
  VectorField e = VectorField::Zero(grid);
  auto last = e.Component(grid.dim - 1);
  ForEachPoint(grid,
               [&](const MultiIndex &i)
               {
                 last[PointIndex(grid, i)] = std::exp(Complex(0.0, grid.k * i[0] * grid.h));
               });
  return e;
}

}  // namespace vie
