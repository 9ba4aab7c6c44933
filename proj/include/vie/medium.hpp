// SPDX-License-Identifier: Apache-2.0

#ifndef VIE_MEDIUM_HPP
#define VIE_MEDIUM_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>
#include "vie/grid.hpp"
#include "vie/types.hpp"

namespace vie
{

// Complex values at every grid point, in PointIndex order.
struct ScalarField
{
  Grid grid;
  CVector values;

  static ScalarField Zero(const Grid &grid);
};

// d complex values per grid point, in Flatten order (component-major).
struct VectorField
{
  Grid grid;
  CVector values;

  static VectorField Zero(const Grid &grid);

  auto Component(int c) { return values.segment(c * grid.NumPoints(), grid.NumPoints()); }
  auto Component(int c) const
  {
    return values.segment(c * grid.NumPoints(), grid.NumPoints());
  }
};

enum class ProfileKind
{
  GaussianLens,
  SmoothedBox,
  PerturbedBox,
  Custom
};

std::string ToString(ProfileKind kind);
ProfileKind ProfileKindFromString(const std::string &name);

// The inhomogeneity m(x) = 1 - (eps(x) + i sigma(x)/omega)/eps0. Negative real amplitude
// means a denser medium (refractive index sqrt(1 - a) at the peak).
struct MediumProfile
{
  ProfileKind kind = ProfileKind::GaussianLens;
  Complex amplitude{-0.7, 0.0};

  // Gaussian lens: a exp(-|x-c|^2 / w^2), tapered smoothly to zero between
  // taper_inner and taper_outer (radial distance from the center).
  Point center{0.5, 0.5, 0.5};
  double width = 0.15;
  double taper_inner = 0.2;
  double taper_outer = 0.32;

  // Smoothed box: product of C2 ramps rising over [lower, lower+ramp] and falling over
  // [upper-ramp, upper].
  double box_lower = 0.2;
  double box_upper = 0.8;
  double ramp_width = 0.1;

  // Perturbed box: box * (1 + delta r(x)), r a seeded sum of low-frequency cosines, |r| <= 1.
  double delta = 0.2;
  std::uint64_t seed = 1;

  // Custom profile: m(x) and optionally its gradient. Without a gradient, p is formed
  // from fourth-order finite differences of the grid samples.
  std::function<Complex(const Point &)> custom_m;
  std::function<std::array<Complex, 3>(const Point &)> custom_gradient;
};

// Everything the system operator needs from the medium.
struct MediumFields
{
  ScalarField m;
  std::vector<ScalarField> p;  // p^a = (dm/dx_a) / (1 - m), a = 0..d-1
};

// Pointwise evaluation of m and its analytic gradient (not available for Custom
// profiles without a gradient callback).
Complex EvaluateM(const MediumProfile &profile, int dim, const Point &x);
std::array<Complex, 3> EvaluateGradM(const MediumProfile &profile, int dim, const Point &x);

// Samples m at the grid points. Rejects profiles with |1 - m| < 0.1 anywhere, and
// non-Custom profiles with |m| > 1e-8 on the two outermost grid layers.
ScalarField SampleM(const MediumProfile &profile, const Grid &grid);

// Samples p^a = (dm/dx_a)/(1 - m) for a = 0..d-1.
std::vector<ScalarField> SampleP(const MediumProfile &profile, const Grid &grid);

MediumFields SampleMedium(const MediumProfile &profile, const Grid &grid);

// Fourth-order finite-difference gradient of grid samples: centered in the interior,
// one-sided on the two outermost layers. Requires n >= 5.
std::vector<ScalarField> FiniteDifferenceGradient(const ScalarField &f);

// Plane wave travelling along x_1 and polarized along the last axis: the last component
// is exp(i k x_1), all others zero.
VectorField IncidentPlaneWave(const Grid &grid);

}  // namespace vie

#endif  // VIE_MEDIUM_HPP
