// SPDX-License-Identifier: Apache-2.0

#include "vie/special_functions.hpp"

#include <cmath>
#include <numbers>
#include "vie/error.hpp"

namespace vie
{

namespace
{

using Real = long double;

constexpr Real kPi = 3.141592653589793238462643383279502884L;
constexpr Real kEulerGamma = 0.577215664901532860606512090082402431L;

// J_nu and Y_nu for nu in {0,1} from the ascending series. The alternating sums lose
// about log10(I_0(x)) digits, which extended precision absorbs for x below the switch.
Complex SeriesHankel(int order, double xd)
{
  const Real x = xd;
  const Real q = x * x / 4.0L;
  const Real log_term = std::log(x / 2.0L) + kEulerGamma;
  Real j = 0.0L, y_sum = 0.0L;
  // term_k = (-q)^k / (k! (k+order)!)
  Real term = (order == 0) ? 1.0L : 1.0L;
  Real harmonic = 0.0L;       // H_k
  Real harmonic_next = 1.0L;  // H_{k+1}
  for (int k = 0; k < 400; ++k)
  {
    j += term;
    if (order == 0)
    {
      y_sum += harmonic * term;
    }
    else
    {
      y_sum += (harmonic + harmonic_next) * term;
    }
    const Real next = -term * q / (static_cast<Real>(k + 1) * static_cast<Real>(k + 1 + order));
    harmonic += 1.0L / (k + 1);
    harmonic_next += 1.0L / (k + 2);
    term = next;
    if (std::fabs(term) < 1e-22L * std::fabs(j) && k > 2)
    {
      break;
    }
  }
  if (order == 0)
  {
    const Real j0 = j;
    const Real y0 = (2.0L / kPi) * (log_term * j0 - y_sum);
    return {static_cast<double>(j0), static_cast<double>(y0)};
  }
  const Real half = x / 2.0L;
  const Real j1 = half * j;
  // Y1 = (2/pi) ln(x/2) J1 - 2/(pi x) - (1/pi)(x/2) sum (psi(k+1)+psi(k+2)) (-q)^k/(k!(k+1)!)
  // with psi(k+1) + psi(k+2) = H_k + H_{k+1} - 2 gamma.
  const Real y1 = (2.0L / kPi) * log_term * j1 - 2.0L / (kPi * x) - (half / kPi) * y_sum;
  return {static_cast<double>(j1), static_cast<double>(y1)};
}

Complex AsymptoticHankel(int order, double x)
{
  const double mu = 4.0 * order * order;
  Complex sum = 1.0;
  Complex term = 1.0;
  double previous = 1.0;
  for (int k = 1; k < 200; ++k)
  {
    const double odd = 2.0 * k - 1.0;
    term *= Complex(0.0, 1.0) * ((mu - odd * odd) / (8.0 * k * x));
    const double magnitude = std::abs(term);
    if (magnitude > previous)
    {
      break;
    }
    sum += term;
    previous = magnitude;
    if (magnitude < 1e-17)
    {
      break;
    }
  }
  const double phase_shift = -(order * std::numbers::pi / 2.0 + std::numbers::pi / 4.0);
  const Complex carrier = Complex(std::cos(x), std::sin(x)) *
                          Complex(std::cos(phase_shift), std::sin(phase_shift));
  return std::sqrt(2.0 / (std::numbers::pi * x)) * carrier * sum;
}

Complex Hankel1(int order, double x)
{
  if (!(x > 0.0) || !std::isfinite(x))
  {
    throw InvalidArgument("Hankel function needs a positive finite argument");
  }
  return x < kHankelSeriesLimit ? SeriesHankel(order, x) : AsymptoticHankel(order, x);
}

}  // namespace

Complex Hankel1Order0(double x)
{
  return Hankel1(0, x);
}

Complex Hankel1Order1(double x)
{
  return Hankel1(1, x);
}

}  // namespace vie
