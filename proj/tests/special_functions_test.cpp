// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <gtest/gtest.h>
#include "hankel_table.hpp"
#include "vie/error.hpp"
#include "vie/special_functions.hpp"

namespace vie
{
namespace
{

using testing::kHankelTable;

TEST(Hankel, MatchesHighPrecisionValues)
{
  for (const auto &row : kHankelTable)
  {
    const Complex h0(row[1], row[2]);
    const Complex h1(row[3], row[4]);
    EXPECT_LE(std::abs(Hankel1Order0(row[0]) - h0) / std::abs(h0), 1e-12) << "x=" << row[0];
    EXPECT_LE(std::abs(Hankel1Order1(row[0]) - h1) / std::abs(h1), 1e-12) << "x=" << row[0];
  }
}

TEST(Hankel, BesselValuesAtOne)
{
  const Complex h0 = Hankel1Order0(1.0);
  EXPECT_NEAR(h0.real(), 0.76519768655796655145, 1e-14);
  EXPECT_NEAR(h0.imag(), 0.088256964215676957983, 1e-14);
}

TEST(Hankel, ContinuousAcrossTheSeriesLimit)
{
  const double below = std::nextafter(kHankelSeriesLimit, 0.0);
  for (auto f : {&Hankel1Order0, &Hankel1Order1})
  {
    const Complex a = f(below);
    const Complex b = f(kHankelSeriesLimit);
    EXPECT_LE(std::abs(a - b) / std::abs(b), 1e-12);
  }
}

// The Wronskian J1 Y0 - J0 Y1 = 2/(pi x) ties the two orders together.
TEST(Hankel, Wronskian)
{
  for (double x = 0.01; x < 500.0; x *= 1.37)
  {
    const Complex h0 = Hankel1Order0(x);
    const Complex h1 = Hankel1Order1(x);
    const double w = h1.real() * h0.imag() - h0.real() * h1.imag();
    EXPECT_NEAR(w * M_PI * x / 2.0, 1.0, 1e-12) << "x=" << x;
  }
}

TEST(Hankel, RejectsNonPositiveArguments)
{
  EXPECT_THROW(Hankel1Order0(0.0), InvalidArgument);
  EXPECT_THROW(Hankel1Order1(-1.0), InvalidArgument);
  EXPECT_THROW(Hankel1Order0(std::nan("")), InvalidArgument);
}

}  // namespace
}  // namespace vie
