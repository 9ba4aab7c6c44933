// SPDX-License-Identifier: Apache-2.0

#ifndef VIE_FAST_APPLY_HPP
#define VIE_FAST_APPLY_HPP

#include <memory>
#include <vector>
#include "vie/greens_kernel.hpp"
#include "vie/medium.hpp"

namespace vie
{

// Smallest 2^a 3^b 5^c 7^d integer >= n.
int SmoothFftSize(int n);

// Toeplitz-times-vector products with the ConvTable symbols, by zero-padded circulant
// embedding on an L^d grid (L >= 2n, FFT-friendly). Transforms of the symbols are
// computed once; Convolve allocates its own workspace and is safe to call concurrently.
class Convolver
{
public:
  explicit Convolver(const ConvTable &table);
  ~Convolver();
  Convolver(const Convolver &) = delete;
  Convolver &operator=(const Convolver &) = delete;

  const ConvTable &Table() const { return table_; }
  int PaddedExtent() const { return extent_; }

  // v_i = sum_j table(kernel, i - j) u_j.
  CVector Convolve(int kernel_id, const CVector &u) const;

  // Shared building blocks for the system operator.
  class Workspace;
  std::unique_ptr<Workspace> MakeWorkspace(int buffers) const;
  void Scatter(const CVector &u, Workspace &ws, int buffer) const;
  void Forward(Workspace &ws, int buffer) const;
  void Backward(Workspace &ws, int buffer) const;
  // Adds the scaled (1/L^d) inverse-transformed buffer into out.
  void Gather(const Workspace &ws, int buffer, Eigen::Ref<CVector> out) const;
  // spectrum(buffer) *= symbol(kernel) * factor, accumulated into target.
  void MultiplyAccumulate(Workspace &ws, int source, int kernel_id, Complex factor,
                          int target, bool overwrite) const;

private:
  ConvTable table_;
  int extent_;
  std::size_t padded_size_;
  std::vector<std::vector<Complex>> symbols_;  // scaled by 1/L^d
  void *forward_plan_ = nullptr;
  void *backward_plan_ = nullptr;
};

// Convenience wrapper: one-off convolution of a scalar field with a table kernel.
ScalarField Convolve(const ConvTable &table, int kernel_id, const ScalarField &u);

// The dense discrete operator
//   (A E)^a = E^a + k^2 G*(m E^a) + G^a*(sum_c p^c E^c),   a = 1..d,
// applied in O(N log N) with d+1 forward and d inverse FFTs.
class SystemOperator
{
public:
  SystemOperator(const ConvTable &table, MediumFields medium);

  const Grid &GetGrid() const { return grid_; }
  const MediumFields &Medium() const { return medium_; }
  const ConvTable &Table() const { return convolver_.Table(); }

  void Apply(const CVector &e, CVector &out) const;
  VectorField Apply(const VectorField &e) const;

  // g = E^i - A E^i: the right-hand side of the scattered-field equation.
  VectorField ComputeRhs(const VectorField &incident) const;

private:
  Grid grid_;
  MediumFields medium_;
  Convolver convolver_;
};

}  // namespace vie

#endif  // VIE_FAST_APPLY_HPP
