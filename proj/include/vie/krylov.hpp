// SPDX-License-Identifier: Apache-2.0

#ifndef VIE_KRYLOV_HPP
#define VIE_KRYLOV_HPP

#include <functional>
#include <vector>
#include "vie/types.hpp"

namespace vie
{

// y = Op(x); y is resized by the callee.
using LinearMap = std::function<void(const CVector &, CVector &)>;

struct GmresOptions
{
  double rtol = 1e-6;   // on the preconditioned residual, relative to |M b|
  int restart = 20;
  int max_iterations = 500;
};

struct SolveStats
{
  int iterations = 0;  // inner iterations over all restart cycles
  int restarts = 0;
  bool converged = false;
  double preconditioned_residual = 0.0;  // explicit |M (b - A x)| / |M b|
  double true_residual = 0.0;            // |b - A x| / |b|
  std::vector<double> history;           // estimated relative residual per iteration
  int operator_applications = 0;
  int preconditioner_applications = 0;
  double t_operator_s = 0.0;
  double t_preconditioner_s = 0.0;
};

// Restarted GMRES with left preconditioning, zero initial guess, modified Gram-Schmidt
// with one selective reorthogonalization pass and Givens rotations. An empty
// `preconditioner` means the identity. Returns x; b = 0 gives x = 0 after 0 iterations.
CVector Gmres(const LinearMap &op, const LinearMap &preconditioner, const CVector &b,
              const GmresOptions &options, SolveStats *stats = nullptr);

}  // namespace vie

#endif  // VIE_KRYLOV_HPP
