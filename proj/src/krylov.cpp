// SPDX-License-Identifier: Apache-2.0

#include "vie/krylov.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include "vie/error.hpp"

namespace vie
{

namespace
{

constexpr double kReorthogonalize = 1e-8;

class Timed
{
public:
  explicit Timed(double &sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~Timed()
  {
    sink_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  double &sink_;
  std::chrono::steady_clock::time_point start_;
};

// Complex Givens rotation zeroing b in (a, b).
void MakeGivens(Complex a, Complex b, double &c, Complex &s, Complex &r)
{
  const double na = std::abs(a);
  const double nb = std::abs(b);
  if (nb == 0.0)
  {
    c = 1.0;
    s = 0.0;
    r = a;
    return;
  }
  if (na == 0.0)
  {
    c = 0.0;
    s = std::conj(b) / nb;
    r = nb;
    return;
  }
  const double norm = std::hypot(na, nb);
  const Complex phase = a / na;
  c = na / norm;
  s = phase * std::conj(b) / norm;
  r = phase * norm;
}

}  // namespace

CVector Gmres(const LinearMap &op, const LinearMap &preconditioner, const CVector &b,
              const GmresOptions &options, SolveStats *stats)
{
  Require(options.rtol > 0.0, "GMRES tolerance must be positive");
  Require(options.restart >= 1, "GMRES restart length must be at least 1");
  Require(options.max_iterations >= 0, "GMRES iteration cap must be non-negative");
  SolveStats local;
  SolveStats &st = stats ? *stats : local;
  st = SolveStats{};

  const Eigen::Index n = b.size();
  CVector x = CVector::Zero(n);
  const double b_norm = b.norm();
  if (b_norm == 0.0)
  {
    st.converged = true;
    return x;
  }

  CVector tmp(n);
  auto apply_op = [&](const CVector &in, CVector &out) {
    Timed t(st.t_operator_s);
    op(in, out);
    ++st.operator_applications;
  };
  auto apply_pre = [&](const CVector &in, CVector &out) {
    if (!preconditioner)
    {
      out = in;
      return;
    }
    Timed t(st.t_preconditioner_s);
    preconditioner(in, out);
    ++st.preconditioner_applications;
  };

  CVector r(n);
  apply_pre(b, r);
  const double mb_norm = r.norm();
  if (mb_norm == 0.0)
  {
    throw NumericalError("preconditioner annihilated the right-hand side");
  }

  const int m = options.restart;
  CMatrix v(n, m + 1);
  CMatrix h = CMatrix::Zero(m + 1, m);
  CVector g(m + 1);
  std::vector<double> cs(m);
  std::vector<Complex> sn(m);
  CVector w(n);

  bool first = true;
  int breakdown_at = 0;
  while (true)
  {
    if (!first)
    {
      apply_op(x, tmp);
      tmp = b - tmp;
      apply_pre(tmp, r);
    }
    first = false;
    const double beta = r.norm();
    st.preconditioned_residual = beta / mb_norm;
    if (st.preconditioned_residual <= options.rtol)
    {
      st.converged = true;
      break;
    }
    if (breakdown_at > 0)
    {
      throw NumericalError("GMRES breakdown at iteration " + std::to_string(breakdown_at) +
                           " without convergence");
    }
    if (st.iterations >= options.max_iterations)
    {
      break;
    }
    if (st.iterations > 0)
    {
      ++st.restarts;
    }

    v.col(0) = r / beta;
    g.setZero();
    g[0] = beta;
    h.setZero();
    int j = 0;
    while (j < m && st.iterations < options.max_iterations)
    {
      apply_op(v.col(j), tmp);
      apply_pre(tmp, w);
      ++st.iterations;

      for (int i = 0; i <= j; ++i)
      {
        const Complex hij = v.col(i).dot(w);
        h(i, j) = hij;
        w -= hij * v.col(i);
      }
      double w_norm = w.norm();
      {
        const CVector again = v.leftCols(j + 1).adjoint() * w;
        if (again.cwiseAbs().maxCoeff() > kReorthogonalize * w_norm)
        {
          w -= v.leftCols(j + 1) * again;
          h.col(j).head(j + 1) += again;
          w_norm = w.norm();
        }
      }
      h(j + 1, j) = w_norm;

      for (int i = 0; i < j; ++i)
      {
        const Complex a = h(i, j);
        const Complex c = h(i + 1, j);
        h(i, j) = cs[i] * a + sn[i] * c;
        h(i + 1, j) = -std::conj(sn[i]) * a + cs[i] * c;
      }
      Complex rr;
      MakeGivens(h(j, j), h(j + 1, j), cs[j], sn[j], rr);
      h(j, j) = rr;
      h(j + 1, j) = 0.0;
      g[j + 1] = -std::conj(sn[j]) * g[j];
      g[j] = cs[j] * g[j];

      const double estimate = std::abs(g[j + 1]) / mb_norm;
      st.history.push_back(estimate);
      const bool breakdown = w_norm <= 1e-14 * beta;
      if (breakdown)
      {
        breakdown_at = st.iterations;
        if (rr == Complex(0.0))
        {
          // Singular Hessenberg: the Krylov space is exhausted and b is not reachable.
          throw NumericalError("GMRES breakdown at iteration " + std::to_string(breakdown_at) +
                               " without convergence");
        }
      }
      else
      {
        v.col(j + 1) = w / w_norm;
      }
      ++j;
      if (estimate <= options.rtol || breakdown)
      {
        break;
      }
    }

    const CVector y =
        h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    x += v.leftCols(j) * y;
    if (!y.allFinite())
    {
      throw NumericalError("GMRES least-squares update is not finite");
    }
  }

  apply_op(x, tmp);
  st.true_residual = (b - tmp).norm() / b_norm;
  return x;
}

}  // namespace vie
