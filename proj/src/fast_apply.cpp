// SPDX-License-Identifier: Apache-2.0

#include "vie/fast_apply.hpp"

#include <cstring>
#include <mutex>
#include <fftw3.h>
#include "vie/error.hpp"

namespace vie
{

namespace
{

// The FFTW planner is not thread-safe; execution with fresh arrays is.
std::mutex &PlannerMutex()
{
  static std::mutex mutex;
  return mutex;
}

fftw_complex *AsFftw(Complex *p)
{
  return reinterpret_cast<fftw_complex *>(p);
}

}  // namespace

int SmoothFftSize(int n)
{
  for (int m = std::max(n, 1);; ++m)
  {
    int r = m;
    for (int f : {2, 3, 5, 7})
    {
      while (r % f == 0)
      {
        r /= f;
      }
    }
    if (r == 1)
    {
      return m;
    }
  }
}

class Convolver::Workspace
{
public:
  Workspace(std::size_t size, int buffers) : size_(size)
  {
    for (int b = 0; b < buffers; ++b)
    {
      auto *p = static_cast<Complex *>(fftw_malloc(sizeof(Complex) * size));
      if (p == nullptr)
      {
        throw std::bad_alloc();
      }
      data_.push_back(p);
    }
  }
  ~Workspace()
  {
    for (auto *p : data_)
    {
      fftw_free(p);
    }
  }
  Workspace(const Workspace &) = delete;
  Workspace &operator=(const Workspace &) = delete;

  Complex *Buffer(int b) { return data_[b]; }
  const Complex *Buffer(int b) const { return data_[b]; }
  std::size_t Size() const { return size_; }

private:
  std::size_t size_;
  std::vector<Complex *> data_;
};

Convolver::Convolver(const ConvTable &table)
  : table_(table), extent_(SmoothFftSize(2 * table.GetGrid().n))
{
  const Grid &grid = table.GetGrid();
  padded_size_ = 1;
  std::vector<int> dims(grid.dim, extent_);
  for (int a = 0; a < grid.dim; ++a)
  {
    padded_size_ *= extent_;
  }
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    Workspace probe(padded_size_, 1);
    forward_plan_ = fftw_plan_dft(grid.dim, dims.data(), AsFftw(probe.Buffer(0)),
                                  AsFftw(probe.Buffer(0)), FFTW_FORWARD, FFTW_ESTIMATE);
    backward_plan_ = fftw_plan_dft(grid.dim, dims.data(), AsFftw(probe.Buffer(0)),
                                   AsFftw(probe.Buffer(0)), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (forward_plan_ == nullptr || backward_plan_ == nullptr)
  {
    throw NumericalError("FFTW planning failed");
  }

  // Embed each symbol: offset delta goes to index (delta mod L) per axis.
  const int n = grid.n;
  const int ext = table.Extent();
  const double scale = 1.0 / static_cast<double>(padded_size_);
  Workspace ws(padded_size_, 1);
  for (int kid = 0; kid < table.NumKernels(); ++kid)
  {
    Complex *buf = ws.Buffer(0);
    std::fill(buf, buf + padded_size_, Complex(0.0));
    const auto &data = table.Data(kid);
    for (std::size_t idx = 0; idx < data.size(); ++idx)
    {
      std::size_t rem = idx, target = 0, stride = 1;
      for (int a = grid.dim - 1; a >= 0; --a)
      {
        const int delta = static_cast<int>(rem % ext) - (n - 1);
        rem /= ext;
        target += stride * static_cast<std::size_t>((delta + extent_) % extent_);
        stride *= extent_;
      }
      buf[target] = data[idx];
    }
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), AsFftw(buf), AsFftw(buf));
    symbols_.emplace_back(buf, buf + padded_size_);
    for (auto &s : symbols_.back())
    {
      s *= scale;
    }
  }
}

Convolver::~Convolver()
{
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

std::unique_ptr<Convolver::Workspace> Convolver::MakeWorkspace(int buffers) const
{
  return std::make_unique<Workspace>(padded_size_, buffers);
}

void Convolver::Scatter(const CVector &u, Workspace &ws, int buffer) const
{
  const Grid &grid = table_.GetGrid();
  const int n = grid.n;
  Complex *buf = ws.Buffer(buffer);
  std::fill(buf, buf + padded_size_, Complex(0.0));
  const std::size_t L = extent_;
  if (grid.dim == 2)
  {
    for (int i0 = 0; i0 < n; ++i0)
      std::copy_n(u.data() + std::size_t(i0) * n, n, buf + i0 * L);
  }
  else
  {
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        std::copy_n(u.data() + (std::size_t(i0) * n + i1) * n, n, buf + (i0 * L + i1) * L);
  }
}

void Convolver::Forward(Workspace &ws, int buffer) const
{
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), AsFftw(ws.Buffer(buffer)),
                   AsFftw(ws.Buffer(buffer)));
}

void Convolver::Backward(Workspace &ws, int buffer) const
{
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), AsFftw(ws.Buffer(buffer)),
                   AsFftw(ws.Buffer(buffer)));
}

void Convolver::Gather(const Workspace &ws, int buffer, Eigen::Ref<CVector> out) const
{
  const Grid &grid = table_.GetGrid();
  const int n = grid.n;
  const Complex *buf = ws.Buffer(buffer);
  const std::size_t L = extent_;
  if (grid.dim == 2)
  {
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        out[std::size_t(i0) * n + i1] += buf[i0 * L + i1];
  }
  else
  {
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
          out[(std::size_t(i0) * n + i1) * n + i2] += buf[(i0 * L + i1) * L + i2];
  }
}

void Convolver::MultiplyAccumulate(Workspace &ws, int source, int kernel_id, Complex factor,
                                   int target, bool overwrite) const
{
  const Complex *src = ws.Buffer(source);
  Complex *dst = ws.Buffer(target);
  const Complex *sym = symbols_[kernel_id].data();
  if (overwrite)
  {
    for (std::size_t t = 0; t < padded_size_; ++t)
      dst[t] = factor * sym[t] * src[t];
  }
  else
  {
    for (std::size_t t = 0; t < padded_size_; ++t)
      dst[t] += factor * sym[t] * src[t];
  }
}

CVector Convolver::Convolve(int kernel_id, const CVector &u) const
{
  const Grid &grid = table_.GetGrid();
  Require(u.size() == grid.NumPoints(), "convolution input has the wrong length");
  auto ws = MakeWorkspace(1);
  Scatter(u, *ws, 0);
  Forward(*ws, 0);
  MultiplyAccumulate(*ws, 0, kernel_id, 1.0, 0, true);
  Backward(*ws, 0);
  CVector v = CVector::Zero(grid.NumPoints());
  Gather(*ws, 0, v);
  return v;
}

ScalarField Convolve(const ConvTable &table, int kernel_id, const ScalarField &u)
{
  Require(u.grid == table.GetGrid(), "field and table live on different grids");
  Convolver convolver(table);
  return {u.grid, convolver.Convolve(kernel_id, u.values)};
}

SystemOperator::SystemOperator(const ConvTable &table, MediumFields medium)
  : grid_(table.GetGrid()), medium_(std::move(medium)), convolver_(table)
{
  Require(medium_.m.grid == grid_, "medium sampled on a different grid");
  Require(static_cast<int>(medium_.p.size()) == grid_.dim, "need d p-fields");
  for (const auto &p : medium_.p)
  {
    Require(p.grid == grid_, "p-field sampled on a different grid");
  }
}

void SystemOperator::Apply(const CVector &e, CVector &out) const
{
  const int dim = grid_.dim;
  const std::int64_t np = grid_.NumPoints();
  Require(e.size() == grid_.NumUnknowns(), "operator input has the wrong length");
  const double k2 = grid_.k * grid_.k;

  // Buffers 0..d-1 hold m E^a, buffer d holds w = sum_c p^c E^c.
  auto ws = convolver_.MakeWorkspace(dim + 1);
  CVector scratch(np);
  CVector w = CVector::Zero(np);
  for (int a = 0; a < dim; ++a)
  {
    const auto ea = e.segment(a * np, np);
    scratch = medium_.m.values.cwiseProduct(ea);
    convolver_.Scatter(scratch, *ws, a);
    convolver_.Forward(*ws, a);
    w += medium_.p[a].values.cwiseProduct(ea);
  }
  convolver_.Scatter(w, *ws, dim);
  convolver_.Forward(*ws, dim);

  out = e;
  for (int a = 0; a < dim; ++a)
  {
    convolver_.MultiplyAccumulate(*ws, a, ConvTable::kG, k2, a, true);
    convolver_.MultiplyAccumulate(*ws, dim, ConvTable::Gradient(a), 1.0, a, false);
    convolver_.Backward(*ws, a);
    convolver_.Gather(*ws, a, out.segment(a * np, np));
  }
}

VectorField SystemOperator::Apply(const VectorField &e) const
{
  Require(e.grid == grid_, "field lives on a different grid");
  VectorField out{grid_, {}};
  Apply(e.values, out.values);
  return out;
}

VectorField SystemOperator::ComputeRhs(const VectorField &incident) const
{
  VectorField applied = Apply(incident);
  return {grid_, incident.values - applied.values};
}

}  // namespace vie
