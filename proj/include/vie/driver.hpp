// SPDX-License-Identifier: Apache-2.0

#ifndef VIE_DRIVER_HPP
#define VIE_DRIVER_HPP

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>
#include "vie/krylov.hpp"
#include "vie/medium.hpp"
#include "vie/sparsifier.hpp"

namespace vie
{

// Flat "key = value" experiment description. Lines starting with '#' are comments.
struct ExperimentConfig
{
  int dim = 2;
  double k_over_2pi = 10.0;
  double ppw = 6.0;
  MediumProfile profile;
  double rtol = 1e-6;
  int restart = 20;
  int maxiter = 500;
  Ordering ordering = Ordering::NestedDissection;
  bool oracle = false;
  std::string dump_fields;
  std::string dump_singular_values;
  std::string dump_sparse;
  std::string out;
};

ExperimentConfig ParseConfig(std::istream &is);
ExperimentConfig LoadConfig(const std::string &path);

// A pipeline failure tagged with the stage that raised it.
class StageError : public Error
{
public:
  StageError(const std::string &stage, const std::string &what)
    : Error(stage + ": " + what), stage_(stage) {}
  const std::string &Stage() const { return stage_; }

private:
  std::string stage_;
};

struct RunResult
{
  double k_over_2pi = 0.0;
  Grid grid;
  double t_setup_s = 0.0;  // tables, stencils, assembly and factorization
  double t_apply_s = 0.0;  // mean time of one preconditioner application
  double t_solve_s = 0.0;  // GMRES wall time
  SolveStats stats;
  // max |x - x_dense| / max |x_dense| over all unknowns (scattered field)
  double oracle_rel_diff = std::numeric_limits<double>::quiet_NaN();
  VectorField total_field;  // incident plus scattered field
  std::string error;        // empty on success
};

// build grid -> sample medium -> tables -> stencils -> assemble -> factorize -> rhs ->
// GMRES, plus the optional oracle comparison and dumps. Throws StageError.
RunResult Run(const ExperimentConfig &config);

// Runs every config, recording per-row failures instead of stopping. Rows keep the input
// order. `parallel` runs rows concurrently on up to ThreadLimit() workers.
std::vector<RunResult> Sweep(const std::vector<ExperimentConfig> &configs,
                             bool parallel = false);

// CSV with the fixed header; an extra `error` column appears only if some row failed.
void WriteCsv(const std::vector<RunResult> &rows, std::ostream &os);
void WriteCsv(const std::vector<RunResult> &rows, const std::string &path);

extern const char *const kCsvHeader;

// Field dump: "VIEFIELD <dim> <n> <k> <ncomp>\n" then little-endian float64 (re, im)
// pairs, component-major, points in PointIndex order.
void WriteFieldDump(const VectorField &field, std::ostream &os);
void WriteFieldDump(const VectorField &field, const std::string &path);
VectorField ReadFieldDump(std::istream &is);
VectorField ReadFieldDump(const std::string &path);

// Thread cap from VIE_THREADS (default: hardware concurrency); also applied to OpenMP.
int ThreadLimit();
void ApplyThreadLimit();

}  // namespace vie

#endif  // VIE_DRIVER_HPP
