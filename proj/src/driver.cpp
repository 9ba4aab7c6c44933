// SPDX-License-Identifier: Apache-2.0

#include "vie/driver.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <thread>
#ifdef _OPENMP
#include <omp.h>
#endif
#include "vie/dense_oracle.hpp"
#include "vie/fast_apply.hpp"
#include "vie/greens_kernel.hpp"
#include "vie/stencil.hpp"

namespace vie
{

const char *const kCsvHeader = "k_over_2pi,n,N,t_setup_s,t_apply_s,n_iter,t_solve_s,true_rel_res";

namespace
{

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since)
{
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Trim(const std::string &s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
  {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double ParseDouble(const std::string &key, const std::string &value)
{
  std::size_t used = 0;
  double v = 0.0;
  try
  {
    v = std::stod(value, &used);
  }
  catch (const std::exception &)
  {
    used = 0;
  }
  Require(used == value.size() && used > 0, "config key '" + key + "': not a number: " + value);
  return v;
}

long ParseInt(const std::string &key, const std::string &value)
{
  std::size_t used = 0;
  long v = 0;
  try
  {
    v = std::stol(value, &used);
  }
  catch (const std::exception &)
  {
    used = 0;
  }
  Require(used == value.size() && used > 0, "config key '" + key + "': not an integer: " + value);
  return v;
}

bool ParseBool(const std::string &key, const std::string &value)
{
  if (value == "true" || value == "1" || value == "yes")
  {
    return true;
  }
  if (value == "false" || value == "0" || value == "no")
  {
    return false;
  }
  throw InvalidArgument("config key '" + key + "': not a boolean: " + value);
}

// Runs f, re-raising any failure tagged with `stage`.
template <typename F>
auto Stage(const char *stage, F &&f) -> decltype(f())
{
  try
  {
    return f();
  }
  catch (const StageError &)
  {
    throw;
  }
  catch (const std::exception &e)
  {
    throw StageError(stage, e.what());
  }
}

void PutLittleEndian(std::ostream &os, double v)
{
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (char &b : bytes)
  {
    b = static_cast<char>(bits & 0xff);
    bits >>= 8;
  }
  os.write(bytes, 8);
}

double GetLittleEndian(std::istream &is)
{
  unsigned char bytes[8];
  is.read(reinterpret_cast<char *>(bytes), 8);
  if (!is)
  {
    throw InvalidArgument("field dump is truncated");
  }
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b)
  {
    bits = (bits << 8) | bytes[b];
  }
  return std::bit_cast<double>(bits);
}

}  // namespace

ExperimentConfig ParseConfig(std::istream &is)
{
  ExperimentConfig cfg;
  double amp_re = cfg.profile.amplitude.real();
  double amp_im = cfg.profile.amplitude.imag();
  std::string line;
  int line_no = 0;
  while (std::getline(is, line))
  {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line[0] == '#')
    {
      continue;
    }
    const auto eq = line.find('=');
    Require(eq != std::string::npos,
            "config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key == "dim")
      cfg.dim = static_cast<int>(ParseInt(key, value));
    else if (key == "k_over_2pi")
      cfg.k_over_2pi = ParseDouble(key, value);
    else if (key == "ppw")
      cfg.ppw = ParseDouble(key, value);
    else if (key == "profile.kind")
      cfg.profile.kind = ProfileKindFromString(value);
    else if (key == "profile.amplitude_re")
      amp_re = ParseDouble(key, value);
    else if (key == "profile.amplitude_im")
      amp_im = ParseDouble(key, value);
    else if (key == "profile.width")
      cfg.profile.width = ParseDouble(key, value);
    else if (key == "profile.delta")
      cfg.profile.delta = ParseDouble(key, value);
    else if (key == "profile.seed")
      cfg.profile.seed = static_cast<std::uint64_t>(ParseInt(key, value));
    else if (key == "profile.box_lower")
      cfg.profile.box_lower = ParseDouble(key, value);
    else if (key == "profile.box_upper")
      cfg.profile.box_upper = ParseDouble(key, value);
    else if (key == "profile.ramp_width")
      cfg.profile.ramp_width = ParseDouble(key, value);
    else if (key == "rtol")
      cfg.rtol = ParseDouble(key, value);
    else if (key == "restart")
      cfg.restart = static_cast<int>(ParseInt(key, value));
    else if (key == "maxiter")
      cfg.maxiter = static_cast<int>(ParseInt(key, value));
    else if (key == "ordering")
    {
      if (value == "nested_dissection")
        cfg.ordering = Ordering::NestedDissection;
      else if (value == "amd")
        cfg.ordering = Ordering::Amd;
      else
        throw InvalidArgument("config key 'ordering': expected nested_dissection or amd");
    }
    else if (key == "oracle")
      cfg.oracle = ParseBool(key, value);
    else if (key == "dump_fields")
      cfg.dump_fields = value;
    else if (key == "dump_singular_values")
      cfg.dump_singular_values = value;
    else if (key == "dump_sparse")
      cfg.dump_sparse = value;
    else if (key == "out")
      cfg.out = value;
    else
      throw InvalidArgument("unknown config key '" + key + "'");
  }
  cfg.profile.amplitude = Complex(amp_re, amp_im);
  Require(cfg.profile.kind != ProfileKind::Custom, "CUSTOM profiles cannot come from a config file");
  Require(cfg.dim == 2 || cfg.dim == 3, "dim must be 2 or 3");
  Require(cfg.k_over_2pi > 0.0, "k_over_2pi must be positive");
  Require(cfg.ppw > 0.0, "ppw must be positive");
  Require(cfg.rtol > 0.0, "rtol must be positive");
  Require(cfg.restart >= 1, "restart must be at least 1");
  Require(cfg.maxiter >= 1, "maxiter must be at least 1");
  return cfg;
}

ExperimentConfig LoadConfig(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw InvalidArgument("cannot open config " + path);
  }
  return ParseConfig(in);
}

RunResult Run(const ExperimentConfig &config)
{
  RunResult result;
  result.k_over_2pi = config.k_over_2pi;
  const double k = 2.0 * std::numbers::pi * config.k_over_2pi;
  const Grid grid = Stage("grid", [&] { return BuildGrid(config.dim, k, config.ppw); });
  result.grid = grid;
  if (config.oracle)
  {
    Stage("oracle", [&] {
      Require(grid.NumUnknowns() <= kDenseOracleLimit,
              "oracle mode needs at most " + std::to_string(kDenseOracleLimit) + " unknowns");
    });
  }
  const MediumFields medium = Stage("medium", [&] { return SampleMedium(config.profile, grid); });

  const auto setup_start = Clock::now();
  const ConvTable table = Stage("tables", [&] { return BuildTables(grid); });
  const StencilLibrary library = Stage("stencils", [&] { return BuildLibrary(grid, table); });
  const SparseSystem sparse =
      Stage("assemble", [&] { return AssembleSparse(grid, library, medium); });
  Preconditioner preconditioner = Stage("factorize", [&] {
    return Preconditioner(library, Factorize(sparse, config.ordering));
  });
  result.t_setup_s = Seconds(setup_start);

  if (!config.dump_singular_values.empty())
  {
    Stage("dump", [&] {
      std::ofstream os(config.dump_singular_values);
      Require(static_cast<bool>(os), "cannot write " + config.dump_singular_values);
      library.WriteSingularValues(os);
    });
  }
  if (!config.dump_sparse.empty())
  {
    Stage("dump", [&] {
      std::ofstream os(config.dump_sparse);
      Require(static_cast<bool>(os), "cannot write " + config.dump_sparse);
      WriteCoordinateText(sparse, os);
    });
  }

  const SystemOperator op = Stage("operator", [&] { return SystemOperator(table, medium); });
  const VectorField incident = IncidentPlaneWave(grid);
  const VectorField rhs = Stage("rhs", [&] { return op.ComputeRhs(incident); });

  GmresOptions options;
  options.rtol = config.rtol;
  options.restart = config.restart;
  options.max_iterations = config.maxiter;
  const auto solve_start = Clock::now();
  const CVector scattered = Stage("gmres", [&] {
    CVector x = Gmres([&](const CVector &in, CVector &out) { op.Apply(in, out); },
                      [&](const CVector &in, CVector &out) { out = preconditioner.Apply(in); },
                      rhs.values, options, &result.stats);
    Require(result.stats.converged, "no convergence within " +
                                        std::to_string(config.maxiter) + " iterations");
    return x;
  });
  result.t_solve_s = Seconds(solve_start);
  if (result.stats.preconditioner_applications > 0)
  {
    result.t_apply_s =
        result.stats.t_preconditioner_s / result.stats.preconditioner_applications;
  }
  else
  {
    const auto t0 = Clock::now();
    (void)preconditioner.Apply(rhs.values);
    result.t_apply_s = Seconds(t0);
  }
  result.total_field = {grid, incident.values + scattered};

  if (config.oracle)
  {
    Stage("oracle", [&] {
      const CMatrix dense = DenseAssemble(table, medium);
      const CVector exact = DenseSolve(dense, rhs.values);
      const double ref = exact.cwiseAbs().maxCoeff();
      const double diff = (scattered - exact).cwiseAbs().maxCoeff();
      result.oracle_rel_diff = ref > 0.0 ? diff / ref : diff;
    });
  }
  if (!config.dump_fields.empty())
  {
    Stage("dump", [&] { WriteFieldDump(result.total_field, config.dump_fields); });
  }
  return result;
}

std::vector<RunResult> Sweep(const std::vector<ExperimentConfig> &configs, bool parallel)
{
  std::vector<RunResult> rows(configs.size());
  auto run_one = [&](std::size_t r) {
    try
    {
      rows[r] = Run(configs[r]);
    }
    catch (const std::exception &e)
    {
      rows[r] = RunResult{};
      rows[r].k_over_2pi = configs[r].k_over_2pi;
      rows[r].error = e.what();
    }
  };
  const int workers = parallel ? std::min<int>(ThreadLimit(), static_cast<int>(configs.size())) : 1;
  if (workers <= 1)
  {
    for (std::size_t r = 0; r < configs.size(); ++r)
    {
      run_one(r);
    }
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
  {
    pool.emplace_back([&] {
      for (std::size_t r = next++; r < configs.size(); r = next++)
      {
        run_one(r);
      }
    });
  }
  for (auto &t : pool)
  {
    t.join();
  }
  return rows;
}

void WriteCsv(const std::vector<RunResult> &rows, std::ostream &os)
{
  bool failures = false;
  for (const auto &r : rows)
  {
    failures = failures || !r.error.empty();
  }
  os << kCsvHeader << (failures ? ",error" : "") << '\n';
  for (const auto &r : rows)
  {
    std::ostringstream line;
    line << std::setprecision(10) << r.k_over_2pi << ',';
    if (r.error.empty())
    {
      line << r.grid.n << ',' << r.grid.NumUnknowns() << ',' << std::scientific
           << std::setprecision(6) << r.t_setup_s << ',' << r.t_apply_s << ','
           << r.stats.iterations << ',' << r.t_solve_s << ',' << r.stats.true_residual;
    }
    else
    {
      line << ",,,,,,";
    }
    if (failures)
    {
      std::string message = r.error;
      for (char &c : message)
      {
        if (c == '"' || c == '\n')
        {
          c = '\'';
        }
      }
      line << ",\"" << message << '"';
    }
    os << line.str() << '\n';
  }
}

void WriteCsv(const std::vector<RunResult> &rows, const std::string &path)
{
  std::ofstream os(path);
  if (!os)
  {
    throw InvalidArgument("cannot write " + path);
  }
  WriteCsv(rows, os);
}

void WriteFieldDump(const VectorField &field, std::ostream &os)
{
  const Grid &g = field.grid;
  Require(field.values.size() == g.NumUnknowns(), "field has the wrong length");
  std::ostringstream header;
  header << "VIEFIELD " << g.dim << ' ' << g.n << ' ' << std::setprecision(17) << g.k << ' '
         << g.dim << '\n';
  os << header.str();
  for (Eigen::Index i = 0; i < field.values.size(); ++i)
  {
    PutLittleEndian(os, field.values[i].real());
    PutLittleEndian(os, field.values[i].imag());
  }
  if (!os)
  {
    throw Error("field dump write failed");
  }
}

void WriteFieldDump(const VectorField &field, const std::string &path)
{
  std::ofstream os(path, std::ios::binary);
  if (!os)
  {
    throw InvalidArgument("cannot write " + path);
  }
  WriteFieldDump(field, os);
}

VectorField ReadFieldDump(std::istream &is)
{
  std::string header;
  std::getline(is, header);
  std::istringstream fields(header);
  std::string magic;
  int dim = 0, n = 0, ncomp = 0;
  double k = 0.0;
  fields >> magic >> dim >> n >> k >> ncomp;
  Require(static_cast<bool>(fields) && magic == "VIEFIELD", "not a field dump");
  Require(ncomp == dim, "field dump component count does not match its dimension");
  const Grid grid = Grid::Make(dim, n, k);
  VectorField out{grid, CVector(grid.NumUnknowns())};
  for (Eigen::Index i = 0; i < out.values.size(); ++i)
  {
    const double re = GetLittleEndian(is);
    const double im = GetLittleEndian(is);
    out.values[i] = Complex(re, im);
  }
  return out;
}

VectorField ReadFieldDump(const std::string &path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is)
  {
    throw InvalidArgument("cannot open " + path);
  }
  return ReadFieldDump(is);
}

int ThreadLimit()
{
  const int hardware = std::max(1u, std::thread::hardware_concurrency());
  if (const char *env = std::getenv("VIE_THREADS"))
  {
    char *end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1)
    {
      return static_cast<int>(v);
    }
  }
  return hardware;
}

void ApplyThreadLimit()
{
#ifdef _OPENMP
  omp_set_num_threads(ThreadLimit());
#endif
}

}  // namespace vie
