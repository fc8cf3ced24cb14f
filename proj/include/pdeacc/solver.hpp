#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pdeacc/energy.hpp"
#include "pdeacc/scheme.hpp"
#include "pdeacc/stability.hpp"

namespace pdeacc {

/// a = 2 sqrt(lambda1 + lambda): critical damping of the slowest linear mode.
double optimal_damping(double first_eigenvalue, double lambda);

/// First nontrivial Neumann eigenvalue of the linearized regularizer on the
/// unit domain: c pi^2 or beta pi^2, and 0 for TV (no linear part).
double default_first_eigenvalue(const Regularizer& r);

/// optimal_damping(default_first_eigenvalue, min lambda) for a problem.
double auto_damping(const ProblemSpec& spec);

struct StoppingRule {
  double tol = 1e-4;             ///< on the sup-norm of the increment
  std::size_t max_iters = 10000;
  /// A run whose energy plus kinetic term exceeds this multiple of its
  /// initial total is reported as blown up.
  double divergence_factor = 1e10;

  void validate() const;
};

struct LogRecord {
  std::size_t iteration = 0;
  double time = 0.0;
  double energy = 0.0;
  double kinetic = 0.0;
  /// Discrete total energy. For the accelerated schemes this is the staggered form
  ///   (E(u^{n-1}) + E(u^n))/2 + m K - <du, gradE(u^n) - gradE(u^{n-1})> dx^N / 4
  /// with m = 1 + a dt / 2 for Accel1 and 1 otherwise; E + K for gradient descent.
  double total = 0.0;
  double increment_sup = 0.0;
  double wall_seconds = 0.0;
  double psnr = std::numeric_limits<double>::quiet_NaN();
  /// ||u - reference||_2 over cells; NaN without a reference.
  double reference_error = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceLog {
  std::vector<LogRecord> records;
  bool blew_up = false;
  std::size_t blow_up_iteration = 0;
};

/// Fixed header  iteration,time,energy,kinetic,total,increment_sup,wall_seconds,psnr
/// preceded by one "# " line per comment. A blown-up log ends with
/// "# blowup at iteration N".
void write_log_csv(std::ostream& out, const ConvergenceLog& log, const std::vector<std::string>& comments = {},
                   bool include_wall_clock = true);

struct ResolvedStep {
  double dt;
  double z_max;   ///< amplifier bound used, NaN for a manual step
  double safety;  ///< NaN for a manual step
};
ResolvedStep resolve_time_step(const ProblemSpec& spec, const SchemeConfig& cfg);

struct RunOptions {
  std::optional<GridField> reference;  ///< enables psnr and reference_error columns
};

enum class StopReason { Converged, MaxIterations };

struct RunResult {
  GridField u;
  ConvergenceLog log;
  StopReason reason = StopReason::MaxIterations;
  double dt = 0.0;
  double damping = 0.0;
};

/// BlowUp from run(), carrying the log up to and including the failure.
class RunBlowUp : public BlowUp {
 public:
  RunBlowUp(std::size_t iteration, const std::string& what, ConvergenceLog log)
      : BlowUp(iteration, what), log_(std::move(log)) {}
  const ConvergenceLog& log() const { return log_; }

 private:
  ConvergenceLog log_;
};

/// Iterate the configured scheme from rest at `init` until the increment
/// sup-norm drops below tol or max_iters steps have run. Record 0 is the
/// initial state.
RunResult run(const ProblemSpec& spec, const SchemeConfig& cfg, const StoppingRule& stopping,
              const GridField& init, const RunOptions& options = {});

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense direct solve of  K^T lambda K u - c laplacian(u) = K^T lambda g.
/// Quadratic regularizer only; grids up to 64x64.
GridField quadratic_oracle(const ProblemSpec& spec);

/// total(n+1) <= total(n) + rel_tol * total(0) for every n.
bool check_energy_monotone(const ConvergenceLog& log, double rel_tol);

enum class FitAxis { Time, Iteration };

/// Decay rate of the squared reference error, from a least-squares line
/// through the log of its running tail maximum. Needs at least 20 records
/// with a nonzero reference error; returns nullopt otherwise.
std::optional<double> fit_convergence_rate(const ConvergenceLog& log, FitAxis axis = FitAxis::Time);

}  // namespace pdeacc
