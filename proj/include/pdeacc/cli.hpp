#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdeacc/scheme.hpp"

namespace pdeacc {

enum class Subcommand { Denoise, Deblur, Inpaint, Analyze, Gen };

/// How the damping coefficient is chosen.
struct DampingChoice {
  enum class Mode { Value, Optimal, SqrtLambdaMultiple } mode = Mode::Optimal;
  double value = 0.0;  ///< the coefficient, or the multiple of sqrt(lambda)
};

/// How the time step is chosen.
struct StepChoice {
  enum class Mode { Value, Cfl, DxMultiple } mode = Mode::Cfl;
  double value = 0.0;               ///< dt, or the multiple of dx
  std::optional<double> safety;     ///< Cfl mode only
};

struct RunConfig {
  Subcommand command = Subcommand::Denoise;

  std::string input;
  std::string output;
  std::string log;
  std::string reference;
  std::string mask;
  std::string clean_output;  ///< gen: where to write the clean image

  std::optional<std::size_t> square;  ///< synthetic noisy square of this size
  std::optional<std::size_t> scene;   ///< synthetic blurred scene of this size
  std::uint64_t seed = 0;

  std::string regularizer = "quadratic";
  double lambda = 1000.0;
  std::optional<double> c;
  std::optional<double> beta;
  std::optional<double> quantization;
  std::optional<double> sigma;
  double lambda_known = 1e4;

  SchemeKind scheme = SchemeKind::Accel2;
  StepChoice dt;
  DampingChoice damping;
  double tol = 1e-4;
  std::size_t max_iters = 10000;
  bool wall_clock = true;
  std::string preset;

  // analyze
  std::string analyzed_scheme = "accel2";
  std::optional<double> zmax;
  std::string sweep;
  std::optional<double> dt_lo;
  std::optional<double> dt_hi;
  std::size_t sweep_steps = 200;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// Applies a named preset; explicit settings recorded in `explicit_flags`
/// keep their values.
void apply_preset(RunConfig& cfg, const std::string& name, const std::vector<std::string>& explicit_flags);

/// Exit codes: 0 converged, 1 configuration error, 2 iteration limit, 3 blow-up.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace pdeacc
