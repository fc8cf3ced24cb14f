#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "pdeacc/energy.hpp"
#include "pdeacc/grid.hpp"

namespace pdeacc {

/// Runnable time discretizations of u_t = -grad E (gradient descent) and
/// u_tt + a u_t = -grad E / rho (accelerated flows).
enum class SchemeKind {
  GradientDescent,
  Accel1,        ///< central second difference, forward first difference
  Accel2,        ///< central differences for both time derivatives
  SemiImplicit,  ///< Accel2 momentum step, then a gradient step at the look-ahead point
};

const char* scheme_name(SchemeKind kind);
std::optional<SchemeKind> parse_scheme(const std::string& name);

/// Closed-form CFL limit times a safety factor. An unset safety resolves to
/// 1.0 for quadratic regularizers and 0.9 otherwise, since the nonlinear
/// bounds are only sufficient.
struct AutoCfl {
  std::optional<double> safety;
};

using TimeStepPolicy = std::variant<double, AutoCfl>;

struct SchemeConfig {
  SchemeKind kind = SchemeKind::Accel2;
  TimeStepPolicy dt = AutoCfl{};
  double quantization = 1.0 / 255.0;  ///< Q, used by TV step bounds

  void validate() const;
};

struct SolverState {
  GridField u;
  GridField prev_increment;  ///< increment of the previous step, zero at start
  std::size_t iteration = 0;
  double time = 0.0;

  /// State at rest at `u0`, or with an initial velocity increment.
  static SolverState at_rest(GridField u0);
  static SolverState with_increment(GridField u0, GridField increment);
};

/// Raised when an update produces non-finite samples or a run diverges.
class BlowUp : public std::runtime_error {
 public:
  BlowUp(std::size_t iteration, const std::string& what)
      : std::runtime_error(what), iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

using GradientFn = std::function<GridField(const GridField&)>;

/// Coefficients of  du^n = previous * du^{n-1} + gradient * gradE^n / rho.
struct IncrementWeights {
  double previous;
  double gradient;
};
IncrementWeights increment_weights(SchemeKind kind, double damping, double dt);

/// One recursive-increment update. Uses spec.damping and spec.rho.
SolverState step(const ProblemSpec& spec, SchemeKind kind, double dt, const SolverState& state,
                 const GradientFn& grad_fn);
/// Same, with the spec's own variational gradient.
SolverState step(const ProblemSpec& spec, SchemeKind kind, double dt, const SolverState& state);

struct DampedStep {
  double damping;
  double dt;
};

/// Accel1 parameters -> Accel2 parameters giving identical iterates.
DampedStep remap_first_to_second(double a1, double dt1);
/// Inverse map; defined only while a2 * dt2 < 2.
std::optional<DampedStep> remap_second_to_first(double a2, double dt2);

enum class DampingRegime {
  Underdamped,  ///< a2 dt2 < 2, reproducible by Accel1
  CriticalGD,   ///< a2 dt2 = 2, Accel2 equals gradient descent with dt = dt2^2 / 2
  Resisted,     ///< a2 dt2 > 2, each step partially undoes the previous one
};
const char* regime_name(DampingRegime r);

/// Regime of the Accel2 update; a2 dt2 within 1e-12 relative of 2 counts as critical.
DampingRegime classify_damping(double a2, double dt2);

/// a2 < sqrt(z_max): below the critical regime for every stable Accel2 step.
bool damping_stays_underdamped(double a2, double z_max);

}  // namespace pdeacc
