#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdeacc/energy.hpp"
#include "pdeacc/scheme.hpp"

namespace pdeacc {

/// Range of the gradient amplifier z(w) of a linearized gradient operator.
struct AmplifierBound {
  double z_min = 0.0;
  double z_max = 0.0;     ///< may be +inf
  bool attained = false;  ///< z_max is reached at w = (pi, ..., pi)
};

/// lambda + 4 N c / dx^2, exact for quadratic regularization without a kernel.
AmplifierBound zmax_quadratic(double lambda, double c, int dimension, double dx);

/// max|DFT K|^2 lambda_max + 4 ((N - 1) c_max + d_max) / dx^2.
AmplifierBound zmax_general(double lambda_max, double c_max, double d_max, int dimension, double dx,
                            double max_dft_sq);

/// TV bound with |grad u| floored at sqrt(N) Q / dx: lambda + 4 sqrt(N) / (Q dx).
AmplifierBound zmax_tv_quantized(double lambda, double quantization, int dimension, double dx);

/// Amplifier bound of a problem, dispatching on its regularizer.
AmplifierBound amplifier_bound(const ProblemSpec& spec, double quantization);

/// Schemes known to the analyzer. BackwardDifference exists only here.
enum class AnalyzedScheme { GradientDescent, Accel1, Accel2, SemiImplicit, BackwardDifference };

AnalyzedScheme analyzed(SchemeKind kind);
const char* analyzed_name(AnalyzedScheme s);
std::optional<AnalyzedScheme> parse_analyzed_scheme(const std::string& name);

/// Closed-form largest stable time step for amplifier bound z_max and damping a.
/// For SemiImplicit this is the damping-independent sufficient bound.
double cfl_max_dt(AnalyzedScheme scheme, double z_max, double damping);
inline double cfl_max_dt(SchemeKind kind, double z_max, double damping) {
  return cfl_max_dt(analyzed(kind), z_max, damping);
}

/// Necessary TV step condition: the CFL formula evaluated at the amplifier
/// floor z = lambda.
double tv_necessary_max_dt(AnalyzedScheme scheme, double lambda, double damping);

/// Both roots of A x^2 + B x + C (real coefficients, A != 0) lie in the closed
/// unit disk iff |B|/|A| - 1 <= C/A <= 1.
bool root_amplitude_ok(double a, double b, double c);

struct Characteristic {
  double a;
  double b;
  double c;
};
/// Quadratic satisfied by the per-mode amplification factor of a two-level
/// scheme. Throws for GradientDescent, whose factor is linear.
Characteristic characteristic_polynomial(AnalyzedScheme scheme, double z, double dt, double damping);

/// Largest root magnitude of A x^2 + B x + C.
double max_root_magnitude(double a, double b, double c);

/// Largest per-mode amplification |xi| at amplifier value z.
double amplification_factor(AnalyzedScheme scheme, double z, double dt, double damping);

struct SweepSample {
  double z;          ///< amplifier value where the maximum occurs
  double magnitude;  ///< max over z in [0, z_max] of |xi|
};
/// Dense sweep of z over [0, z_max] with `samples` points, endpoints included.
SweepSample max_amplification(AnalyzedScheme scheme, double z_max, double dt, double damping,
                              std::size_t samples = 10000);

/// Largest dt whose sweep stays within 1 + tol, found by bisection from above
/// a stable step. Assumes the stable set in dt is an interval starting at 0.
double empirical_max_dt(AnalyzedScheme scheme, double z_max, double damping, std::size_t samples = 10000,
                        double tol = 1e-9);

struct StabilityRow {
  AnalyzedScheme scheme;
  double z;
  double dt;
  double damping;
  double magnitude;
};

/// Sweep dt over [dt_lo, dt_hi] in `steps` uniform points, recording the
/// worst amplifier value at each.
std::vector<StabilityRow> stability_sweep(AnalyzedScheme scheme, double z_max, double damping, double dt_lo,
                                          double dt_hi, std::size_t steps, std::size_t z_samples = 10000);

/// CSV with header  scheme,z,dt,a,max_root_magnitude.
void write_stability_csv(std::ostream& out, const std::vector<StabilityRow>& rows);

}  // namespace pdeacc
