#pragma once

#include <optional>
#include <utility>
#include <variant>

#include "pdeacc/grid.hpp"
#include "pdeacc/kernel.hpp"

namespace pdeacc {

/// r(s) = (c/2) s^2.
struct Quadratic {
  double c = 1.0;
};

/// r(s) = (1/beta) sqrt(1 + beta^2 s^2); tends to TV as beta grows.
struct Beltrami {
  double beta = 1.0;
};

/// r(s) = s. The flux is taken as zero wherever the forward gradient vanishes.
struct TotalVariation {};

using Regularizer = std::variant<Quadratic, Beltrami, TotalVariation>;

const char* regularizer_name(const Regularizer& r);
bool is_quadratic(const Regularizer& r);

/// Quadratic-fidelity inversion problem
///   E[u] = sum_cells ( lambda/2 (K u - g)^2 + r(|grad u|) ) dx^N
/// together with the dynamics parameters of its accelerated flow.
struct ProblemSpec {
  GridField data;               ///< g
  GridField fidelity_weight;    ///< lambda(x) >= 0, zero on inpainting regions
  std::optional<Kernel> kernel; ///< forward model; identity when absent
  Regularizer regularizer = Quadratic{};
  double damping = 0.0;         ///< a >= 0
  double rho = 1.0;             ///< constant mass density

  /// Constant-lambda problem over g.
  static ProblemSpec denoising(GridField g, double lambda, Regularizer r, double damping = 0.0);

  double lambda_max() const;
  double lambda_min() const;
  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

double energy(const ProblemSpec& spec, const GridField& u);

/// Fidelity part alone: sum_cells lambda/2 (K u - g)^2 dx^N.
double fidelity_energy(const ProblemSpec& spec, const GridField& u);

/// Cellwise L2 gradient  K^T(lambda (K u - g)) - div( r'(|grad u|) grad u / |grad u| ).
/// Satisfies dE[u; v] = <gradient, v> dx^N.
GridField gradient(const ProblemSpec& spec, const GridField& u);

/// Upper bounds of c = r'(s)/s and d = r''(s) over all s >= 0.
struct CoefficientBounds {
  double c_max;
  double d_max;
};
CoefficientBounds regularizer_coefficient_bounds(const Regularizer& r);

}  // namespace pdeacc
