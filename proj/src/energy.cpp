#include "pdeacc/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pdeacc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

GridField forward_model(const ProblemSpec& spec, const GridField& u) {
  return spec.kernel ? apply_kernel(*spec.kernel, u) : u;
}

// Penalty r(s) and flux weight r'(s)/s.
double penalty(const Regularizer& r, double s) {
  return std::visit(overloaded{
                        [s](const Quadratic& q) { return 0.5 * q.c * s * s; },
                        [s](const Beltrami& b) { return std::sqrt(1.0 + b.beta * b.beta * s * s) / b.beta; },
                        [s](const TotalVariation&) { return s; },
                    },
                    r);
}

double flux_weight(const Regularizer& r, double s) {
  return std::visit(overloaded{
                        [](const Quadratic& q) { return q.c; },
                        [s](const Beltrami& b) { return b.beta / std::sqrt(1.0 + b.beta * b.beta * s * s); },
                        [s](const TotalVariation&) { return s > 0.0 ? 1.0 / s : 0.0; },
                    },
                    r);
}

}  // namespace

const char* regularizer_name(const Regularizer& r) {
  return std::visit(overloaded{
                        [](const Quadratic&) { return "quadratic"; },
                        [](const Beltrami&) { return "beltrami"; },
                        [](const TotalVariation&) { return "tv"; },
                    },
                    r);
}

bool is_quadratic(const Regularizer& r) { return std::holds_alternative<Quadratic>(r); }

ProblemSpec ProblemSpec::denoising(GridField g, double lambda, Regularizer r, double damping) {
  ProblemSpec spec;
  spec.fidelity_weight = GridField::zeros_like(g, lambda);
  spec.data = std::move(g);
  spec.regularizer = r;
  spec.damping = damping;
  return spec;
}

double ProblemSpec::lambda_max() const {
  const auto v = fidelity_weight.values();
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

double ProblemSpec::lambda_min() const {
  const auto v = fidelity_weight.values();
  return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

void ProblemSpec::validate() const {
  if (!data.same_shape(fidelity_weight) || data.dx() != fidelity_weight.dx()) {
    throw std::invalid_argument("fidelity weight must share the data grid");
  }
  if (!data.all_finite()) throw std::invalid_argument("data must be finite");
  for (double l : fidelity_weight.values()) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument("fidelity weight must be finite and nonnegative");
    }
  }
  if (!(damping >= 0.0) || !std::isfinite(damping)) {
    throw std::invalid_argument("damping must be finite and nonnegative");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("mass density must be positive");
  std::visit(overloaded{
                 [](const Quadratic& q) {
                   if (!(q.c > 0.0)) throw std::invalid_argument("quadratic weight c must be positive");
                 },
                 [](const Beltrami& b) {
                   if (!(b.beta > 0.0)) throw std::invalid_argument("beltrami beta must be positive");
                 },
                 [](const TotalVariation&) {},
             },
             regularizer);
  if (kernel && (kernel->rows() > data.rows() || kernel->cols() > data.cols())) {
    throw KernelError("kernel is larger than the data grid");
  }
}

double fidelity_energy(const ProblemSpec& spec, const GridField& u) {
  const GridField ku = forward_model(spec, u);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = ku[i] - spec.data[i];
    s += 0.5 * spec.fidelity_weight[i] * r * r;
  }
  return s * u.cell_measure();
}

double energy(const ProblemSpec& spec, const GridField& u) {
  if (!u.same_shape(spec.data)) throw ShapeError("iterate does not conform to the data grid");
  const GridField speed = magnitude(forward_gradient(u));
  double reg = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) reg += penalty(spec.regularizer, speed[i]);
  return fidelity_energy(spec, u) + reg * u.cell_measure();
}

GridField gradient(const ProblemSpec& spec, const GridField& u) {
  if (!u.same_shape(spec.data)) throw ShapeError("iterate does not conform to the data grid");
  GridField residual = forward_model(spec, u);
  for (std::size_t i = 0; i < u.size(); ++i) {
    residual[i] = spec.fidelity_weight[i] * (residual[i] - spec.data[i]);
  }
  GridField result = spec.kernel ? adjoint_kernel(*spec.kernel, residual) : std::move(residual);

  VectorField flux = forward_gradient(u);
  if (is_quadratic(spec.regularizer)) {
    const double c = std::get<Quadratic>(spec.regularizer).c;
    for (auto& comp : flux.components) comp *= c;
  } else {
    const GridField speed = magnitude(flux);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double w = flux_weight(spec.regularizer, speed[i]);
      for (auto& comp : flux.components) comp[i] *= w;
    }
  }
  result -= backward_divergence(flux);
  return result;
}

CoefficientBounds regularizer_coefficient_bounds(const Regularizer& r) {
  return std::visit(overloaded{
                        [](const Quadratic& q) { return CoefficientBounds{q.c, q.c}; },
                        [](const Beltrami& b) { return CoefficientBounds{b.beta, b.beta}; },
                        [](const TotalVariation&) {
                          return CoefficientBounds{std::numeric_limits<double>::infinity(), 0.0};
                        },
                    },
                    r);
}

}  // namespace pdeacc
