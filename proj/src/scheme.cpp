#include "pdeacc/scheme.hpp"

#include <cmath>

namespace pdeacc {

const char* scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::GradientDescent: return "gd";
    case SchemeKind::Accel1: return "accel1";
    case SchemeKind::Accel2: return "accel2";
    case SchemeKind::SemiImplicit: return "semi";
  }
  return "unknown";
}

std::optional<SchemeKind> parse_scheme(const std::string& name) {
  if (name == "gd") return SchemeKind::GradientDescent;
  if (name == "accel1") return SchemeKind::Accel1;
  if (name == "accel2") return SchemeKind::Accel2;
  if (name == "semi") return SchemeKind::SemiImplicit;
  return std::nullopt;
}

void SchemeConfig::validate() const {
  if (const double* manual = std::get_if<double>(&dt)) {
    if (!(*manual > 0.0) || !std::isfinite(*manual)) {
      throw std::invalid_argument("manual time step must be finite and positive");
    }
  } else if (const auto& safety = std::get<AutoCfl>(dt).safety) {
    if (!(*safety > 0.0 && *safety <= 1.0)) {
      throw std::invalid_argument("CFL safety factor must lie in (0, 1]");
    }
  }
  if (!(quantization > 0.0) || !std::isfinite(quantization)) {
    throw std::invalid_argument("quantization interval must be positive");
  }
}

SolverState SolverState::at_rest(GridField u0) {
  GridField zero = GridField::zeros_like(u0);
  return with_increment(std::move(u0), std::move(zero));
}

SolverState SolverState::with_increment(GridField u0, GridField increment) {
  if (!u0.same_shape(increment)) throw ShapeError("initial increment does not match the iterate");
  SolverState s;
  s.u = std::move(u0);
  s.prev_increment = std::move(increment);
  return s;
}

IncrementWeights increment_weights(SchemeKind kind, double damping, double dt) {
  const double ad = damping * dt;
  switch (kind) {
    case SchemeKind::GradientDescent:
      return {0.0, -dt};
    case SchemeKind::Accel1:
      return {1.0 / (1.0 + ad), -dt * dt / (1.0 + ad)};
    case SchemeKind::Accel2:
    case SchemeKind::SemiImplicit:
      return {(2.0 - ad) / (2.0 + ad), -2.0 * dt * dt / (2.0 + ad)};
  }
  throw std::logic_error("unhandled scheme kind");
}

SolverState step(const ProblemSpec& spec, SchemeKind kind, double dt, const SolverState& state,
                 const GradientFn& grad_fn) {
  const IncrementWeights w = increment_weights(kind, spec.damping, dt);
  const double grad_scale = w.gradient / spec.rho;

  SolverState next;
  next.iteration = state.iteration + 1;
  next.time = state.time + dt;

  if (kind == SchemeKind::SemiImplicit) {
    GridField lookahead = state.u;
    for (std::size_t i = 0; i < lookahead.size(); ++i) lookahead[i] += w.previous * state.prev_increment[i];
    const GridField g = grad_fn(lookahead);
    next.u = std::move(lookahead);
    next.prev_increment = GridField::zeros_like(state.u);
    for (std::size_t i = 0; i < next.u.size(); ++i) {
      next.u[i] += grad_scale * g[i];
      next.prev_increment[i] = next.u[i] - state.u[i];
    }
  } else {
    const GridField g = grad_fn(state.u);
    next.u = state.u;
    next.prev_increment = GridField::zeros_like(state.u);
    for (std::size_t i = 0; i < next.u.size(); ++i) {
      const double inc = w.previous * state.prev_increment[i] + grad_scale * g[i];
      next.prev_increment[i] = inc;
      next.u[i] += inc;
    }
  }

  if (!next.u.all_finite() || !next.prev_increment.all_finite()) {
    throw BlowUp(next.iteration, std::string("non-finite values after ") + scheme_name(kind) +
                                     " step " + std::to_string(next.iteration));
  }
  return next;
}

SolverState step(const ProblemSpec& spec, SchemeKind kind, double dt, const SolverState& state) {
  return step(spec, kind, dt, state, [&spec](const GridField& u) { return gradient(spec, u); });
}

DampedStep remap_first_to_second(double a1, double dt1) {
  const double contraction = std::sqrt(1.0 + 0.5 * a1 * dt1);
  return {a1 / contraction, dt1 / contraction};
}

std::optional<DampedStep> remap_second_to_first(double a2, double dt2) {
  const double radicand = 1.0 - 0.5 * a2 * dt2;
  if (!(radicand > 0.0)) return std::nullopt;
  const double amplification = std::sqrt(radicand);
  return DampedStep{a2 / amplification, dt2 / amplification};
}

const char* regime_name(DampingRegime r) {
  switch (r) {
    case DampingRegime::Underdamped: return "underdamped";
    case DampingRegime::CriticalGD: return "critical";
    case DampingRegime::Resisted: return "resisted";
  }
  return "unknown";
}

DampingRegime classify_damping(double a2, double dt2) {
  const double product = a2 * dt2;
  if (std::abs(product - 2.0) <= 2e-12) return DampingRegime::CriticalGD;
  return product < 2.0 ? DampingRegime::Underdamped : DampingRegime::Resisted;
}

bool damping_stays_underdamped(double a2, double z_max) { return a2 < std::sqrt(z_max); }

}  // namespace pdeacc
