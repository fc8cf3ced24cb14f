#include "pdeacc/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "pdeacc/imaging.hpp"

namespace pdeacc {

double optimal_damping(double first_eigenvalue, double lambda) {
  const double radicand = first_eigenvalue + lambda;
  if (radicand < 0.0) throw std::invalid_argument("optimal damping needs lambda1 + lambda >= 0");
  return 2.0 * std::sqrt(radicand);
}

double default_first_eigenvalue(const Regularizer& r) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  if (const auto* q = std::get_if<Quadratic>(&r)) return q->c * pi2;
  if (const auto* b = std::get_if<Beltrami>(&r)) return b->beta * pi2;
  return 0.0;
}

double auto_damping(const ProblemSpec& spec) {
  return optimal_damping(default_first_eigenvalue(spec.regularizer), spec.lambda_min());
}

void StoppingRule::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("stopping tolerance must be positive");
  if (max_iters == 0) throw std::invalid_argument("max_iters must be positive");
  if (!(divergence_factor > 1.0)) throw std::invalid_argument("divergence factor must exceed 1");
}

void write_log_csv(std::ostream& out, const ConvergenceLog& log, const std::vector<std::string>& comments,
                   bool include_wall_clock) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "iteration,time,energy,kinetic,total,increment_sup,wall_seconds,psnr\n";
  out << std::setprecision(17);
  for (const auto& r : log.records) {
    out << r.iteration << ',' << r.time << ',' << r.energy << ',' << r.kinetic << ',' << r.total << ','
        << r.increment_sup << ',';
    if (include_wall_clock) out << r.wall_seconds;
    out << ',';
    if (!std::isnan(r.psnr)) out << r.psnr;
    out << '\n';
  }
  if (log.blew_up) out << "# blowup at iteration " << log.blow_up_iteration << '\n';
}

ResolvedStep resolve_time_step(const ProblemSpec& spec, const SchemeConfig& cfg) {
  cfg.validate();
  if (const double* manual = std::get_if<double>(&cfg.dt)) {
    return {*manual, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  }
  const auto& policy = std::get<AutoCfl>(cfg.dt);
  const double safety = policy.safety.value_or(is_quadratic(spec.regularizer) ? 1.0 : 0.9);
  const AmplifierBound bound = amplifier_bound(spec, cfg.quantization);
  return {safety * cfl_max_dt(cfg.kind, bound.z_max, spec.damping), bound.z_max, safety};
}

namespace {

double kinetic_energy(const ProblemSpec& spec, SchemeKind kind, const GridField& increment, double dt) {
  if (kind == SchemeKind::GradientDescent) return 0.0;
  double s = 0.0;
  for (double v : increment.values()) s += v * v;
  return 0.5 * spec.rho * s / (dt * dt) * increment.cell_measure();
}

bool record_finite(const LogRecord& r) {
  return std::isfinite(r.energy) && std::isfinite(r.kinetic) && std::isfinite(r.total) &&
         std::isfinite(r.increment_sup);
}

}  // namespace

RunResult run(const ProblemSpec& spec, const SchemeConfig& cfg, const StoppingRule& stopping,
              const GridField& init, const RunOptions& options) {
  spec.validate();
  stopping.validate();
  if (!init.same_shape(spec.data)) throw ShapeError("initial guess does not conform to the data grid");
  if (options.reference && !options.reference->same_shape(spec.data)) {
    throw ShapeError("reference does not conform to the data grid");
  }

  const ResolvedStep resolved = resolve_time_step(spec, cfg);
  const double dt = resolved.dt;
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("resolved time step is not positive");

  const auto start = std::chrono::steady_clock::now();
  // Accel1 shares Accel2's iterates at a smaller effective step, which rescales its kinetic term.
  const double kinetic_scale = cfg.kind == SchemeKind::Accel1 ? 1.0 + 0.5 * spec.damping * dt : 1.0;
  GridField grad_prev;
  double energy_prev = 0.0;
  auto observe = [&](const SolverState& s, const GridField& grad) {
    LogRecord r;
    r.iteration = s.iteration;
    r.time = s.time;
    r.energy = energy(spec, s.u);
    r.kinetic = kinetic_energy(spec, cfg.kind, s.prev_increment, dt);
    if (cfg.kind == SchemeKind::GradientDescent || s.iteration == 0) {
      r.total = r.energy + r.kinetic;
    } else {
      // Staggered discrete energy: exactly dissipated by the damped recursion for quadratic E.
      double cross = 0.0;
      for (std::size_t i = 0; i < grad.size(); ++i) cross += s.prev_increment[i] * (grad[i] - grad_prev[i]);
      r.total = 0.5 * (energy_prev + r.energy) + kinetic_scale * r.kinetic - 0.25 * cross * s.u.cell_measure();
    }
    r.increment_sup = sup_norm(s.prev_increment);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (options.reference) {
      r.psnr = psnr(s.u, *options.reference);
      r.reference_error = l2_norm(s.u - *options.reference);
    }
    return r;
  };

  RunResult result;
  result.dt = dt;
  result.damping = spec.damping;

  SolverState state = SolverState::at_rest(init);
  GridField grad = gradient(spec, state.u);
  result.log.records.push_back(observe(state, grad));
  energy_prev = result.log.records.front().energy;
  const double initial_total = result.log.records.front().total;
  auto cached_gradient = [&](const GridField& u) { return &u == &state.u ? grad : gradient(spec, u); };

  auto blow_up = [&](std::size_t iteration, const std::string& why) -> RunBlowUp {
    result.log.blew_up = true;
    result.log.blow_up_iteration = iteration;
    return RunBlowUp(iteration, why, std::move(result.log));
  };

  result.reason = StopReason::MaxIterations;
  while (state.iteration < stopping.max_iters) {
    try {
      state = step(spec, cfg.kind, dt, state, cached_gradient);
    } catch (const BlowUp& e) {
      throw blow_up(e.iteration(), e.what());
    }
    grad_prev = std::move(grad);
    grad = gradient(spec, state.u);
    const LogRecord rec = observe(state, grad);
    energy_prev = rec.energy;
    result.log.records.push_back(rec);
    if (!record_finite(rec)) {
      throw blow_up(rec.iteration, "non-finite energy at iteration " + std::to_string(rec.iteration));
    }
    if (initial_total > 0.0 && rec.energy + rec.kinetic > stopping.divergence_factor * initial_total) {
      throw blow_up(rec.iteration, "total energy diverged at iteration " + std::to_string(rec.iteration));
    }
    if (rec.increment_sup < stopping.tol) {
      result.reason = StopReason::Converged;
      break;
    }
  }
  result.u = std::move(state.u);
  return result;
}

GridField quadratic_oracle(const ProblemSpec& spec) {
  spec.validate();
  const auto* quad = std::get_if<Quadratic>(&spec.regularizer);
  if (!quad) throw OracleError("the direct oracle needs a quadratic regularizer");
  const GridField& g = spec.data;
  if (g.rows() > 64 || g.cols() > 64) throw OracleError("the direct oracle is limited to 64x64 grids");
  if (!(spec.lambda_max() > 0.0)) {
    throw OracleError("singular system: zero fidelity leaves the Neumann Laplacian null space");
  }

  const auto n = static_cast<Eigen::Index>(g.size());
  const auto rows = static_cast<Eigen::Index>(g.rows());
  const auto cols = static_cast<Eigen::Index>(g.cols());
  const double w = quad->c / (g.dx() * g.dx());

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  // -c * Laplacian: each present neighbor couples; mirrored ghosts cancel.
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Eigen::Index i = r * cols + c;
      auto couple = [&](Eigen::Index j) {
        a(i, i) += w;
        a(i, j) -= w;
      };
      if (c + 1 < cols) couple(i + 1);
      if (c > 0) couple(i - 1);
      if (r + 1 < rows) couple(i + cols);
      if (r > 0) couple(i - cols);
    }
  }

  Eigen::VectorXd rhs(n);
  if (spec.kernel) {
    Eigen::MatrixXd k(n, n);
    GridField unit = GridField::zeros_like(g);
    for (Eigen::Index j = 0; j < n; ++j) {
      unit[static_cast<std::size_t>(j)] = 1.0;
      const GridField col = apply_kernel(*spec.kernel, unit);
      for (Eigen::Index i = 0; i < n; ++i) k(i, j) = col[static_cast<std::size_t>(i)];
      unit[static_cast<std::size_t>(j)] = 0.0;
    }
    Eigen::VectorXd lam(n), data(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      lam(i) = spec.fidelity_weight[static_cast<std::size_t>(i)];
      data(i) = g[static_cast<std::size_t>(i)];
    }
    a.noalias() += k.transpose() * lam.asDiagonal() * k;
    rhs = k.transpose() * (lam.asDiagonal() * data);
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lam = spec.fidelity_weight[static_cast<std::size_t>(i)];
      a(i, i) += lam;
      rhs(i) = lam * g[static_cast<std::size_t>(i)];
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw OracleError("oracle system is not positive definite");
  const Eigen::VectorXd x = llt.solve(rhs);

  GridField u = GridField::zeros_like(g);
  for (Eigen::Index i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = x(i);
  return u;
}

bool check_energy_monotone(const ConvergenceLog& log, double rel_tol) {
  if (log.records.empty()) return false;
  if (log.blew_up) return false;
  const double slack = rel_tol * std::abs(log.records.front().total);
  for (std::size_t n = 1; n < log.records.size(); ++n) {
    if (!(log.records[n].total <= log.records[n - 1].total + slack)) return false;
  }
  return true;
}

std::optional<double> fit_convergence_rate(const ConvergenceLog& log, FitAxis axis) {
  std::vector<double> xs, errs;
  for (const auto& r : log.records) {
    if (!std::isfinite(r.reference_error)) continue;
    xs.push_back(axis == FitAxis::Time ? r.time : static_cast<double>(r.iteration));
    errs.push_back(r.reference_error);
  }
  if (errs.size() < 20) return std::nullopt;

  // Running maximum of the tail traces the decay envelope through oscillations.
  std::vector<double> env(errs.size());
  double m = 0.0;
  for (std::size_t i = errs.size(); i-- > 0;) {
    m = std::max(m, errs[i]);
    env[i] = m;
  }
  if (!(env.front() > 0.0)) return std::nullopt;

  // Stay clear of the round-off plateau.
  const double floor = env.front() * 1e-11;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (!(env[i] > floor)) break;
    const double y = 2.0 * std::log(env[i]);
    sx += xs[i];
    sy += y;
    sxx += xs[i] * xs[i];
    sxy += xs[i] * y;
    ++count;
  }
  if (count < 20) return std::nullopt;
  const double cn = static_cast<double>(count);
  const double denom = cn * sxx - sx * sx;
  if (!(denom > 0.0)) return std::nullopt;
  return -(cn * sxy - sx * sy) / denom;
}

}  // namespace pdeacc
