#include "pdeacc/stability.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace pdeacc {

AmplifierBound zmax_quadratic(double lambda, double c, int dimension, double dx) {
  return {lambda, lambda + 4.0 * dimension * c / (dx * dx), true};
}

AmplifierBound zmax_general(double lambda_max, double c_max, double d_max, int dimension, double dx,
                            double max_dft_sq) {
  const double z = max_dft_sq * lambda_max + 4.0 * ((dimension - 1) * c_max + d_max) / (dx * dx);
  return {0.0, z, false};
}

AmplifierBound zmax_tv_quantized(double lambda, double quantization, int dimension, double dx) {
  if (!(quantization > 0.0) || !(dx > 0.0)) throw std::invalid_argument("Q and dx must be positive");
  return {lambda, lambda + 4.0 * std::sqrt(static_cast<double>(dimension)) / (quantization * dx), false};
}

AmplifierBound amplifier_bound(const ProblemSpec& spec, double quantization) {
  const int n = spec.data.dimension();
  const double dx = spec.data.dx();
  const double lmax = spec.lambda_max();
  const double lmin = spec.lambda_min();
  const double dft = spec.kernel ? spec.kernel->max_dft_magnitude() : 1.0;
  const double dft_sq = dft * dft;

  if (std::holds_alternative<TotalVariation>(spec.regularizer)) {
    AmplifierBound b = zmax_tv_quantized(dft_sq * lmax, quantization, n, dx);
    b.z_min = spec.kernel ? 0.0 : lmin;
    return b;
  }
  const CoefficientBounds cd = regularizer_coefficient_bounds(spec.regularizer);
  if (is_quadratic(spec.regularizer) && !spec.kernel) {
    AmplifierBound b = zmax_quadratic(lmax, cd.c_max, n, dx);
    b.z_min = lmin;
    b.attained = (lmin == lmax);
    return b;
  }
  return zmax_general(lmax, cd.c_max, cd.d_max, n, dx, dft_sq);
}

AnalyzedScheme analyzed(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::GradientDescent: return AnalyzedScheme::GradientDescent;
    case SchemeKind::Accel1: return AnalyzedScheme::Accel1;
    case SchemeKind::Accel2: return AnalyzedScheme::Accel2;
    case SchemeKind::SemiImplicit: return AnalyzedScheme::SemiImplicit;
  }
  throw std::logic_error("unhandled scheme kind");
}

const char* analyzed_name(AnalyzedScheme s) {
  switch (s) {
    case AnalyzedScheme::GradientDescent: return "gd";
    case AnalyzedScheme::Accel1: return "accel1";
    case AnalyzedScheme::Accel2: return "accel2";
    case AnalyzedScheme::SemiImplicit: return "semi";
    case AnalyzedScheme::BackwardDifference: return "backward";
  }
  return "unknown";
}

std::optional<AnalyzedScheme> parse_analyzed_scheme(const std::string& name) {
  if (name == "backward") return AnalyzedScheme::BackwardDifference;
  if (auto k = parse_scheme(name)) return analyzed(*k);
  return std::nullopt;
}

double cfl_max_dt(AnalyzedScheme scheme, double z_max, double damping) {
  if (!(z_max > 0.0)) throw std::invalid_argument("z_max must be positive");
  if (std::isinf(z_max)) return 0.0;
  const double ratio = damping / z_max;
  switch (scheme) {
    case AnalyzedScheme::GradientDescent: return 2.0 / z_max;
    case AnalyzedScheme::Accel2: return 2.0 / std::sqrt(z_max);
    case AnalyzedScheme::Accel1: return std::sqrt(4.0 / z_max + ratio * ratio) + ratio;
    case AnalyzedScheme::SemiImplicit: return 2.0 / std::sqrt(3.0 * z_max);
    case AnalyzedScheme::BackwardDifference: return std::sqrt(4.0 / z_max + ratio * ratio) - ratio;
  }
  throw std::logic_error("unhandled scheme");
}

double tv_necessary_max_dt(AnalyzedScheme scheme, double lambda, double damping) {
  return cfl_max_dt(scheme, lambda, damping);
}

bool root_amplitude_ok(double a, double b, double c) {
  if (a == 0.0) throw std::invalid_argument("leading coefficient must be nonzero");
  const double ratio = c / a;
  return std::abs(b) / std::abs(a) - 1.0 <= ratio && ratio <= 1.0;
}

Characteristic characteristic_polynomial(AnalyzedScheme scheme, double z, double dt, double damping) {
  const double ad = damping * dt;
  const double zdt2 = z * dt * dt;
  switch (scheme) {
    case AnalyzedScheme::Accel2: return {1.0 + 0.5 * ad, zdt2 - 2.0, 1.0 - 0.5 * ad};
    case AnalyzedScheme::Accel1: return {1.0 + ad, zdt2 - 2.0 - ad, 1.0};
    case AnalyzedScheme::BackwardDifference: return {1.0, -(2.0 - ad - zdt2), 1.0 - ad};
    case AnalyzedScheme::SemiImplicit: {
      const double inner = 2.0 + ad - 2.0 * zdt2;
      return {(2.0 + ad) * (2.0 + ad), -4.0 * inner, (2.0 - ad) * inner};
    }
    case AnalyzedScheme::GradientDescent: break;
  }
  throw std::invalid_argument("gradient descent has a linear amplification factor");
}

double max_root_magnitude(double a, double b, double c) {
  if (a == 0.0) throw std::invalid_argument("leading coefficient must be nonzero");
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::sqrt(c / a);
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0) return 0.0;
  return std::max(std::abs(q / a), std::abs(c / q));
}

double amplification_factor(AnalyzedScheme scheme, double z, double dt, double damping) {
  if (scheme == AnalyzedScheme::GradientDescent) return std::abs(1.0 - dt * z);
  const Characteristic p = characteristic_polynomial(scheme, z, dt, damping);
  return max_root_magnitude(p.a, p.b, p.c);
}

SweepSample max_amplification(AnalyzedScheme scheme, double z_max, double dt, double damping,
                              std::size_t samples) {
  if (samples < 2) samples = 2;
  SweepSample worst{0.0, -1.0};
  for (std::size_t i = 0; i < samples; ++i) {
    const double z = z_max * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double m = amplification_factor(scheme, z, dt, damping);
    if (m > worst.magnitude) worst = {z, m};
  }
  return worst;
}

double empirical_max_dt(AnalyzedScheme scheme, double z_max, double damping, std::size_t samples,
                        double tol) {
  auto stable = [&](double dt) {
    return max_amplification(scheme, z_max, dt, damping, samples).magnitude <= 1.0 + tol;
  };
  double lo = 0.0;
  double hi = 1e-3 / std::max(1.0, z_max);
  for (int k = 0; k < 400 && stable(hi); ++k) {
    lo = hi;
    hi *= 2.0;
  }
  for (int k = 0; k < 200 && hi - lo > 1e-14 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (stable(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::vector<StabilityRow> stability_sweep(AnalyzedScheme scheme, double z_max, double damping, double dt_lo,
                                          double dt_hi, std::size_t steps, std::size_t z_samples) {
  std::vector<StabilityRow> rows;
  if (steps == 0) return rows;
  rows.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
    const double dt = dt_lo + t * (dt_hi - dt_lo);
    const SweepSample s = max_amplification(scheme, z_max, dt, damping, z_samples);
    rows.push_back({scheme, s.z, dt, damping, s.magnitude});
  }
  return rows;
}

void write_stability_csv(std::ostream& out, const std::vector<StabilityRow>& rows) {
  out << "scheme,z,dt,a,max_root_magnitude\n";
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << analyzed_name(r.scheme) << ',' << r.z << ',' << r.dt << ',' << r.damping << ',' << r.magnitude
        << '\n';
  }
}

}  // namespace pdeacc
