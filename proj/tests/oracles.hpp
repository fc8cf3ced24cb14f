#pragma once

// Reference computations for the tests. Everything here is written against
// raw arrays and explicit stencils so it shares no code path with the
// library operators it checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "pdeacc/energy.hpp"
#include "pdeacc/grid.hpp"
#include "pdeacc/kernel.hpp"

namespace oracle {

using pdeacc::GridField;

inline GridField random_field(std::size_t rows, std::size_t cols, double dx, std::uint64_t seed, double lo = -1.0,
                              double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  GridField f(rows, cols, dx);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
  return f;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

inline double dot(const GridField& a, const GridField& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

/// Mirror ghost index across a cell edge.
inline long reflect(long i, long n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

/// Five-point Laplacian written from the stencil, ghost u[-1] = u[0].
inline GridField stencil_laplacian(const GridField& u) {
  const long R = static_cast<long>(u.rows()), C = static_cast<long>(u.cols());
  const double h2 = u.dx() * u.dx();
  GridField out = GridField::zeros_like(u);
  auto at = [&](long r, long c) { return u(static_cast<std::size_t>(reflect(r, R)), static_cast<std::size_t>(reflect(c, C))); };
  for (long r = 0; r < R; ++r) {
    for (long c = 0; c < C; ++c) {
      double s = 0.0;
      if (C > 1) s += at(r, c + 1) - 2.0 * at(r, c) + at(r, c - 1);
      if (R > 1) s += at(r + 1, c) - 2.0 * at(r, c) + at(r - 1, c);
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = s / h2;
    }
  }
  return out;
}

/// Central difference of the energy along v.
inline double directional_derivative(const pdeacc::ProblemSpec& spec, const GridField& u, const GridField& v,
                                     double eps) {
  GridField plus = u, minus = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    plus[i] += eps * v[i];
    minus[i] -= eps * v[i];
  }
  return (pdeacc::energy(spec, plus) - pdeacc::energy(spec, minus)) / (2.0 * eps);
}

using Matrix = std::vector<std::vector<double>>;

/// Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    }
    if (std::abs(a[p][k]) < 1e-300) throw std::runtime_error("singular matrix");
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a[k][j] * x[j];
    x[k] = s / a[k][k];
  }
  return x;
}

/// Matrix of lambda(x) u - c laplacian(u) assembled from the stencil applied
/// to unit vectors.
inline Matrix quadratic_system(const GridField& lambda, double c) {
  const std::size_t n = lambda.size();
  Matrix a(n, std::vector<double>(n, 0.0));
  GridField e = GridField::zeros_like(lambda);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const GridField col = stencil_laplacian(e);
    for (std::size_t i = 0; i < n; ++i) a[i][j] = -c * col[i];
    a[j][j] += lambda[j];
    e[j] = 0.0;
  }
  return a;
}

inline GridField dense_quadratic_solve(const GridField& g, const GridField& lambda, double c) {
  std::vector<double> rhs(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = lambda[i] * g[i];
  const std::vector<double> x = dense_solve(quadratic_system(lambda, c), rhs);
  return GridField(g.rows(), g.cols(), g.dx(), x);
}

/// Constant-lambda quadratic denoising solved in the cosine eigenbasis of the
/// Neumann Laplacian: basis cos(pi k (j + 1/2) / n), eigenvalue
/// (2 - 2 cos(pi k / n)) / dx^2 per axis.
inline GridField spectral_quadratic_solve(const GridField& g, double lambda, double c) {
  const std::size_t R = g.rows(), C = g.cols();
  const double pi = std::numbers::pi;
  auto basis = [&](std::size_t n) {
    std::vector<std::vector<double>> b(n, std::vector<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) b[k][j] = std::cos(pi * k * (j + 0.5) / n);
    }
    return b;
  };
  const auto br = basis(R), bc = basis(C);
  auto norm2 = [](std::size_t k, std::size_t n) { return k == 0 ? double(n) : 0.5 * double(n); };
  auto eig = [&](std::size_t k, std::size_t n) { return (2.0 - 2.0 * std::cos(pi * k / n)) / (g.dx() * g.dx()); };

  // coefficients: first along columns, then along rows
  std::vector<std::vector<double>> tmp(R, std::vector<double>(C, 0.0)), coef(R, std::vector<double>(C, 0.0));
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t l = 0; l < C; ++l) {
      double s = 0.0;
      for (std::size_t j = 0; j < C; ++j) s += g(r, j) * bc[l][j];
      tmp[r][l] = s / norm2(l, C);
    }
  }
  for (std::size_t k = 0; k < R; ++k) {
    for (std::size_t l = 0; l < C; ++l) {
      double s = 0.0;
      for (std::size_t r = 0; r < R; ++r) s += tmp[r][l] * br[k][r];
      const double mu = (R > 1 ? eig(k, R) : 0.0) + (C > 1 ? eig(l, C) : 0.0);
      coef[k][l] = s / norm2(k, R) * lambda / (lambda + c * mu);
    }
  }
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t l = 0; l < C; ++l) {
      double s = 0.0;
      for (std::size_t k = 0; k < R; ++k) s += coef[k][l] * br[k][r];
      tmp[r][l] = s;
    }
  }
  GridField u = GridField::zeros_like(g);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t j = 0; j < C; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < C; ++l) s += tmp[r][l] * bc[l][j];
      u(r, j) = s;
    }
  }
  return u;
}

/// Largest root magnitude of A x^2 + B x + C via complex arithmetic.
inline double root_magnitude(double a, double b, double c) {
  const std::complex<double> disc = std::sqrt(std::complex<double>(b * b - 4.0 * a * c, 0.0));
  const std::complex<double> r1 = (-b + disc) / (2.0 * a);
  const std::complex<double> r2 = (-b - disc) / (2.0 * a);
  return std::max(std::abs(r1), std::abs(r2));
}

/// Dense convolution with half-sample reflection, straight from the
/// definition (K u)[r, c] = sum_{i,j} k[i, j] u[r - (i - ci), c - (j - cj)].
inline GridField brute_convolve(const pdeacc::Kernel& k, const GridField& u) {
  const long R = static_cast<long>(u.rows()), C = static_cast<long>(u.cols());
  const long cr = static_cast<long>(k.center_row()), cc = static_cast<long>(k.center_col());
  GridField out = GridField::zeros_like(u);
  for (long r = 0; r < R; ++r) {
    for (long c = 0; c < C; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < k.rows(); ++i) {
        for (std::size_t j = 0; j < k.cols(); ++j) {
          const long rr = reflect(r - (static_cast<long>(i) - cr), R);
          const long cc2 = reflect(c - (static_cast<long>(j) - cc), C);
          s += k.tap(i, j) * u(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc2));
        }
      }
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = s;
    }
  }
  return out;
}

/// max |sum_{i,j} k[i,j] exp(-i (w_r i + w_c j))| over an n x n frequency grid.
inline double dense_dft_max(const pdeacc::Kernel& k, std::size_t n) {
  double best = 0.0;
  const double pi = std::numbers::pi;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double wr = 2.0 * pi * a / n, wc = 2.0 * pi * b / n;
      std::complex<double> s = 0.0;
      for (std::size_t i = 0; i < k.rows(); ++i) {
        for (std::size_t j = 0; j < k.cols(); ++j) {
          s += k.tap(i, j) * std::exp(std::complex<double>(0.0, -(wr * double(i) + wc * double(j))));
        }
      }
      best = std::max(best, std::abs(s));
    }
  }
  return best;
}

/// Quadratic problem pieces for the implicit-fidelity steps: explicit
/// residual lambda (u - g) - c laplacian(u).
struct QuadraticProblem {
  GridField g;
  double lambda;
  double c;

  GridField residual(const GridField& u) const {
    const GridField lap = stencil_laplacian(u);
    GridField out = GridField::zeros_like(u);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = lambda * (u[i] - g[i]) - c * lap[i];
    return out;
  }
  // Regularizer part only.
  GridField regularizer_part(const GridField& u) const {
    const GridField lap = stencil_laplacian(u);
    GridField out = GridField::zeros_like(u);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = -c * lap[i];
    return out;
  }
};

/// Increments of the schemes with the fidelity evaluated at the new iterate,
/// solved cell by cell from their defining difference equations.
///   gd:     du / dt = -(lambda (u + du - g) + R(u))
///   accel1: (du - dp) / dt^2 + a du / dt = -(lambda (u + du - g) + R(u))
///   accel2: (du - dp) / dt^2 + a (du + dp) / (2 dt) = -(lambda (u + du - g) + R(u))
///   semi:   v = u + (2 - a dt)/(2 + a dt) dp,
///           w = v - 2 dt^2 / (2 + a dt) (lambda (w - g) + R(v))
inline GridField implicit_gd(const QuadraticProblem& p, const GridField& u, double dt) {
  const GridField reg = p.regularizer_part(u);
  GridField du = GridField::zeros_like(u);
  for (std::size_t i = 0; i < u.size(); ++i) {
    du[i] = -dt * (p.lambda * (u[i] - p.g[i]) + reg[i]) / (1.0 + p.lambda * dt);
  }
  return du;
}

inline GridField implicit_accel1(const QuadraticProblem& p, const GridField& u, const GridField& dp, double a,
                                 double dt) {
  const GridField reg = p.regularizer_part(u);
  GridField du = GridField::zeros_like(u);
  const double lhs = 1.0 / (dt * dt) + a / dt + p.lambda;
  for (std::size_t i = 0; i < u.size(); ++i) {
    du[i] = (dp[i] / (dt * dt) - p.lambda * (u[i] - p.g[i]) - reg[i]) / lhs;
  }
  return du;
}

inline GridField implicit_accel2(const QuadraticProblem& p, const GridField& u, const GridField& dp, double a,
                                 double dt) {
  const GridField reg = p.regularizer_part(u);
  GridField du = GridField::zeros_like(u);
  const double lhs = 1.0 / (dt * dt) + a / (2.0 * dt) + p.lambda;
  const double keep = 1.0 / (dt * dt) - a / (2.0 * dt);
  for (std::size_t i = 0; i < u.size(); ++i) {
    du[i] = (keep * dp[i] - p.lambda * (u[i] - p.g[i]) - reg[i]) / lhs;
  }
  return du;
}

inline GridField implicit_semi(const QuadraticProblem& p, const GridField& u, const GridField& dp, double a,
                               double dt) {
  GridField v = u;
  for (std::size_t i = 0; i < u.size(); ++i) v[i] += (2.0 - a * dt) / (2.0 + a * dt) * dp[i];
  const GridField reg = p.regularizer_part(v);
  const double k = 2.0 * dt * dt / (2.0 + a * dt);
  GridField du = GridField::zeros_like(u);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = (v[i] + k * p.lambda * p.g[i] - k * reg[i]) / (1.0 + k * p.lambda);
    du[i] = w - u[i];
  }
  return du;
}

inline double max_abs_diff(const GridField& a, const GridField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace oracle
