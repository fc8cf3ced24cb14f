#include "pdeacc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

namespace pdeacc {

namespace {

double sample_max_dft(const Kernel& k) {
  // Sampling density grows with the kernel so the grid resolves its spectrum.
  const std::size_t side = std::max(k.rows(), k.cols());
  const std::size_t m = std::max<std::size_t>(64, 8 * side);
  const std::size_t m_row = k.rows() > 1 ? m : 1;
  const std::size_t m_col = k.cols() > 1 ? m : 1;
  double best = 0.0;
  for (std::size_t i = 0; i < m_row; ++i) {
    const double wr = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m_row);
    for (std::size_t j = 0; j < m_col; ++j) {
      const double wc = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m_col);
      best = std::max(best, dft_magnitude(k, wr, wc));
    }
  }
  return best;
}

// Half-sample reflection of an index into [0, n). Valid for |overshoot| <= n.
std::size_t reflect(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (i < 0) i = -i - 1;
  if (i >= n) i = 2 * n - 1 - i;
  return static_cast<std::size_t>(i);
}

void check_fits(const Kernel& k, const GridField& u) {
  if (k.rows() > u.rows() || k.cols() > u.cols()) {
    throw KernelError("kernel " + std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                      " is larger than field " + std::to_string(u.rows()) + "x" +
                      std::to_string(u.cols()));
  }
}

// One-dimensional pass along rows (axis = 0, column index varies) or
// columns (axis = 1). Adjoint passes scatter instead of gather.
GridField pass_1d(const std::vector<double>& taps, const GridField& u, int axis, bool adjoint) {
  const auto R = static_cast<std::ptrdiff_t>(u.rows());
  const auto C = static_cast<std::ptrdiff_t>(u.cols());
  const auto half = static_cast<std::ptrdiff_t>(taps.size() / 2);
  const std::ptrdiff_t n = axis == 0 ? C : R;
  GridField out = GridField::zeros_like(u);
  for (std::ptrdiff_t r = 0; r < R; ++r) {
    for (std::ptrdiff_t c = 0; c < C; ++c) {
      const std::ptrdiff_t j = axis == 0 ? c : r;
      const auto self = static_cast<std::size_t>(r * C + c);
      double acc = 0.0;
      for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(taps.size()); ++a) {
        const std::size_t src = reflect(j - (a - half), n);
        const std::size_t flat = axis == 0 ? static_cast<std::size_t>(r * C) + src
                                           : src * static_cast<std::size_t>(C) + static_cast<std::size_t>(c);
        if (adjoint) {
          out[flat] += taps[static_cast<std::size_t>(a)] * u[self];
        } else {
          acc += taps[static_cast<std::size_t>(a)] * u[flat];
        }
      }
      if (!adjoint) out[self] = acc;
    }
  }
  return out;
}

GridField dense_2d(const Kernel& k, const GridField& u, bool adjoint) {
  const auto R = static_cast<std::ptrdiff_t>(u.rows());
  const auto C = static_cast<std::ptrdiff_t>(u.cols());
  const auto hr = static_cast<std::ptrdiff_t>(k.center_row());
  const auto hc = static_cast<std::ptrdiff_t>(k.center_col());
  GridField out = GridField::zeros_like(u);
  for (std::ptrdiff_t r = 0; r < R; ++r) {
    for (std::ptrdiff_t c = 0; c < C; ++c) {
      const auto self = static_cast<std::size_t>(r * C + c);
      double acc = 0.0;
      for (std::size_t a = 0; a < k.rows(); ++a) {
        const std::size_t sr = reflect(r - (static_cast<std::ptrdiff_t>(a) - hr), R);
        for (std::size_t b = 0; b < k.cols(); ++b) {
          const std::size_t sc = reflect(c - (static_cast<std::ptrdiff_t>(b) - hc), C);
          const std::size_t flat = sr * static_cast<std::size_t>(C) + sc;
          if (adjoint) {
            out[flat] += k.tap(a, b) * u[self];
          } else {
            acc += k.tap(a, b) * u[flat];
          }
        }
      }
      if (!adjoint) out[self] = acc;
    }
  }
  return out;
}

}  // namespace

Kernel::Kernel(std::size_t rows, std::size_t cols, std::vector<double> taps)
    : rows_(rows), cols_(cols), taps_(std::move(taps)) {
  if (rows % 2 == 0 || cols % 2 == 0) throw KernelError("kernel sides must be odd");
  if (taps_.size() != rows * cols) throw KernelError("kernel tap count does not match its shape");
  for (double t : taps_) {
    if (!std::isfinite(t)) throw KernelError("kernel taps must be finite");
  }
  max_dft_ = sample_max_dft(*this);
}

Kernel Kernel::separable(std::vector<double> column_taps, std::vector<double> row_taps) {
  std::vector<double> taps;
  taps.reserve(column_taps.size() * row_taps.size());
  for (double a : column_taps) {
    for (double b : row_taps) taps.push_back(a * b);
  }
  Kernel k(column_taps.size(), row_taps.size(), std::move(taps));
  k.column_factor_ = std::move(column_taps);
  k.row_factor_ = std::move(row_taps);
  return k;
}

double Kernel::tap_sum() const { return std::accumulate(taps_.begin(), taps_.end(), 0.0); }

double dft_magnitude(const Kernel& k, double w_row, double w_col) {
  std::complex<double> s = 0.0;
  const auto hr = static_cast<double>(k.center_row());
  const auto hc = static_cast<double>(k.center_col());
  for (std::size_t a = 0; a < k.rows(); ++a) {
    for (std::size_t b = 0; b < k.cols(); ++b) {
      const double phase = w_row * (static_cast<double>(a) - hr) + w_col * (static_cast<double>(b) - hc);
      s += k.tap(a, b) * std::polar(1.0, -phase);
    }
  }
  return std::abs(s);
}

Kernel gaussian_kernel(double sigma, bool one_dimensional) {
  if (!(sigma > 0.0)) throw KernelError("gaussian sigma must be positive");
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> line;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    line.push_back(std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma)));
  }
  const double sum = std::accumulate(line.begin(), line.end(), 0.0);
  for (double& v : line) v /= sum;
  if (one_dimensional) return Kernel::separable(line, {1.0});
  return Kernel::separable(line, line);
}

GridField apply_kernel(const Kernel& k, const GridField& u) {
  check_fits(k, u);
  if (k.is_separable()) {
    return pass_1d(k.column_factor(), pass_1d(k.row_factor(), u, 0, false), 1, false);
  }
  return dense_2d(k, u, false);
}

GridField adjoint_kernel(const Kernel& k, const GridField& u) {
  check_fits(k, u);
  if (k.is_separable()) {
    return pass_1d(k.row_factor(), pass_1d(k.column_factor(), u, 1, true), 0, true);
  }
  return dense_2d(k, u, true);
}

}  // namespace pdeacc
