#pragma once

#include <optional>
#include <vector>

#include "pdeacc/grid.hpp"

namespace pdeacc {

/// Real convolution kernel with odd side lengths, centered.
///
/// Convolution extends the field by half-sample reflection across each edge,
/// which keeps constants fixed and matches the Neumann boundary used by the
/// differential operators. Kernels built from a row and a column factor are
/// applied separably; the result equals the dense 2D sum exactly because the
/// reflection acts on each axis independently.
class Kernel {
 public:
  Kernel(std::size_t rows, std::size_t cols, std::vector<double> taps);
  /// Outer product column_taps * row_taps^T.
  static Kernel separable(std::vector<double> column_taps, std::vector<double> row_taps);
  static Kernel identity() { return Kernel(1, 1, {1.0}); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t center_row() const { return rows_ / 2; }
  std::size_t center_col() const { return cols_ / 2; }
  double tap(std::size_t r, std::size_t c) const { return taps_[r * cols_ + c]; }
  const std::vector<double>& taps() const { return taps_; }
  double tap_sum() const;

  /// max |DFT(K)| over a dense sampling of the frequency torus.
  double max_dft_magnitude() const { return max_dft_; }

  bool is_separable() const { return column_factor_.has_value(); }
  const std::vector<double>& column_factor() const { return *column_factor_; }
  const std::vector<double>& row_factor() const { return *row_factor_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> taps_;
  std::optional<std::vector<double>> column_factor_;
  std::optional<std::vector<double>> row_factor_;
  double max_dft_ = 0.0;
};

/// |DFT(K)| at angular frequencies (w_row, w_col).
double dft_magnitude(const Kernel& k, double w_row, double w_col);

/// Normalized isotropic Gaussian in pixel units, truncated at ceil(3 sigma).
/// A column-shaped field needs a 1D kernel; pass one_dimensional = true.
Kernel gaussian_kernel(double sigma, bool one_dimensional = false);

/// K * u with reflective extension.
GridField apply_kernel(const Kernel& k, const GridField& u);
/// Exact adjoint of apply_kernel under the cell-sum inner product.
GridField adjoint_kernel(const Kernel& k, const GridField& u);

class KernelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pdeacc
