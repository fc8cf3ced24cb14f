#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace pdeacc {

/// Scalar samples on a uniform Cartesian grid, stored row-major.
///
/// A field with cols == 1 (or rows == 1) is one-dimensional. Spacing is
/// isotropic. Boundaries are homogeneous Neumann everywhere: operators
/// treat the grid as if mirrored across each edge.
class GridField {
 public:
  GridField() = default;
  GridField(std::size_t rows, std::size_t cols, double dx, double value = 0.0);
  GridField(std::size_t rows, std::size_t cols, double dx,
            std::vector<double> data);

  /// Field with the same shape and spacing as `like`, filled with `value`.
  static GridField zeros_like(const GridField& like, double value = 0.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  double dx() const { return dx_; }
  /// Spatial dimension N: 1 when either extent is 1, else 2.
  int dimension() const { return (rows_ > 1 && cols_ > 1) ? 2 : 1; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const GridField& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const;

  /// Cell measure dx^N used by integrals over the domain.
  double cell_measure() const;

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);
  GridField& operator*=(double s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double dx_ = 1.0;
  std::vector<double> data_;
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField operator*(double s, GridField a);

/// Per-axis components of a vector field. Axis 0 runs along rows (the
/// column index c advances), axis 1 along columns; a 1D field has one
/// component along its non-trivial extent.
struct VectorField {
  std::vector<GridField> components;

  std::size_t dimension() const { return components.size(); }
};

/// Default spacing placing the grid on a unit-length domain.
double unit_domain_dx(std::size_t rows, std::size_t cols);

/// Unweighted sum over cells of a*b.
double inner(const GridField& a, const GridField& b);
double inner(const VectorField& a, const VectorField& b);
double sup_norm(const GridField& u);
double l2_norm(const GridField& u);
double l1_norm(const GridField& u);

/// (u[a+e_k] - u[a]) / dx, zero in the last cell along each axis.
VectorField forward_gradient(const GridField& u);

/// Negative adjoint of forward_gradient under the cell-sum inner product.
GridField backward_divergence(const VectorField& p);

/// Five-point (three-point in 1D) Laplacian with mirrored ghost cells.
GridField laplacian(const GridField& u);

/// Pointwise Euclidean length of a vector field.
GridField magnitude(const VectorField& p);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pdeacc
