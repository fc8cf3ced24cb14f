#include "pdeacc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pdeacc {

GridField::GridField(std::size_t rows, std::size_t cols, double dx, double value)
    : GridField(rows, cols, dx, std::vector<double>(rows * cols, value)) {}

GridField::GridField(std::size_t rows, std::size_t cols, double dx,
                     std::vector<double> data)
    : rows_(rows), cols_(cols), dx_(dx), data_(std::move(data)) {
  if (rows == 0 || cols == 0) throw ShapeError("grid extents must be positive");
  if (!(dx > 0.0) || !std::isfinite(dx)) throw ShapeError("grid spacing must be positive");
  if (data_.size() != rows * cols) {
    throw ShapeError("grid data length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
}

GridField GridField::zeros_like(const GridField& like, double value) {
  return GridField(like.rows(), like.cols(), like.dx(), value);
}

bool GridField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

double GridField::cell_measure() const {
  return dimension() == 2 ? dx_ * dx_ : dx_;
}

GridField& GridField::operator+=(const GridField& other) {
  if (!same_shape(other)) throw ShapeError("field shapes differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  if (!same_shape(other)) throw ShapeError("field shapes differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator*(double s, GridField a) { return a *= s; }

double unit_domain_dx(std::size_t rows, std::size_t cols) {
  return 1.0 / static_cast<double>(std::max(rows, cols));
}

double inner(const GridField& a, const GridField& b) {
  if (!a.same_shape(b)) throw ShapeError("field shapes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inner(const VectorField& a, const VectorField& b) {
  if (a.dimension() != b.dimension()) throw ShapeError("vector field dimensions differ");
  double s = 0.0;
  for (std::size_t k = 0; k < a.dimension(); ++k) s += inner(a.components[k], b.components[k]);
  return s;
}

double sup_norm(const GridField& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

double l2_norm(const GridField& u) { return std::sqrt(inner(u, u)); }

double l1_norm(const GridField& u) {
  double s = 0.0;
  for (double v : u.values()) s += std::abs(v);
  return s;
}

namespace {

// A 1D field is treated as a single axis along whichever extent exceeds one;
// a 2D field has axis 0 along columns (stride 1) and axis 1 along rows.
struct Layout {
  std::size_t outer;   // number of independent lines
  std::size_t count;   // samples along each line
  std::size_t stride;  // flat offset of one step along the line
  std::size_t jump;    // flat offset between consecutive lines
};

std::vector<Layout> layouts_of(const GridField& u) {
  const std::size_t R = u.rows(), C = u.cols();
  if (u.dimension() == 2) return {{R, C, 1, C}, {C, R, C, 1}};
  if (C > 1) return {{1, C, 1, 0}};
  return {{1, R, C, 0}};
}

}  // namespace

VectorField forward_gradient(const GridField& u) {
  const auto layouts = layouts_of(u);
  const double inv_dx = 1.0 / u.dx();
  VectorField grad;
  grad.components.reserve(layouts.size());
  for (const Layout& L : layouts) {
    GridField g = GridField::zeros_like(u);
    for (std::size_t o = 0; o < L.outer; ++o) {
      const std::size_t base = o * L.jump;
      for (std::size_t j = 0; j + 1 < L.count; ++j) {
        const std::size_t i = base + j * L.stride;
        g[i] = (u[i + L.stride] - u[i]) * inv_dx;
      }
    }
    grad.components.push_back(std::move(g));
  }
  return grad;
}

GridField backward_divergence(const VectorField& p) {
  if (p.components.empty()) throw ShapeError("empty vector field");
  const GridField& first = p.components.front();
  for (const auto& c : p.components) {
    if (!c.same_shape(first) || c.dx() != first.dx()) {
      throw ShapeError("vector field components disagree in shape");
    }
  }
  const auto layouts = layouts_of(first);
  if (layouts.size() != p.dimension()) throw ShapeError("vector field dimension mismatch");
  const double inv_dx = 1.0 / first.dx();
  GridField div = GridField::zeros_like(first);
  for (std::size_t k = 0; k < layouts.size(); ++k) {
    const Layout& L = layouts[k];
    const GridField& pk = p.components[k];
    for (std::size_t o = 0; o < L.outer; ++o) {
      const std::size_t base = o * L.jump;
      // The last-cell flux lies outside forward_gradient's range and never
      // enters the adjoint.
      double before = 0.0;
      for (std::size_t j = 0; j < L.count; ++j) {
        const std::size_t i = base + j * L.stride;
        const double here = (j + 1 < L.count) ? pk[i] : 0.0;
        div[i] += (here - before) * inv_dx;
        before = here;
      }
    }
  }
  return div;
}

GridField laplacian(const GridField& u) {
  const auto layouts = layouts_of(u);
  const double inv_dx2 = 1.0 / (u.dx() * u.dx());
  GridField lap = GridField::zeros_like(u);
  for (const Layout& L : layouts) {
    for (std::size_t o = 0; o < L.outer; ++o) {
      const std::size_t base = o * L.jump;
      for (std::size_t j = 0; j < L.count; ++j) {
        const std::size_t i = base + j * L.stride;
        const double next = (j + 1 < L.count) ? u[i + L.stride] : u[i];
        const double prev = (j > 0) ? u[i - L.stride] : u[i];
        lap[i] += (next - 2.0 * u[i] + prev) * inv_dx2;
      }
    }
  }
  return lap;
}

GridField magnitude(const VectorField& p) {
  if (p.components.empty()) throw ShapeError("empty vector field");
  GridField m = GridField::zeros_like(p.components.front());
  for (std::size_t i = 0; i < m.size(); ++i) {
    double s = 0.0;
    for (const auto& c : p.components) s += c[i] * c[i];
    m[i] = std::sqrt(s);
  }
  return m;
}

}  // namespace pdeacc
