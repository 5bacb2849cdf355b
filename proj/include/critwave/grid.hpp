#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "critwave/errors.hpp"

namespace critwave {

enum class Boundary { Dirichlet, Neumann };

struct Point {
  double x = 0.5;
  double y = 0.5;
};

/// Uniform node layout on the open unit square.
///
/// Dirichlet: vertex-centred interior nodes x_i = (i+1) h, h = 1/(n+1), the
/// boundary value is implicitly zero. Neumann: cell-centred nodes
/// x_i = (i+1/2) h, h = 1/n. Both layouts make the discrete sine / cosine
/// transform exactly unitary under the uniform h^2 quadrature weight.
class Grid2D {
public:
  static constexpr int kMinNodes = 4;
  static constexpr int kMaxNodes = 8192;

  explicit Grid2D(int n, Boundary bc = Boundary::Dirichlet);

  int n() const noexcept { return n_; }
  Boundary bc() const noexcept { return bc_; }
  double h() const noexcept { return h_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }

  /// Coordinate of node index i along either axis.
  double node(int i) const noexcept {
    return bc_ == Boundary::Dirichlet ? (i + 1) * h_ : (i + 0.5) * h_;
  }

  /// Mode number carried by spectral index i (Dirichlet starts at 1).
  int mode(int i) const noexcept { return bc_ == Boundary::Dirichlet ? i + 1 : i; }

  std::size_t index(int ix, int iy) const noexcept {
    return static_cast<std::size_t>(iy) * n_ + ix;
  }

  friend bool operator==(const Grid2D& a, const Grid2D& b) noexcept {
    return a.n_ == b.n_ && a.bc_ == b.bc_;
  }

private:
  int n_;
  Boundary bc_;
  double h_;
};

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* where);

/// n x n array of doubles bound to a grid; storage is row-major with rows
/// along y, i.e. value(ix, iy) lives at iy*n + ix.
class Field2D {
public:
  explicit Field2D(const Grid2D& grid) : grid_(grid), values_(grid.size(), 0.0) {}
  Field2D(const Grid2D& grid, std::vector<double> values);

  const Grid2D& grid() const noexcept { return grid_; }
  int n() const noexcept { return grid_.n(); }

  double& operator()(int ix, int iy) noexcept { return values_[grid_.index(ix, iy)]; }
  double operator()(int ix, int iy) const noexcept { return values_[grid_.index(ix, iy)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& data() noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

protected:
  Grid2D grid_;
  std::vector<double> values_;
};

/// Nodal samples u(x_i, y_j).
class GridField : public Field2D {
public:
  using Field2D::Field2D;

  template <class F>
  static GridField sample(const Grid2D& grid, F&& f) {
    GridField out(grid);
    for (int iy = 0; iy < grid.n(); ++iy)
      for (int ix = 0; ix < grid.n(); ++ix) out(ix, iy) = f(grid.node(ix), grid.node(iy));
    return out;
  }

  bool all_finite() const noexcept;
};

/// Coefficients in the orthonormal Laplacian eigenbasis. Entry (i, j)
/// multiplies the eigenfunction with x-mode grid.mode(i) and y-mode
/// grid.mode(j).
class SpectralField : public Field2D {
public:
  using Field2D::Field2D;

  /// lambda^2 = pi^2 (m^2 + k^2)
  double eigenvalue_sq(int i, int j) const noexcept;
  /// lambda = pi sqrt(m^2 + k^2)
  double frequency(int i, int j) const noexcept;
};

/// (u, du/dt, t) sampled on the grid.
struct WaveState {
  GridField u;
  GridField v;
  double t = 0.0;
};

/// (u, du/dt, t) in the eigenbasis.
struct SpectralWaveState {
  SpectralField u;
  SpectralField v;
  double t = 0.0;
};

}  // namespace critwave
