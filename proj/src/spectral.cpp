#include "critwave/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "critwave/summation.hpp"
#include "fft_plans.hpp"

namespace critwave {

using detail::r2r_2d;
using std::numbers::pi;

Grid2D::Grid2D(int n, Boundary bc) : n_(n), bc_(bc) {
  if (n < kMinNodes || n > kMaxNodes)
    throw ConfigError("grid: n = " + std::to_string(n) + " outside supported range [" +
                      std::to_string(kMinNodes) + ", " + std::to_string(kMaxNodes) + "]");
  h_ = bc == Boundary::Dirichlet ? 1.0 / (n + 1) : 1.0 / n;
}

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* where) {
  if (!(a == b)) throw ConfigError(std::string(where) + ": fields live on different grids");
}

Field2D::Field2D(const Grid2D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ConfigError("field: " + std::to_string(values_.size()) + " values for an " +
                      std::to_string(grid_.n()) + "^2 grid");
}

bool GridField::all_finite() const noexcept {
  for (double x : values_)
    if (!std::isfinite(x)) return false;
  return true;
}

double SpectralField::eigenvalue_sq(int i, int j) const noexcept {
  const double m = grid_.mode(i);
  const double k = grid_.mode(j);
  return pi * pi * (m * m + k * k);
}

double SpectralField::frequency(int i, int j) const noexcept {
  const double m = grid_.mode(i);
  const double k = grid_.mode(j);
  return pi * std::sqrt(m * m + k * k);
}

namespace {

// Per-axis normalisation of the cosine basis: b_0 = 1, b_m = sqrt(2) cos.
double cosine_weight(int m) { return m == 0 ? 1.0 : std::numbers::sqrt2; }

}  // namespace

SpectralField forward_transform(const GridField& f) {
  const Grid2D& g = f.grid();
  const int n = g.n();
  const double h2 = g.h() * g.h();
  if (g.bc() == Boundary::Dirichlet) {
    auto y = r2r_2d(f.data(), n, n, FFTW_RODFT00, FFTW_RODFT00);
    for (double& c : y) c *= 0.5 * h2;
    return SpectralField(g, std::move(y));
  }
  auto y = r2r_2d(f.data(), n, n, FFTW_REDFT10, FFTW_REDFT10);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      y[g.index(i, j)] *= 0.25 * h2 * cosine_weight(i) * cosine_weight(j);
  return SpectralField(g, std::move(y));
}

GridField inverse_transform(const SpectralField& c) {
  const Grid2D& g = c.grid();
  const int n = g.n();
  if (g.bc() == Boundary::Dirichlet) {
    auto y = r2r_2d(c.data(), n, n, FFTW_RODFT00, FFTW_RODFT00);
    for (double& v : y) v *= 0.5;
    return GridField(g, std::move(y));
  }
  std::vector<double> x = c.data();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) x[g.index(i, j)] /= cosine_weight(i) * cosine_weight(j);
  return GridField(g, r2r_2d(x, n, n, FFTW_REDFT01, FFTW_REDFT01));
}

SpectralWaveState to_spectral(const WaveState& s) {
  require_same_grid(s.u.grid(), s.v.grid(), "to_spectral");
  return {forward_transform(s.u), forward_transform(s.v), s.t};
}

WaveState to_grid(const SpectralWaveState& s) {
  require_same_grid(s.u.grid(), s.v.grid(), "to_grid");
  return {inverse_transform(s.u), inverse_transform(s.v), s.t};
}

SpectralField chi_projector(const SpectralField& c, double lambda, double width) {
  if (!(lambda >= 0.0)) throw PreconditionError("chi_projector: lambda must be >= 0");
  if (!(width > 0.0)) throw PreconditionError("chi_projector: width must be > 0");
  SpectralField out(c.grid());
  const int n = c.n();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double f = c.frequency(i, j);
      if (lambda <= f && f < lambda + width) out(i, j) = c(i, j);
    }
  return out;
}

SpectralWaveState free_propagate(const SpectralWaveState& s, double dt) {
  require_same_grid(s.u.grid(), s.v.grid(), "free_propagate");
  SpectralWaveState out{SpectralField(s.u.grid()), SpectralField(s.v.grid()), s.t + dt};
  const int n = s.u.n();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double lam = s.u.frequency(i, j);
      const double c = s.u(i, j);
      const double d = s.v(i, j);
      if (lam == 0.0) {
        out.u(i, j) = c + dt * d;
        out.v(i, j) = d;
        continue;
      }
      const double cs = std::cos(lam * dt);
      const double sn = std::sin(lam * dt);
      out.u(i, j) = cs * c + sn / lam * d;
      out.v(i, j) = -lam * sn * c + cs * d;
    }
  return out;
}

WaveState free_propagate(const WaveState& s, double dt) {
  return to_grid(free_propagate(to_spectral(s), dt));
}

double dirichlet_norm_sq(const SpectralField& c) {
  CompensatedSum acc;
  const int n = c.n();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) acc += c.eigenvalue_sq(i, j) * c(i, j) * c(i, j);
  return acc.value();
}

double coefficient_norm_sq(const SpectralField& c) {
  CompensatedSum acc;
  for (double x : c.values()) acc += x * x;
  return acc.value();
}

double l2_inner(const GridField& a, const GridField& b) {
  require_same_grid(a.grid(), b.grid(), "l2_inner");
  CompensatedSum acc;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
  const double h = a.grid().h();
  return h * h * acc.value();
}

double l2_norm_sq(const GridField& f) { return l2_inner(f, f); }

namespace {

// Derivative coefficients along x: d/dx of the x-basis function of mode m has
// amplitude m*pi (the 1/2 or sqrt(2) factors are applied by the callers).
enum class Axis { X, Y };

// Builds the FFTW input for a derivative along `axis`, padded by `lead` zero
// entries before and `trail` after the mode range along that axis.
std::vector<double> derivative_input(const SpectralField& c, Axis axis, int lead, int trail,
                                     double scale, bool neumann) {
  const Grid2D& g = c.grid();
  const int n = g.n();
  // Neumann: the derivative of mode m lands on sine index m-1 (mode 0 drops).
  const int shift = neumann ? 1 : 0;
  const int count = n - shift;
  const int len = count + lead + trail;
  std::vector<double> x(static_cast<std::size_t>(len) * n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < count; ++i) {
      // i indexes the differentiated axis, j the other.
      const int src_d = i + shift;
      const int m = g.mode(src_d);
      const double other = neumann ? 1.0 / cosine_weight(j) : 1.0;
      const double coef =
          axis == Axis::X ? c(src_d, j) : c(j, src_d);
      const double value = scale * m * pi * coef * other;
      const int d = i + lead;
      if (axis == Axis::X)
        x[static_cast<std::size_t>(j) * len + d] = value;
      else
        x[static_cast<std::size_t>(d) * n + j] = value;
    }
  return x;
}

}  // namespace

Gradient gradient_at_nodes(const SpectralField& c) {
  const Grid2D& g = c.grid();
  const int n = g.n();
  Gradient out{GridField(g), GridField(g)};
  if (g.bc() == Boundary::Dirichlet) {
    // d/dx [2 sin(m pi x) sin(k pi y)] = 2 m pi cos(m pi x) sin(k pi y); the
    // nodes are the interior points of a DCT-I of length n+2.
    const int len = n + 2;
    auto xin = derivative_input(c, Axis::X, 1, 1, 0.5, false);
    auto xo = r2r_2d(xin, n, len, FFTW_RODFT00, FFTW_REDFT00);
    auto yin = derivative_input(c, Axis::Y, 1, 1, 0.5, false);
    auto yo = r2r_2d(yin, len, n, FFTW_REDFT00, FFTW_RODFT00);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        out.dx(i, j) = xo[static_cast<std::size_t>(j) * len + i + 1];
        out.dy(i, j) = yo[static_cast<std::size_t>(j + 1) * n + i];
      }
    return out;
  }
  // d/dx [sqrt2 cos(m pi x)] = -sqrt2 m pi sin(m pi x) at cell centres: DST-III.
  const double scale = -0.5 * std::numbers::sqrt2;
  auto xin = derivative_input(c, Axis::X, 0, 1, scale, true);
  auto xo = r2r_2d(xin, n, n, FFTW_REDFT01, FFTW_RODFT01);
  auto yin = derivative_input(c, Axis::Y, 0, 1, scale, true);
  auto yo = r2r_2d(yin, n, n, FFTW_RODFT01, FFTW_REDFT01);
  out.dx = GridField(g, std::move(xo));
  out.dy = GridField(g, std::move(yo));
  return out;
}

GridField gradient_energy_density(const SpectralField& c) {
  const Grid2D& g = c.grid();
  const int n = g.n();
  GridField out(g);
  if (g.bc() == Boundary::Dirichlet) {
    // Midpoints x = (p + 1/2) h, p = 0..n: DCT-III of length n+1.
    const int len = n + 1;
    auto xin = derivative_input(c, Axis::X, 1, 0, 0.5, false);
    auto xo = r2r_2d(xin, n, len, FFTW_RODFT00, FFTW_REDFT01);
    auto yin = derivative_input(c, Axis::Y, 1, 0, 0.5, false);
    auto yo = r2r_2d(yin, len, n, FFTW_REDFT01, FFTW_RODFT00);
    auto gx = [&](int p, int j) {
      const double v = xo[static_cast<std::size_t>(j) * len + p];
      return v * v;
    };
    auto gy = [&](int i, int p) {
      const double v = yo[static_cast<std::size_t>(p) * n + i];
      return v * v;
    };
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double sx = 0.5 * (gx(i, j) + gx(i + 1, j));
        if (i == 0) sx += 0.5 * gx(0, j);
        if (i == n - 1) sx += 0.5 * gx(n, j);
        double sy = 0.5 * (gy(i, j) + gy(i, j + 1));
        if (j == 0) sy += 0.5 * gy(i, 0);
        if (j == n - 1) sy += 0.5 * gy(i, n);
        out(i, j) = sx + sy;
      }
    return out;
  }
  // Interior faces x = f h, f = 1..n-1: DST-I of length n-1. Boundary faces
  // carry zero normal derivative.
  const int len = n - 1;
  const double scale = -0.5 * std::numbers::sqrt2;
  auto xin = derivative_input(c, Axis::X, 0, 0, scale, true);
  auto xo = r2r_2d(xin, n, len, FFTW_REDFT01, FFTW_RODFT00);
  auto yin = derivative_input(c, Axis::Y, 0, 0, scale, true);
  auto yo = r2r_2d(yin, len, n, FFTW_RODFT00, FFTW_REDFT01);
  auto gx = [&](int face, int j) {
    if (face <= 0 || face >= n) return 0.0;
    const double v = xo[static_cast<std::size_t>(j) * len + face - 1];
    return v * v;
  };
  auto gy = [&](int i, int face) {
    if (face <= 0 || face >= n) return 0.0;
    const double v = yo[static_cast<std::size_t>(face - 1) * n + i];
    return v * v;
  };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      out(i, j) = 0.5 * (gx(i, j) + gx(i + 1, j)) + 0.5 * (gy(i, j) + gy(i, j + 1));
  return out;
}

}  // namespace critwave
