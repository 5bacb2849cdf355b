#pragma once

#include <string>
#include <vector>

#include "critwave/grid.hpp"
#include "critwave/log_scalar.hpp"

namespace critwave {

enum class Amplitude {
  Plain,        ///< x 1, support radius eta
  Plus,         ///< x (1 + 1/k), support radius eta
  MinusScaled,  ///< x (1 - 2a/k), support radius 1/a
};

struct ConcentratorSpec {
  int k = 8;
  double eta = 0.2;
  Point center{};
  Amplitude amplitude = Amplitude::Plain;
  double a = 2.0;  // only used by MinusScaled

  double amplitude_factor() const;
  /// Support radius: eta, or 1/a for MinusScaled.
  double radius() const;
  /// Radius of the plateau disk, radius() * e^{-k/2}.
  double plateau_radius() const;
  /// Throws PreconditionError / DomainError for an invalid spec.
  void validate() const;
};

/// Unit-scale radial profile: sqrt(k/4pi) for r <= e^{-k/2}, -log(r)/sqrt(k pi)
/// up to r = 1, zero beyond.
double fk_profile(double r, int k);

/// Samples amplitude * f_k(|x - center| / radius). Resolution warnings (plateau
/// narrower than two grid spacings) are appended to `warnings` when given.
GridField build_fk(const ConcentratorSpec& spec, const Grid2D& grid,
                   std::vector<std::string>* warnings = nullptr);

/// int_0^{k/2} exp(-2s + (4c^2/k) s^2) ds, i.e. int_{e^{-k/2}}^1 r e^{(4c^2/k) log^2 r} dr.
LogScalar radial_moser_integral(double c, int k);

struct AnalyticReference {
  double dirichlet_sq = 0.0;   // ||grad u||^2, closed form
  double l2_sq = 0.0;          // ||u||^2, closed form
  double l2_sq_bound = 0.0;    // c^2 radius^2 / (2k)
  LogScalar mt_functional;     // int (e^{4 pi u^2} - 1), radial quadrature
  LogScalar potential;         // int (e^{4 pi u^2} - 1 - 4 pi u^2) / (4 pi)
  LogScalar energy;            // dirichlet_sq + potential (zero velocity)
};

AnalyticReference analytic_reference(const ConcentratorSpec& spec);

/// int (e^{alpha u^2} - 1) for the sampled profile, by radial quadrature.
LogScalar moser_reference(const ConcentratorSpec& spec, double alpha);

/// ||grad(v - w)||^2 for v = (1 + 1/k) f_k(./eta), w = f_k(./eta): exactly 1/k^2.
double plus_plain_gap_sq(int k);

/// (u, v) = ((1 - 2a/k) f_k(a (x - center)), 0) at t = 0.
WaveState supercritical_growth_data(int k, double a, const Grid2D& grid, Point center = {});

/// A (e^{4 pi A^2} - 1) with A = (1 - 2a/k) sqrt(k/4pi).
LogScalar plateau_nonlinearity(int k, double a);

/// Constant C with plateau_nonlinearity(k, a) >= C sqrt(k) e^k for every
/// k >= max(16, 8a).
double plateau_constant(double a);

/// C sqrt(k) e^k pi^{1/q} (2p/q + 1)^{-1/p} R^{2/q + 1/p}, R = e^{-k/2}/a:
/// lower bound for ||f(v_k)||_{L^p_t L^q_x} over the backward cone above
/// the plateau. p may be +inf.
LogScalar dual_strichartz_lower_bound(int k, double a, double p, double q);

/// The same cone norm evaluated exactly for a constant plateau value.
LogScalar plateau_cone_norm(int k, double a, double p, double q);

}  // namespace critwave
