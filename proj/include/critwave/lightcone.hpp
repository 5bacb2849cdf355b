#pragma once

#include <span>
#include <string>
#include <vector>

#include "critwave/functionals.hpp"
#include "critwave/grid.hpp"
#include "critwave/pdesolver.hpp"

namespace critwave {

/// Backward cone {|x - apex| < apex_time - t}: sections shrink to the apex
/// as t -> apex_time.
struct ConeSpec {
  Point apex{};
  double apex_time = 0.0;

  double section_radius(double t) const { return apex_time - t; }
};

/// Nodewise membership flags on a grid.
struct Mask {
  Grid2D grid;
  std::vector<unsigned char> inside;

  explicit Mask(const Grid2D& g) : grid(g), inside(g.size(), 0) {}
  std::size_t count() const;
  double area() const { return double(count()) * grid.h() * grid.h(); }
};

/// Nodes with |x - apex| < radius.
Mask cone_mask(Point apex, double radius, const Grid2D& grid);
/// Section D_t of the cone.
Mask cone_mask(const ConeSpec& spec, double t, const Grid2D& grid);

/// h^2 sum of the energy density over the mask.
double restricted_energy(const WaveState& s, const Mask& mask, double exponent = kCriticalExponent);

struct IdentityResidual {
  double residual = 0.0;  // |sum of terms| / largest term, 0 when all terms vanish
  double lhs = 0.0;
  double rhs = 0.0;
  double scale = 0.0;
  /// Largest increase of the section energy between consecutive snapshots,
  /// relative to the energy at S (flux identity only).
  double monotonicity_violation = 0.0;
  std::vector<std::string> warnings;
};

/// Section energy drop E_D(S) - E_D(T) against the mantle flux
/// int (e - 2 u_t u_r) over the shell swept between S and T. Sections carry a
/// ramp weight of width h across the rim, so the mantle term is the 1/h
/// scaled shell of that width; fields are linear in time between snapshots.
/// S and T must be snapshot times.
IdentityResidual flux_identity_residual(std::span<const WaveState> traj, const ConeSpec& spec,
                                        double S, double T, double exponent = kCriticalExponent);

/// Residual of the u-multiplier identity
/// [int_D u u_t]_S^T + int_mantle (u u_t - u u_r) + int_K (|grad u|^2 - u_t^2 + u f(u)) = 0,
/// with the same ramped sections and shells as the flux identity.
IdentityResidual multiplier_identity_residual(std::span<const WaveState> traj, const ConeSpec& spec,
                                              double S, double T,
                                              double exponent = kCriticalExponent);

struct AgreementReport {
  int k = 0;
  double eta = 0.0;
  int n = 0;
  double window = 0.0;  // 0.8 eta e^{-k/2}
  std::vector<double> times;
  std::vector<double> pde_center;
  std::vector<double> ode_center;
  double max_deviation = 0.0;
  double exponent = kCriticalExponent;
  bool regimes_differ = false;  // exponent differs from 4 pi
  bool valid = true;
  std::vector<std::string> notes;
};

/// Runs the PDE from w_k data centred in the square and compares the
/// centre value with the ODE orbit released from sqrt(k/4pi).
AgreementReport pde_ode_agreement(int k, double eta, const Grid2D& grid, const SolverConfig& cfg);

/// Bilinear interpolation of nodal values at p (nearest edge value outside the node hull).
double sample_bilinear(const GridField& f, Point p);

}  // namespace critwave
