#pragma once

#include <numbers>
#include <span>

#include "critwave/grid.hpp"
#include "critwave/log_scalar.hpp"

namespace critwave {

/// Exponent of the energy-critical nonlinearity u (e^{4 pi u^2} - 1).
inline constexpr double kCriticalExponent = 4.0 * std::numbers::pi;
/// Largest exponential argument evaluated in plain double arithmetic.
inline constexpr double kOverflowGuard = 700.0;

struct EnergyBreakdown {
  double kinetic = 0.0;    // ||v||^2
  double dirichlet = 0.0;  // ||grad u||^2
  double potential = 0.0;  // int (e^{a u^2} - 1 - a u^2) / a
  double total = 0.0;
};

/// Nodal potential density (e^{a u^2} - 1 - a u^2) / a; zero for a = 0.
double potential_density(double u, double exponent);

/// Throws OverflowError when exponent * max u^2 exceeds `guard`.
void check_exponent_guard(const GridField& u, double exponent, double guard = kOverflowGuard);

EnergyBreakdown energy(const WaveState& s, double exponent = kCriticalExponent);
EnergyBreakdown energy(const SpectralWaveState& s, double exponent = kCriticalExponent);

/// Nodal energy density v^2 + |grad u|^2 + potential; integrates (h^2 sum)
/// to energy(s).total.
GridField energy_density(const WaveState& s, double exponent = kCriticalExponent);

/// h^2 sum of (e^{alpha u^2} - 1).
double moser_functional(const GridField& u, double alpha);

double lq_norm(const GridField& u, double q);
double sup_norm(const GridField& u);

enum class HolderSearch {
  Dyadic,      ///< fixed dyadic offset lattice only
  Refined,     ///< dyadic lattice, then local ascent from the best pairs
  Exhaustive,  ///< every node pair, O(n^4)
};

/// Discrete sup |u(x) - u(y)| / |x - y|^alpha over node pairs; a lower bound
/// for the continuum seminorm.
double holder_seminorm(const GridField& u, double alpha = 0.125,
                       HolderSearch search = HolderSearch::Refined);

/// ||u||_inf^2 / [lambda ||grad u||^2 log(c_lambda + |u|_{C^{1/8}} / ||grad u||)].
double log_inequality_ratio(const GridField& u, double lambda_param, double c_lambda);

/// (int_0^T ||u(t)||_{C^{1/8}}^8 dt)^{1/8} by the trapezoid rule over uniformly
/// spaced snapshots; ||.||_{C^{1/8}} = seminorm + sup norm.
double strichartz_functional(std::span<const WaveState> trajectory, double T);

}  // namespace critwave
