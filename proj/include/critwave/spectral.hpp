#pragma once

#include "critwave/grid.hpp"

namespace critwave {

/// Grid samples -> coefficients in the orthonormal sine (Dirichlet) or
/// cosine (Neumann) basis. Exactly unitary for the h^2-weighted inner product.
SpectralField forward_transform(const GridField& f);

/// Coefficients -> grid samples; inverse of forward_transform.
GridField inverse_transform(const SpectralField& c);

SpectralWaveState to_spectral(const WaveState& s);
WaveState to_grid(const SpectralWaveState& s);

/// Keeps the modes with lambda <= sqrt(lambda_mk^2) < lambda + width.
SpectralField chi_projector(const SpectralField& c, double lambda, double width = 1.0);

/// Exact linear wave flow over dt, one rotation per eigenmode. The constant
/// Neumann mode (lambda = 0) drifts as u += dt v.
SpectralWaveState free_propagate(const SpectralWaveState& s, double dt);
WaveState free_propagate(const WaveState& s, double dt);

/// ||grad u||^2 = sum lambda_mk^2 c_mk^2.
double dirichlet_norm_sq(const SpectralField& c);

/// sum c_mk^2 (equals the h^2-weighted grid L2 norm squared).
double coefficient_norm_sq(const SpectralField& c);

/// Grid L2 inner product with weight h^2.
double l2_inner(const GridField& a, const GridField& b);
double l2_norm_sq(const GridField& f);

struct Gradient {
  GridField dx;
  GridField dy;
};

/// Spectral derivative evaluated at the grid nodes.
Gradient gradient_at_nodes(const SpectralField& c);

/// |grad u|^2 as a nodal density. Derivatives are evaluated exactly on the
/// staggered (midpoint / interior face) lattice, where the discrete cosine
/// sums are orthogonal, and lumped onto the adjacent nodes. The h^2-weighted
/// sum of the result equals dirichlet_norm_sq(c) to rounding.
GridField gradient_energy_density(const SpectralField& c);

}  // namespace critwave
