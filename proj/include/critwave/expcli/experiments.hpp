#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "critwave/expcli/config.hpp"
#include "critwave/expcli/report.hpp"
#include "critwave/grid.hpp"
#include "critwave/lightcone.hpp"
#include "critwave/pdesolver.hpp"

namespace critwave::exp {

ReportBundle cmd_moser(const ExperimentConfig& cfg);
ReportBundle cmd_ode(const ExperimentConfig& cfg);
ReportBundle cmd_pde(const ExperimentConfig& cfg);
ReportBundle cmd_cone(const ExperimentConfig& cfg);
ReportBundle cmd_projector(const ExperimentConfig& cfg);
ReportBundle cmd_strichartz(const ExperimentConfig& cfg);

/// Validates and runs one experiment, timing it. Configuration failures
/// become a bundle with a single item error instead of an exception.
ReportBundle run_experiment(const ExperimentConfig& cfg);

struct BatchResult {
  std::vector<ReportBundle> bundles;
  int exit_code = 0;  // 0 all ran; 3 some item failed; 2 strict and a check failed
};

/// Runs every config in order and writes the enabled outputs.
BatchResult dispatch(const std::vector<ExperimentConfig>& configs, bool write = true);

// Studies shared by the experiments and the acceptance suite.

/// amplitude * e_{m,k} with zero velocity.
WaveState single_mode_state(const Grid2D& grid, int m, int k, double amplitude);

/// Gaussian coefficients with variance decaying like lambda^{-4}, rescaled to
/// unit linear energy ||grad u||^2 + ||v||^2.
WaveState random_smooth_state(const Grid2D& grid, std::uint64_t seed);

struct ConeStudy {
  int n = 0;
  double flux_residual = 0.0;
  double multiplier_residual = 0.0;
  double monotonicity_violation = 0.0;
  double flux_lhs = 0.0;
  double flux_rhs = 0.0;
  std::vector<std::string> warnings;
};

/// Linear flow of amplitude-one mode (m, k) sampled exactly at spacing
/// `spacing` (defaults to h) and both cone identities evaluated on it.
ConeStudy cone_identity_study(int n, const ConeSpec& cone, double S, double T, int m, int k,
                              double spacing = 0.0);

struct ProjectorRow {
  double lambda = 0.0;
  int band_modes = 0;
  double ratio_single = 0.0;   // best single eigenfunction in the band
  double ratio_random = 0.0;   // best random band superposition
  double ratio_point = 0.0;    // best point-concentrated band function
  double max_ratio = 0.0;
};

struct ProjectorStudy {
  std::vector<ProjectorRow> rows;
  double slope = 0.0;          // least-squares slope of log max_ratio vs log lambda
  double predicted = 0.0;      // 2/3 (1/2 - 1/q)
};

/// ||chi_lambda u||_{L^q} / ||chi_lambda u||_{L^2} over band ensembles at
/// `count` log-spaced lambda in [lo, hi].
ProjectorStudy projector_study(int n, double q, double lo, double hi, int count, int members,
                               std::uint64_t seed);

struct ConeNormMeasurement {
  double measured = 0.0;     // grid ||f(v_k)||_{L^p_t L^q_x} over the cone
  double plateau = 0.0;      // constant-plateau value of the same norm
  double lower_bound = 0.0;  // closed-form lower bound
  int steps = 0;
  std::vector<std::string> warnings;
};

/// Evolves the (1 - 2a/k) f_k(a x) data and integrates |f(u)|^q over the
/// shrinking sections of the cone above the plateau.
ConeNormMeasurement cone_dual_norm(int k, double a, double p, double q, const Grid2D& grid);

}  // namespace critwave::exp
