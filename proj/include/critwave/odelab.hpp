#pragma once

#include <string>
#include <vector>

#include "critwave/log_scalar.hpp"

namespace critwave {

/// Oscillator y'' + y (e^{4 pi y^2} - 1) = 0.
struct OdeState {
  double y = 0.0;
  double v = 0.0;
  double t = 0.0;
};

enum class Integrator { Verlet, RK4 };

struct OdeTrajectory {
  std::vector<OdeState> samples;
  std::vector<double> h_drift;  // |H(t) - H(0)| / H(0) per sample (0 when H(0) = 0)
  Integrator method = Integrator::Verlet;
  double dt = 0.0;
  double max_drift = 0.0;
};

/// y (e^{4 pi y^2} - 1); throws OverflowError past the guard.
double force(double y);
/// (e^{4 pi y^2} - 1 - 4 pi y^2) / (8 pi); F' = force.
double potential_F(double y);
LogScalar force_log(double y);
LogScalar potential_F_log(double y);

/// H = v^2 + 2 F(y).
double first_integral(double y, double v);

/// Fixed-step integration over `duration` (negative runs backwards). The step
/// is adjusted so an integer number of steps lands on the end time; every
/// `record_every`-th state is stored along with the end state.
OdeTrajectory integrate(OdeState s0, double duration, double dt,
                        Integrator method = Integrator::Verlet, int record_every = 1);
OdeTrajectory integrate(double y0, double duration, double dt,
                        Integrator method = Integrator::Verlet, int record_every = 1);

/// int_{u1}^{a} du / sqrt(E(a^2) - E(u^2)), E(x) = e^x - 1 - x, for
/// 0 <= u1 <= a: the travel time in the scaled variable u = sqrt(4 pi) y.
LogScalar level_crossing_integral(double a, double u1);

/// Full period of the orbit released at rest from y0.
double period(double y0);
LogScalar period_log(double y0);

/// First time at which the orbit released at rest from y0 reaches y1.
double time_to_level(double y0, double y1);
LogScalar time_to_level_log(double y0, double y1);

/// |y'| at height y on the orbit released at rest from y0, squared, from
/// the first integral: (E(4 pi y0^2) - E(4 pi y^2)) / (4 pi).
LogScalar velocity_sq(double y0, double y);

/// Event-detecting Verlet oracles: first return to v = 0 with y > 0, and
/// first passage of y through y1, each refined by Hermite interpolation.
double detect_return_time(double y0, double dt);
double detect_level_time(double y0, double y1, double dt);

struct LemmaIResult {
  LogScalar value;
  LogScalar bound;  // 2 e^{(a^2 - 1) k}
  bool holds = false;
};

/// int_{e^{-k/2}}^1 r e^{(4 a^2 / k) log^2 r} dr against 2 e^{(a^2 - 1) k}.
LemmaIResult lemma_I(double a, int k);

struct LemmaT3Result {
  LogScalar lhs;
  LogScalar rhs;  // sqrt(1 - 2/e) e^{-A^2/2} (A - 1/A + A/(A^2 - 1))
  bool holds = false;
};

LemmaT3Result lemma_T3(double A);

struct DecoherenceReport {
  int k = 0;
  double eta = 0.0;
  double phi0 = 0.0;
  double psi0 = 0.0;
  double phi_tk = 0.0;
  double psi_tk = 0.0;
  LogScalar t_k;
  LogScalar T_k;
  LogScalar vel_phi_sq;
  LogScalar vel_psi_sq;
  LogScalar gap_sq;       // |d/dt (phi - psi)(t_k)|^2
  LogScalar vel_sum;      // |phi'(t_k) + psi'(t_k)|
  double gap_over_ek = 0.0;
  double cone_l2_lower = 0.0;      // pi/4 eta^2 e^{-k} gap_sq
  double tk_scaled = 0.0;          // t_k e^{k/2}
  double tk_envelope_ratio = 0.0;  // t_k / (e^{8 pi} e^{-k/2} k (k+1) / (sqrt(k)(k^2 + (2 - 4 pi) k + 1)))
  double Tk_scaled = 0.0;          // T_k e^{(k/2)(1 + 1/k)^2} / sqrt(k)
  double vel_sum_over_ek2 = 0.0;   // vel_sum / e^{k/2}
  bool tk_before_quarter = false;  // t_k < T_k / 4
  bool tk_within_cone = false;     // t_k <= (eta/2) e^{-k/2}
  bool valid = true;
  std::vector<std::string> notes;
};

/// Dephasing of the orbits released from (1 + 1/k) sqrt(k/4pi) and sqrt(k/4pi)
/// at the time t_k when the first has dropped by its own reciprocal. All
/// quantities come from quadrature and the first integral; no time stepping.
DecoherenceReport decoherence(int k, double eta);

}  // namespace critwave
