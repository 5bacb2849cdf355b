#include "critwave/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "critwave/special.hpp"
#include "critwave/spectral.hpp"
#include "critwave/summation.hpp"

namespace critwave {

double potential_density(double u, double exponent) {
  if (exponent == 0.0) return 0.0;
  return expm1_minus_x(exponent * u * u) / exponent;
}

void check_exponent_guard(const GridField& u, double exponent, double guard) {
  for (double x : u.values()) {
    const double arg = exponent * x * x;
    if (!(arg <= guard)) {
      std::ostringstream msg;
      msg << "exponential argument " << arg << " at node value u = " << x << " exceeds guard "
          << guard << "; use the log-space pipeline";
      throw OverflowError(msg.str(), x);
    }
  }
}

namespace {

double potential_integral(const GridField& u, double exponent) {
  check_exponent_guard(u, exponent);
  CompensatedSum acc;
  for (double x : u.values()) acc += potential_density(x, exponent);
  const double h = u.grid().h();
  return h * h * acc.value();
}

EnergyBreakdown assemble(double kinetic, double dirichlet, double potential) {
  return {kinetic, dirichlet, potential, kinetic + dirichlet + potential};
}

}  // namespace

EnergyBreakdown energy(const WaveState& s, double exponent) {
  require_same_grid(s.u.grid(), s.v.grid(), "energy");
  return assemble(l2_norm_sq(s.v), dirichlet_norm_sq(forward_transform(s.u)),
                  potential_integral(s.u, exponent));
}

EnergyBreakdown energy(const SpectralWaveState& s, double exponent) {
  require_same_grid(s.u.grid(), s.v.grid(), "energy");
  return assemble(coefficient_norm_sq(s.v), dirichlet_norm_sq(s.u),
                  potential_integral(inverse_transform(s.u), exponent));
}

GridField energy_density(const WaveState& s, double exponent) {
  require_same_grid(s.u.grid(), s.v.grid(), "energy_density");
  check_exponent_guard(s.u, exponent);
  GridField out = gradient_energy_density(forward_transform(s.u));
  auto o = out.values();
  auto u = s.u.values();
  auto v = s.v.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += v[i] * v[i] + potential_density(u[i], exponent);
  return out;
}

double moser_functional(const GridField& u, double alpha) {
  if (!(alpha > 0.0)) throw PreconditionError("moser_functional: alpha must be > 0");
  check_exponent_guard(u, alpha);
  CompensatedSum acc;
  for (double x : u.values()) acc += std::expm1(alpha * x * x);
  const double h = u.grid().h();
  return h * h * acc.value();
}

double sup_norm(const GridField& u) {
  double m = 0.0;
  for (double x : u.values()) m = std::max(m, std::abs(x));
  return m;
}

double lq_norm(const GridField& u, double q) {
  if (!(q >= 1.0) || std::isinf(q)) throw PreconditionError("lq_norm: need 1 <= q < inf");
  const double m = sup_norm(u);
  if (m == 0.0) return 0.0;
  CompensatedSum acc;
  for (double x : u.values()) acc += std::pow(std::abs(x) / m, q);
  const double h = u.grid().h();
  return m * std::pow(h * h * acc.value(), 1.0 / q);
}

namespace {

struct NodePair {
  int ax, ay, bx, by;
  double value;
};

class HolderSearcher {
public:
  HolderSearcher(const GridField& u, double alpha) : u_(u), alpha_(alpha), n_(u.n()), h_(u.grid().h()) {}

  double ratio(int ax, int ay, int bx, int by) const {
    const double dx = ax - bx;
    const double dy = ay - by;
    const double dist = h_ * std::sqrt(dx * dx + dy * dy);
    return std::abs(u_(ax, ay) - u_(bx, by)) / std::pow(dist, alpha_);
  }

  bool inside(int x, int y) const { return x >= 0 && y >= 0 && x < n_ && y < n_; }

  double exhaustive() const {
    double best = 0.0;
    for (int ay = 0; ay < n_; ++ay)
      for (int ax = 0; ax < n_; ++ax)
        for (int by = ay; by < n_; ++by)
          for (int bx = (by == ay ? ax + 1 : 0); bx < n_; ++bx)
            best = std::max(best, ratio(ax, ay, bx, by));
    return best;
  }

  // Scans the dyadic offset lattice and keeps the `keep` best pairs.
  std::vector<NodePair> dyadic(std::size_t keep) const {
    std::vector<int> steps{0};
    for (int s = 1; s <= n_; s *= 2) {
      steps.push_back(s);
      steps.push_back(-s);
    }
    std::vector<NodePair> top;
    double floor_value = 0.0;
    auto offer = [&](const NodePair& p) {
      if (top.size() == keep && p.value <= floor_value) return;
      top.push_back(p);
      std::sort(top.begin(), top.end(), [](auto& a, auto& b) { return a.value > b.value; });
      if (top.size() > keep) top.pop_back();
      floor_value = top.back().value;
    };
    for (int oy : steps)
      for (int ox : steps) {
        // Half-plane of offsets; the ratio is symmetric in the pair.
        if (oy < 0 || (oy == 0 && ox <= 0)) continue;
        const double dist = h_ * std::sqrt(double(ox) * ox + double(oy) * oy);
        const double scale = 1.0 / std::pow(dist, alpha_);
        double best = -1.0;
        NodePair arg{};
        for (int ay = 0; ay + oy < n_; ++ay)
          for (int ax = std::max(0, -ox); ax < n_ && ax + ox < n_; ++ax) {
            const double jump = std::abs(u_(ax, ay) - u_(ax + ox, ay + oy));
            if (jump > best) {
              best = jump;
              arg = {ax, ay, ax + ox, ay + oy, 0.0};
            }
          }
        if (best >= 0.0) {
          arg.value = best * scale;
          offer(arg);
        }
      }
    return top;
  }

  // Moves either endpoint to a neighbouring node while the ratio improves.
  double ascend(NodePair p) const {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int end = 0; end < 2; ++end)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            NodePair q = p;
            int& x = end == 0 ? q.ax : q.bx;
            int& y = end == 0 ? q.ay : q.by;
            x += dx;
            y += dy;
            if (!inside(x, y) || (q.ax == q.bx && q.ay == q.by)) continue;
            q.value = ratio(q.ax, q.ay, q.bx, q.by);
            if (q.value > p.value) {
              p = q;
              improved = true;
            }
          }
    }
    return p.value;
  }

private:
  const GridField& u_;
  double alpha_;
  int n_;
  double h_;
};

}  // namespace

double holder_seminorm(const GridField& u, double alpha, HolderSearch search) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("holder_seminorm: need 0 < alpha < 1");
  HolderSearcher searcher(u, alpha);
  if (search == HolderSearch::Exhaustive) return searcher.exhaustive();
  const auto top = searcher.dyadic(search == HolderSearch::Refined ? 16 : 1);
  if (top.empty()) return 0.0;
  double best = top.front().value;
  if (search == HolderSearch::Refined)
    for (const auto& p : top) best = std::max(best, searcher.ascend(p));
  return best;
}

double log_inequality_ratio(const GridField& u, double lambda_param, double c_lambda) {
  if (!(lambda_param > 4.0 / std::numbers::pi))
    throw PreconditionError("log_inequality_ratio: lambda must exceed 4/pi");
  if (!(c_lambda > 1.0)) throw PreconditionError("log_inequality_ratio: C_lambda must exceed 1");
  const double grad_sq = dirichlet_norm_sq(forward_transform(u));
  if (!(grad_sq > 0.0)) throw UndefinedInputError("log_inequality_ratio: ||grad u|| = 0");
  const double grad = std::sqrt(grad_sq);
  const double sup = sup_norm(u);
  const double semi = holder_seminorm(u, 0.125);
  return sup * sup / (lambda_param * grad_sq * std::log(c_lambda + semi / grad));
}

double strichartz_functional(std::span<const WaveState> trajectory, double T) {
  if (trajectory.empty()) throw PreconditionError("strichartz_functional: empty trajectory");
  if (!(T >= 0.0)) throw PreconditionError("strichartz_functional: T must be >= 0");
  const std::size_t count = trajectory.size();
  if (count == 1) {
    const double norm = holder_seminorm(trajectory[0].u) + sup_norm(trajectory[0].u);
    return std::pow(T, 0.125) * norm;
  }
  const double dt = T / static_cast<double>(count - 1);
  const double t0 = trajectory.front().t;
  for (std::size_t i = 0; i < count; ++i) {
    const double expected = t0 + dt * static_cast<double>(i);
    if (std::abs(trajectory[i].t - expected) > 1e-9 * std::max(1.0, T))
      throw PreconditionError("strichartz_functional: snapshots must be uniformly spaced over [0, T]");
  }
  CompensatedSum acc;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& u = trajectory[i].u;
    const double norm = holder_seminorm(u) + sup_norm(u);
    const double w = (i == 0 || i + 1 == count) ? 0.5 : 1.0;
    acc += w * std::pow(norm, 8.0);
  }
  return std::pow(dt * acc.value(), 0.125);
}

}  // namespace critwave
