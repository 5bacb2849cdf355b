#include "fft_plans.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace critwave::detail {
namespace {

using PlanKey = std::tuple<int, int, int, int>;

class PlanCache {
public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int ny, int nx, fftw_r2r_kind ky, fftw_r2r_kind kx) {
    std::lock_guard lock(mutex_);
    PlanKey key{ny, nx, static_cast<int>(ky), static_cast<int>(kx)};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    // The planner is not re-entrant; scratch arrays only fix the layout.
    const std::size_t len = static_cast<std::size_t>(ny) * nx;
    double* in = fftw_alloc_real(len);
    double* out = fftw_alloc_real(len);
    fftw_plan plan = fftw_plan_r2r_2d(ny, nx, in, out, ky, kx, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (plan == nullptr) throw std::runtime_error("fftw: planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

std::vector<double> r2r_2d(const std::vector<double>& in, int ny, int nx,
                           fftw_r2r_kind kind_y, fftw_r2r_kind kind_x) {
  fftw_plan plan = cache().get(ny, nx, kind_y, kind_x);
  std::vector<double> src = in;
  std::vector<double> dst(src.size());
  fftw_execute_r2r(plan, src.data(), dst.data());
  return dst;
}

}  // namespace critwave::detail
