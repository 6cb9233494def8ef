// Wall-clock comparison of the OpenMP kernels against their serial reference
// implementations: path simulation, process building, kernel density estimation.

#include <chrono>
#include <cstdio>

#include "otto/grid_density.hpp"
#include "otto/parallel.hpp"
#include "otto/pde.hpp"
#include "otto/sde.hpp"
#include "otto/stochastic_analysis.hpp"

using namespace otto;
namespace chrono = std::chrono;

namespace {

template <typename F>
double timed_ms(const F& f) {
  auto t1 = chrono::high_resolution_clock::now();
  f();
  auto t2 = chrono::high_resolution_clock::now();
  return chrono::duration<double, std::milli>(t2 - t1).count();
}

}  // namespace

int main() {
  configure_threads_from_env();
  std::printf("workers: %d\n", worker_count());

  const Potential pot = Potential::quadratic(0.25);
  const Grid grid{-10.0, 10.0, 2048};
  const GridDensity init = gaussian_density(grid, 1.0, 2.0);
  const std::size_t m = 20000;
  const double T = 1.0, dt = 1e-3;

  FlowSnapshotSeries flow = solve_forward(pot, init, 0.0, T, 1e-3, 1);

  // warm up the OpenMP runtime and the allocator before timing
  (void)simulate_forward(pot, GaussianInit{1.0, 2.0}, 0.0, 0.05, dt, 5, m, 42);

  PathEnsemble paths_omp, paths_ser;
  double t_ser = timed_ms([&] {
    paths_ser = simulate_forward_serial(pot, GaussianInit{1.0, 2.0}, 0.0, T, dt, 5, m, 42);
  });
  double t_omp = timed_ms([&] {
    paths_omp = simulate_forward(pot, GaussianInit{1.0, 2.0}, 0.0, T, dt, 5, m, 42);
  });
  bool same = paths_omp.states == paths_ser.states;
  std::printf("simulate_forward  m=%zu  omp %8.1f ms   serial %8.1f ms   speedup %.2fx   bitwise %s\n",
              m, t_omp, t_ser, t_ser / t_omp, same ? "equal" : "DIFFER");

  TrajectorialProcesses tp_omp, tp_ser;
  double b_ser = timed_ms([&] { tp_ser = build_processes_serial(paths_ser, flow, pot); });
  double b_omp = timed_ms([&] { tp_omp = build_processes(paths_omp, flow, pot); });
  bool same_tp = tp_omp.fisher == tp_ser.fisher && tp_omp.log_ell == tp_ser.log_ell;
  std::printf("build_processes   m=%zu  omp %8.1f ms   serial %8.1f ms   speedup %.2fx   bitwise %s\n",
              m, b_omp, b_ser, b_ser / b_omp, same_tp ? "equal" : "DIFFER");

  std::vector<double> xs(paths_omp.m_paths);
  for (std::size_t i = 0; i < paths_omp.m_paths; ++i) xs[i] = paths_omp.at(i, 0);
  double k_omp = timed_ms([&] { (void)from_samples(xs, grid); });
  std::printf("kde from_samples  m=%zu  omp %8.1f ms\n", m, k_omp);
  return (same && same_tp) ? 0 : 1;
}
