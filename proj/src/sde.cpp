#include "otto/sde.hpp"

#include <algorithm>
#include <cmath>

#include "otto/csv.hpp"
#include "otto/rng.hpp"

namespace otto {

namespace {

struct StepPlan {
  std::size_t steps;
  double dt_eff;
  std::vector<std::size_t> save_steps;  // ascending step indices, first = 0, last = steps
};

StepPlan plan_steps(double t0, double T, double dt, std::size_t save_stride) {
  if (!(dt > 0.0) || dt > 1e-2)
    throw std::invalid_argument("simulate: dt must lie in (0, 1e-2]");
  if (T < t0) throw std::invalid_argument("simulate: T >= t0 required");
  StepPlan plan;
  if (T == t0) {
    plan.steps = 0;
    plan.dt_eff = dt;
    plan.save_steps = {0};
    return plan;
  }
  plan.steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround((T - t0) / dt)));
  plan.dt_eff = (T - t0) / static_cast<double>(plan.steps);
  if (save_stride == 0) save_stride = 1;
  for (std::size_t k = 0; k <= plan.steps; k += save_stride) plan.save_steps.push_back(k);
  if (plan.save_steps.back() != plan.steps) plan.save_steps.push_back(plan.steps);
  return plan;
}

// Built once per run; drawing must not allocate.
class InitSampler {
 public:
  explicit InitSampler(const InitLaw& init) {
    if (const auto* g = std::get_if<GaussianInit>(&init)) {
      gaussian_ = true;
      mean_ = g->mean;
      sd_ = std::sqrt(g->var);
    } else {
      cdf_.emplace(std::get<GridInit>(init).density);
    }
  }
  double draw(std::mt19937_64& eng) const {
    if (gaussian_) {
      std::normal_distribution<double> n01(0.0, 1.0);
      return mean_ + sd_ * n01(eng);
    }
    std::uniform_real_distribution<double> uni(1e-12, 1.0 - 1e-12);
    return cdf_->quantile(uni(eng));
  }

 private:
  bool gaussian_ = false;
  double mean_ = 0.0, sd_ = 1.0;
  std::optional<GridCdf> cdf_;
};

// One forward path; writes its saved states into out[0..n_saved).
template <typename Drift>
void run_path(double x0, const Drift& drift, const StepPlan& plan, std::mt19937_64& eng,
              double* out) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const double sdt = std::sqrt(plan.dt_eff);
  double x = x0;
  std::size_t save_pos = 0;
  if (plan.save_steps[0] == 0) out[save_pos++] = x;
  for (std::size_t k = 1; k <= plan.steps; ++k) {
    x += drift(k - 1, x) * plan.dt_eff + sdt * n01(eng);
    if (save_pos < plan.save_steps.size() && plan.save_steps[save_pos] == k) out[save_pos++] = x;
  }
}

template <bool Parallel>
PathEnsemble simulate_forward_impl(const Potential& pot, const InitLaw& init, double t0, double T,
                                   double dt, std::size_t save_stride, std::size_t m_paths,
                                   std::uint64_t seed, const std::optional<Perturbation>& pert) {
  StepPlan plan = plan_steps(t0, T, dt, save_stride);
  PathEnsemble e;
  e.m_paths = m_paths;
  e.orientation = PathOrientation::Forward;
  e.seed = seed;
  e.dt = plan.dt_eff;
  e.save_stride = save_stride == 0 ? 1 : save_stride;
  for (std::size_t k : plan.save_steps) e.times.push_back(t0 + plan.dt_eff * static_cast<double>(k));
  e.states.resize(m_paths * e.times.size());

  const bool perturbed = pert.has_value();
  const Perturbation* b = perturbed ? &*pert : nullptr;
  auto drift = [&](std::size_t, double x) {
    return -(pot.grad(x) + (perturbed ? b->beta(x) : 0.0));
  };

  const InitSampler sampler(init);
  const std::size_t n_saved = e.times.size();
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m_paths); ++i) {
    auto eng = path_rng(seed, static_cast<std::uint64_t>(i));
    double x0 = sampler.draw(eng);
    run_path(x0, drift, plan, eng, &e.states[static_cast<std::size_t>(i) * n_saved]);
  }
  return e;
}

template <bool Parallel>
PathEnsemble simulate_reversed_impl(const FlowSnapshotSeries& flow, const Potential& pot,
                                    double dt, std::size_t save_stride, std::size_t m_paths,
                                    std::uint64_t seed) {
  const double t0 = flow.t0(), T = flow.t_end();
  StepPlan plan = plan_steps(0.0, T - t0, dt, save_stride);
  FlowInterpolant interp(flow);

  PathEnsemble e;
  e.m_paths = m_paths;
  e.orientation = PathOrientation::Reversed;
  e.seed = seed;
  e.dt = plan.dt_eff;
  e.save_stride = save_stride == 0 ? 1 : save_stride;
  // stored as the forward times visited, descending from T down to t0
  for (std::size_t k : plan.save_steps) e.times.push_back(T - plan.dt_eff * static_cast<double>(k));
  e.states.resize(m_paths * e.times.size());

  GridCdf terminal_cdf(flow.density(flow.times.size() - 1));
  auto drift = [&](std::size_t k, double x) {
    double t = T - plan.dt_eff * static_cast<double>(k);
    return interp.score_p(t, x) + pot.grad(x);
  };

  const std::size_t n_saved = e.times.size();
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m_paths); ++i) {
    auto eng = path_rng(seed, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> uni(1e-12, 1.0 - 1e-12);
    double x0 = terminal_cdf.quantile(uni(eng));
    run_path(x0, drift, plan, eng, &e.states[static_cast<std::size_t>(i) * n_saved]);
  }
  return e;
}

}  // namespace

std::size_t PathEnsemble::nearest_index(double t) const {
  std::size_t best = 0;
  double best_d = std::fabs(times[0] - t);
  for (std::size_t k = 1; k < times.size(); ++k) {
    double d = std::fabs(times[k] - t);
    if (d < best_d) {
      best = k;
      best_d = d;
    }
  }
  return best;
}

PathEnsemble simulate_forward(const Potential& pot, const InitLaw& init, double t0, double T,
                              double dt, std::size_t save_stride, std::size_t m_paths,
                              std::uint64_t seed, const std::optional<Perturbation>& pert) {
  return simulate_forward_impl<true>(pot, init, t0, T, dt, save_stride, m_paths, seed, pert);
}

PathEnsemble simulate_forward_serial(const Potential& pot, const InitLaw& init, double t0,
                                     double T, double dt, std::size_t save_stride,
                                     std::size_t m_paths, std::uint64_t seed,
                                     const std::optional<Perturbation>& pert) {
  return simulate_forward_impl<false>(pot, init, t0, T, dt, save_stride, m_paths, seed, pert);
}

double reversed_drift(const FlowInterpolant& p_interp, const Potential& pot, double t, double x) {
  return p_interp.score_p(t, x) + pot.grad(x);
}

PathEnsemble simulate_reversed(const FlowSnapshotSeries& flow, const Potential& pot, double dt,
                               std::size_t save_stride, std::size_t m_paths, std::uint64_t seed) {
  return simulate_reversed_impl<true>(flow, pot, dt, save_stride, m_paths, seed);
}

PathEnsemble simulate_reversed_serial(const FlowSnapshotSeries& flow, const Potential& pot,
                                      double dt, std::size_t save_stride, std::size_t m_paths,
                                      std::uint64_t seed) {
  return simulate_reversed_impl<false>(flow, pot, dt, save_stride, m_paths, seed);
}

double ensemble_mean(const PathEnsemble& e, std::size_t k) {
  double acc = 0.0;
  for (std::size_t i = 0; i < e.m_paths; ++i) acc += e.at(i, k);
  return acc / static_cast<double>(e.m_paths);
}

double ensemble_var(const PathEnsemble& e, std::size_t k) {
  double m = ensemble_mean(e, k);
  double acc = 0.0;
  for (std::size_t i = 0; i < e.m_paths; ++i) {
    double d = e.at(i, k) - m;
    acc += d * d;
  }
  return acc / static_cast<double>(e.m_paths - 1);
}

void write_ensemble_csv(const std::string& path, const PathEnsemble& e,
                        const std::string& potential_desc) {
  CsvFile out(path);
  out.line("# seed=" + std::to_string(e.seed) + " dt=" + fmt17(e.dt) +
           " m_paths=" + std::to_string(e.m_paths) + " stride=" + std::to_string(e.save_stride) +
           " orientation=" + (e.orientation == PathOrientation::Forward ? "forward" : "reversed") +
           " potential=" + potential_desc);
  std::string header = "path";
  for (double t : e.times) header += ",t=" + fmt17(t);
  out.line(header);
  for (std::size_t i = 0; i < e.m_paths; ++i) {
    std::string row = std::to_string(i);
    for (std::size_t k = 0; k < e.times.size(); ++k) row += "," + fmt17(e.at(i, k));
    out.line(row);
  }
  out.close();
}

}  // namespace otto
