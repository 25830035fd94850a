#include "perchsim/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace perchsim {

namespace {

constexpr std::uint64_t kSeedStride = 0x9e3779b97f4a7c15ull;

struct CellResult {
  double cost{std::numeric_limits<double>::infinity()};
  bool diverged{false};
};

CellResult cell_cost(const ScenarioConfig& base, const AblationMode& mode,
                     int mode_index, int seed_index) {
  ScenarioConfig c = base;
  c.mode.wing = mode.wing;
  c.mode.model = mode.model;
  c.planner.samples = base.ablation.samples;
  c.planner.iterations = base.ablation.iterations;
  c.planner.sweep_enabled = mode.wing == WingMode::Morphing;
  c.feedback.sweep_enabled = c.planner.sweep_enabled;
  c.planner.seed =
      base.planner.seed + 1000003ull * static_cast<std::uint64_t>(mode_index + 1) +
      static_cast<std::uint64_t>(seed_index);

  // Launch perturbation depends only on the seed index, so each mode faces
  // the same set of initial conditions.
  std::mt19937_64 rng(base.planner.seed ^
                      (kSeedStride * static_cast<std::uint64_t>(seed_index + 1)));
  std::uniform_real_distribution<double> pos(-base.ablation.perturb_pos,
                                             base.ablation.perturb_pos);
  std::uniform_real_distribution<double> spd(-base.ablation.perturb_speed,
                                             base.ablation.perturb_speed);
  c.launch.x += pos(rng);
  c.launch.z += pos(rng);
  c.launch.xdot += spd(rng);

  CellResult out;
  try {
    const PlanArtifacts art = plan_scenario(c);
    // Ground truth for every mode is the unsteady simulator at the planner
    // resolution: the fidelity the nominals live in, so tracking error
    // reflects the internal model, not the grid.
    const SimParams truth_sim = planner_sim_params(base);
    const int n_steps =
        static_cast<int>(std::round(c.planner.horizon / truth_sim.dt));
    const Trajectory truth =
        run_closed_loop(base.geometry, truth_sim, AeroModel::Unsteady, c.launch,
                        FluidState::zeros(base.geometry), art.gains, n_steps);
    // A maneuver that blows up mid-flight still visited states; its minimum
    // cost over the partial trajectory is the honest score for the run.
    out.cost = trajectory_cost(truth, c.target);
    out.diverged = truth.diverged;
  } catch (const std::exception&) {
    out.diverged = true;
  }
  return out;
}

}  // namespace

SimParams planner_sim_params(const ScenarioConfig& config) {
  SimParams sim = config.sim;
  sim.n_bound = config.planner_fluid.n_bound;
  sim.dt = config.planner_fluid.dt;
  sim.merge_threshold = config.planner_fluid.merge_threshold;
  return sim;
}

PlanArtifacts plan_scenario(const ScenarioConfig& config) {
  const SimParams psim = planner_sim_params(config);
  PlanArtifacts out;
  out.plan = plan(config.geometry, psim, config.mode.model, config.launch,
                  config.target, config.planner);
  out.gains = synthesize_gains(config.geometry, psim, config.mode.model,
                               config.launch, out.plan.controls, config.feedback);
  return out;
}

AblationReport run_ablation(const ScenarioConfig& config, int threads) {
  const std::vector<AblationMode> modes = {
      {WingMode::Fixed, AeroModel::QuasiSteady, "fixed/quasi-steady"},
      {WingMode::Fixed, AeroModel::Unsteady, "fixed/unsteady"},
      {WingMode::Morphing, AeroModel::QuasiSteady, "morphing/quasi-steady"},
      {WingMode::Morphing, AeroModel::Unsteady, "morphing/unsteady"},
  };
  const int n_seeds = config.ablation.seeds;
  const int n_cells = static_cast<int>(modes.size()) * n_seeds;

  std::vector<CellResult> cells(static_cast<std::size_t>(n_cells));
  auto eval_range = [&](int lo, int hi) {
    for (int cell = lo; cell < hi; ++cell) {
      const int m = cell / n_seeds;
      const int s = cell % n_seeds;
      cells[static_cast<std::size_t>(cell)] = cell_cost(config, modes[m], m, s);
    }
  };
  const int n_threads = std::max(1, std::min(threads, n_cells));
  if (n_threads == 1) {
    eval_range(0, n_cells);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n_cells + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back(eval_range, t * chunk, std::min(n_cells, (t + 1) * chunk));
    for (std::thread& th : pool) th.join();
  }

  AblationReport report;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    AblationModeResult row;
    row.mode = modes[m];
    double sum = 0.0;
    int alive = 0;
    for (int s = 0; s < n_seeds; ++s) {
      const CellResult& cell = cells[m * static_cast<std::size_t>(n_seeds) +
                                     static_cast<std::size_t>(s)];
      row.costs.push_back(cell.cost);
      if (cell.diverged) ++row.diverged;
      if (std::isfinite(cell.cost)) {
        sum += cell.cost;
        ++alive;
      }
    }
    if (alive == 0) {
      row.failed = true;
    } else {
      row.mean = sum / alive;
      double var = 0.0;
      for (double c : row.costs)
        if (std::isfinite(c)) var += (c - row.mean) * (c - row.mean);
      row.stddev = std::sqrt(var / alive);
    }
    report.modes.push_back(row);
  }

  report.baseline_mean = report.modes.front().mean;
  for (AblationModeResult& row : report.modes) {
    if (row.failed || !(report.baseline_mean > 0.0)) continue;
    row.norm_mean = row.mean / report.baseline_mean;
    row.norm_std = row.stddev / report.baseline_mean;
  }
  return report;
}

std::string ablation_table(const AblationReport& report) {
  std::ostringstream out;
  out << "# perch cost by configuration, normalized by the fixed/quasi-steady "
         "baseline mean\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %5s %9s %14s %14s %11s %11s\n", "mode",
                "runs", "diverged", "mean_cost", "std_cost", "norm_mean",
                "norm_std");
  out << line;
  for (const AblationModeResult& row : report.modes) {
    if (row.failed) {
      std::snprintf(line, sizeof(line), "%-24s %5zu %9d %14s %14s %11s %11s\n",
                    row.mode.name.c_str(), row.costs.size(), row.diverged, "failed",
                    "-", "-", "-");
    } else {
      std::snprintf(line, sizeof(line),
                    "%-24s %5zu %9d %14.6g %14.6g %11.4g %11.4g\n",
                    row.mode.name.c_str(), row.costs.size(), row.diverged, row.mean,
                    row.stddev, row.norm_mean, row.norm_std);
    }
    out << line;
  }
  return out.str();
}

}  // namespace perchsim
