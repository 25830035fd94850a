#pragma once

#include <string>
#include <vector>

#include "perchsim/config.hpp"
#include "perchsim/mppi.hpp"
#include "perchsim/tvlqr.hpp"

namespace perchsim {

// Fluid parameters used inside planner rollouts and feedback linearization:
// the scenario fluid block with the coarse planner resolution applied.
SimParams planner_sim_params(const ScenarioConfig& config);

struct PlanArtifacts {
  PlanResult plan;
  GainSchedule gains;
};

// MPPI from all-zero controls with the scenario's internal model, then gain
// synthesis along the resulting nominal.
PlanArtifacts plan_scenario(const ScenarioConfig& config);

struct AblationMode {
  WingMode wing{WingMode::Fixed};
  AeroModel model{AeroModel::QuasiSteady};
  std::string name;
};

struct AblationModeResult {
  AblationMode mode;
  std::vector<double> costs;  // per seed; infinity marks a diverged run
  int diverged{0};
  bool failed{false};  // every run diverged
  double mean{0.0};
  double stddev{0.0};
  double norm_mean{0.0};  // relative to the baseline (fixed/quasi-steady) mean
  double norm_std{0.0};
};

struct AblationReport {
  std::vector<AblationModeResult> modes;  // baseline first
  double baseline_mean{0.0};
};

// The four-mode study: for each mode and seed, perturb the launch state,
// plan and synthesize feedback with the mode's internal model, execute
// closed-loop against the unsteady simulator, and score the Eq-style minimum
// cost. Perturbations depend only on the seed, so modes face identical
// launch conditions. Cells may run in parallel; results merge by index.
AblationReport run_ablation(const ScenarioConfig& config, int threads = 1);

std::string ablation_table(const AblationReport& report);

}  // namespace perchsim
