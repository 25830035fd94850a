#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "perchsim/vehicle.hpp"

namespace perchsim {

// Perch pose and velocity the planner steers toward.
struct TargetSpec {
  double x{3.5};
  double z{0.0};
  double pitch{M_PI / 4.0};  // rad
  double xdot{0.5};
  double zdot{-0.5};
  double pitchdot{0.0};

  bool finite() const {
    return std::isfinite(x) && std::isfinite(z) && std::isfinite(pitch) &&
           std::isfinite(xdot) && std::isfinite(zdot) && std::isfinite(pitchdot);
  }
};

struct MppiParams {
  int samples{128};      // K rollouts per iteration
  int iterations{50};
  double knot_dt{0.05};  // control knots at 20 Hz
  double horizon{1.5};   // s
  double sigma_elevator{5.0 * M_PI / 180.0};
  double sigma_sweep{6.0 * M_PI / 180.0};
  // Softmin temperature. <= 0 selects 0.05 x the zero-control cost at plan
  // time (a cost-scale-aware default).
  double lambda{0.0};
  std::uint64_t seed{0};
  bool sweep_enabled{true};  // false freezes the sweep channel (fixed wing)
  int threads{1};
};

// Minimum over the trajectory of the squared distance to the target:
//   |dx, dz, dtheta|^2 + 0.2 |dxdot, dzdot, dthetadot|^2
// with the pitch error wrapped to (-pi, pi].
double trajectory_cost(const Trajectory& traj, const TargetSpec& target);

// Zero-mean normal perturbations per knot per channel added to the nominal,
// clamped to the actuator position limits. Deterministic given the rng state.
std::vector<ControlSequence> sample_perturbations(const ControlSequence& nominal,
                                                  const MppiParams& params,
                                                  const ActuatorLimits& limits,
                                                  std::mt19937_64& rng);

struct MppiIterationStats {
  double best_sample_cost{0.0};
  ControlSequence best_sample;  // the rollout that achieved it
  double mean_cost{0.0};   // over non-diverged rollouts
  int diverged{0};
  double updated_cost{0.0};  // cost of the re-weighted nominal
};

struct MppiIterationError : std::runtime_error {
  explicit MppiIterationError(const std::string& what) : std::runtime_error(what) {}
};

// One MPPI update: K perturbed rollouts from identical initial conditions,
// exponential softmin weights w_k = exp(-(c_k - c_min)/lambda), nominal
// replaced by the per-knot weighted average. Throws MppiIterationError (with
// the nominal unchanged) if every rollout diverged.
MppiIterationStats mppi_iterate(ControlSequence& nominal, const VehicleGeometry& geom,
                                const SimParams& sim, AeroModel model,
                                const VehicleState& initial, const TargetSpec& target,
                                const MppiParams& params, double lambda,
                                std::mt19937_64& rng);

struct PlanIterationLog {
  int iteration{0};
  double best_cost{0.0};  // best-so-far, non-increasing
  double mean_cost{0.0};
};

struct PlanResult {
  ControlSequence controls;  // best-so-far sequence
  Trajectory nominal;        // rollout of `controls`
  double cost{0.0};
  double zero_control_cost{0.0};
  std::vector<PlanIterationLog> log;
};

// Full planning run from an all-zeros control sequence. The returned sequence
// is the best evaluated candidate across iterations, so the logged best cost
// is non-increasing even though the weighted-average update is not monotone.
PlanResult plan(const VehicleGeometry& geom, const SimParams& sim, AeroModel model,
                const VehicleState& initial, const TargetSpec& target,
                const MppiParams& params);

}  // namespace perchsim
