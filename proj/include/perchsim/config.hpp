#pragma once

#include <string>

#include "perchsim/mppi.hpp"
#include "perchsim/tvlqr.hpp"
#include "perchsim/vehicle.hpp"

namespace perchsim {

enum class WingMode { Fixed, Morphing };

// The four study configurations: wing actuation x aerodynamic model.
struct ScenarioMode {
  WingMode wing{WingMode::Morphing};
  AeroModel model{AeroModel::Unsteady};
};

struct AblationParams {
  int seeds{10};
  double perturb_pos{0.05};    // m, uniform on each axis
  double perturb_speed{0.3};   // m/s, uniform on launch speed
  // Reduced planner budget per ablation cell (a 4 x seeds grid of full plans).
  int samples{48};
  int iterations{30};
};

// Fluid resolution used inside planner rollouts and feedback linearization.
// Far coarser than the simulation defaults: the planner evaluates thousands
// of rollouts and only needs the cost landscape, not converged loads.
struct PlannerFidelity {
  int n_bound{4};
  double dt{0.015};
  double merge_threshold{8e-3};
};

// Full scenario: geometry, fluid resolution, launch and target states,
// planner and feedback settings, and the study mode.
struct ScenarioConfig {
  VehicleGeometry geometry{VehicleGeometry::standard()};
  SimParams sim;
  VehicleState launch{.xdot = 7.0};
  TargetSpec target;
  MppiParams planner;
  PlannerFidelity planner_fluid;
  TvlqrParams feedback;
  ScenarioMode mode;
  AblationParams ablation;
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Key/value sections ([vehicle], [fluid], [launch], [target], [planner],
// [feedback], [mode], [ablation]); '#' and ';' start comments. Unknown
// sections or keys and malformed values are rejected with line numbers;
// omitted keys keep their defaults. Validation errors name the field.
ScenarioConfig parse_config(const std::string& text);

// Emits every key in a fixed order at full float precision, so
// parse -> serialize -> parse is a fixed point.
std::string serialize_config(const ScenarioConfig& config);

}  // namespace perchsim
