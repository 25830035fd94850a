#pragma once

#include <string>
#include <vector>

#include "perchsim/mppi.hpp"
#include "perchsim/tvlqr.hpp"
#include "perchsim/vehicle.hpp"

namespace perchsim {

// All writers emit deterministic delimited text: a '#'-comment preamble where
// needed, one header row naming every column with units, then one record per
// line at full double round-trip precision (%.17g). No timestamps.

// Columns: time, planar state, actuators, applied command, aggregate loads,
// then one wake-count column per slice.
std::string trajectory_csv(const Trajectory& traj, int n_slices);

// One record per particle: step index, slice index, strength, position.
struct WakeSnapshot {
  int step{0};
  FluidState fluid;
};
std::string wake_snapshot_csv(const std::vector<WakeSnapshot>& snapshots);

std::string control_sequence_csv(const ControlSequence& controls);
ControlSequence parse_control_sequence(const std::string& text);

struct SerializeError : std::runtime_error {
  explicit SerializeError(const std::string& what) : std::runtime_error(what) {}
};

std::string gain_schedule_csv(const GainSchedule& gains);
GainSchedule parse_gain_schedule(const std::string& text);

// Per-iteration planner cost curve; iteration -1 row is the zero-control cost.
std::string convergence_csv(const PlanResult& plan);

}  // namespace perchsim
