#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "perchsim/vehicle.hpp"

namespace perchsim {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat62 = Eigen::Matrix<double, 6, 2>;
using Mat26 = Eigen::Matrix<double, 2, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Discrete map over one knot interval: x_next = F(x, u, knot_index) on the
// 6 planar states (x, z, theta, xdot, zdot, thetadot). The vehicle dynamics
// and analytic test plants both fit this shape.
using KnotDynamics =
    std::function<std::array<double, 6>(const std::array<double, 6>&,
                                        const ControlInput&, int)>;

struct LinearizationKnot {
  double t{0.0};
  Mat6 a{Mat6::Zero()};
  Mat62 b{Mat62::Zero()};
  VehicleState state;  // nominal at the knot
  ControlInput input;  // nominal over the interval
};

struct LinearizationError : std::runtime_error {
  explicit LinearizationError(const std::string& what) : std::runtime_error(what) {}
};

struct TvlqrParams {
  double knot_dt{0.05};
  double eps{1e-4};  // central-difference step per channel
  // Model the finite differences run through. The unsteady map is effectively
  // chaotic over a knot (edge shedding switches discontinuously), so its
  // difference quotients are noise; the quasi-steady surrogate about the same
  // nominal gives smooth Jacobians and usable gains.
  AeroModel linearization_model{AeroModel::QuasiSteady};
  Mat6 q{(Vec6() << 10, 10, 10, 1, 1, 1).finished().asDiagonal()};
  Eigen::Matrix2d r{Eigen::Matrix2d::Identity()};
  Mat6 qf{10.0 * Mat6((Vec6() << 10, 10, 10, 1, 1, 1).finished().asDiagonal())};
  bool sweep_enabled{true};  // false zeroes the sweep column and gain row
};

// Central-difference Jacobians of `dynamics` about each knot of the nominal:
// A, B columns = (F(x + eps e_i) - F(x - eps e_i)) / (2 eps). A non-finite
// rollout retries with eps/10; persistent failure raises LinearizationError.
std::vector<LinearizationKnot> linearize_fd(const KnotDynamics& dynamics,
                                            const std::vector<VehicleState>& states,
                                            const std::vector<ControlInput>& inputs,
                                            double knot_dt, double eps);

// Vehicle-specific knot dynamics: replays the nominal once under `model`,
// deep-copies the fluid state at each knot, and exposes the one-knot map
// under `fd_model` starting from those snapshots. Returns the nominal knot
// states/inputs alongside the dynamics closure.
struct VehicleKnotModel {
  KnotDynamics dynamics;
  std::vector<VehicleState> states;
  std::vector<ControlInput> inputs;
  // Nominal state at every integrator step of the replay (size n_steps + 1),
  // for per-step deviation feedback between knots.
  std::vector<VehicleState> step_states;
  double step_dt{0.0};
};
VehicleKnotModel make_vehicle_knot_model(const VehicleGeometry& geom,
                                         const SimParams& sim, AeroModel model,
                                         const VehicleState& initial,
                                         const ControlSequence& controls,
                                         double knot_dt, int n_knots,
                                         AeroModel fd_model);

struct GainKnot {
  double t{0.0};
  Mat26 k{Mat26::Zero()};
  VehicleState state;  // nominal to regulate about
  ControlInput input;  // nominal feedforward
};

struct GainSchedule {
  std::vector<GainKnot> knots;  // zero-order hold
  // Full-resolution nominal controls. The feedback correction is held over a
  // knot but rides on the per-step nominal, so a zero deviation replays the
  // planned open loop exactly. Empty falls back to the knot input.
  ControlSequence nominal;
  bool psd_floor_applied{false};
};

// Discrete backward Riccati recursion from q_f:
//   K_k = (R + B' S B)^{-1} B' S A,  S <- Q + A' S (A - B K_k)
// with S symmetrized each step and floored at PSD if numerics drift.
GainSchedule riccati_backward(const std::vector<LinearizationKnot>& knots,
                              const Mat6& q, const Eigen::Matrix2d& r, const Mat6& qf);

// u(t) = u_nominal(t) - K(t) (state - nominal state), pitch error wrapped,
// clamped to the actuator limits. Outside the horizon the last knot holds.
ControlInput feedback_command(const VehicleState& state, double t,
                              const GainSchedule& gains, const ActuatorLimits& limits);

// MPPI nominal -> finite-difference linearization -> gain schedule.
GainSchedule synthesize_gains(const VehicleGeometry& geom, const SimParams& sim,
                              AeroModel model, const VehicleState& initial,
                              const ControlSequence& controls,
                              const TvlqrParams& params);

// Full closed-loop execution under the gain schedule.
Trajectory run_closed_loop(const VehicleGeometry& geom, const SimParams& sim,
                           AeroModel model, VehicleState state, FluidState fluid,
                           const GainSchedule& gains, int n_steps);

}  // namespace perchsim
