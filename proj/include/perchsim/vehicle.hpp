#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "perchsim/vec2.hpp"
#include "perchsim/vortex.hpp"
#include "perchsim/wake.hpp"
#include "perchsim/wing.hpp"

namespace perchsim {

// Planar rigid-body state plus actuator positions. theta is pitch, CCW
// positive (nose up for flight toward +x). Out-of-plane states are not
// represented; left/right sweep stay equal in planar mode.
struct VehicleState {
  double x{0.0}, z{0.0}, theta{0.0};
  double xdot{0.0}, zdot{0.0}, thetadot{0.0};
  double sweep_left{0.0}, sweep_right{0.0};  // rad, positive toward the nose
  double elevator{0.0};                      // rad, positive = trailing edge down

  std::array<double, 6> planar() const { return {x, z, theta, xdot, zdot, thetadot}; }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(z) && std::isfinite(theta) &&
           std::isfinite(xdot) && std::isfinite(zdot) && std::isfinite(thetadot) &&
           std::isfinite(sweep_left) && std::isfinite(sweep_right) &&
           std::isfinite(elevator);
  }
};

struct ControlInput {
  double elevator_cmd{0.0};
  double sweep_cmd{0.0};
};

struct ActuatorLimits {
  double sweep_min{-M_PI / 2.0};  // 90 deg toward the tail
  double sweep_max{M_PI / 6.0};   // 30 deg toward the nose
  double sweep_rate{(M_PI / 2.0 + M_PI / 6.0) / 0.2};  // full range in 0.2 s
  double elevator_min{-M_PI / 6.0};
  double elevator_max{M_PI / 6.0};
  double elevator_rate{(M_PI / 3.0) / 0.1};
};

// One 2D strip of the vehicle. Wing strips mirror across the fuselage, so a
// strip with weight 2 stands for the matching left/right pair.
struct SliceDef {
  double station{0.0};     // spanwise distance from the root, m (>= 0)
  double strip_span{0.1};  // m
  double chord{0.12};      // unswept chord, m
  double mount_x{0.0};     // unswept quarter-chord offset from the CoM, +forward
  double weight{2.0};      // load multiplicity
  bool is_wing{true};      // wing strips sweep; the elevator strip deflects
};

struct DragSurface {
  Vec2 offset;      // body frame, from CoM
  double area{0.0};  // m^2
  double cd{1.0};
};

struct VehicleGeometry {
  double mass{0.200};        // kg
  double inertia_yy{0.004};  // kg m^2
  double rho{1.225};         // kg/m^3
  double gravity{9.81};
  std::vector<SliceDef> slices;
  std::vector<DragSurface> drag_surfaces;
  ActuatorLimits limits;

  // 70 cm span, 200 g morphing-sweep airframe: four wing stations (each
  // standing for a mirrored pair) plus one elevator strip.
  static VehicleGeometry standard();
};

struct SimParams {
  int n_bound{16};
  double dt{0.005};              // s
  double r_core_frac{0.01};      // core radius as a fraction of chord
  double shed_fraction{1.0 / 3.0};
  double lesp_crit{0.14};        // critical leading-edge suction parameter
  double merge_threshold{2e-3};  // m/s
  double merge_radius_frac{0.5};     // candidate radius as a fraction of chord
  double merge_exclusion_chords{2.0};
  // Aerodynamic loads are capped at load_coeff_max times the instantaneous
  // dynamic pressure and reference area. Discrete shedding can produce
  // single-step impulsive loads far beyond any physical force coefficient;
  // the cap saturates those spikes instead of letting one bad step throw
  // the body integrator. Set <= 0 to disable.
  double load_coeff_max{6.0};
  ConvectionScheme scheme{ConvectionScheme::Euler};
  Vec2 wind;  // ambient wind, world frame

  KernelConfig kernel_for(double chord) const { return {r_core_frac * chord}; }
};

enum class AeroModel { Unsteady, QuasiSteady };

// Per-slice aerodynamic memory. Copyable; a deep copy snapshots the whole
// fluid state.
struct SliceFluid {
  Wake wake;
  std::vector<double> prev_cumulative;
  double prev_le_strength{0.0};
  std::optional<Vec2> prev_shed_le;
  std::optional<Vec2> prev_shed_te;
  double gamma_total_ref{0.0};  // conserved total circulation for this slice
};

struct FluidState {
  std::vector<SliceFluid> slices;

  static FluidState zeros(const VehicleGeometry& geom) {
    FluidState f;
    f.slices.resize(geom.slices.size());
    return f;
  }
};

struct SlicePlacement {
  double chord{0.0};  // streamwise (swept) chord
  SectionPose pose;   // midchord reference
  SectionMotion motion;
  double strip_span{0.0};
  double weight{1.0};
  bool clamped{false};  // sweep was outside actuator limits
};

// Maps vehicle pose + sweep onto 2D section placements. Sweeping by lambda
// stretches the streamwise chord by 1/cos(lambda) and shifts the quarter
// chord by station * tan(lambda) about the root. Rates carry the geometric
// motion of the section due to sweep and elevator actuation.
std::vector<SlicePlacement> assemble_slices(const VehicleGeometry& geom,
                                            const VehicleState& state,
                                            double sweep_rate = 0.0,
                                            double elevator_rate = 0.0);

// Flat-plate quasi-steady drag on the non-lifting surfaces.
SectionLoads quasi_steady_contribution(const VehicleState& state,
                                       const VehicleGeometry& geom, const Vec2& wind);

struct StepDiagnostics {
  Vec2 force;        // total aero + gravity force, N
  double moment{0.0};  // about the CoM, N m
  double max_bc_residual{0.0};
  std::vector<int> wake_counts;
};

struct SimulationDiverged : std::runtime_error {
  explicit SimulationDiverged(const std::string& what) : std::runtime_error(what) {}
};

// One coupled fluid-body step (semi-implicit Euler on the rigid body). The
// quasi-steady model variant leaves the fluid untouched.
StepDiagnostics step(const VehicleGeometry& geom, const SimParams& sim, AeroModel model,
                     VehicleState& state, FluidState& fluid, const ControlInput& input);

// Time-indexed control knots, zero-order hold.
struct ControlSequence {
  double knot_dt{0.05};
  std::vector<ControlInput> knots;

  double horizon() const { return knot_dt * static_cast<double>(knots.size()); }
  ControlInput sample(double t) const {
    if (knots.empty()) return {};
    auto i = static_cast<std::size_t>(std::max(0.0, t / knot_dt));
    if (i >= knots.size()) i = knots.size() - 1;
    return knots[i];
  }
};

struct TrajectoryPoint {
  double t{0.0};
  VehicleState state;
  ControlInput input;  // input applied over the step starting here
  Vec2 force;
  double moment{0.0};
  std::vector<int> wake_counts;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  bool diverged{false};

  bool empty() const { return points.empty(); }
};

using SnapshotHook = std::function<void(int step_index, const FluidState&)>;

// Repeated stepping over n_steps with zero-order-hold controls. On divergence
// the partial trajectory is returned with diverged = true.
Trajectory run(const VehicleGeometry& geom, const SimParams& sim, AeroModel model,
               VehicleState state, FluidState fluid, const ControlSequence& controls,
               int n_steps, const SnapshotHook& hook = {});

}  // namespace perchsim
