#include "perchsim/vehicle.hpp"

#include <algorithm>
#include <cmath>

#include "perchsim/section_sim.hpp"

namespace perchsim {

namespace {

constexpr double kMaxSweepMapping = 75.0 * M_PI / 180.0;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Rate-limited tracking toward a command, clamped to the position limits.
double advance_actuator(double current, double cmd, double rate, double lo, double hi,
                        double dt) {
  const double target = clamp(cmd, lo, hi);
  const double max_step = rate * dt;
  return current + clamp(target - current, -max_step, max_step);
}

}  // namespace

VehicleGeometry VehicleGeometry::standard() {
  VehicleGeometry g;
  const double half_span = 0.35;
  const double chord = 0.12;
  const int n_stations = 4;
  const double strip = half_span / n_stations;
  for (int i = 0; i < n_stations; ++i) {
    SliceDef s;
    s.station = (i + 0.5) * strip;
    s.strip_span = strip;
    s.chord = chord;
    s.mount_x = 0.01;  // unswept quarter chord just ahead of the CoM
    s.weight = 2.0;    // left/right pair
    s.is_wing = true;
    g.slices.push_back(s);
  }
  SliceDef tail;
  tail.station = 0.0;
  tail.strip_span = 0.24;
  tail.chord = 0.06;
  tail.mount_x = -0.35;
  tail.weight = 1.0;
  tail.is_wing = false;
  g.slices.push_back(tail);

  // Fuselage as a bluff-body drag surface at the CoM.
  g.drag_surfaces.push_back({{0.0, 0.0}, 0.004, 1.0});
  return g;
}

std::vector<SlicePlacement> assemble_slices(const VehicleGeometry& geom,
                                            const VehicleState& state,
                                            double sweep_rate, double elevator_rate) {
  std::vector<SlicePlacement> out;
  out.reserve(geom.slices.size());
  const Vec2 com{state.x, state.z};
  const Vec2 vel{state.xdot, state.zdot};

  bool clamped = false;
  double sweep = state.sweep_right;  // planar: left == right
  if (sweep < geom.limits.sweep_min || sweep > geom.limits.sweep_max) {
    sweep = clamp(sweep, geom.limits.sweep_min, geom.limits.sweep_max);
    clamped = true;
  }
  const double lambda = clamp(sweep, -kMaxSweepMapping, kMaxSweepMapping);
  const double sec = 1.0 / std::cos(lambda);
  const double tan_l = std::tan(lambda);

  for (const SliceDef& def : geom.slices) {
    SlicePlacement p;
    p.strip_span = def.strip_span;
    p.weight = def.weight;
    p.clamped = clamped;

    double angle = state.theta;
    double omega = state.thetadot;
    double x_body;     // midchord offset from the CoM, +forward
    double x_body_dot = 0.0;
    if (def.is_wing) {
      p.chord = def.chord * sec;
      const double qc = def.mount_x + def.station * tan_l;
      x_body = qc - 0.25 * p.chord;
      // Geometric motion of the section as the sweep actuates.
      x_body_dot = (def.station * sec * sec - 0.25 * def.chord * sec * tan_l) * sweep_rate;
    } else {
      p.chord = def.chord;
      angle += state.elevator;
      omega += elevator_rate;
      x_body = def.mount_x - 0.25 * def.chord;
    }

    const Vec2 forward{std::cos(state.theta), std::sin(state.theta)};
    p.pose.ref = com + x_body * forward;
    p.pose.angle = angle;
    p.motion.ref_vel =
        vel + state.thetadot * x_body * forward.rot90() + x_body_dot * forward;
    p.motion.angular_rate = omega;
    out.push_back(p);
  }
  return out;
}

SectionLoads quasi_steady_contribution(const VehicleState& state,
                                       const VehicleGeometry& geom, const Vec2& wind) {
  SectionLoads loads;
  const Vec2 forward{std::cos(state.theta), std::sin(state.theta)};
  for (const DragSurface& s : geom.drag_surfaces) {
    const Vec2 r_world = s.offset.x * forward + s.offset.z * forward.rot90();
    const Vec2 v_point = Vec2{state.xdot, state.zdot} + state.thetadot * r_world.rot90();
    const Vec2 v_rel = v_point - wind;
    const double speed = v_rel.norm();
    if (speed <= 0.0) continue;
    const Vec2 f = -0.5 * geom.rho * speed * s.area * s.cd * v_rel;
    loads.force += f;
    loads.moment += r_world.cross(f);
  }
  return loads;
}

namespace {

// Flat-plate quasi-steady slice loads: Cl = pi*sin(2a), Cd = 2*sin^2(a)+cd0,
// applied at the quarter chord.
SectionLoads quasi_steady_slice(const SlicePlacement& p, double rho, const Vec2& wind) {
  SectionLoads loads;
  const Vec2 forward{std::cos(p.pose.angle), std::sin(p.pose.angle)};
  const Vec2 qc = p.pose.ref + 0.25 * p.chord * forward;
  const Vec2 v_point =
      p.motion.ref_vel + p.motion.angular_rate * (0.25 * p.chord) * forward.rot90();
  const Vec2 v_rel = v_point - wind;  // motion relative to the air
  const double speed = v_rel.norm();
  if (speed < 1e-9) return loads;

  const double alpha = wrap_angle(p.pose.angle - std::atan2(v_rel.z, v_rel.x));
  const double cl = M_PI * std::sin(2.0 * alpha);
  const double cd = 2.0 * std::sin(alpha) * std::sin(alpha) + 0.02;
  const double q = 0.5 * rho * speed * speed * p.chord * p.strip_span * p.weight;

  const Vec2 u_hat = v_rel / speed;
  const Vec2 lift_dir = u_hat.rot90();
  const Vec2 f = q * cl * lift_dir - q * cd * u_hat;
  loads.force += f;
  loads.moment += (qc - p.pose.ref).cross(f);
  return loads;
}

}  // namespace

StepDiagnostics step(const VehicleGeometry& geom, const SimParams& sim, AeroModel model,
                     VehicleState& state, FluidState& fluid, const ControlInput& input) {
  if (!state.finite()) throw SimulationDiverged("non-finite state entering step");
  const double dt = sim.dt;
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (fluid.slices.size() != geom.slices.size())
    throw std::invalid_argument("fluid slice count does not match geometry");

  // Actuator dynamics first; the new positions act over this step.
  const double sweep_prev = state.sweep_right;
  const double elev_prev = state.elevator;
  const double sweep_new =
      advance_actuator(sweep_prev, input.sweep_cmd, geom.limits.sweep_rate,
                       geom.limits.sweep_min, geom.limits.sweep_max, dt);
  const double elev_new =
      advance_actuator(elev_prev, input.elevator_cmd, geom.limits.elevator_rate,
                       geom.limits.elevator_min, geom.limits.elevator_max, dt);
  state.sweep_left = state.sweep_right = sweep_new;
  state.elevator = elev_new;
  const double sweep_rate = (sweep_new - sweep_prev) / dt;
  const double elev_rate = (elev_new - elev_prev) / dt;

  const auto placements = assemble_slices(geom, state, sweep_rate, elev_rate);

  StepDiagnostics diag;
  Vec2 force;
  double moment = 0.0;
  const Vec2 com{state.x, state.z};

  for (std::size_t k = 0; k < placements.size(); ++k) {
    const SlicePlacement& p = placements[k];
    SectionLoads slice_loads;
    if (model == AeroModel::QuasiSteady) {
      slice_loads = quasi_steady_slice(p, geom.rho, sim.wind);
    } else {
      SliceFluid& sf = fluid.slices[k];
      WingSection section(p.chord, sim.n_bound);
      const SectionStepResult r =
          advance_section(section, sf, p.pose, p.motion, sim, geom.rho);
      slice_loads = r.loads;
      slice_loads.force *= p.strip_span * p.weight;
      slice_loads.moment *= p.strip_span * p.weight;
      diag.max_bc_residual = std::max(diag.max_bc_residual, r.bc_residual);
      diag.wake_counts.push_back(static_cast<int>(sf.wake.particles.size()));
    }
    force += slice_loads.force;
    moment += slice_loads.moment + (p.pose.ref - com).cross(slice_loads.force);
  }

  const SectionLoads qs = quasi_steady_contribution(state, geom, sim.wind);
  force += qs.force;
  moment += qs.moment;

  if (sim.load_coeff_max > 0.0) {
    // The ceiling scales with the free-stream dynamic pressure at the CoM,
    // deliberately excluding rotation-induced slice speeds: a pitch-rate
    // transient must not raise its own force budget.
    double area = 0.0;
    double mean_chord = 0.0;
    for (const SlicePlacement& p : placements) {
      const double s = p.chord * p.strip_span * p.weight;
      area += s;
      mean_chord += s * p.chord;
    }
    if (area > 0.0) mean_chord /= area;
    const double v_rel = (Vec2{state.xdot, state.zdot} - sim.wind).norm();
    const double q_dyn = 0.5 * geom.rho * v_rel * v_rel;
    const double f_max = sim.load_coeff_max * q_dyn * area;
    const double m_max = f_max * mean_chord;
    const double f_norm = force.norm();
    if (f_norm > f_max && f_max > 0.0) force *= f_max / f_norm;
    moment = std::min(std::max(moment, -m_max), m_max);
  }

  force += Vec2{0.0, -geom.mass * geom.gravity};

  diag.force = force;
  diag.moment = moment;

  // Semi-implicit Euler.
  state.xdot += dt * force.x / geom.mass;
  state.zdot += dt * force.z / geom.mass;
  state.thetadot += dt * moment / geom.inertia_yy;
  state.x += dt * state.xdot;
  state.z += dt * state.zdot;
  state.theta += dt * state.thetadot;

  if (!state.finite()) throw SimulationDiverged("state diverged during step");
  return diag;
}

Trajectory run(const VehicleGeometry& geom, const SimParams& sim, AeroModel model,
               VehicleState state, FluidState fluid, const ControlSequence& controls,
               int n_steps, const SnapshotHook& hook) {
  if (n_steps < 0) throw std::invalid_argument("n_steps must be >= 0");
  Trajectory traj;
  traj.points.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.points.push_back({0.0, state, controls.sample(0.0), {}, 0.0, {}});
  if (hook) hook(0, fluid);

  for (int i = 0; i < n_steps; ++i) {
    const double t = i * sim.dt;
    const ControlInput u = controls.sample(t);
    traj.points.back().input = u;
    StepDiagnostics diag;
    try {
      diag = step(geom, sim, model, state, fluid, u);
    } catch (const SimulationDiverged&) {
      traj.diverged = true;
      return traj;
    } catch (const SolveError&) {
      traj.diverged = true;
      return traj;
    } catch (const SingularityError&) {
      // A wake particle drifted exactly onto a bound vortex; the state is as
      // unusable as a blown-up one.
      traj.diverged = true;
      return traj;
    }
    traj.points.push_back({t + sim.dt, state, controls.sample(t + sim.dt), diag.force,
                           diag.moment, diag.wake_counts});
    if (hook) hook(i + 1, fluid);
  }
  return traj;
}

}  // namespace perchsim
