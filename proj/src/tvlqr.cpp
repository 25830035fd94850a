#include "perchsim/tvlqr.hpp"

#include <cmath>
#include <memory>

namespace perchsim {

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

bool all_finite(const std::array<double, 6>& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

std::array<double, 6> nan_state() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {nan, nan, nan, nan, nan, nan};
}

// One central-difference pass at a single eps; returns false on any
// non-finite rollout.
bool try_jacobians(const KnotDynamics& dynamics, const std::array<double, 6>& x0,
                   const ControlInput& u0, int knot, double eps, Mat6& a, Mat62& b) {
  for (int i = 0; i < 6; ++i) {
    std::array<double, 6> xp = x0, xm = x0;
    xp[i] += eps;
    xm[i] -= eps;
    const auto fp = dynamics(xp, u0, knot);
    const auto fm = dynamics(xm, u0, knot);
    if (!all_finite(fp) || !all_finite(fm)) return false;
    for (int r = 0; r < 6; ++r) a(r, i) = (fp[r] - fm[r]) / (2.0 * eps);
  }
  for (int j = 0; j < 2; ++j) {
    ControlInput up = u0, um = u0;
    if (j == 0) {
      up.elevator_cmd += eps;
      um.elevator_cmd -= eps;
    } else {
      up.sweep_cmd += eps;
      um.sweep_cmd -= eps;
    }
    const auto fp = dynamics(x0, up, knot);
    const auto fm = dynamics(x0, um, knot);
    if (!all_finite(fp) || !all_finite(fm)) return false;
    for (int r = 0; r < 6; ++r) b(r, j) = (fp[r] - fm[r]) / (2.0 * eps);
  }
  return a.allFinite() && b.allFinite();
}

}  // namespace

std::vector<LinearizationKnot> linearize_fd(const KnotDynamics& dynamics,
                                            const std::vector<VehicleState>& states,
                                            const std::vector<ControlInput>& inputs,
                                            double knot_dt, double eps) {
  if (states.size() != inputs.size())
    throw std::invalid_argument("state/input knot count mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");

  std::vector<LinearizationKnot> out(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    LinearizationKnot& knot = out[k];
    knot.t = static_cast<double>(k) * knot_dt;
    knot.state = states[k];
    knot.input = inputs[k];
    const std::array<double, 6> x0 = states[k].planar();
    bool ok = false;
    for (double e = eps; e >= eps / 100.0 - 1e-300; e /= 10.0) {
      if (try_jacobians(dynamics, x0, inputs[k], static_cast<int>(k), e, knot.a,
                        knot.b)) {
        ok = true;
        break;
      }
    }
    if (!ok)
      throw LinearizationError("finite-difference rollout diverged at knot " +
                               std::to_string(k));
  }
  return out;
}

VehicleKnotModel make_vehicle_knot_model(const VehicleGeometry& geom,
                                         const SimParams& sim, AeroModel model,
                                         const VehicleState& initial,
                                         const ControlSequence& controls,
                                         double knot_dt, int n_knots,
                                         AeroModel fd_model) {
  // Knot k spans the integrator steps whose times round into
  // [k knot_dt, (k+1) knot_dt); replaying on this grid reproduces the open
  // loop rollout exactly, so the snapshots sit on the verified trajectory.
  auto knot_steps = std::make_shared<std::vector<int>>();
  for (int k = 0; k < n_knots; ++k) {
    const int begin = static_cast<int>(std::round(k * knot_dt / sim.dt));
    const int end = static_cast<int>(std::round((k + 1) * knot_dt / sim.dt));
    knot_steps->push_back(std::max(1, end - begin));
  }

  // Replay the nominal once, snapshotting the full fluid state at each knot
  // so every perturbation rollout starts from an identical wake.
  auto snapshots = std::make_shared<std::vector<FluidState>>();
  VehicleKnotModel out;
  VehicleState state = initial;
  FluidState fluid = FluidState::zeros(geom);
  int step_index = 0;
  for (int k = 0; k < n_knots; ++k) {
    snapshots->push_back(fluid);  // deep copy
    out.states.push_back(state);
    out.inputs.push_back(controls.sample(k * knot_dt));
    for (int i = 0; i < (*knot_steps)[static_cast<std::size_t>(k)]; ++i) {
      // Times match run() bit for bit, so a nominal that survived the open
      // loop rollout survives the replay too.
      const double t = step_index * sim.dt;
      try {
        step(geom, sim, model, state, fluid, controls.sample(t));
      } catch (const std::exception& e) {
        throw LinearizationError("nominal replay failed at knot " +
                                 std::to_string(k) + ": " + e.what());
      }
      ++step_index;
    }
  }

  out.dynamics = [geom, sim, fd_model, snapshots, knot_steps,
                  nominal = out.states](const std::array<double, 6>& x,
                                        const ControlInput& u, int knot) {
    VehicleState s = nominal[static_cast<std::size_t>(knot)];
    s.x = x[0];
    s.z = x[1];
    s.theta = x[2];
    s.xdot = x[3];
    s.zdot = x[4];
    s.thetadot = x[5];
    FluidState fluid = (*snapshots)[static_cast<std::size_t>(knot)];
    const int n = (*knot_steps)[static_cast<std::size_t>(knot)];
    try {
      for (int i = 0; i < n; ++i) step(geom, sim, fd_model, s, fluid, u);
    } catch (const SimulationDiverged&) {
      return nan_state();
    } catch (const SolveError&) {
      return nan_state();
    } catch (const SingularityError&) {
      return nan_state();
    }
    return s.planar();
  };
  return out;
}

GainSchedule riccati_backward(const std::vector<LinearizationKnot>& knots,
                              const Mat6& q, const Eigen::Matrix2d& r, const Mat6& qf) {
  Eigen::LLT<Eigen::Matrix2d> r_chol(r);
  if (r_chol.info() != Eigen::Success)
    throw std::invalid_argument("R must be positive definite");

  GainSchedule sched;
  sched.knots.resize(knots.size());
  Mat6 s = 0.5 * (qf + qf.transpose());
  for (int k = static_cast<int>(knots.size()) - 1; k >= 0; --k) {
    const Mat6& a = knots[static_cast<std::size_t>(k)].a;
    const Mat62& b = knots[static_cast<std::size_t>(k)].b;
    const Eigen::Matrix2d denom = r + b.transpose() * s * b;
    const Mat26 gain = denom.ldlt().solve(b.transpose() * s * a);
    s = q + a.transpose() * s * (a - b * gain);
    s = 0.5 * (s + s.transpose());

    Eigen::SelfAdjointEigenSolver<Mat6> eig(s);
    if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, s.norm())) {
      const Vec6 floored = eig.eigenvalues().cwiseMax(0.0);
      s = eig.eigenvectors() * floored.asDiagonal() * eig.eigenvectors().transpose();
      s = 0.5 * (s + s.transpose());
      sched.psd_floor_applied = true;
    }

    GainKnot& gk = sched.knots[static_cast<std::size_t>(k)];
    gk.t = knots[static_cast<std::size_t>(k)].t;
    gk.k = gain;
    gk.state = knots[static_cast<std::size_t>(k)].state;
    gk.input = knots[static_cast<std::size_t>(k)].input;
  }
  return sched;
}

ControlInput feedback_command(const VehicleState& state, double t,
                              const GainSchedule& gains, const ActuatorLimits& limits) {
  if (gains.knots.empty()) throw std::invalid_argument("empty gain schedule");
  const double knot_dt = gains.knots.size() > 1
                             ? gains.knots[1].t - gains.knots[0].t
                             : std::numeric_limits<double>::infinity();
  auto idx = static_cast<std::size_t>(
      std::max(0.0, (t - gains.knots[0].t) / knot_dt));
  if (idx >= gains.knots.size()) idx = gains.knots.size() - 1;
  const GainKnot& gk = gains.knots[idx];

  Vec6 err;
  err << state.x - gk.state.x, state.z - gk.state.z,
      wrap_angle(state.theta - gk.state.theta), state.xdot - gk.state.xdot,
      state.zdot - gk.state.zdot, state.thetadot - gk.state.thetadot;
  const Eigen::Vector2d du = gk.k * err;
  ControlInput u;
  u.elevator_cmd = clamp(gk.input.elevator_cmd - du[0], limits.elevator_min,
                         limits.elevator_max);
  u.sweep_cmd = clamp(gk.input.sweep_cmd - du[1], limits.sweep_min, limits.sweep_max);
  return u;
}

GainSchedule synthesize_gains(const VehicleGeometry& geom, const SimParams& sim,
                              AeroModel model, const VehicleState& initial,
                              const ControlSequence& controls,
                              const TvlqrParams& params) {
  const double horizon = controls.horizon();
  const int n_knots =
      std::max(1, static_cast<int>(std::round(horizon / params.knot_dt)));
  VehicleKnotModel knot_model =
      make_vehicle_knot_model(geom, sim, model, initial, controls,
                              params.knot_dt, n_knots, params.linearization_model);
  std::vector<LinearizationKnot> lin = linearize_fd(
      knot_model.dynamics, knot_model.states, knot_model.inputs, params.knot_dt,
      params.eps);
  if (!params.sweep_enabled)
    for (LinearizationKnot& k : lin) k.b.col(1).setZero();
  GainSchedule sched = riccati_backward(lin, params.q, params.r, params.qf);
  sched.nominal = controls;
  return sched;
}

Trajectory run_closed_loop(const VehicleGeometry& geom, const SimParams& sim,
                           AeroModel model, VehicleState state, FluidState fluid,
                           const GainSchedule& gains, int n_steps) {
  Trajectory traj;
  traj.points.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.points.push_back({0.0, state, {}, {}, 0.0, {}});
  // Feedback is refreshed at knot boundaries and held over the knot, the
  // zero-order hold the linearization was built around. Knot boundaries are
  // mapped to integrator steps the same way the linearization replay mapped
  // them, so the deviation is measured against the nominal state at the very
  // step it was recorded; an off-by-one step here reads as a phantom error.
  std::size_t knot = gains.knots.size();  // forces a refresh at i = 0
  Eigen::Vector2d du = Eigen::Vector2d::Zero();
  for (int i = 0; i < n_steps; ++i) {
    const double t = i * sim.dt;
    std::size_t knot_now = 0;
    while (knot_now + 1 < gains.knots.size() &&
           i >= static_cast<int>(std::llround(gains.knots[knot_now + 1].t / sim.dt)))
      ++knot_now;
    if (knot_now != knot) {
      knot = knot_now;
      const GainKnot& gk = gains.knots[knot];
      Vec6 err;
      err << state.x - gk.state.x, state.z - gk.state.z,
          wrap_angle(state.theta - gk.state.theta), state.xdot - gk.state.xdot,
          state.zdot - gk.state.zdot, state.thetadot - gk.state.thetadot;
      du = gk.k * err;
    }
    const ControlInput base = gains.nominal.knots.empty()
                                  ? gains.knots[knot].input
                                  : gains.nominal.sample(t);
    ControlInput u;
    u.elevator_cmd = clamp(base.elevator_cmd - du[0], geom.limits.elevator_min,
                           geom.limits.elevator_max);
    u.sweep_cmd =
        clamp(base.sweep_cmd - du[1], geom.limits.sweep_min, geom.limits.sweep_max);
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
      traj.diverged = true;
      return traj;
    }
    traj.points.push_back(
        {t + sim.dt, state, {}, diag.force, diag.moment, diag.wake_counts});
  }
  return traj;
}

}  // namespace perchsim
