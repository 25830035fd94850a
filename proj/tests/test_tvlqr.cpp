#include <cmath>
#include <random>

#include "doctest.h"
#include "perchsim/mppi.hpp"
#include "perchsim/tvlqr.hpp"

using namespace perchsim;

namespace {

// Analytic discrete linear plant x' = A0 x + B0 u.
struct LinearPlant {
  Mat6 a0;
  Mat62 b0;

  KnotDynamics dynamics() const {
    return [a = a0, b = b0](const std::array<double, 6>& x, const ControlInput& u,
                            int) {
      Eigen::Map<const Vec6> xv(x.data());
      const Eigen::Vector2d uv{u.elevator_cmd, u.sweep_cmd};
      const Vec6 next = a * xv + b * uv;
      std::array<double, 6> out;
      for (int i = 0; i < 6; ++i) out[i] = next[i];
      return out;
    };
  }
};

LinearPlant stable_plant() {
  LinearPlant p;
  p.a0 = Mat6::Identity();
  // Double-integrator pairs plus light cross coupling.
  p.a0(0, 3) = p.a0(1, 4) = p.a0(2, 5) = 0.05;
  p.a0(3, 2) = 0.02;
  p.b0 = Mat62::Zero();
  p.b0(3, 0) = 0.05;
  p.b0(5, 0) = 0.10;
  p.b0(4, 1) = 0.05;
  p.b0(3, 1) = 0.03;
  return p;
}

std::vector<VehicleState> zero_states(int n) { return std::vector<VehicleState>(n); }
std::vector<ControlInput> zero_inputs(int n) { return std::vector<ControlInput>(n); }

}  // namespace

TEST_CASE("finite differences recover the Jacobians of a linear plant exactly") {
  const LinearPlant plant = stable_plant();
  const auto knots =
      linearize_fd(plant.dynamics(), zero_states(3), zero_inputs(3), 0.05, 1e-4);
  REQUIRE(knots.size() == 3);
  for (const LinearizationKnot& k : knots) {
    CHECK((k.a - plant.a0).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((k.b - plant.b0).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("halving eps shrinks the central-difference error quadratically") {
  // Mildly nonlinear map so the truncation error is visible.
  const KnotDynamics dyn = [](const std::array<double, 6>& x, const ControlInput& u,
                              int) {
    std::array<double, 6> out = x;
    out[3] += 0.1 * std::sin(x[2]) + 0.05 * u.elevator_cmd;
    out[2] += 0.2 * x[5] * x[5] * x[5] + 0.3 * x[5];
    return out;
  };
  const auto coarse = linearize_fd(dyn, zero_states(1), zero_inputs(1), 0.05, 0.2);
  const auto fine = linearize_fd(dyn, zero_states(1), zero_inputs(1), 0.05, 0.1);
  // d(theta')/d(thetadot) = 0.3 + 0.6 h^2 truncation term at the origin.
  const double err_coarse = std::abs(coarse[0].a(2, 5) - 0.3);
  const double err_fine = std::abs(fine[0].a(2, 5) - 0.3);
  CHECK(err_coarse / err_fine == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("one-step Riccati recursion matches the closed form") {
  LinearizationKnot knot;
  knot.a = Mat6::Identity();
  knot.b = Mat62::Zero();
  knot.b(0, 0) = 1.0;
  knot.b(1, 1) = 1.0;
  const GainSchedule sched = riccati_backward({knot}, Mat6::Identity(),
                                              Eigen::Matrix2d::Identity(),
                                              Mat6::Identity());
  REQUIRE(sched.knots.size() == 1);
  // K = (R + B' Qf B)^{-1} B' Qf A = 1/2 B'.
  Mat26 expect = Mat26::Zero();
  expect(0, 0) = 0.5;
  expect(1, 1) = 0.5;
  CHECK((sched.knots[0].k - expect).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("zero state and terminal weights give zero gains") {
  const LinearPlant plant = stable_plant();
  const auto lin =
      linearize_fd(plant.dynamics(), zero_states(10), zero_inputs(10), 0.05, 1e-4);
  const GainSchedule sched =
      riccati_backward(lin, Mat6::Zero(), Eigen::Matrix2d::Identity(), Mat6::Zero());
  for (const GainKnot& k : sched.knots)
    CHECK(k.k.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("long-horizon gains match an independent algebraic Riccati fixed point") {
  const LinearPlant plant = stable_plant();
  const int n = 3000;  // slow closed-loop modes need a long horizon to settle
  const auto lin =
      linearize_fd(plant.dynamics(), zero_states(n), zero_inputs(n), 0.05, 1e-4);
  const Mat6 q = Mat6::Identity();
  const Eigen::Matrix2d r = Eigen::Matrix2d::Identity();
  const GainSchedule sched = riccati_backward(lin, q, r, q);

  // Fixed-point iteration of the discrete algebraic Riccati equation, done
  // directly from the analytic matrices.
  const Mat6& a = plant.a0;
  const Mat62& b = plant.b0;
  Mat6 s = q;
  for (int i = 0; i < 20000; ++i) {
    const Mat6 next =
        q + a.transpose() * s * a -
        a.transpose() * s * b * (r + b.transpose() * s * b).inverse() *
            b.transpose() * s * a;
    if ((next - s).cwiseAbs().maxCoeff() < 1e-14) {
      s = next;
      break;
    }
    s = next;
  }
  const Mat26 k_inf = (r + b.transpose() * s * b).inverse() * b.transpose() * s * a;

  CHECK((sched.knots[0].k - k_inf).cwiseAbs().maxCoeff() <= 1e-6);
  // Early gains are stationary.
  CHECK((sched.knots[0].k - sched.knots[1].k).cwiseAbs().maxCoeff() <= 1e-8);
  // Closed loop is a contraction.
  const Mat6 acl = a - b * sched.knots[0].k;
  CHECK(acl.eigenvalues().cwiseAbs().maxCoeff() < 1.0);
}

TEST_CASE("feedback returns the nominal at zero error and clamps large errors") {
  GainSchedule sched;
  GainKnot gk;
  gk.t = 0.0;
  gk.k.setZero();
  gk.k(0, 1) = 2.0;  // elevator reacts to z error
  gk.input = {0.1, -0.2};
  gk.state.z = 1.0;
  sched.knots.push_back(gk);
  const ActuatorLimits limits;

  VehicleState on_nominal;
  on_nominal.z = 1.0;
  const ControlInput u0 = feedback_command(on_nominal, 0.0, sched, limits);
  CHECK(u0.elevator_cmd == doctest::Approx(0.1));
  CHECK(u0.sweep_cmd == doctest::Approx(-0.2));

  VehicleState high = on_nominal;
  high.z = 100.0;  // correction far beyond the stops
  const ControlInput u1 = feedback_command(high, 0.0, sched, limits);
  CHECK(u1.elevator_cmd == doctest::Approx(limits.elevator_min));

  VehicleState low = on_nominal;
  low.z = 0.9;
  const ControlInput u2 = feedback_command(low, 0.0, sched, limits);
  CHECK(u2.elevator_cmd == doctest::Approx(0.1 + 2.0 * 0.1));
}

TEST_CASE("feedback wraps the pitch error across the branch cut") {
  GainSchedule sched;
  GainKnot gk;
  gk.k.setZero();
  gk.k(0, 2) = 1.0;
  gk.state.theta = M_PI - 0.05;
  sched.knots.push_back(gk);
  VehicleState s;
  s.theta = -M_PI + 0.05;  // +0.1 rad of wrapped error
  const ControlInput u = feedback_command(s, 0.0, sched, ActuatorLimits{});
  CHECK(u.elevator_cmd == doctest::Approx(-0.1));
}

TEST_CASE("beyond the horizon the last gain knot holds") {
  GainSchedule sched;
  for (int i = 0; i < 3; ++i) {
    GainKnot gk;
    gk.t = 0.05 * i;
    gk.input.elevator_cmd = 0.01 * (i + 1);
    sched.knots.push_back(gk);
  }
  const ControlInput u = feedback_command({}, 10.0, sched, ActuatorLimits{});
  CHECK(u.elevator_cmd == doctest::Approx(0.03));
}

TEST_CASE("gravity-only vehicle linearization is the double-integrator map") {
  VehicleGeometry geom;
  geom.slices.clear();
  geom.drag_surfaces.clear();
  SimParams sim;
  ControlSequence controls;
  controls.knot_dt = 0.05;
  controls.knots.assign(4, ControlInput{});
  VehicleState initial;
  const VehicleKnotModel model =
      make_vehicle_knot_model(geom, sim, AeroModel::QuasiSteady, initial,
                              controls, 0.05, 4, AeroModel::QuasiSteady);
  const auto lin =
      linearize_fd(model.dynamics, model.states, model.inputs, 0.05, 1e-4);
  Mat6 expect = Mat6::Identity();
  expect(0, 3) = expect(1, 4) = expect(2, 5) = 0.05;  // one knot of drift
  for (const LinearizationKnot& k : lin) {
    CHECK((k.a - expect).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(k.b.cwiseAbs().maxCoeff() <= 1e-9);  // no surfaces, no authority
  }
}

TEST_CASE("closed-loop tracking beats open loop under launch speed perturbations") {
  const VehicleGeometry geom = VehicleGeometry::standard();
  SimParams sim;
  VehicleState initial;
  initial.xdot = 6.0;
  ControlSequence nominal;
  nominal.knot_dt = 0.05;
  nominal.knots.assign(12, ControlInput{});  // 0.6 s glide

  const int n_steps = static_cast<int>(std::round(0.6 / sim.dt));
  const Trajectory nom_traj = run(geom, sim, AeroModel::QuasiSteady, initial,
                                  FluidState::zeros(geom), nominal, n_steps);
  REQUIRE_FALSE(nom_traj.diverged);
  TargetSpec target;
  const VehicleState& end = nom_traj.points.back().state;
  target.x = end.x;
  target.z = end.z;
  target.pitch = end.theta;
  target.xdot = end.xdot;
  target.zdot = end.zdot;
  target.pitchdot = end.thetadot;

  TvlqrParams params;
  const GainSchedule gains = synthesize_gains(geom, sim, AeroModel::QuasiSteady,
                                              initial, nominal, params);
  CHECK(gains.knots.size() == 12);

  int closed_wins = 0;
  for (double dv : {0.2, -0.2, 0.15, -0.15, 0.1}) {
    VehicleState perturbed = initial;
    perturbed.xdot += dv;
    const Trajectory open = run(geom, sim, AeroModel::QuasiSteady, perturbed,
                                FluidState::zeros(geom), nominal, n_steps);
    const Trajectory closed =
        run_closed_loop(geom, sim, AeroModel::QuasiSteady, perturbed,
                        FluidState::zeros(geom), gains, n_steps);
    if (trajectory_cost(closed, target) < trajectory_cost(open, target))
      ++closed_wins;
  }
  CHECK(closed_wins >= 4);
}
