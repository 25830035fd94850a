#include <sstream>

#include "doctest.h"
#include "perchsim/serialize.hpp"

using namespace perchsim;

TEST_CASE("trajectory log has a units header and one record per point") {
  Trajectory traj;
  VehicleState s;
  s.x = 1.0 / 3.0;  // needs full precision
  traj.points.push_back({0.0, s, {0.1, -0.2}, {0.5, -9.81 * 0.2}, 0.01, {3, 4}});
  s.x = 2.0 / 3.0;
  traj.points.push_back({0.005, s, {}, {}, 0.0, {5, 6}});

  const std::string csv = trajectory_csv(traj, 2);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header.find("time_s") == 0);
  CHECK(header.find("pitch_rad") != std::string::npos);
  CHECK(header.find("force_z_N") != std::string::npos);
  CHECK(header.find("wake_count_slice1") != std::string::npos);
  int records = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++records;
  CHECK(records == 2);
  // Full double round trip.
  CHECK(csv.find("0.33333333333333331") != std::string::npos);
  CHECK(csv.find(",3,4") != std::string::npos);
}

TEST_CASE("wake snapshots list every particle with slice and step indices") {
  WakeSnapshot snap;
  snap.step = 7;
  snap.fluid.slices.resize(2);
  snap.fluid.slices[0].wake.add(0.25, {1.0, 2.0});
  snap.fluid.slices[1].wake.add(-0.5, {3.0, 4.0});
  snap.fluid.slices[1].wake.add(0.125, {5.0, 6.0});
  const std::string csv = wake_snapshot_csv({snap});
  CHECK(csv.find("step,slice,strength_m2ps,x_m,z_m\n") == 0);
  CHECK(csv.find("7,0,0.25,1,2") != std::string::npos);
  CHECK(csv.find("7,1,-0.5,3,4") != std::string::npos);
  CHECK(csv.find("7,1,0.125,5,6") != std::string::npos);
}

TEST_CASE("control sequences round-trip exactly through text") {
  ControlSequence seq;
  seq.knot_dt = 0.05;
  seq.knots.push_back({1.0 / 7.0, -2.0 / 7.0});
  seq.knots.push_back({0.0, 0.3});
  const std::string text = control_sequence_csv(seq);
  const ControlSequence back = parse_control_sequence(text);
  CHECK(back.knot_dt == seq.knot_dt);
  REQUIRE(back.knots.size() == 2);
  CHECK(back.knots[0].elevator_cmd == seq.knots[0].elevator_cmd);
  CHECK(back.knots[0].sweep_cmd == seq.knots[0].sweep_cmd);
  CHECK(back.knots[1].sweep_cmd == seq.knots[1].sweep_cmd);
  // Serializing again is byte-identical.
  CHECK(control_sequence_csv(back) == text);
  CHECK_THROWS_AS(parse_control_sequence("knot,time_s,elevator_cmd_rad,sweep\n"),
                  SerializeError);
}

TEST_CASE("gain schedules round-trip exactly through text") {
  GainSchedule gains;
  for (int i = 0; i < 3; ++i) {
    GainKnot g;
    g.t = 0.05 * i;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 6; ++c) g.k(r, c) = (r + 1) / (c + 3.0) + i;
    g.state.x = i / 3.0;
    g.state.theta = -0.1 * i;
    g.input.elevator_cmd = 0.01 * i;
    gains.knots.push_back(g);
  }
  const std::string text = gain_schedule_csv(gains);
  const GainSchedule back = parse_gain_schedule(text);
  REQUIRE(back.knots.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(back.knots[i].t == gains.knots[i].t);
    CHECK((back.knots[i].k - gains.knots[i].k).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.knots[i].state.x == gains.knots[i].state.x);
    CHECK(back.knots[i].input.elevator_cmd == gains.knots[i].input.elevator_cmd);
  }
  CHECK(gain_schedule_csv(back) == text);
}

TEST_CASE("convergence log starts from the zero-control cost") {
  PlanResult plan;
  plan.zero_control_cost = 8.0;
  plan.log = {{0, 4.0, 5.0}, {1, 2.0, 3.0}};
  const std::string csv = convergence_csv(plan);
  CHECK(csv.find("iteration,best_cost,mean_cost\n") == 0);
  CHECK(csv.find("-1,8,8\n") != std::string::npos);
  CHECK(csv.find("0,4,5\n") != std::string::npos);
  CHECK(csv.find("1,2,3\n") != std::string::npos);
}
