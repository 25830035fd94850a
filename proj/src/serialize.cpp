#include "perchsim/serialize.hpp"

#include <cstdio>
#include <sstream>

namespace perchsim {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

double field_double(const std::vector<std::string>& fields, std::size_t i,
                    int line_no) {
  if (i >= fields.size())
    throw SerializeError("line " + std::to_string(line_no) + ": missing column " +
                         std::to_string(i));
  try {
    return std::stod(fields[i]);
  } catch (const std::exception&) {
    throw SerializeError("line " + std::to_string(line_no) + ": bad number '" +
                         fields[i] + "'");
  }
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj, int n_slices) {
  std::ostringstream out;
  out << "time_s,x_m,z_m,pitch_rad,xdot_mps,zdot_mps,pitchdot_radps,"
         "sweep_rad,elevator_rad,elevator_cmd_rad,sweep_cmd_rad,"
         "force_x_N,force_z_N,moment_Nm";
  for (int k = 0; k < n_slices; ++k) out << ",wake_count_slice" << k;
  out << "\n";
  for (const TrajectoryPoint& p : traj.points) {
    out << fmt(p.t) << ',' << fmt(p.state.x) << ',' << fmt(p.state.z) << ','
        << fmt(p.state.theta) << ',' << fmt(p.state.xdot) << ',' << fmt(p.state.zdot)
        << ',' << fmt(p.state.thetadot) << ',' << fmt(p.state.sweep_right) << ','
        << fmt(p.state.elevator) << ',' << fmt(p.input.elevator_cmd) << ','
        << fmt(p.input.sweep_cmd) << ',' << fmt(p.force.x) << ',' << fmt(p.force.z)
        << ',' << fmt(p.moment);
    for (int k = 0; k < n_slices; ++k) {
      const int count =
          k < static_cast<int>(p.wake_counts.size()) ? p.wake_counts[k] : 0;
      out << ',' << count;
    }
    out << "\n";
  }
  return out.str();
}

std::string wake_snapshot_csv(const std::vector<WakeSnapshot>& snapshots) {
  std::ostringstream out;
  out << "step,slice,strength_m2ps,x_m,z_m\n";
  for (const WakeSnapshot& snap : snapshots)
    for (std::size_t s = 0; s < snap.fluid.slices.size(); ++s)
      for (const VortexParticle& p : snap.fluid.slices[s].wake.particles)
        out << snap.step << ',' << s << ',' << fmt(p.strength) << ',' << fmt(p.pos.x)
            << ',' << fmt(p.pos.z) << "\n";
  return out.str();
}

std::string control_sequence_csv(const ControlSequence& controls) {
  std::ostringstream out;
  out << "# knot_dt_s = " << fmt(controls.knot_dt) << "\n";
  out << "knot,time_s,elevator_cmd_rad,sweep_cmd_rad\n";
  for (std::size_t i = 0; i < controls.knots.size(); ++i)
    out << i << ',' << fmt(i * controls.knot_dt) << ','
        << fmt(controls.knots[i].elevator_cmd) << ','
        << fmt(controls.knots[i].sweep_cmd) << "\n";
  return out.str();
}

ControlSequence parse_control_sequence(const std::string& text) {
  ControlSequence out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_dt = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (line.find("knot_dt_s") != std::string::npos && eq != std::string::npos) {
        out.knot_dt = field_double({line.substr(eq + 1)}, 0, line_no);
        have_dt = true;
      }
      continue;
    }
    if (line.find("knot,") == 0) continue;  // header
    const auto fields = split(line, ',');
    ControlInput u;
    u.elevator_cmd = field_double(fields, 2, line_no);
    u.sweep_cmd = field_double(fields, 3, line_no);
    out.knots.push_back(u);
  }
  if (!have_dt) throw SerializeError("control sequence is missing knot_dt_s");
  return out;
}

std::string gain_schedule_csv(const GainSchedule& gains) {
  std::ostringstream out;
  out << "knot,time_s";
  const char* states[] = {"x", "z", "pitch", "xdot", "zdot", "pitchdot"};
  for (const char* s : states) out << ",k_elevator_" << s;
  for (const char* s : states) out << ",k_sweep_" << s;
  out << ",nom_x_m,nom_z_m,nom_pitch_rad,nom_xdot_mps,nom_zdot_mps,"
         "nom_pitchdot_radps,nom_sweep_rad,nom_elevator_rad,"
         "nom_elevator_cmd_rad,nom_sweep_cmd_rad\n";
  for (std::size_t i = 0; i < gains.knots.size(); ++i) {
    const GainKnot& g = gains.knots[i];
    out << i << ',' << fmt(g.t);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 6; ++c) out << ',' << fmt(g.k(r, c));
    out << ',' << fmt(g.state.x) << ',' << fmt(g.state.z) << ',' << fmt(g.state.theta)
        << ',' << fmt(g.state.xdot) << ',' << fmt(g.state.zdot) << ','
        << fmt(g.state.thetadot) << ',' << fmt(g.state.sweep_right) << ','
        << fmt(g.state.elevator) << ',' << fmt(g.input.elevator_cmd) << ','
        << fmt(g.input.sweep_cmd) << "\n";
  }
  return out.str();
}

GainSchedule parse_gain_schedule(const std::string& text) {
  GainSchedule out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#' || line.find("knot,") == 0) continue;
    const auto fields = split(line, ',');
    GainKnot g;
    g.t = field_double(fields, 1, line_no);
    std::size_t col = 2;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 6; ++c) g.k(r, c) = field_double(fields, col++, line_no);
    g.state.x = field_double(fields, col++, line_no);
    g.state.z = field_double(fields, col++, line_no);
    g.state.theta = field_double(fields, col++, line_no);
    g.state.xdot = field_double(fields, col++, line_no);
    g.state.zdot = field_double(fields, col++, line_no);
    g.state.thetadot = field_double(fields, col++, line_no);
    g.state.sweep_left = g.state.sweep_right = field_double(fields, col++, line_no);
    g.state.elevator = field_double(fields, col++, line_no);
    g.input.elevator_cmd = field_double(fields, col++, line_no);
    g.input.sweep_cmd = field_double(fields, col++, line_no);
    out.knots.push_back(g);
  }
  return out;
}

std::string convergence_csv(const PlanResult& plan) {
  std::ostringstream out;
  out << "iteration,best_cost,mean_cost\n";
  out << "-1," << fmt(plan.zero_control_cost) << ',' << fmt(plan.zero_control_cost)
      << "\n";
  for (const PlanIterationLog& log : plan.log)
    out << log.iteration << ',' << fmt(log.best_cost) << ',' << fmt(log.mean_cost)
        << "\n";
  return out.str();
}

}  // namespace perchsim
