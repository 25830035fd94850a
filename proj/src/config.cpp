#include "perchsim/config.hpp"

#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

namespace perchsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

double to_double(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) fail(line, "trailing characters in number '" + v + "'");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + v + "'");
  }
}

long long to_int(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) fail(line, "trailing characters in integer '" + v + "'");
    return i;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "expected an integer, got '" + v + "'");
  }
}

std::vector<double> to_list(const std::string& v, std::size_t count, int line) {
  std::string s = v;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream in(s);
  std::vector<double> out;
  double d = 0.0;
  while (in >> d) out.push_back(d);
  if (!in.eof() || out.size() != count)
    fail(line, "expected " + std::to_string(count) + " numbers, got '" + v + "'");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["vehicle.mass"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.geometry.mass = to_double(v, line);
    };
    t["vehicle.inertia"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.geometry.inertia_yy = to_double(v, line);
    };
    t["vehicle.gravity"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.geometry.gravity = to_double(v, line);
    };

    t["fluid.rho"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.geometry.rho = to_double(v, line);
    };
    t["fluid.n_bound"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.sim.n_bound = static_cast<int>(to_int(v, line));
    };
    t["fluid.dt"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.sim.dt = to_double(v, line);
    };
    t["fluid.r_core_frac"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.sim.r_core_frac = to_double(v, line);
    };
    t["fluid.shed_fraction"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.sim.shed_fraction = to_double(v, line);
    };
    t["fluid.lesp_crit"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.sim.lesp_crit = to_double(v, line);
    };
    t["fluid.merge_threshold"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.sim.merge_threshold = to_double(v, line);
    };
    t["fluid.merge_radius_frac"] = [](ScenarioConfig& c, const std::string& v,
                                      int line) {
      c.sim.merge_radius_frac = to_double(v, line);
    };
    t["fluid.merge_exclusion_chords"] = [](ScenarioConfig& c, const std::string& v,
                                           int line) {
      c.sim.merge_exclusion_chords = to_double(v, line);
    };
    t["fluid.load_coeff_max"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.sim.load_coeff_max = to_double(v, line);
    };
    t["fluid.integrator"] = [](ScenarioConfig& c, const std::string& v, int line) {
      if (v == "euler")
        c.sim.scheme = ConvectionScheme::Euler;
      else if (v == "midpoint")
        c.sim.scheme = ConvectionScheme::Midpoint;
      else
        fail(line, "integrator must be 'euler' or 'midpoint', got '" + v + "'");
    };

    t["launch.x"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.launch.x = to_double(v, line);
    };
    t["launch.z"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.launch.z = to_double(v, line);
    };
    t["launch.pitch"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.launch.theta = to_double(v, line);
    };
    t["launch.xdot"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.launch.xdot = to_double(v, line);
    };
    t["launch.zdot"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.launch.zdot = to_double(v, line);
    };
    t["launch.pitchdot"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.launch.thetadot = to_double(v, line);
    };

    t["target.x"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.target.x = to_double(v, line);
    };
    t["target.z"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.target.z = to_double(v, line);
    };
    t["target.pitch"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.target.pitch = to_double(v, line);
    };
    t["target.xdot"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.target.xdot = to_double(v, line);
    };
    t["target.zdot"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.target.zdot = to_double(v, line);
    };
    t["target.pitchdot"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.target.pitchdot = to_double(v, line);
    };

    t["planner.samples"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.planner.samples = static_cast<int>(to_int(v, line));
    };
    t["planner.iterations"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.planner.iterations = static_cast<int>(to_int(v, line));
    };
    t["planner.knot_dt"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.planner.knot_dt = to_double(v, line);
    };
    t["planner.horizon"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.planner.horizon = to_double(v, line);
    };
    t["planner.sigma_elevator"] = [](ScenarioConfig& c, const std::string& v,
                                     int line) {
      c.planner.sigma_elevator = to_double(v, line);
    };
    t["planner.sigma_sweep"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.planner.sigma_sweep = to_double(v, line);
    };
    t["planner.lambda"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.planner.lambda = to_double(v, line);
    };
    t["planner.seed"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.planner.seed = static_cast<std::uint64_t>(to_int(v, line));
    };
    t["planner.threads"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.planner.threads = static_cast<int>(to_int(v, line));
    };
    t["planner.sim_n_bound"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.planner_fluid.n_bound = static_cast<int>(to_int(v, line));
    };
    t["planner.sim_dt"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.planner_fluid.dt = to_double(v, line);
    };
    t["planner.sim_merge_threshold"] = [](ScenarioConfig& c, const std::string& v,
                                          int line) {
      c.planner_fluid.merge_threshold = to_double(v, line);
    };

    t["feedback.knot_dt"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.feedback.knot_dt = to_double(v, line);
    };
    t["feedback.eps"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.feedback.eps = to_double(v, line);
    };
    t["feedback.q_diag"] = [](ScenarioConfig& c, const std::string& v, int line) {
      const auto d = to_list(v, 6, line);
      c.feedback.q = Mat6(Eigen::Map<const Vec6>(d.data()).asDiagonal());
    };
    t["feedback.qf_diag"] = [](ScenarioConfig& c, const std::string& v, int line) {
      const auto d = to_list(v, 6, line);
      c.feedback.qf = Mat6(Eigen::Map<const Vec6>(d.data()).asDiagonal());
    };
    t["feedback.r_diag"] = [](ScenarioConfig& c, const std::string& v, int line) {
      const auto d = to_list(v, 2, line);
      c.feedback.r = Eigen::Vector2d(d[0], d[1]).asDiagonal();
    };

    t["mode.wing"] = [](ScenarioConfig& c, const std::string& v, int line) {
      if (v == "fixed")
        c.mode.wing = WingMode::Fixed;
      else if (v == "morphing")
        c.mode.wing = WingMode::Morphing;
      else
        fail(line, "mode.wing must be 'fixed' or 'morphing', got '" + v + "'");
    };
    t["mode.model"] = [](ScenarioConfig& c, const std::string& v, int line) {
      if (v == "quasi-steady")
        c.mode.model = AeroModel::QuasiSteady;
      else if (v == "unsteady")
        c.mode.model = AeroModel::Unsteady;
      else
        fail(line, "mode.model must be 'quasi-steady' or 'unsteady', got '" + v + "'");
    };

    t["ablation.seeds"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.ablation.seeds = static_cast<int>(to_int(v, line));
    };
    t["ablation.perturb_pos"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.ablation.perturb_pos = to_double(v, line);
    };
    t["ablation.perturb_speed"] = [](ScenarioConfig& c, const std::string& v,
                                     int line) {
      c.ablation.perturb_speed = to_double(v, line);
    };
    t["ablation.samples"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.ablation.samples = static_cast<int>(to_int(v, line));
    };
    t["ablation.iterations"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.ablation.iterations = static_cast<int>(to_int(v, line));
    };
    return t;
  }();
  return table;
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("invalid " + field + ": " + what);
}

void validate(const ScenarioConfig& c) {
  require(c.geometry.mass > 0.0, "vehicle.mass", "must be > 0");
  require(c.geometry.inertia_yy > 0.0, "vehicle.inertia", "must be > 0");
  require(c.geometry.gravity >= 0.0, "vehicle.gravity", "must be >= 0");
  require(c.geometry.rho > 0.0, "fluid.rho", "must be > 0");
  require(c.sim.n_bound >= 2, "fluid.n_bound", "must be >= 2");
  require(c.sim.dt > 0.0, "fluid.dt", "must be > 0");
  require(c.sim.r_core_frac > 0.0, "fluid.r_core_frac", "must be > 0");
  require(c.sim.shed_fraction > 0.0 && c.sim.shed_fraction < 1.0,
          "fluid.shed_fraction", "must be in (0, 1)");
  require(c.sim.lesp_crit > 0.0, "fluid.lesp_crit", "must be > 0");
  require(c.sim.merge_threshold > 0.0, "fluid.merge_threshold", "must be > 0");
  require(c.sim.merge_radius_frac > 0.0, "fluid.merge_radius_frac", "must be > 0");
  require(c.sim.merge_exclusion_chords >= 0.0, "fluid.merge_exclusion_chords",
          "must be >= 0");
  require(c.launch.finite(), "launch", "must be finite");
  require(c.target.finite(), "target", "must be finite");
  require(c.planner.samples >= 1, "planner.samples", "must be >= 1");
  require(c.planner.iterations >= 0, "planner.iterations", "must be >= 0");
  require(c.planner.knot_dt > 0.0, "planner.knot_dt", "must be > 0");
  require(c.planner.horizon > 0.0, "planner.horizon", "must be > 0");
  require(c.planner.sigma_elevator > 0.0, "planner.sigma_elevator", "must be > 0");
  require(c.planner.sigma_sweep > 0.0, "planner.sigma_sweep", "must be > 0");
  require(c.planner.threads >= 1, "planner.threads", "must be >= 1");
  require(c.planner_fluid.n_bound >= 2, "planner.sim_n_bound", "must be >= 2");
  require(c.planner_fluid.dt > 0.0, "planner.sim_dt", "must be > 0");
  require(c.planner_fluid.merge_threshold > 0.0, "planner.sim_merge_threshold",
          "must be > 0");
  require(c.feedback.knot_dt > 0.0, "feedback.knot_dt", "must be > 0");
  require(c.feedback.eps > 0.0, "feedback.eps", "must be > 0");
  require(c.feedback.r.diagonal().minCoeff() > 0.0, "feedback.r_diag",
          "must be > 0");
  require(c.feedback.q.diagonal().minCoeff() >= 0.0, "feedback.q_diag",
          "must be >= 0");
  require(c.feedback.qf.diagonal().minCoeff() >= 0.0, "feedback.qf_diag",
          "must be >= 0");
  require(c.ablation.seeds >= 1, "ablation.seeds", "must be >= 1");
  require(c.ablation.perturb_pos >= 0.0, "ablation.perturb_pos", "must be >= 0");
  require(c.ablation.perturb_speed >= 0.0, "ablation.perturb_speed", "must be >= 0");
  require(c.ablation.samples >= 1, "ablation.samples", "must be >= 1");
  require(c.ablation.iterations >= 0, "ablation.iterations", "must be >= 0");
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig config;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  static const std::vector<std::string> known_sections = {
      "vehicle", "fluid", "launch", "target", "planner", "feedback", "mode",
      "ablation"};
  while (std::getline(in, raw)) {
    ++line_no;
    const auto comment = raw.find_first_of("#;");
    std::string line = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(known_sections.begin(), known_sections.end(), section) ==
          known_sections.end())
        fail(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) fail(line_no, "key '" + key + "' outside any section");
    const auto it = setters().find(section + "." + key);
    if (it == setters().end())
      fail(line_no, "unknown key '" + key + "' in section [" + section + "]");
    it->second(config, value, line_no);
  }
  // Fixed-wing planning never explores the sweep channel.
  config.planner.sweep_enabled = config.mode.wing == WingMode::Morphing;
  config.feedback.sweep_enabled = config.planner.sweep_enabled;
  validate(config);
  return config;
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "[vehicle]\n";
  out << "mass = " << fmt(c.geometry.mass) << "\n";
  out << "inertia = " << fmt(c.geometry.inertia_yy) << "\n";
  out << "gravity = " << fmt(c.geometry.gravity) << "\n";
  out << "\n[fluid]\n";
  out << "rho = " << fmt(c.geometry.rho) << "\n";
  out << "n_bound = " << c.sim.n_bound << "\n";
  out << "dt = " << fmt(c.sim.dt) << "\n";
  out << "r_core_frac = " << fmt(c.sim.r_core_frac) << "\n";
  out << "shed_fraction = " << fmt(c.sim.shed_fraction) << "\n";
  out << "lesp_crit = " << fmt(c.sim.lesp_crit) << "\n";
  out << "merge_threshold = " << fmt(c.sim.merge_threshold) << "\n";
  out << "merge_radius_frac = " << fmt(c.sim.merge_radius_frac) << "\n";
  out << "merge_exclusion_chords = " << fmt(c.sim.merge_exclusion_chords) << "\n";
  out << "load_coeff_max = " << fmt(c.sim.load_coeff_max) << "\n";
  out << "integrator = "
      << (c.sim.scheme == ConvectionScheme::Euler ? "euler" : "midpoint") << "\n";
  out << "\n[launch]\n";
  out << "x = " << fmt(c.launch.x) << "\n";
  out << "z = " << fmt(c.launch.z) << "\n";
  out << "pitch = " << fmt(c.launch.theta) << "\n";
  out << "xdot = " << fmt(c.launch.xdot) << "\n";
  out << "zdot = " << fmt(c.launch.zdot) << "\n";
  out << "pitchdot = " << fmt(c.launch.thetadot) << "\n";
  out << "\n[target]\n";
  out << "x = " << fmt(c.target.x) << "\n";
  out << "z = " << fmt(c.target.z) << "\n";
  out << "pitch = " << fmt(c.target.pitch) << "\n";
  out << "xdot = " << fmt(c.target.xdot) << "\n";
  out << "zdot = " << fmt(c.target.zdot) << "\n";
  out << "pitchdot = " << fmt(c.target.pitchdot) << "\n";
  out << "\n[planner]\n";
  out << "samples = " << c.planner.samples << "\n";
  out << "iterations = " << c.planner.iterations << "\n";
  out << "knot_dt = " << fmt(c.planner.knot_dt) << "\n";
  out << "horizon = " << fmt(c.planner.horizon) << "\n";
  out << "sigma_elevator = " << fmt(c.planner.sigma_elevator) << "\n";
  out << "sigma_sweep = " << fmt(c.planner.sigma_sweep) << "\n";
  out << "lambda = " << fmt(c.planner.lambda) << "\n";
  out << "seed = " << c.planner.seed << "\n";
  out << "threads = " << c.planner.threads << "\n";
  out << "sim_n_bound = " << c.planner_fluid.n_bound << "\n";
  out << "sim_dt = " << fmt(c.planner_fluid.dt) << "\n";
  out << "sim_merge_threshold = " << fmt(c.planner_fluid.merge_threshold) << "\n";
  out << "\n[feedback]\n";
  out << "knot_dt = " << fmt(c.feedback.knot_dt) << "\n";
  out << "eps = " << fmt(c.feedback.eps) << "\n";
  out << "q_diag =";
  for (int i = 0; i < 6; ++i) out << " " << fmt(c.feedback.q(i, i));
  out << "\nqf_diag =";
  for (int i = 0; i < 6; ++i) out << " " << fmt(c.feedback.qf(i, i));
  out << "\nr_diag = " << fmt(c.feedback.r(0, 0)) << " " << fmt(c.feedback.r(1, 1))
      << "\n";
  out << "\n[mode]\n";
  out << "wing = " << (c.mode.wing == WingMode::Fixed ? "fixed" : "morphing") << "\n";
  out << "model = "
      << (c.mode.model == AeroModel::QuasiSteady ? "quasi-steady" : "unsteady")
      << "\n";
  out << "\n[ablation]\n";
  out << "seeds = " << c.ablation.seeds << "\n";
  out << "perturb_pos = " << fmt(c.ablation.perturb_pos) << "\n";
  out << "perturb_speed = " << fmt(c.ablation.perturb_speed) << "\n";
  out << "samples = " << c.ablation.samples << "\n";
  out << "iterations = " << c.ablation.iterations << "\n";
  return out.str();
}

}  // namespace perchsim
