#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "perchsim/config.hpp"
#include "perchsim/pipeline.hpp"
#include "perchsim/section_sim.hpp"
#include "perchsim/serialize.hpp"

namespace fs = std::filesystem;
using namespace perchsim;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir{"out"};
  std::uint64_t seed{0};
  bool seed_set{false};
  int snapshot_stride{0};
  int threads{1};
};

ScenarioConfig load_config(const CommonOpts& opts) {
  ScenarioConfig config =
      opts.config_path.empty() ? ScenarioConfig{} : parse_config(read_file(opts.config_path));
  if (opts.seed_set) config.planner.seed = opts.seed;
  config.planner.threads = opts.threads;
  return config;
}

int cmd_simulate(const CommonOpts& opts, const std::string& controls_path) {
  const ScenarioConfig config = load_config(opts);
  ControlSequence controls;
  controls.knot_dt = config.planner.knot_dt;
  if (!controls_path.empty())
    controls = parse_control_sequence(read_file(controls_path));
  const int n_steps =
      static_cast<int>(std::round(controls.horizon() / config.sim.dt));

  std::vector<WakeSnapshot> snapshots;
  SnapshotHook hook;
  if (opts.snapshot_stride > 0)
    hook = [&](int step_index, const FluidState& fluid) {
      if (step_index % opts.snapshot_stride == 0)
        snapshots.push_back({step_index, fluid});
    };

  const Trajectory traj =
      run(config.geometry, config.sim, config.mode.model, config.launch,
          FluidState::zeros(config.geometry), controls, n_steps, hook);

  const fs::path out(opts.out_dir);
  write_file(out / "trajectory.csv",
             trajectory_csv(traj, static_cast<int>(config.geometry.slices.size())));
  if (opts.snapshot_stride > 0)
    write_file(out / "wake_snapshots.csv", wake_snapshot_csv(snapshots));
  if (traj.diverged) {
    std::cerr << "simulation diverged after " << traj.points.size() - 1
              << " steps; partial log written\n";
    return 1;
  }
  std::cout << "wrote " << (out / "trajectory.csv").string() << " ("
            << traj.points.size() << " records)\n";
  return 0;
}

int cmd_plan(const CommonOpts& opts) {
  const ScenarioConfig config = load_config(opts);
  const PlanArtifacts art = plan_scenario(config);
  const fs::path out(opts.out_dir);
  write_file(out / "plan_controls.csv", control_sequence_csv(art.plan.controls));
  write_file(out / "gains.csv", gain_schedule_csv(art.gains));
  write_file(out / "convergence.csv", convergence_csv(art.plan));
  write_file(out / "nominal_trajectory.csv",
             trajectory_csv(art.plan.nominal,
                            static_cast<int>(config.geometry.slices.size())));
  std::cout << "plan cost " << art.plan.cost << " (zero-control "
            << art.plan.zero_control_cost << ") over " << art.plan.log.size()
            << " iterations\n";
  return 0;
}

int cmd_ablation(const CommonOpts& opts) {
  const ScenarioConfig config = load_config(opts);
  const AblationReport report = run_ablation(config, opts.threads);
  const std::string table = ablation_table(report);
  write_file(fs::path(opts.out_dir) / "ablation_report.txt", table);
  std::cout << table;
  return 0;
}

struct ValidationCase {
  std::string name;
  double measured{0.0};
  double tolerance{0.0};
  bool pass{false};
};

ValidationCase check(const std::string& name, double measured, double tolerance) {
  return {name, measured, tolerance, measured <= tolerance};
}

double vortex_pair_error(double dt) {
  // Counter-rotating pair translating at Gamma / (2 pi d).
  const double gamma = 0.4, d = 0.08, t_end = 0.2;
  Wake wake;
  wake.add(gamma, {0.0, 0.0});
  wake.add(-gamma, {0.0, d});
  const KernelConfig cfg{1e-6};
  const int steps = static_cast<int>(std::round(t_end / dt));
  for (int i = 0; i < steps; ++i)
    convect(wake, {}, {}, dt, cfg, ConvectionScheme::Midpoint);
  const double expect = gamma / (2.0 * M_PI * d);
  const double v = wake.particles[0].pos.x / t_end;
  return std::abs(v - expect) / expect;
}

std::vector<ValidationCase> run_validation() {
  std::vector<ValidationCase> cases;

  // Vortex pair, Richardson-extrapolated in dt.
  const double e1 = vortex_pair_error(2e-3);
  const double e2 = vortex_pair_error(1e-3);
  cases.push_back(check("vortex_pair_speed_rel_err", 2.0 * e2 - e1 >= 0.0
                                                         ? 2.0 * e2 - e1
                                                         : e2,
                        0.01));

  // Impulsively started plate at 5 deg: Wagner-style lift buildup.
  {
    SimParams sim;
    sim.dt = 0.0025;
    const double chord = 0.12, speed = 5.0, alpha = 5.0 * M_PI / 180.0;
    SectionSim ss(chord, 20, sim, 1.225);
    const int steps =
        static_cast<int>(std::round(10.0 * chord / (speed * sim.dt)));
    std::vector<double> cl;
    Vec2 ref{0.0, 0.0};
    const double q = 0.5 * 1.225 * speed * speed * chord;
    for (int i = 0; i < steps; ++i) {
      const SectionStepResult r = ss.step({ref, alpha}, {{speed, 0.0}, 0.0});
      cl.push_back(r.loads.force.z / q);
      ref.x += speed * sim.dt;
    }
    const double cl_thin = 2.0 * M_PI * std::sin(alpha);
    double late = 0.0;
    for (int i = steps - 10; i < steps; ++i) late += cl[i];
    late /= 10.0;
    // Step 0 carries the impulsive-start spike; step 1 is the earliest clean
    // sample of the post-start lift and stands in for CL(0+).
    const double early = cl[1];
    cases.push_back(
        check("wagner_late_cl_rel_err", std::abs(late - cl_thin) / cl_thin, 0.15));
    cases.push_back(
        check("wagner_initial_ratio_err", std::abs(early / late - 0.5), 0.15));
  }

  // Kelvin audit at 45 deg incidence.
  {
    SimParams sim;
    sim.dt = 0.0024;
    SectionSim ss(0.12, 16, sim, 1.225);
    double worst_kelvin = 0.0, worst_residual = 0.0;
    Vec2 ref{0.0, 0.0};
    for (int i = 0; i < 1000; ++i) {
      const SectionStepResult r =
          ss.step({ref, 45.0 * M_PI / 180.0}, {{5.0, 0.0}, 0.0});
      const double bound =
          std::accumulate(r.solution.bound_strengths.begin(),
                          r.solution.bound_strengths.end(), 0.0);
      worst_kelvin = std::max(
          worst_kelvin, std::abs(bound + ss.fluid().wake.total_strength()));
      worst_residual = std::max(worst_residual, r.bc_residual);
      ref.x += 5.0 * sim.dt;
    }
    cases.push_back(check("kelvin_drift_1000_steps", worst_kelvin, 1e-9));
    cases.push_back(check("boundary_residual_max", worst_residual, 1e-10 * 5.0));
  }

  // Finite-difference LQR pipeline against an algebraic Riccati fixed point.
  {
    Mat6 a0 = Mat6::Identity();
    a0(0, 3) = a0(1, 4) = a0(2, 5) = 0.05;
    Mat62 b0 = Mat62::Zero();
    b0(3, 0) = 0.05;
    b0(5, 0) = 0.10;
    b0(4, 1) = 0.05;
    const KnotDynamics dyn = [a0, b0](const std::array<double, 6>& x,
                                      const ControlInput& u, int) {
      Eigen::Map<const Vec6> xv(x.data());
      const Vec6 next = a0 * xv + b0 * Eigen::Vector2d{u.elevator_cmd, u.sweep_cmd};
      std::array<double, 6> out;
      for (int i = 0; i < 6; ++i) out[i] = next[i];
      return out;
    };
    const auto lin = linearize_fd(dyn, std::vector<VehicleState>(3000),
                                  std::vector<ControlInput>(3000), 0.05, 1e-4);
    const Mat6 q = Mat6::Identity();
    const Eigen::Matrix2d r = Eigen::Matrix2d::Identity();
    const GainSchedule sched = riccati_backward(lin, q, r, q);
    Mat6 s = q;
    for (int i = 0; i < 20000; ++i) {
      const Mat6 next =
          q + a0.transpose() * s * a0 -
          a0.transpose() * s * b0 * (r + b0.transpose() * s * b0).inverse() *
              b0.transpose() * s * a0;
      if ((next - s).cwiseAbs().maxCoeff() < 1e-14) {
        s = next;
        break;
      }
      s = next;
    }
    const Mat26 k_inf =
        (r + b0.transpose() * s * b0).inverse() * b0.transpose() * s * a0;
    cases.push_back(check("lqr_linear_plant_gain_err",
                          (sched.knots[0].k - k_inf).cwiseAbs().maxCoeff(), 1e-6));
  }
  return cases;
}

int cmd_validate(const CommonOpts& opts) {
  const auto cases = run_validation();
  std::ostringstream out;
  out << "case,measured,tolerance,status\n";
  for (const ValidationCase& c : cases) {
    char line[160];
    std::snprintf(line, sizeof(line), "%s,%.6g,%.6g,%s\n", c.name.c_str(),
                  c.measured, c.tolerance, c.pass ? "pass" : "fail");
    out << line;
  }
  write_file(fs::path(opts.out_dir) / "validation_report.csv", out.str());
  std::cout << out.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar morphing-wing flight simulator and perch planner"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string controls_path;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "scenario config file");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "rng seed (overrides config)")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--snapshot-stride", opts.snapshot_stride,
                    "wake snapshot stride in steps (0 = off)");
    cmd->add_option("--threads", opts.threads, "worker thread count");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run a control sequence");
  add_common(simulate);
  simulate->add_option("--controls", controls_path, "control sequence file");

  CLI::App* plan_cmd = app.add_subcommand("plan", "plan the perch maneuver");
  add_common(plan_cmd);
  CLI::App* ablation = app.add_subcommand("ablation", "four-mode study");
  add_common(ablation);
  CLI::App* validate = app.add_subcommand("validate", "run the oracle suite");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);
  try {
    if (simulate->parsed()) return cmd_simulate(opts, controls_path);
    if (plan_cmd->parsed()) return cmd_plan(opts);
    if (ablation->parsed()) return cmd_ablation(opts);
    if (validate->parsed()) return cmd_validate(opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
