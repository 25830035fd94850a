#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "perchsim/config.hpp"
#include "perchsim/pipeline.hpp"
#include "perchsim/section_sim.hpp"
#include "perchsim/serialize.hpp"

namespace py = pybind11;
using namespace perchsim;

PYBIND11_MODULE(_perchsim, m) {
  m.doc() = "planar morphing-wing flight simulator and perch planner";

  py::class_<Vec2>(m, "Vec2")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("x"), py::arg("z"))
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("z", &Vec2::z)
      .def("norm", &Vec2::norm)
      .def("__repr__", [](const Vec2& v) {
        return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.z) + ")";
      });

  py::class_<VehicleState>(m, "VehicleState")
      .def(py::init<>())
      .def_readwrite("x", &VehicleState::x)
      .def_readwrite("z", &VehicleState::z)
      .def_readwrite("theta", &VehicleState::theta)
      .def_readwrite("xdot", &VehicleState::xdot)
      .def_readwrite("zdot", &VehicleState::zdot)
      .def_readwrite("thetadot", &VehicleState::thetadot)
      .def_readwrite("sweep_left", &VehicleState::sweep_left)
      .def_readwrite("sweep_right", &VehicleState::sweep_right)
      .def_readwrite("elevator", &VehicleState::elevator);

  py::class_<ControlInput>(m, "ControlInput")
      .def(py::init<>())
      .def(py::init([](double elevator_cmd, double sweep_cmd) {
             return ControlInput{elevator_cmd, sweep_cmd};
           }),
           py::arg("elevator_cmd") = 0.0, py::arg("sweep_cmd") = 0.0)
      .def_readwrite("elevator_cmd", &ControlInput::elevator_cmd)
      .def_readwrite("sweep_cmd", &ControlInput::sweep_cmd);

  py::class_<ControlSequence>(m, "ControlSequence")
      .def(py::init<>())
      .def_readwrite("knot_dt", &ControlSequence::knot_dt)
      .def_readwrite("knots", &ControlSequence::knots)
      .def("horizon", &ControlSequence::horizon)
      .def("sample", &ControlSequence::sample, py::arg("t"));

  py::class_<TargetSpec>(m, "TargetSpec")
      .def(py::init<>())
      .def_readwrite("x", &TargetSpec::x)
      .def_readwrite("z", &TargetSpec::z)
      .def_readwrite("pitch", &TargetSpec::pitch)
      .def_readwrite("xdot", &TargetSpec::xdot)
      .def_readwrite("zdot", &TargetSpec::zdot)
      .def_readwrite("pitchdot", &TargetSpec::pitchdot);

  py::enum_<AeroModel>(m, "AeroModel")
      .value("Unsteady", AeroModel::Unsteady)
      .value("QuasiSteady", AeroModel::QuasiSteady);

  py::class_<TrajectoryPoint>(m, "TrajectoryPoint")
      .def_readonly("t", &TrajectoryPoint::t)
      .def_readonly("state", &TrajectoryPoint::state)
      .def_readonly("input", &TrajectoryPoint::input)
      .def_readonly("force", &TrajectoryPoint::force)
      .def_readonly("moment", &TrajectoryPoint::moment)
      .def_readonly("wake_counts", &TrajectoryPoint::wake_counts);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("points", &Trajectory::points)
      .def_readonly("diverged", &Trajectory::diverged)
      .def("__len__", [](const Trajectory& t) { return t.points.size(); });

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("launch", &ScenarioConfig::launch)
      .def_readwrite("target", &ScenarioConfig::target);

  py::class_<PlanIterationLog>(m, "PlanIterationLog")
      .def_readonly("iteration", &PlanIterationLog::iteration)
      .def_readonly("best_cost", &PlanIterationLog::best_cost)
      .def_readonly("mean_cost", &PlanIterationLog::mean_cost);

  py::class_<PlanResult>(m, "PlanResult")
      .def_readonly("controls", &PlanResult::controls)
      .def_readonly("nominal", &PlanResult::nominal)
      .def_readonly("cost", &PlanResult::cost)
      .def_readonly("zero_control_cost", &PlanResult::zero_control_cost)
      .def_readonly("log", &PlanResult::log);

  py::class_<GainKnot>(m, "GainKnot")
      .def_readonly("t", &GainKnot::t)
      .def_readonly("k", &GainKnot::k)
      .def_readonly("state", &GainKnot::state)
      .def_readonly("input", &GainKnot::input);

  py::class_<GainSchedule>(m, "GainSchedule")
      .def_readonly("knots", &GainSchedule::knots);

  py::class_<PlanArtifacts>(m, "PlanArtifacts")
      .def_readonly("plan", &PlanArtifacts::plan)
      .def_readonly("gains", &PlanArtifacts::gains);

  py::class_<AblationMode>(m, "AblationMode")
      .def_readonly("name", &AblationMode::name);

  py::class_<AblationModeResult>(m, "AblationModeResult")
      .def_readonly("mode", &AblationModeResult::mode)
      .def_readonly("costs", &AblationModeResult::costs)
      .def_readonly("diverged", &AblationModeResult::diverged)
      .def_readonly("failed", &AblationModeResult::failed)
      .def_readonly("mean", &AblationModeResult::mean)
      .def_readonly("stddev", &AblationModeResult::stddev)
      .def_readonly("norm_mean", &AblationModeResult::norm_mean)
      .def_readonly("norm_std", &AblationModeResult::norm_std);

  py::class_<AblationReport>(m, "AblationReport")
      .def_readonly("modes", &AblationReport::modes)
      .def_readonly("baseline_mean", &AblationReport::baseline_mean);

  m.def("parse_config", &parse_config, py::arg("text"),
        "Parse a sectioned key/value scenario config.");
  m.def("serialize_config", &serialize_config, py::arg("config"));
  m.def("default_config", [] { return ScenarioConfig{}; });

  m.def(
      "simulate",
      [](const ScenarioConfig& config, const ControlSequence& controls,
         AeroModel model, double horizon) {
        const double span = horizon > 0.0 ? horizon : controls.horizon();
        const int n_steps = static_cast<int>(std::round(span / config.sim.dt));
        return run(config.geometry, config.sim, model, config.launch,
                   FluidState::zeros(config.geometry), controls, n_steps);
      },
      py::arg("config"), py::arg("controls"),
      py::arg("model") = AeroModel::Unsteady, py::arg("horizon") = 0.0,
      "Open-loop rollout of a control sequence from the configured launch "
      "state. horizon <= 0 runs the full sequence.");

  m.def("trajectory_cost", &trajectory_cost, py::arg("trajectory"),
        py::arg("target"),
        "Minimum squared target distance over the trajectory.");

  m.def(
      "plan_scenario",
      [](const ScenarioConfig& config, std::uint64_t seed, int samples,
         int iterations) {
        ScenarioConfig c = config;
        c.planner.seed = seed;
        if (samples > 0) c.planner.samples = samples;
        if (iterations > 0) c.planner.iterations = iterations;
        return plan_scenario(c);
      },
      py::arg("config"), py::arg("seed") = 0, py::arg("samples") = 0,
      py::arg("iterations") = 0,
      "Sampling-based plan plus feedback gain schedule at planner fidelity. "
      "samples/iterations <= 0 keep the config values.");

  m.def(
      "execute_closed_loop",
      [](const ScenarioConfig& config, const GainSchedule& gains,
         double horizon) {
        const int n_steps =
            static_cast<int>(std::round(horizon / config.sim.dt));
        return run_closed_loop(config.geometry, config.sim, AeroModel::Unsteady,
                               config.launch, FluidState::zeros(config.geometry),
                               gains, n_steps);
      },
      py::arg("config"), py::arg("gains"), py::arg("horizon"),
      "Closed-loop execution of a gain schedule on the full-resolution "
      "unsteady simulator.");

  m.def("run_ablation", &run_ablation, py::arg("config"), py::arg("threads") = 1,
        "Four-mode wing-actuation x aero-model study.");
  m.def("ablation_table", &ablation_table, py::arg("report"));

  m.def("trajectory_csv", &trajectory_csv, py::arg("trajectory"),
        py::arg("n_slices"));
  m.def("control_sequence_csv", &control_sequence_csv, py::arg("controls"));
  m.def("parse_control_sequence", &parse_control_sequence, py::arg("text"));
}
