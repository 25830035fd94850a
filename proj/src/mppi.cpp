#include "perchsim/mppi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace perchsim {

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

int step_count(const SimParams& sim, double horizon) {
  return static_cast<int>(std::round(horizon / sim.dt));
}

double rollout_cost(const VehicleGeometry& geom, const SimParams& sim, AeroModel model,
                    const VehicleState& initial, const ControlSequence& seq,
                    const TargetSpec& target, int n_steps) {
  const Trajectory traj =
      run(geom, sim, model, initial, FluidState::zeros(geom), seq, n_steps);
  if (traj.diverged) return std::numeric_limits<double>::infinity();
  return trajectory_cost(traj, target);
}

}  // namespace

double trajectory_cost(const Trajectory& traj, const TargetSpec& target) {
  if (traj.empty()) throw std::invalid_argument("trajectory_cost on empty trajectory");
  double best = std::numeric_limits<double>::infinity();
  for (const TrajectoryPoint& p : traj.points) {
    const double dx = p.state.x - target.x;
    const double dz = p.state.z - target.z;
    const double dth = wrap_angle(p.state.theta - target.pitch);
    const double dvx = p.state.xdot - target.xdot;
    const double dvz = p.state.zdot - target.zdot;
    const double dw = p.state.thetadot - target.pitchdot;
    const double c = dx * dx + dz * dz + dth * dth +
                     0.2 * (dvx * dvx + dvz * dvz + dw * dw);
    best = std::min(best, c);
  }
  return best;
}

std::vector<ControlSequence> sample_perturbations(const ControlSequence& nominal,
                                                  const MppiParams& params,
                                                  const ActuatorLimits& limits,
                                                  std::mt19937_64& rng) {
  if (params.samples < 1) throw std::invalid_argument("samples must be >= 1");
  std::normal_distribution<double> elev(0.0, params.sigma_elevator);
  std::normal_distribution<double> sweep(0.0, params.sigma_sweep);
  std::vector<ControlSequence> out(params.samples, nominal);
  for (ControlSequence& seq : out) {
    for (ControlInput& u : seq.knots) {
      u.elevator_cmd = clamp(u.elevator_cmd + elev(rng), limits.elevator_min,
                             limits.elevator_max);
      if (params.sweep_enabled)
        u.sweep_cmd = clamp(u.sweep_cmd + sweep(rng), limits.sweep_min,
                            limits.sweep_max);
    }
  }
  return out;
}

MppiIterationStats mppi_iterate(ControlSequence& nominal, const VehicleGeometry& geom,
                                const SimParams& sim, AeroModel model,
                                const VehicleState& initial, const TargetSpec& target,
                                const MppiParams& params, double lambda,
                                std::mt19937_64& rng) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  const int n_steps = step_count(sim, params.horizon);
  const std::vector<ControlSequence> samples =
      sample_perturbations(nominal, params, geom.limits, rng);
  const int k_total = static_cast<int>(samples.size());

  std::vector<double> costs(k_total, 0.0);
  const int n_threads = std::max(1, std::min(params.threads, k_total));
  auto eval_range = [&](int lo, int hi) {
    for (int k = lo; k < hi; ++k)
      costs[k] = rollout_cost(geom, sim, model, initial, samples[k], target, n_steps);
  };
  if (n_threads == 1) {
    eval_range(0, k_total);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (k_total + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back(eval_range, t * chunk, std::min(k_total, (t + 1) * chunk));
    for (std::thread& th : pool) th.join();
  }

  MppiIterationStats stats;
  double c_min = std::numeric_limits<double>::infinity();
  int k_min = -1;
  double mean = 0.0;
  int alive = 0;
  for (int k = 0; k < k_total; ++k) {
    const double c = costs[static_cast<std::size_t>(k)];
    if (!std::isfinite(c)) {
      ++stats.diverged;
      continue;
    }
    if (c < c_min) {
      c_min = c;
      k_min = k;
    }
    mean += c;
    ++alive;
  }
  if (alive == 0) throw MppiIterationError("all rollouts diverged");
  stats.best_sample_cost = c_min;
  stats.best_sample = samples[static_cast<std::size_t>(k_min)];
  stats.mean_cost = mean / alive;

  // Softmin weights, shifted by the minimum so the best sample has weight 1.
  std::vector<double> weights(k_total, 0.0);
  double w_sum = 0.0;
  for (int k = 0; k < k_total; ++k) {
    if (!std::isfinite(costs[k])) continue;
    weights[k] = std::exp(-(costs[k] - c_min) / lambda);
    w_sum += weights[k];
  }
  ControlSequence updated = nominal;
  for (std::size_t i = 0; i < updated.knots.size(); ++i) {
    double e = 0.0, s = 0.0;
    for (int k = 0; k < k_total; ++k) {
      e += weights[k] * samples[k].knots[i].elevator_cmd;
      s += weights[k] * samples[k].knots[i].sweep_cmd;
    }
    updated.knots[i].elevator_cmd = e / w_sum;
    updated.knots[i].sweep_cmd = s / w_sum;
  }
  stats.updated_cost =
      rollout_cost(geom, sim, model, initial, updated, target, n_steps);
  nominal = updated;
  return stats;
}

PlanResult plan(const VehicleGeometry& geom, const SimParams& sim, AeroModel model,
                const VehicleState& initial, const TargetSpec& target,
                const MppiParams& params) {
  if (!(params.horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (!target.finite()) throw std::invalid_argument("non-finite target");
  const int n_steps = step_count(sim, params.horizon);
  const int n_knots =
      static_cast<int>(std::ceil(params.horizon / params.knot_dt - 1e-12));

  ControlSequence nominal;
  nominal.knot_dt = params.knot_dt;
  nominal.knots.assign(static_cast<std::size_t>(n_knots), ControlInput{});

  PlanResult result;
  result.zero_control_cost =
      rollout_cost(geom, sim, model, initial, nominal, target, n_steps);
  result.controls = nominal;
  result.cost = result.zero_control_cost;

  const double lambda = params.lambda > 0.0
                            ? params.lambda
                            : 0.05 * std::max(result.zero_control_cost, 1e-9);

  std::mt19937_64 rng(params.seed);
  for (int it = 0; it < params.iterations; ++it) {
    MppiIterationStats stats;
    try {
      stats = mppi_iterate(nominal, geom, sim, model, initial, target, params,
                           lambda, rng);
    } catch (const MppiIterationError&) {
      // Every rollout of this batch diverged; re-anchor on the best sequence
      // found so far and keep sampling.
      nominal = result.controls;
      result.log.push_back({it, result.cost,
                            std::numeric_limits<double>::infinity()});
      continue;
    }
    if (stats.best_sample_cost < result.cost) {
      result.cost = stats.best_sample_cost;
      result.controls = stats.best_sample;
    }
    if (std::isfinite(stats.updated_cost) && stats.updated_cost < result.cost) {
      result.cost = stats.updated_cost;
      result.controls = nominal;
    }
    // A diverged weighted average would poison every later batch; restart
    // those iterations from the best-so-far sequence instead.
    if (!std::isfinite(stats.updated_cost)) nominal = result.controls;
    result.log.push_back({it, result.cost, stats.mean_cost});
  }
  result.nominal = run(geom, sim, model, initial, FluidState::zeros(geom),
                       result.controls, n_steps);
  return result;
}

}  // namespace perchsim
