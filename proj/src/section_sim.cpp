#include "perchsim/section_sim.hpp"

namespace perchsim {

SectionStepResult advance_section(WingSection& section, SliceFluid& fluid,
                                  const SectionPose& pose, const SectionMotion& motion,
                                  const SimParams& sim, double rho) {
  const double dt = sim.dt;
  const KernelConfig kernel = sim.kernel_for(section.chord);

  geometry_update(section, pose, motion);

  const ShedPositions shed = shed_edge_particles(section, fluid.prev_shed_le,
                                                 fluid.prev_shed_te, sim.wind, dt,
                                                 sim.shed_fraction);
  const double kelvin_rhs = fluid.gamma_total_ref - fluid.wake.total_strength();
  LeadingEdgeCondition le_cond;
  LinearSystem sys = assemble_system(section, fluid.wake.particles, shed.le, shed.te,
                                     sim.wind, kernel, kelvin_rhs, le_cond);

  SectionStepResult result;
  result.solution = solve_bound_strengths(sys);

  // The edge sheds only once the leading vortex exceeds its suction limit;
  // then it is pinned there and the nascent particle takes the excess.
  const double u_ref = (sim.wind - section.le_vel).norm();
  const double cap = 4.0 * sim.lesp_crit * u_ref *
                     std::sqrt(section.chord * section.panel_len[0]);
  if (std::abs(result.solution.bound_strengths[0]) > cap) {
    le_cond.kind = LeadingEdgeCondition::Kind::CappedSuction;
    le_cond.capped_strength = std::copysign(cap, result.solution.bound_strengths[0]);
    sys = assemble_system(section, fluid.wake.particles, shed.le, shed.te, sim.wind,
                          kernel, kelvin_rhs, le_cond);
    result.solution = solve_bound_strengths(sys);
  }

  const int nb = section.n_bound;
  for (int i = 1; i <= nb; ++i) {
    double ax = 0.0;
    const double* row = &sys.a[static_cast<std::size_t>(i) * sys.n];
    for (int j = 0; j < nb; ++j) ax += row[j] * result.solution.bound_strengths[j];
    ax += row[nb] * result.solution.le_strength;
    ax += row[nb + 1] * result.solution.te_strength;
    result.bc_residual = std::max(result.bc_residual, std::abs(ax - sys.rhs[i]));
  }

  fluid.wake.add(result.solution.le_strength, shed.le);
  fluid.wake.add(result.solution.te_strength, shed.te);

  const std::vector<double> dp =
      pressure_distribution(section, result.solution, fluid.wake.particles, sim.wind,
                            kernel, rho, dt, fluid.prev_cumulative,
                            fluid.prev_le_strength);
  result.loads = integrate_loads(section, dp, 1.0);
  fluid.prev_cumulative = result.solution.cumulative;
  fluid.prev_le_strength = result.solution.le_strength;

  // For convection the surface influence is evaluated with the finite-core
  // kernel: wake particles can pass arbitrarily close to the bound vortices
  // and the point-vortex singularity there is a discretization artifact.
  std::vector<VortexParticle> bound(nb);
  for (int i = 0; i < nb; ++i)
    bound[i] = {result.solution.bound_strengths[i], section.bound_pos[i], false};
  convect(fluid.wake, bound, sim.wind, dt, kernel, sim.scheme);

  const std::size_t n_now = fluid.wake.particles.size();
  fluid.prev_shed_le = fluid.wake.particles[n_now - 2].pos;
  fluid.prev_shed_te = fluid.wake.particles[n_now - 1].pos;

  MergeConfig merge;
  merge.velocity_threshold = sim.merge_threshold;
  merge.candidate_radius = sim.merge_radius_frac * section.chord;
  merge.exclusion_radius = sim.merge_exclusion_chords * section.chord;
  merge_pass(fluid.wake, section.cp_pos, merge, kernel, section.pose.ref);
  return result;
}

}  // namespace perchsim
