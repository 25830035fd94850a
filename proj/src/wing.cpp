#include "perchsim/wing.hpp"

#include <Eigen/Dense>
#ifdef PERCHSIM_DUMP_SINGULAR
#include <iostream>
#endif

namespace perchsim {

void WingSection::init_layout() {
  if (n_bound < 2) throw std::invalid_argument("n_bound must be >= 2");
  if (!(chord > 0.0)) throw std::invalid_argument("chord must be > 0");
  const double dl = chord / n_bound;
  bound_s.resize(n_bound);
  panel_len.assign(n_bound, dl);
  // Bound vortex at the quarter chord of each panel; the control points
  // midway between adjacent vortices then sit at the panel three-quarter
  // points (the stable lumped-vortex spacing).
  for (int i = 0; i < n_bound; ++i) bound_s[i] = (i + 0.25) * dl;
  cp_s.resize(n_bound + 1);
  cp_s.front() = 0.0;
  for (int i = 1; i < n_bound; ++i) cp_s[i] = 0.5 * (bound_s[i - 1] + bound_s[i]);
  cp_s.back() = chord;
  bound_pos.resize(n_bound);
  cp_pos.resize(n_bound + 1);
  bound_vel.resize(n_bound);
  cp_vel.resize(n_bound + 1);
}

Vec2 WingSection::chord_point(double s) const {
  const Vec2 forward{std::cos(pose.angle), std::sin(pose.angle)};
  return pose.ref + (0.5 * chord - s) * forward;
}

void geometry_update(WingSection& section, const SectionPose& pose,
                     const SectionMotion& motion) {
  if (!pose.ref.finite() || !std::isfinite(pose.angle))
    throw std::invalid_argument("non-finite section pose");
  section.pose = pose;
  section.motion = motion;

  const Vec2 forward{std::cos(pose.angle), std::sin(pose.angle)};
  const Vec2 forward_perp = forward.rot90();  // d(forward)/d(angle)
  // Tangent runs trailing edge -> leading edge; the pressure difference acts
  // along normal_hat = tangent rotated -90 deg. This pairing keeps the two
  // terms of the pressure formula sign-consistent with the induction kernel.
  section.tangent_hat = forward;
  section.normal_hat = {section.tangent_hat.z, -section.tangent_hat.x};

  auto place = [&](double s, Vec2& p, Vec2& v) {
    const double a = 0.5 * section.chord - s;
    p = pose.ref + a * forward;
    v = motion.ref_vel + motion.angular_rate * a * forward_perp;
  };
  for (int i = 0; i < section.n_bound; ++i)
    place(section.bound_s[i], section.bound_pos[i], section.bound_vel[i]);
  for (int i = 0; i <= section.n_bound; ++i)
    place(section.cp_s[i], section.cp_pos[i], section.cp_vel[i]);
  place(0.0, section.le_pos, section.le_vel);
  place(section.chord, section.te_pos, section.te_vel);
}

LinearSystem assemble_system(const WingSection& section,
                             std::span<const VortexParticle> wake, const Vec2& shed_le,
                             const Vec2& shed_te, const Vec2& ambient,
                             const KernelConfig& cfg, double kelvin_rhs,
                             const LeadingEdgeCondition& le_cond) {
  const int nb = section.n_bound;
  const int n = nb + 2;
  LinearSystem sys;
  sys.n = n;
  sys.a.assign(static_cast<std::size_t>(n) * n, 0.0);
  sys.rhs.assign(n, 0.0);

  // Known wake influence at the control points.
  std::vector<Vec2> wake_vel(nb + 1);
  accumulate_induced_velocity(wake, section.cp_pos, cfg, wake_vel);

  VortexParticle unit_bound{1.0, {}, true};
  VortexParticle unit_wake{1.0, {}, false};
  for (int i = 1; i <= nb; ++i) {
    const Vec2& cp = section.cp_pos[i];
    const Vec2& nh = section.normal_hat;
    double* row = &sys.a[static_cast<std::size_t>(i) * n];
    for (int j = 0; j < nb; ++j) {
      unit_bound.pos = section.bound_pos[j];
      row[j] = induced_velocity_singular(unit_bound, cp).dot(nh);
    }
    unit_wake.pos = shed_le;
    row[nb] = induced_velocity_regularized(unit_wake, cp, cfg).dot(nh);
    unit_wake.pos = shed_te;
    row[nb + 1] = induced_velocity_regularized(unit_wake, cp, cfg).dot(nh);
    sys.rhs[i] = (section.cp_vel[i] - ambient - wake_vel[i]).dot(nh);
  }

  // Leading-edge condition in place of collocation at the edge point.
  double* le_row = sys.a.data();
  if (le_cond.kind == LeadingEdgeCondition::Kind::NoShedding) {
    le_row[nb] = 1.0;
    sys.rhs[0] = 0.0;
  } else {
    le_row[0] = 1.0;
    sys.rhs[0] = le_cond.capped_strength;
  }

  // Kelvin closure: the unknown strengths absorb the circulation budget.
  double* last = &sys.a[static_cast<std::size_t>(nb + 1) * n];
  for (int j = 0; j < n; ++j) last[j] = 1.0;
  sys.rhs[nb + 1] = kelvin_rhs;
  return sys;
}

BoundSolution solve_bound_strengths(const LinearSystem& system) {
  const int n = system.n;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      a(system.a.data(), n, n);
  Eigen::Map<const Eigen::VectorXd> b(system.rhs.data(), n);
  if (!a.allFinite() || !b.allFinite())
    throw SolveError("boundary system has non-finite entries");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
#ifdef PERCHSIM_DUMP_SINGULAR
    std::cerr << "singular system, rcond=" << rcond << "\nA=\n" << a << "\nb=\n"
              << b.transpose() << "\n";
#endif
    throw SolveError("boundary system is singular or ill-conditioned, rcond=" +
                     std::to_string(rcond));
  }
  Eigen::VectorXd x = lu.solve(b);
  if (!x.allFinite()) throw SolveError("boundary solve produced non-finite strengths");

  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  const double residual = (a * x - b).cwiseAbs().maxCoeff();
  if (residual > 1e-8 * scale)
    throw SolveError("boundary solve residual too large: " + std::to_string(residual));

  BoundSolution sol;
  sol.bound_strengths.assign(x.data(), x.data() + n - 2);
  sol.le_strength = x[n - 2];
  sol.te_strength = x[n - 1];
  return sol;
}

ShedPositions shed_edge_particles(const WingSection& section,
                                  const std::optional<Vec2>& prev_le,
                                  const std::optional<Vec2>& prev_te, const Vec2& ambient,
                                  double dt, double fraction) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  auto place = [&](const Vec2& edge, const Vec2& edge_vel, const std::optional<Vec2>& prev,
                   const Vec2& fallback_dir, double dir_sign) {
    if (prev) {
      Vec2 off = fraction * (*prev - edge);
      // The nascent particle models vorticity released at the edge this
      // step; if the previous particle was swept far away, chasing it
      // detaches the shed point from the airfoil and can degenerate the
      // boundary system. Keep the placement within a chord of the edge.
      const double len = off.norm();
      if (len > section.chord) off *= section.chord / len;
      return edge + off;
    }
    // Local relative flow at the edge; the leading edge releases vorticity on
    // its upstream side, the trailing edge downstream (mirror-symmetric for a
    // plate at zero incidence).
    const Vec2 v_rel = dir_sign * (ambient - edge_vel);
    const double travel = fraction * v_rel.norm() * dt;
    if (travel < 1e-9 * section.chord)
      return edge + (1e-6 * section.chord) * fallback_dir;
    return edge + travel * v_rel.normalized();
  };
  ShedPositions out;
  out.le = place(section.le_pos, section.le_vel, prev_le, section.tangent_hat, -1.0);
  out.te = place(section.te_pos, section.te_vel, prev_te, -section.tangent_hat, 1.0);
  return out;
}

std::vector<double> pressure_distribution(const WingSection& section,
                                          BoundSolution& solution,
                                          std::span<const VortexParticle> wake,
                                          const Vec2& ambient, const KernelConfig& cfg,
                                          double rho, double dt,
                                          std::span<const double> prev_cumulative,
                                          double prev_le_strength) {
  const int nb = section.n_bound;
  if (static_cast<int>(solution.bound_strengths.size()) != nb)
    throw std::invalid_argument("solution size mismatch");

  solution.cumulative.resize(nb);
  solution.strength_rates.resize(nb);
  double cum = solution.le_strength;
  for (int i = 0; i < nb; ++i) {
    cum += solution.bound_strengths[i];
    solution.cumulative[i] = cum;
    const double prev =
        prev_cumulative.empty() ? 0.0 : prev_cumulative[i] - prev_le_strength;
    solution.strength_rates[i] = (cum - prev) / dt;
  }

  // Air velocity at each bound vortex: ambient + wake + other bound vortices.
  std::vector<Vec2> v_air(nb);
  accumulate_induced_velocity(wake, section.bound_pos, cfg, v_air);
  for (int i = 0; i < nb; ++i) {
    VortexParticle other{0.0, {}, true};
    Vec2 v{};
    for (int j = 0; j < nb; ++j) {
      if (j == i) continue;  // no singular self-influence
      other.strength = solution.bound_strengths[j];
      other.pos = section.bound_pos[j];
      v += induced_velocity_singular(other, section.bound_pos[i]);
    }
    v_air[i] += v + ambient;
  }

  std::vector<double> dp(nb);
  for (int i = 0; i < nb; ++i) {
    const Vec2 dv = section.bound_vel[i] - v_air[i];
    const double tangential = dv.dot(section.tangent_hat) * solution.bound_strengths[i] /
                              section.panel_len[i];
    dp[i] = rho * (tangential + solution.strength_rates[i]);
  }
  return dp;
}

SectionLoads integrate_loads(const WingSection& section, std::span<const double> dp,
                             double span_width) {
  SectionLoads loads;
  double s_start = 0.0;
  for (int i = 0; i < section.n_bound; ++i) {
    const Vec2 f = dp[i] * section.panel_len[i] * span_width * section.normal_hat;
    // Each panel's pressure acts at its centroid, not at the bound vortex.
    const Vec2 centroid = section.chord_point(s_start + 0.5 * section.panel_len[i]);
    s_start += section.panel_len[i];
    loads.force += f;
    loads.moment += (centroid - section.pose.ref).cross(f);
  }
  return loads;
}

}  // namespace perchsim
