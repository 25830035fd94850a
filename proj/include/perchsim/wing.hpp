#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "perchsim/vec2.hpp"
#include "perchsim/vortex.hpp"

namespace perchsim {

struct SectionPose {
  Vec2 ref;           // world position of the midchord reference point
  double angle{0.0};  // pitch of the forward (trailing-to-leading) direction, rad CCW from +x
};

struct SectionMotion {
  Vec2 ref_vel;         // world velocity of the reference point
  double angular_rate{0.0};  // rad/s, CCW positive
};

// Discretized thin flat plate. Chordwise coordinate s runs from the leading
// edge (s = 0) to the trailing edge (s = chord); bound vortices sit at the
// centers of n_bound equal panels, control points midway between adjacent
// bound vortices plus one at each edge.
struct WingSection {
  double chord{0.1};
  int n_bound{16};

  std::vector<double> bound_s;   // n_bound chordwise stations
  std::vector<double> cp_s;      // n_bound + 1 stations
  std::vector<double> panel_len; // n_bound, sums to chord

  SectionPose pose;
  SectionMotion motion;

  // World-frame geometry, valid after geometry_update().
  std::vector<Vec2> bound_pos;
  std::vector<Vec2> cp_pos;
  std::vector<Vec2> bound_vel;  // surface velocity at bound vortices
  std::vector<Vec2> cp_vel;     // surface velocity at control points
  Vec2 tangent_hat;  // trailing edge -> leading edge (the forward direction)
  Vec2 normal_hat;   // tangent rotated -90 deg; positive pressure acts along it
  Vec2 le_pos;
  Vec2 te_pos;
  Vec2 le_vel;
  Vec2 te_vel;

  WingSection() { init_layout(); }
  WingSection(double chord_, int n_bound_) : chord(chord_), n_bound(n_bound_) {
    init_layout();
  }

  void init_layout();
  Vec2 chord_point(double s) const;  // world position of chord station s
};

// Recompute world-frame positions, unit vectors, and surface velocities.
void geometry_update(WingSection& section, const SectionPose& pose,
                     const SectionMotion& motion);

struct BoundSolution {
  std::vector<double> bound_strengths;
  double le_strength{0.0};
  double te_strength{0.0};
  // Cumulative circulation from the newest leading-edge wake vortex through
  // bound vortex i, and its backward-difference rate (filled by
  // pressure_distribution).
  std::vector<double> cumulative;
  std::vector<double> strength_rates;
};

struct LinearSystem {
  // Row-major (n_bound + 2)^2 matrix and right-hand side.
  int n{0};
  std::vector<double> a;
  std::vector<double> rhs;
};

struct SolveError : std::runtime_error {
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

// Linear condition standing in for the collocation row at the leading-edge
// control point. No-through-flow collocation at a sharp edge is ill-posed
// (the bound vorticity of an attached flow is singular there), so the row
// instead states what the edge sheds: nothing while the leading vortex stays
// below its suction limit, otherwise the leading vortex is pinned at the
// limit and the nascent edge particle absorbs the excess.
struct LeadingEdgeCondition {
  enum class Kind { NoShedding, CappedSuction };
  Kind kind{Kind::NoShedding};
  double capped_strength{0.0};  // pinned leading-vortex strength when capped
};

// No-through-flow rows at the interior and trailing-edge control points, the
// leading-edge condition row, and the Kelvin closure row. Unknowns: n_bound
// bound strengths followed by the new leading- and trailing-edge wake
// strengths at shed_le / shed_te. kelvin_rhs = total circulation budget for
// the unknowns, i.e. initial total circulation minus the summed strength of
// the existing wake.
LinearSystem assemble_system(const WingSection& section,
                             std::span<const VortexParticle> wake, const Vec2& shed_le,
                             const Vec2& shed_te, const Vec2& ambient,
                             const KernelConfig& cfg, double kelvin_rhs,
                             const LeadingEdgeCondition& le_cond = {});

BoundSolution solve_bound_strengths(const LinearSystem& system);

// Placement of the two nascent edge particles. With a previously shed particle
// the new one sits fraction `fraction` of the way from the edge toward it;
// otherwise it is offset along the local relative flow by
// fraction * |v_rel| * dt.
struct ShedPositions {
  Vec2 le;
  Vec2 te;
};
ShedPositions shed_edge_particles(const WingSection& section,
                                  const std::optional<Vec2>& prev_le,
                                  const std::optional<Vec2>& prev_te, const Vec2& ambient,
                                  double dt, double fraction = 1.0 / 3.0);

// Pressure difference across the plate at each bound vortex:
//   dp_i = rho * [ (dv_i . t_hat) * Gamma_i / dl_i + d/dt cum_i ]
// where cum_i accumulates circulation along the path from ambient air over
// the leading-edge wake sheet and the surface to bound vortex i. Stored as
// cum_i = le_strength + sum of bound j <= i; the sheet contribution enters
// the backward-difference rate as prev_le_strength (the previous step's
// leading-edge particle stays on the path after joining the wake):
//   rate_i = (cum_i - prev_cum_i + prev_le_strength) / dt
// (impulsive start without history: cum_i / dt). Positive dp pushes along
// normal_hat. Fills solution.cumulative and solution.strength_rates.
std::vector<double> pressure_distribution(const WingSection& section,
                                          BoundSolution& solution,
                                          std::span<const VortexParticle> wake,
                                          const Vec2& ambient, const KernelConfig& cfg,
                                          double rho, double dt,
                                          std::span<const double> prev_cumulative,
                                          double prev_le_strength = 0.0);

struct SectionLoads {
  Vec2 force;      // N per unit span (times span when scaled by caller)
  double moment{0.0};  // N.m about the section reference point, CCW positive
};

// force = sum dp_i * dl_i * span * n_hat; moment about the section reference.
SectionLoads integrate_loads(const WingSection& section, std::span<const double> dp,
                             double span_width = 1.0);

}  // namespace perchsim
