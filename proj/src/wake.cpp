#include "perchsim/wake.hpp"

#include <algorithm>
#include <cmath>

namespace perchsim {

namespace {

std::vector<Vec2> local_velocities(const Wake& wake,
                                   std::span<const VortexParticle> bound_sources,
                                   std::span<const Vec2> positions, const Vec2& ambient,
                                   const KernelConfig& cfg) {
  std::vector<Vec2> vel(positions.size(), ambient);
  accumulate_induced_velocity(bound_sources, positions, cfg, vel);
  accumulate_induced_velocity(wake.particles, positions, cfg, vel);
  return vel;
}

}  // namespace

void convect(Wake& wake, std::span<const VortexParticle> bound_sources,
             const Vec2& ambient, double dt, const KernelConfig& cfg,
             ConvectionScheme scheme) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  const std::size_t n = wake.particles.size();
  if (n == 0) return;

  std::vector<Vec2> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = wake.particles[i].pos;
  std::vector<Vec2> v1 = local_velocities(wake, bound_sources, pos, ambient, cfg);

  if (scheme == ConvectionScheme::Euler) {
    for (std::size_t i = 0; i < n; ++i) wake.particles[i].pos += dt * v1[i];
    return;
  }

  // Midpoint: move the whole wake to the half step, re-evaluate, then take the
  // full step from the original positions.
  Wake half = wake;
  std::vector<Vec2> mid(n);
  for (std::size_t i = 0; i < n; ++i) {
    mid[i] = pos[i] + 0.5 * dt * v1[i];
    half.particles[i].pos = mid[i];
  }
  std::vector<Vec2> v2 = local_velocities(half, bound_sources, mid, ambient, cfg);
  for (std::size_t i = 0; i < n; ++i) wake.particles[i].pos = pos[i] + dt * v2[i];
}

int merge_pass(Wake& wake, std::span<const Vec2> control_points, const MergeConfig& cfg,
               const KernelConfig& kernel, const Vec2& wing_ref) {
  cfg.validate();
  const std::size_t n = wake.particles.size();
  if (n < 2) return 0;

  std::vector<char> eligible(n, 1);
  if (cfg.exclusion_radius > 0.0) {
    const double r2 = cfg.exclusion_radius * cfg.exclusion_radius;
    for (std::size_t i = 0; i < n; ++i)
      eligible[i] = (wake.particles[i].pos - wing_ref).squared_norm() > r2;
  }

  struct Candidate {
    double dist2;
    std::size_t a, b;
  };
  std::vector<Candidate> candidates;
  const double rad2 = cfg.candidate_radius * cfg.candidate_radius;
  for (std::size_t i = 0; i < n; ++i) {
    if (!eligible[i]) continue;
    const auto& pi = wake.particles[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!eligible[j]) continue;
      const auto& pj = wake.particles[j];
      if (pi.strength * pj.strength <= 0.0) continue;  // same-sign pairs only
      const double d2 = (pi.pos - pj.pos).squared_norm();
      if (d2 > rad2) continue;
      const double sum = std::abs(pi.strength + pj.strength);
      if (sum < 1e-12 * std::max(std::abs(pi.strength), std::abs(pj.strength)))
        continue;  // near-cancelling pair, weighted position would be meaningless
      candidates.push_back({d2, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.dist2 != y.dist2) return x.dist2 < y.dist2;
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });

  // Accumulated induced-velocity change at the wing control points; a merge is
  // accepted only if the running total stays inside the threshold everywhere.
  std::vector<Vec2> accumulated(control_points.size());
  std::vector<char> used(n, 0);
  struct Replacement {
    std::size_t a, b;
    VortexParticle merged;
  };
  std::vector<Replacement> replacements;

  for (const Candidate& c : candidates) {
    if (used[c.a] || used[c.b]) continue;
    const VortexParticle& pa = wake.particles[c.a];
    const VortexParticle& pb = wake.particles[c.b];
    const double wa = std::abs(pa.strength);
    const double wb = std::abs(pb.strength);
    VortexParticle merged{pa.strength + pb.strength,
                          (wa * pa.pos + wb * pb.pos) / (wa + wb), false};

    bool ok = true;
    std::vector<Vec2> change(control_points.size());
    for (std::size_t k = 0; k < control_points.size(); ++k) {
      change[k] = induced_velocity_regularized(merged, control_points[k], kernel) -
                  induced_velocity_regularized(pa, control_points[k], kernel) -
                  induced_velocity_regularized(pb, control_points[k], kernel);
      const Vec2 total = accumulated[k] + change[k];
      if (total.squared_norm() > cfg.velocity_threshold * cfg.velocity_threshold) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (std::size_t k = 0; k < control_points.size(); ++k) accumulated[k] += change[k];
    used[c.a] = used[c.b] = 1;
    replacements.push_back({c.a, c.b, merged});
  }
  if (replacements.empty()) return 0;

  // The merged particle takes the slot of the lower index; the partner is
  // dropped. Unmerged particles keep their relative order.
  std::vector<char> drop(n, 0);
  for (const auto& r : replacements) {
    wake.particles[r.a] = r.merged;
    drop[r.b] = 1;
  }
  std::size_t w = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!drop[i]) wake.particles[w++] = wake.particles[i];
  wake.particles.resize(w);
  return static_cast<int>(replacements.size());
}

}  // namespace perchsim
