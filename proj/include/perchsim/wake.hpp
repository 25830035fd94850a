#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "perchsim/vec2.hpp"
#include "perchsim/vortex.hpp"

namespace perchsim {

enum class ConvectionScheme { Euler, Midpoint };

// Free vortex particles shed from the wing edges. Particles never carry
// is_bound = true.
struct Wake {
  std::vector<VortexParticle> particles;

  void add(double strength, const Vec2& pos) {
    particles.push_back({strength, pos, false});
  }
  // Index-order sum; the reproducible reference for conservation checks.
  double total_strength() const {
    double s = 0.0;
    for (const auto& p : particles) s += p.strength;
    return s;
  }
};

struct MergeConfig {
  double velocity_threshold{1e-3};  // m/s, max induced-velocity change at any control point
  double candidate_radius{0.05};    // m, max pair separation considered
  // Particles closer than this to the wing reference are left alone.
  double exclusion_radius{0.0};

  void validate() const {
    if (!(velocity_threshold > 0.0)) throw std::invalid_argument("velocity_threshold must be > 0");
    if (!(candidate_radius > 0.0)) throw std::invalid_argument("candidate_radius must be > 0");
  }
};

// Move every particle by dt times the local velocity (ambient plus induction
// from all sources; the regularized kernel makes self-influence vanish).
// Bound sources are held fixed over the step.
void convect(Wake& wake, std::span<const VortexParticle> bound_sources,
             const Vec2& ambient, double dt, const KernelConfig& cfg,
             ConvectionScheme scheme = ConvectionScheme::Euler);

// Greedy nearest-first pair merging. A pair is merged only when the summed
// strength replacement, placed at the |strength|-weighted average position,
// keeps the accumulated induced-velocity change at every control point within
// velocity_threshold. Only same-sign pairs within candidate_radius are
// candidates, each particle merges at most once per pass, and total strength
// is conserved exactly. Returns the number of merges performed.
int merge_pass(Wake& wake, std::span<const Vec2> control_points, const MergeConfig& cfg,
               const KernelConfig& kernel, const Vec2& wing_ref = {});

}  // namespace perchsim
