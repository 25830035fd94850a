#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "perchsim/vec2.hpp"

namespace perchsim {

// Lagrangian circulation carrier. Positive strength induces counterclockwise
// flow (x toward z) around the particle.
struct VortexParticle {
  double strength{0.0};  // circulation, m^2/s
  Vec2 pos;
  bool is_bound{false};
};

struct KernelConfig {
  double core_radius{0.01};  // m, > 0

  void validate() const {
    if (!(core_radius > 0.0)) throw std::invalid_argument("core_radius must be > 0");
  }
};

struct SingularityError : std::runtime_error {
  SingularityError() : std::runtime_error("singular kernel evaluated at the vortex position") {}
};

// Point-vortex kernel. Undefined at the source point.
inline Vec2 induced_velocity_singular(const VortexParticle& v, const Vec2& target) {
  const Vec2 d = target - v.pos;
  const double r2 = d.squared_norm();
  if (r2 == 0.0) throw SingularityError{};
  const double f = v.strength / (2.0 * M_PI * r2);
  return {f * d.z, -f * d.x};
}

// Finite-core kernel: the singular kernel scaled by
// (r/rc)^2 / sqrt(1 + (r/rc)^4). Vanishes at the source point.
inline Vec2 induced_velocity_regularized(const VortexParticle& v, const Vec2& target,
                                         const KernelConfig& cfg) {
  const Vec2 d = target - v.pos;
  const double rc2 = cfg.core_radius * cfg.core_radius;
  const double q = d.squared_norm() / rc2;  // (r/rc)^2
  const double f = v.strength / (2.0 * M_PI * rc2 * std::sqrt(1.0 + q * q));
  return {f * d.z, -f * d.x};
}

// Kernel dispatched on is_bound: bound vortices are singular, wake vortices
// carry a finite core.
inline Vec2 induced_velocity(const VortexParticle& v, const Vec2& target,
                             const KernelConfig& cfg) {
  return v.is_bound ? induced_velocity_singular(v, target)
                    : induced_velocity_regularized(v, target, cfg);
}

// Adds the summed influence of all sources to out[i] for each target.
// Summation order is fixed (source index order) so results are deterministic.
void accumulate_induced_velocity(std::span<const VortexParticle> sources,
                                 std::span<const Vec2> targets, const KernelConfig& cfg,
                                 std::span<Vec2> out);

// Batch influence evaluation; semantics are the sequential per-pair sum.
std::vector<Vec2> total_induced_velocity(std::span<const VortexParticle> sources,
                                         std::span<const Vec2> targets,
                                         const KernelConfig& cfg);

}  // namespace perchsim
