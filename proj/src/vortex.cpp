#include "perchsim/vortex.hpp"

namespace perchsim {

void accumulate_induced_velocity(std::span<const VortexParticle> sources,
                                 std::span<const Vec2> targets, const KernelConfig& cfg,
                                 std::span<Vec2> out) {
  const double rc2 = cfg.core_radius * cfg.core_radius;
  const double inv_two_pi = 1.0 / (2.0 * M_PI);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Vec2 p = targets[t];
    double vx = 0.0, vz = 0.0;
    for (const VortexParticle& s : sources) {
      const double dx = p.x - s.pos.x;
      const double dz = p.z - s.pos.z;
      const double r2 = dx * dx + dz * dz;
      double f;
      if (s.is_bound) {
        if (r2 == 0.0) throw SingularityError{};
        f = s.strength * inv_two_pi / r2;
      } else {
        const double q = r2 / rc2;
        f = s.strength * inv_two_pi / (rc2 * std::sqrt(1.0 + q * q));
      }
      vx += f * dz;
      vz -= f * dx;
    }
    out[t] += Vec2{vx, vz};
  }
}

std::vector<Vec2> total_induced_velocity(std::span<const VortexParticle> sources,
                                         std::span<const Vec2> targets,
                                         const KernelConfig& cfg) {
  std::vector<Vec2> out(targets.size());
  accumulate_induced_velocity(sources, targets, cfg, out);
  return out;
}

}  // namespace perchsim
