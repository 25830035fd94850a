#pragma once

#include "perchsim/vehicle.hpp"
#include "perchsim/wing.hpp"

namespace perchsim {

struct SectionStepResult {
  SectionLoads loads;  // per unit span
  double bc_residual{0.0};
  BoundSolution solution;
};

// One full unsteady step of a single section: boundary solve with Kelvin
// closure, edge shedding, pressure loads, wake convection and merging.
SectionStepResult advance_section(WingSection& section, SliceFluid& fluid,
                                  const SectionPose& pose, const SectionMotion& motion,
                                  const SimParams& sim, double rho);

// A single 2D wing section in prescribed motion; the driver behind the
// standalone validation cases.
class SectionSim {
 public:
  SectionSim(double chord, int n_bound, const SimParams& sim, double rho)
      : section_(chord, n_bound), sim_(sim), rho_(rho) {}

  SectionStepResult step(const SectionPose& pose, const SectionMotion& motion) {
    return advance_section(section_, fluid_, pose, motion, sim_, rho_);
  }

  const WingSection& section() const { return section_; }
  const SliceFluid& fluid() const { return fluid_; }
  SliceFluid& fluid() { return fluid_; }

 private:
  WingSection section_;
  SliceFluid fluid_;
  SimParams sim_;
  double rho_;
};

}  // namespace perchsim
