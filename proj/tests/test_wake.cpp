#include <random>

#include "doctest.h"
#include "perchsim/wake.hpp"

using namespace perchsim;

TEST_CASE("convect: single particle rides the ambient flow exactly") {
  Wake w;
  w.add(3.0, {0.5, -0.5});
  const Vec2 ambient{2.0, 1.0};
  convect(w, {}, ambient, 0.01, KernelConfig{0.01});
  CHECK(w.particles[0].pos.x == doctest::Approx(0.5 + 0.02));
  CHECK(w.particles[0].pos.z == doctest::Approx(-0.5 + 0.01));
  CHECK(w.particles[0].strength == 3.0);
}

TEST_CASE("convect: zero-strength wake in still air does not move") {
  Wake w;
  w.add(0.0, {1.0, 2.0});
  w.add(0.0, {-1.0, 0.3});
  convect(w, {}, {0, 0}, 0.05, KernelConfig{0.01});
  CHECK(w.particles[0].pos.x == 1.0);
  CHECK(w.particles[1].pos.z == 0.3);
}

TEST_CASE("counter-rotating pair translates at Gamma/(2 pi d)") {
  // Two particles with +G and -G separated by d move perpendicular to their
  // connecting line at G/(2 pi d).
  const double gamma = 1.5;
  const double d = 0.5;
  const double expect = gamma / (2.0 * M_PI * d);
  const KernelConfig cfg{0.002};  // core much smaller than the separation

  auto translation_speed = [&](double dt, int steps) {
    Wake w;
    w.add(gamma, {0.0, d / 2.0});
    w.add(-gamma, {0.0, -d / 2.0});
    const Vec2 start = w.particles[0].pos;
    for (int i = 0; i < steps; ++i) convect(w, {}, {0, 0}, dt, cfg, ConvectionScheme::Midpoint);
    return (w.particles[0].pos - start).norm() / (dt * steps);
  };

  // Richardson extrapolation in dt.
  const double v1 = translation_speed(0.02, 50);
  const double v2 = translation_speed(0.01, 100);
  const double v_extrap = 2.0 * v2 - v1;
  CHECK(v_extrap == doctest::Approx(expect).epsilon(0.01));

  // Direction: perpendicular to the connecting line (+G on top -> moves +x
  // or -x depending on sign; both particles move together).
  Wake w;
  w.add(gamma, {0.0, d / 2.0});
  w.add(-gamma, {0.0, -d / 2.0});
  convect(w, {}, {0, 0}, 1e-4, cfg);
  CHECK(std::abs(w.particles[0].pos.z - d / 2.0) < 1e-9);
  CHECK(std::abs(w.particles[0].pos.x - w.particles[1].pos.x) < 1e-12);
}

TEST_CASE("merge: coincident same-sign particles always merge") {
  Wake w;
  w.add(1.0, {0.5, 0.5});
  w.add(2.0, {0.5, 0.5});
  const std::vector<Vec2> cps{{0.0, 0.0}};
  MergeConfig cfg;
  cfg.velocity_threshold = 1e-9;
  cfg.candidate_radius = 0.1;
  const int merged = merge_pass(w, cps, cfg, KernelConfig{0.01});
  CHECK(merged == 1);
  REQUIRE(w.particles.size() == 1);
  CHECK(w.particles[0].strength == 3.0);
  CHECK(w.particles[0].pos.x == doctest::Approx(0.5));
}

TEST_CASE("merge: exactly cancelling pair is never merged") {
  Wake w;
  w.add(1.0, {0.5, 0.5});
  w.add(-1.0, {0.5001, 0.5});
  MergeConfig cfg;
  cfg.velocity_threshold = 1e6;
  cfg.candidate_radius = 1.0;
  const std::vector<Vec2> cps{{0.0, 0.0}};
  CHECK(merge_pass(w, cps, cfg, KernelConfig{0.01}) == 0);
  CHECK(w.particles.size() == 2);
}

TEST_CASE("merge audit on randomized wakes: bounded velocity change, exact conservation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-0.5, 0.5);
  std::uniform_real_distribution<double> str(-0.05, 0.05);
  const KernelConfig kernel{0.005};
  std::vector<Vec2> cps;
  for (int i = 0; i < 17; ++i) cps.push_back({-1.0 + 0.01 * i, 0.0});

  MergeConfig cfg;
  cfg.velocity_threshold = 1e-3;
  cfg.candidate_radius = 0.05;

  for (int seed = 0; seed < 5; ++seed) {
    Wake w;
    for (int i = 0; i < 500; ++i) w.add(str(rng), {pos(rng), pos(rng)});
    const double total_before = w.total_strength();
    const auto before = total_induced_velocity(w.particles, cps, kernel);
    const int merged = merge_pass(w, cps, cfg, kernel);
    CHECK(merged > 0);
    const auto after = total_induced_velocity(w.particles, cps, kernel);
    CHECK(w.total_strength() == doctest::Approx(total_before).epsilon(1e-14));
    for (std::size_t k = 0; k < cps.size(); ++k) {
      CHECK(std::abs(after[k].x - before[k].x) <= cfg.velocity_threshold * (1.0 + 1e-9));
      CHECK(std::abs(after[k].z - before[k].z) <= cfg.velocity_threshold * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("repeated merge passes reach a fixed point") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-0.2, 0.2);
  std::uniform_real_distribution<double> str(0.0, 0.01);
  Wake w;
  for (int i = 0; i < 300; ++i) w.add(str(rng), {pos(rng), pos(rng)});
  const std::vector<Vec2> cps{{-2.0, 0.0}, {-2.1, 0.0}};
  MergeConfig cfg;
  cfg.velocity_threshold = 5e-4;
  cfg.candidate_radius = 0.1;
  const KernelConfig kernel{0.005};

  std::size_t prev = w.particles.size();
  for (int pass = 0; pass < 50; ++pass) {
    merge_pass(w, cps, cfg, kernel);
    CHECK(w.particles.size() <= prev);
    if (w.particles.size() == prev) break;
    prev = w.particles.size();
  }
  // converged: one more pass changes nothing
  const std::size_t at_fixed_point = w.particles.size();
  merge_pass(w, cps, cfg, kernel);
  CHECK(w.particles.size() == at_fixed_point);
}

TEST_CASE("merge respects the wing exclusion radius") {
  Wake w;
  w.add(1.0, {0.01, 0.0});
  w.add(1.0, {0.012, 0.0});
  MergeConfig cfg;
  cfg.velocity_threshold = 1e6;
  cfg.candidate_radius = 0.1;
  cfg.exclusion_radius = 0.5;
  const std::vector<Vec2> cps{{0.0, 0.0}};
  CHECK(merge_pass(w, cps, cfg, KernelConfig{0.01}, {0.0, 0.0}) == 0);
  CHECK(w.particles.size() == 2);
}
