#pragma once

#include <cstdint>
#include <string_view>

#include "mrr/input_capture.hpp"
#include "mrr/rng.hpp"
#include "mrr/vec3.hpp"

namespace mrr {

enum class BehaviorKind { Wander, Pursue, Flee };

std::string_view to_string(BehaviorKind k);
BehaviorKind behavior_from_string(std::string_view s);

struct BehaviorParams {
  double max_speed = 0.15;                // m/s
  double max_accel = 0.6;                 // m/s^2
  double wander_radius = 0.15;            // m
  Vec3 wander_center{0.40, 0.25, 0.15};   // m, game space
  double wander_jitter = 0.3;             // m/s^2, std-dev of random steering
  std::uint64_t rng_seed = 1;

  void validate() const;
  friend bool operator==(const BehaviorParams&, const BehaviorParams&) = default;
};

struct FishState {
  Vec3 pos;
  Vec3 vel;
  BehaviorKind behavior = BehaviorKind::Wander;

  friend bool operator==(const FishState&, const FishState&) = default;
};

// Distance from a wall inside which outward steering is suppressed.
inline constexpr double kWallMargin = 0.02;

// Random exploration of the wander sphere. Acceleration is gaussian jitter
// plus inward steering near the rim; a fish that starts inside the sphere
// never leaves it. A fish outside the sphere steers back toward the center.
FishState wander_step(const FishState& s, const BehaviorParams& p, Rng& rng, double dt);

// Seek toward target at max_speed with acceleration bounded by max_accel.
// Position is kept inside `tank`.
FishState pursue_step(const FishState& s, const Vec3& target, const BehaviorParams& p,
                      const Aabb& tank, double dt);

// Mirror of pursue_step. When the threat coincides with the fish the flee
// direction is drawn from rng. Outward motion near walls is suppressed and
// position is kept inside `tank`.
FishState flee_step(const FishState& s, const Vec3& threat, const BehaviorParams& p,
                    const Aabb& tank, Rng& rng, double dt);

// Dispatches on s.behavior; pursue/flee use the hand position as target.
FishState step(const FishState& s, const HandState& hand, const BehaviorParams& p,
               const Aabb& tank, Rng& rng, double dt);

}  // namespace mrr
