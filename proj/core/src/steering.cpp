#include "mrr/steering.hpp"

#include <cmath>
#include <string>

#include "mrr/errors.hpp"

namespace mrr {

namespace {

// Fraction of the wander radius beyond which inward steering kicks in.
constexpr double kRimFraction = 0.8;

struct Kinematics {
  Vec3 pos;
  Vec3 vel;
};

// Semi-implicit Euler with acceleration and speed limits.
Kinematics integrate(const Vec3& pos, const Vec3& vel, const Vec3& accel,
                     const BehaviorParams& p, double dt) {
  Kinematics k;
  k.vel = truncate(vel + truncate(accel, p.max_accel) * dt, p.max_speed);
  k.pos = pos + k.vel * dt;
  return k;
}

// Acceleration that reaches `desired` in one step if the limit allows.
Vec3 steer_toward(const Vec3& desired, const Vec3& vel, double dt) {
  return (desired - vel) * (1.0 / dt);
}

// Removes desired-velocity components that point into a nearby wall.
Vec3 suppress_outward(const Vec3& pos, Vec3 desired, const Aabb& tank) {
  auto fix = [](double p, double lo, double hi, double& d) {
    if (p - lo <= kWallMargin && d < 0.0) d = 0.0;
    if (hi - p <= kWallMargin && d > 0.0) d = 0.0;
  };
  fix(pos.x, tank.min.x, tank.max.x, desired.x);
  fix(pos.y, tank.min.y, tank.max.y, desired.y);
  fix(pos.z, tank.min.z, tank.max.z, desired.z);
  return desired;
}

// Clamps position into the tank and zeroes velocity components that would
// carry the fish further out.
Kinematics contain(Kinematics k, const Aabb& tank) {
  auto axis = [](double& p, double& v, double lo, double hi) {
    if (p < lo) {
      p = lo;
      if (v < 0.0) v = 0.0;
    } else if (p > hi) {
      p = hi;
      if (v > 0.0) v = 0.0;
    }
  };
  axis(k.pos.x, k.vel.x, tank.min.x, tank.max.x);
  axis(k.pos.y, k.vel.y, tank.min.y, tank.max.y);
  axis(k.pos.z, k.vel.z, tank.min.z, tank.max.z);
  return k;
}

FishState seek(const FishState& s, const Vec3& direction, const BehaviorParams& p,
               const Aabb& tank, double dt, bool avoid_walls) {
  Vec3 desired = direction * p.max_speed;
  if (avoid_walls) desired = suppress_outward(s.pos, desired, tank);
  Kinematics k = integrate(s.pos, s.vel, steer_toward(desired, s.vel, dt), p, dt);
  k = contain(k, tank);
  return {k.pos, k.vel, s.behavior};
}

}  // namespace

std::string_view to_string(BehaviorKind k) {
  switch (k) {
    case BehaviorKind::Wander: return "wander";
    case BehaviorKind::Pursue: return "pursue";
    case BehaviorKind::Flee: return "flee";
  }
  return "wander";
}

BehaviorKind behavior_from_string(std::string_view s) {
  if (s == "wander") return BehaviorKind::Wander;
  if (s == "pursue") return BehaviorKind::Pursue;
  if (s == "flee") return BehaviorKind::Flee;
  throw Error("unknown behavior '" + std::string(s) + "'");
}

void BehaviorParams::validate() const {
  if (!(max_speed > 0.0)) throw ConfigError("behavior.max_speed must be > 0");
  if (!(max_accel > 0.0)) throw ConfigError("behavior.max_accel must be > 0");
  if (!(wander_radius > 0.0)) throw ConfigError("behavior.wander_radius must be > 0");
  if (!(wander_jitter >= 0.0)) throw ConfigError("behavior.wander_jitter must be >= 0");
  if (!is_finite(wander_center)) throw ConfigError("behavior.wander_center must be finite");
}

FishState wander_step(const FishState& s, const BehaviorParams& p, Rng& rng, double dt) {
  const Vec3 offset = s.pos - p.wander_center;
  const double dist = norm(offset);
  const double r = p.wander_radius;

  if (dist > r) {
    // Outside the sphere (e.g. after pursuing): head back to the center.
    const Vec3 desired = unit_or_zero(-offset) * p.max_speed;
    const Kinematics k = integrate(s.pos, s.vel, steer_toward(desired, s.vel, dt), p, dt);
    return {k.pos, k.vel, s.behavior};
  }

  Vec3 accel{};
  if (p.wander_jitter > 0.0) {
    accel = Vec3{rng.normal(), rng.normal(), rng.normal()} * p.wander_jitter;
  }
  const double rim = kRimFraction * r;
  if (dist > rim) {
    // Inward pull grows linearly from zero at the rim to max_accel at R.
    const double strength = p.max_accel * (dist - rim) / (r - rim);
    accel += unit_or_zero(-offset) * strength;
  }

  Kinematics k = integrate(s.pos, s.vel, accel, p, dt);
  Vec3 next_offset = k.pos - p.wander_center;
  double next_dist = norm(next_offset);
  if (next_dist > r) {
    // Project back onto the sphere and drop the outward velocity component.
    const Vec3 n = next_offset * (1.0 / next_dist);
    k.pos = p.wander_center + n * r;
    while (norm(k.pos - p.wander_center) > r) {
      k.pos = p.wander_center + (k.pos - p.wander_center) * (1.0 - 1e-15);
    }
    const double radial = dot(k.vel, n);
    if (radial > 0.0) k.vel -= n * radial;
  }
  return {k.pos, k.vel, s.behavior};
}

FishState pursue_step(const FishState& s, const Vec3& target, const BehaviorParams& p,
                      const Aabb& tank, double dt) {
  return seek(s, unit_or_zero(target - s.pos), p, tank, dt, false);
}

FishState flee_step(const FishState& s, const Vec3& threat, const BehaviorParams& p,
                    const Aabb& tank, Rng& rng, double dt) {
  Vec3 away = unit_or_zero(s.pos - threat);
  if (away == Vec3{}) away = rng.unit_vector();
  return seek(s, away, p, tank, dt, true);
}

FishState step(const FishState& s, const HandState& hand, const BehaviorParams& p,
               const Aabb& tank, Rng& rng, double dt) {
  switch (s.behavior) {
    case BehaviorKind::Wander: return wander_step(s, p, rng, dt);
    case BehaviorKind::Pursue: return pursue_step(s, hand.pos, p, tank, dt);
    case BehaviorKind::Flee: return flee_step(s, hand.pos, p, tank, rng, dt);
  }
  return s;
}

}  // namespace mrr
