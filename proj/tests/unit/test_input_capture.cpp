#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "mrr/errors.hpp"
#include "mrr/input_capture.hpp"
#include "mrr/rng.hpp"
#include "oracles.hpp"

using namespace mrr;

namespace {

std::vector<Correspondence> correspondences(const CalibrationMap& m,
                                            std::initializer_list<CameraPoint> cams) {
  std::vector<Correspondence> out;
  for (auto c : cams) out.push_back({c, m.apply(c)});
  return out;
}

}  // namespace

TEST(Calibration, IdentityFromThreePoints) {
  const auto pairs = correspondences(CalibrationMap::identity(), {{0, 0}, {1, 0}, {0, 1}});
  const auto m = solve_calibration(pairs);
  const auto k = m.coefficients();
  const std::array<double, 6> want{1, 0, 0, 0, 1, 0};
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(k[i], want[i], 1e-12);
}

TEST(Calibration, RecoversRandomAffineMaps) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const CalibrationMap truth{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1, 1),
                               rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1, 1)};
    if (std::abs(truth.determinant()) < 0.05) continue;
    std::vector<Correspondence> pairs;
    const int n = 3 + static_cast<int>(rng.next_u64() % 8);
    for (int i = 0; i < n; ++i) {
      const CameraPoint c{rng.uniform(), rng.uniform()};
      pairs.push_back({c, truth.apply(c)});
    }
    const auto got = solve_calibration(pairs).coefficients();
    const auto want = truth.coefficients();
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(got[i], want[i], 1e-9) << "trial " << trial;
  }
}

TEST(Calibration, CollinearPointsAreDegenerate) {
  const auto pairs = correspondences(CalibrationMap::identity(), {{0, 0}, {0.5, 0.5}, {1, 1}});
  EXPECT_THROW(solve_calibration(pairs), DegenerateCorrespondences);
}

TEST(Calibration, TooFewPointsAreDegenerate) {
  const auto pairs = correspondences(CalibrationMap::identity(), {{0, 0}, {1, 0}});
  EXPECT_THROW(solve_calibration(pairs), DegenerateCorrespondences);
}

TEST(Calibration, InverseRoundTrips) {
  const CalibrationMap m{0.8, 0.1, 0.05, -0.02, 0.5, 0.01};
  const CameraPoint c{0.3, 0.7};
  const CameraPoint back = to_camera(m, apply_calibration(m, {0.0, c.u, c.v, true}));
  EXPECT_NEAR(back.u, c.u, 1e-12);
  EXPECT_NEAR(back.v, c.v, 1e-12);
}

TEST(Calibration, InvalidSampleIsRejected) {
  EXPECT_THROW(apply_calibration(CalibrationMap::identity(), {0.0, 0.5, 0.5, false}),
               InvalidSample);
}

TEST(Calibration, ResultLiesOnTablePlane) {
  const Vec3 p = apply_calibration(CalibrationMap::identity(), {0.0, 0.2, 0.3, true});
  EXPECT_EQ(p.z, 0.0);
}

TEST(Estimator, SingleSampleHasZeroVelocity) {
  const std::vector<RawSample> h{{1.0, 0.4, 0.6, true}};
  const HandState s = estimate_state(h, CalibrationMap::identity(), FilterConfig{});
  EXPECT_DOUBLE_EQ(s.pos.x, 0.4);
  EXPECT_DOUBLE_EQ(s.pos.y, 0.6);
  EXPECT_EQ(s.speed, 0.0);
}

TEST(Estimator, ConstantVelocityIsExact) {
  const Vec3 v{0.12, -0.05, 0.0};
  const CalibrationMap m{0.8, 0.0, 0.0, 0.0, 0.5, 0.0};
  const CalibrationMap inv = m.inverse();
  std::vector<RawSample> h;
  for (int k = 0; k <= 60; ++k) {
    const double t = k / 60.0;
    const PlanePoint cam_xy = inv.apply({0.1 + v.x * t, 0.2 + v.y * t});
    h.push_back({t, cam_xy.x, cam_xy.y, true});
  }
  FilterConfig f;
  f.alpha = 1.0;
  const HandState s = estimate_state(h, m, f);
  EXPECT_NEAR(s.vel.x, v.x, 1e-9 * norm(v));
  EXPECT_NEAR(s.vel.y, v.y, 1e-9 * norm(v));
  EXPECT_NEAR(s.speed, norm(v), 1e-9 * norm(v));
}

TEST(Estimator, SmoothedPositionStaysInWindowHull) {
  Rng rng(9);
  std::vector<RawSample> h;
  for (int k = 0; k < 120; ++k) h.push_back({k / 60.0, rng.uniform(), rng.uniform(), true});
  const FilterConfig cfg{0.3, 0.25, 0.5};
  const HandState s = estimate_state(h, CalibrationMap::identity(), cfg);
  double lo_x = 1, hi_x = 0, lo_y = 1, hi_y = 0;
  for (const auto& r : h) {
    if (r.t < h.back().t - cfg.velocity_window) continue;
    lo_x = std::min(lo_x, r.u), hi_x = std::max(hi_x, r.u);
    lo_y = std::min(lo_y, r.v), hi_y = std::max(hi_y, r.v);
  }
  EXPECT_GE(s.pos.x, lo_x);
  EXPECT_LE(s.pos.x, hi_x);
  EXPECT_GE(s.pos.y, lo_y);
  EXPECT_LE(s.pos.y, hi_y);
}

TEST(Estimator, VelocityMatchesLeastSquaresOracleWithoutSmoothing) {
  Rng rng(12);
  std::vector<RawSample> h;
  std::vector<double> ts, xs;
  for (int k = 0; k < 30; ++k) {
    const double t = k / 60.0;
    h.push_back({t, 0.5 + 0.1 * t + 0.001 * rng.normal(), 0.5, true});
  }
  const FilterConfig cfg{1.0, 0.25, 0.5};
  for (const auto& s : h) {
    if (s.t >= h.back().t - cfg.velocity_window) {
      ts.push_back(s.t);
      xs.push_back(s.u);
    }
  }
  const HandState s = estimate_state(h, CalibrationMap::identity(), cfg);
  EXPECT_NEAR(s.vel.x, mrr::testing::ls_slope(ts, xs), 1e-9);
}

TEST(Estimator, DropoutRaisesTrackingLost) {
  const std::vector<RawSample> h{{0.0, 0.5, 0.5, true}, {0.1, 0.5, 0.5, true}};
  EXPECT_THROW(estimate_state(h, CalibrationMap::identity(), FilterConfig{}, 0.7), TrackingLost);
  EXPECT_NO_THROW(estimate_state(h, CalibrationMap::identity(), FilterConfig{}, 0.6));
}

TEST(Estimator, NoValidSamplesIsTrackingLost) {
  const std::vector<RawSample> h{{0.0, 0.5, 0.5, false}};
  EXPECT_THROW(estimate_state(h, CalibrationMap::identity(), FilterConfig{}, 0.0), TrackingLost);
}

TEST(Estimator, OutOfOrderSamplesAreIgnored) {
  const std::vector<RawSample> clean{{0.0, 0.1, 0.1, true}, {0.1, 0.2, 0.1, true}};
  std::vector<RawSample> dirty = clean;
  dirty.push_back({0.1, 0.9, 0.9, true});   // duplicate timestamp
  dirty.push_back({0.05, 0.9, 0.9, true});  // older than the last accepted
  EXPECT_EQ(estimate_state(clean, CalibrationMap::identity(), FilterConfig{}, 0.1),
            estimate_state(dirty, CalibrationMap::identity(), FilterConfig{}, 0.1));
  SampleHistory hist;
  EXPECT_TRUE(hist.push({0.0, 0.1, 0.1, true}));
  EXPECT_TRUE(hist.push({0.1, 0.2, 0.1, true}));
  EXPECT_FALSE(hist.push({0.1, 0.9, 0.9, true}));
  EXPECT_FALSE(hist.push({0.05, 0.9, 0.9, true}));
  EXPECT_FALSE(hist.push({0.2, 0.9, 0.9, false}));
  EXPECT_EQ(hist.samples().size(), 2u);
}

TEST(SampleHistory, PrunesBeyondRetention) {
  SampleHistory hist(0.5);
  for (int k = 0; k < 100; ++k) hist.push({k / 60.0, 0.5, 0.5, true});
  ASSERT_FALSE(hist.samples().empty());
  EXPECT_GE(hist.samples().front().t, hist.samples().back().t - 0.5 - 1e-12);
  EXPECT_EQ(*hist.last_time(), 99 / 60.0);
}

TEST(SampleBuffer, DropsOldestWhenFull) {
  SampleBuffer buf(3);
  for (int k = 0; k < 3; ++k) EXPECT_TRUE(buf.push({double(k), 0, 0, true}));
  EXPECT_FALSE(buf.push({3.0, 0, 0, true}));
  const auto got = buf.drain();
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got.front().t, 1.0);
  EXPECT_EQ(buf.size(), 0u);
}

TEST(SampleLines, RoundTrip) {
  const std::vector<RawSample> in{{0.0, 0.25, 0.5, true}, {0.1, 0.3, 0.55, false}};
  std::stringstream ss;
  write_sample_stream(ss, in);
  EXPECT_EQ(read_sample_stream(ss), in);
}

TEST(SampleLines, MalformedLineNamesTheProblem) {
  EXPECT_THROW(parse_sample_line("0.1 abc 0.3 1"), InvalidSample);
}

TEST(FilterConfig, RejectsBadAlpha) {
  EXPECT_THROW((FilterConfig{0.0, 0.25, 0.5}.validate()), ConfigError);
  EXPECT_THROW((FilterConfig{1.5, 0.25, 0.5}.validate()), ConfigError);
  EXPECT_NO_THROW((FilterConfig{1.0, 0.25, 0.5}.validate()));
}
