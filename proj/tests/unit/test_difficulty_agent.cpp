#include <gtest/gtest.h>

#include "mrr/difficulty_agent.hpp"
#include "mrr/errors.hpp"

using namespace mrr;

namespace {

constexpr double kDt = 1.0 / 60.0;

struct AgentRun {
  AgentState state;
  std::vector<TransitionEvent> transitions;
  int ticks = 0;
};

// Feeds a constant speed for `seconds`.
void feed(AgentRun& r, double speed, double seconds, const DifficultyConfig& cfg = {}) {
  const int n = static_cast<int>(std::lround(seconds / kDt));
  for (int i = 0; i < n; ++i) {
    ++r.ticks;
    HandState h;
    h.speed = speed;
    h.t = r.ticks * kDt;
    const Observation o = observe(r.state, h, cfg, kDt);
    r.state = o.state;
    if (o.transition) r.transitions.push_back(*o.transition);
  }
}

}  // namespace

TEST(Agent, SlowHandTurnsHelpfulAfterTLow) {
  AgentRun r;
  feed(r, 0.01, 2.9);
  EXPECT_EQ(r.state.mode, AgentMode::Wander);
  feed(r, 0.01, 0.2);
  ASSERT_EQ(r.transitions.size(), 1u);
  EXPECT_EQ(r.transitions[0].to, AgentMode::Helpful);
  EXPECT_NEAR(r.transitions[0].t, 3.0, kDt + 1e-12);
  EXPECT_EQ(behavior_for(r.state.mode), BehaviorKind::Pursue);
}

TEST(Agent, FastHandTurnsChallengingAfterTHigh) {
  AgentRun r;
  feed(r, 0.5, 3.0);
  ASSERT_EQ(r.transitions.size(), 1u);
  EXPECT_EQ(r.transitions[0].to, AgentMode::Challenging);
  EXPECT_NEAR(r.transitions[0].t, 3.0, 1e-9);
  EXPECT_DOUBLE_EQ(r.transitions[0].trigger_speed, 0.5);
}

TEST(Agent, InterruptedDwellRestarts) {
  AgentRun r;
  feed(r, 0.01, 2.5);
  feed(r, 0.1, kDt);
  feed(r, 0.01, 2.5);
  EXPECT_EQ(r.state.mode, AgentMode::Wander);
  EXPECT_TRUE(r.transitions.empty());
}

TEST(Agent, BandBoundariesCountAsInside) {
  AgentRun r;
  feed(r, 0.03, 10.0);
  feed(r, 0.25, 10.0);
  EXPECT_TRUE(r.transitions.empty());
}

TEST(Agent, HelpfulReturnsToWanderAfterTReturn) {
  AgentRun r;
  feed(r, 0.0, 3.0);
  ASSERT_EQ(r.state.mode, AgentMode::Helpful);
  feed(r, 0.1, 1.9);
  EXPECT_EQ(r.state.mode, AgentMode::Helpful);
  feed(r, 0.1, 0.2);
  EXPECT_EQ(r.state.mode, AgentMode::Wander);
}

TEST(Agent, HelpfulNeverJumpsToChallenging) {
  AgentRun r;
  feed(r, 0.0, 3.0);
  feed(r, 1.0, 20.0);
  EXPECT_EQ(r.state.mode, AgentMode::Helpful);
  for (const auto& t : r.transitions) EXPECT_NE(t.to, AgentMode::Challenging);
}

TEST(Agent, ChallengingExitsOnlyToWander) {
  AgentRun r;
  feed(r, 1.0, 3.0);
  feed(r, 0.0, 20.0);
  EXPECT_EQ(r.state.mode, AgentMode::Challenging);
  feed(r, 0.1, 2.0);
  EXPECT_EQ(r.state.mode, AgentMode::Wander);
}

TEST(Agent, ZeroDwellTransitionsOnFirstObservation) {
  DifficultyConfig cfg;
  cfg.t_low = 0.0;
  AgentRun r;
  feed(r, 0.0, kDt, cfg);
  EXPECT_EQ(r.state.mode, AgentMode::Helpful);
}

TEST(DifficultyConfig, Validation) {
  DifficultyConfig c;
  c.v_min = 0.3;
  EXPECT_THROW(c.validate(), ConfigError);
  DifficultyPatch p;
  p.v_max = 0.01;
  EXPECT_THROW(p.apply(DifficultyConfig{}), ConfigError);
  p.v_max = 0.4;
  EXPECT_EQ(p.apply(DifficultyConfig{}).v_max, 0.4);
  EXPECT_TRUE(DifficultyPatch{}.empty());
}

TEST(AgentMode, Names) {
  for (auto m : {AgentMode::Wander, AgentMode::Helpful, AgentMode::Challenging}) {
    EXPECT_EQ(agent_mode_from_string(to_string(m)), m);
  }
}
