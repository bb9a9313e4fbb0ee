#include <gtest/gtest.h>

#include <cmath>

#include "roadspeed/asymptotics.hpp"

using namespace roadspeed;

namespace {

ModelParams base(double D) {
  ModelParams p;
  p.d = 1.0;
  p.D = D;
  p.a = 1.0;
  p.mu_bar = 1.0;
  p.nu_bar = 1.0;
  return p;
}

ExchangeSpec box() { return ExchangeSpec::make(KernelShape::box, 1.0, 1.0); }

}  // namespace

TEST(ClassifyRegime, Examples) {
  auto r = classify_regime(base(2.5));
  EXPECT_EQ(r.regime, SweepRegime::below_threshold);
  EXPECT_EQ(r.predicted_infimum, 2.0);

  r = classify_regime(base(4.0));
  EXPECT_EQ(r.regime, SweepRegime::above_threshold);
  EXPECT_NEAR(r.predicted_infimum, 5.0 / std::sqrt(6.0), 1e-9);

  r = classify_regime(base(3.0));
  EXPECT_EQ(r.regime, SweepRegime::below_threshold);

  r = classify_regime(base(1.5));
  EXPECT_EQ(r.regime, SweepRegime::subcritical);
  EXPECT_EQ(r.predicted_infimum, 2.0);
}

TEST(ClassifyRegime, BoundaryTwoD) {
  // D = 2d sits on the closed left end of the interval where the infimum is c_K
  const auto r = classify_regime(base(2.0));
  EXPECT_NE(r.regime, SweepRegime::above_threshold);
  EXPECT_EQ(r.predicted_infimum, 2.0);
}

TEST(SweepR, UnitScaleMatchesFindCstar) {
  const ModelParams p = base(4.0);
  const SweepResult s = sweep_R(p, box(), box(), RescaleTarget::mu, {1.0});
  EXPECT_EQ(s.speeds[0], find_cstar(p, box(), box()).c_star);
}

TEST(SweepR, SlowdownAndLowerBarrier) {
  const ModelParams p = base(4.0);
  const double cmin = c_min_crossing(p);
  for (auto which : {RescaleTarget::mu, RescaleTarget::nu, RescaleTarget::both}) {
    const SweepResult s = sweep_R(p, box(), box(), which, {1.0, 4.0, 16.0});
    ASSERT_EQ(s.speeds.size(), 3u);
    EXPECT_EQ(s.regime, SweepRegime::above_threshold);
    for (double c : s.speeds) {
      EXPECT_LE(c, s.speeds[0] + 1e-9) << to_string(which);
      EXPECT_GT(c, cmin - 1e-9) << to_string(which);
      EXPECT_GE(c, p.c_kpp() - 1e-12);
    }
  }
}

TEST(SweepR, ThreadedMatchesSerial) {
  const ModelParams p = base(2.5);
  const auto scales = geometric_scales(3);
  const SweepResult a = sweep_R(p, box(), box(), RescaleTarget::both, scales, {}, 0.05, 1);
  const SweepResult b = sweep_R(p, box(), box(), RescaleTarget::both, scales, {}, 0.05, 3);
  EXPECT_EQ(a.speeds, b.speeds);
}

TEST(SweepR, RejectsBadScales) {
  const ModelParams p = base(4.0);
  EXPECT_THROW(sweep_R(p, box(), box(), RescaleTarget::mu, {}), Error);
  EXPECT_THROW(sweep_R(p, box(), box(), RescaleTarget::mu, {0.5, 2.0}), Error);
  EXPECT_THROW(sweep_R(p, box(), box(), RescaleTarget::mu, {4.0, 2.0}), Error);
  EXPECT_THROW(sweep_R(p, box(), box(), RescaleTarget::mu, {1.0, 1.0}), Error);
}

TEST(SweepR, SubcriticalSweepIsFlat) {
  const SweepResult s = sweep_R(base(1.5), box(), box(), RescaleTarget::mu, geometric_scales(4));
  for (double c : s.speeds) EXPECT_EQ(c, 2.0);
  EXPECT_TRUE(s.converged);
}

TEST(GeometricScales, PowersOfFour) {
  EXPECT_EQ(geometric_scales(5), (std::vector<double>{1, 4, 16, 64, 256}));
  EXPECT_TRUE(geometric_scales(0).empty());
}

TEST(RescaleTarget, Parse) {
  EXPECT_EQ(parse_rescale_target("nu"), RescaleTarget::nu);
  EXPECT_THROW(parse_rescale_target("lambda"), Error);
}

TEST(ExtrapolateLimit, GeometricSequenceExact) {
  std::vector<double> seq;
  for (int k = 0; k < 5; ++k) seq.push_back(2.0 + 0.3 * std::pow(0.4, k));
  EXPECT_NEAR(extrapolate_limit(seq), 2.0, 1e-12);
}

TEST(ExtrapolateLimit, ShortAndNonContracting) {
  EXPECT_EQ(extrapolate_limit({3.0}), 3.0);
  EXPECT_EQ(extrapolate_limit({1.0, 2.0, 4.0}), 4.0);
  EXPECT_EQ(extrapolate_limit({1.0, 1.0, 1.0}), 1.0);
}
