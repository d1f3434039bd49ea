#include "igp/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

namespace igp {
namespace {

TEST(Params, DefaultsAreTheActiveSearchBlock) {
  const Params p;
  EXPECT_EQ(p.alpha, 5.0);
  EXPECT_EQ(p.a, 2.0);
  EXPECT_EQ(p.b, 5.0);
  EXPECT_EQ(p.c, 0.1);
  EXPECT_EQ(p.d, 2.0);
  EXPECT_EQ(p.beta, 1.0);
  EXPECT_EQ(p.gamma, 1.0);
  EXPECT_EQ(p.mu, 0.05);
  EXPECT_EQ(p.nu, 0.05);
  EXPECT_EQ(p.d0, 0.1);
  EXPECT_EQ(p.d1, 1.0);
  EXPECT_EQ(p.d2, 1.0);
  EXPECT_NO_THROW(validate(p));
}

TEST(Params, ValidationNamesTheField) {
  Params p;
  p.mu = 0.0;
  try {
    validate(p);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("'mu'"), std::string::npos) << e.what();
  }
  p = Params{};
  p.q = -1.0;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = Params{};
  p.d2 = NAN;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = Params{};
  p.e2 = 0.0;
  EXPECT_NO_THROW(validate(p));
}

TEST(Kinetics, HandEvaluatedRates) {
  const Params p;
  // u = 1, v = 2, w = 3, K = 4:
  //   uptake_v = 5*1*2/3 = 10/3, uptake_w = 0.1*2*3/4 = 0.15
  const Kinetics r = reaction(p, 4.0, 1.0, 2.0, 3.0);
  EXPECT_NEAR(r.f, 5.0 * 0.75 - 10.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.g, 10.0 / 3.0 - 0.15 - 0.1, 1e-15);
  EXPECT_NEAR(r.h, 0.15 - 0.15, 1e-15);
}

TEST(Kinetics, ZeroIsAFixedPointAndNaNIsRejected) {
  const Kinetics r = reaction(Params{}, 1.0, 0.0, 0.0, 0.0);
  EXPECT_EQ(r.f, 0.0);
  EXPECT_EQ(r.g, 0.0);
  EXPECT_EQ(r.h, 0.0);
  EXPECT_THROW(reaction(Params{}, 1.0, NAN, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(reaction(Params{}, NAN, 1.0, 0.0, 0.0), std::invalid_argument);
}

TEST(Sensitivity, DispatchesOnModel) {
  Params p;
  p.e1 = 2.0;
  p.e2 = 3.0;
  p.q = 0.5;
  EXPECT_DOUBLE_EQ(chi1(p, 1.0, 4.0), 2.0 * 4.0 - 3.0 * 1.0);
  EXPECT_DOUBLE_EQ(chi2(p, 2.0, 4.0), 0.5 * 2.0 * 4.0);
  p.model = Model::ActiveSearch;
  EXPECT_DOUBLE_EQ(sensitivity(p, 2.0, 1.0, 4.0), 5.0);
  p.model = Model::ResourceAttraction;
  EXPECT_DOUBLE_EQ(sensitivity(p, 2.0, 1.0, 4.0), 4.0);
}

TEST(Survivability, MarginConditions) {
  Params p;
  auto s = survivability(p);
  EXPECT_TRUE(s.meso_can_persist);
  EXPECT_TRUE(s.top_can_persist);
  p.c = 0.01;  // beta c = 0.01 < nu
  s = survivability(p);
  EXPECT_FALSE(s.top_can_persist);
}

TEST(FieldState, NegativityFlagUsesThreshold) {
  FieldState s{0.0, {0.0, 1.0}, {-0.5e-8, 2.0}, {3.0, 0.0}};
  EXPECT_DOUBLE_EQ(min_value(s), -0.5e-8);
  EXPECT_FALSE(has_negative(s));
  s.w[1] = -2e-8;
  EXPECT_TRUE(has_negative(s));
}

}  // namespace
}  // namespace igp
