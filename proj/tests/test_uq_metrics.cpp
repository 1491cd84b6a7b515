/*
 * Copyright 2026 The mtuq Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <random>

#include "mtuq/error.hpp"
#include "mtuq/uq_metrics.hpp"
#include "oracles.hpp"

namespace mtuq {
namespace {

TEST(Ratios, Formulas) {
  EXPECT_EQ(*p_accurate_given_certain({3, 0, 1, 0}), 0.75);
  EXPECT_FALSE(p_accurate_given_certain({0, 4, 0, 2}).has_value());
  EXPECT_EQ(*p_uncertain_given_inaccurate({0, 0, 2, 2}), 0.5);
  EXPECT_FALSE(p_uncertain_given_inaccurate({3, 1, 0, 0}).has_value());
  EXPECT_EQ(*pavpu({1, 1, 1, 1}), 0.5);
  EXPECT_EQ(*pavpu({5, 0, 0, 2}), 1.0);
  EXPECT_FALSE(pavpu({}).has_value());
}

TEST(CountJoint, AllAccurateAllCertain) {
  const std::vector<std::uint8_t> ones(9, 1);
  const UQCounts c = count_joint(ones, ones, {});
  EXPECT_EQ(c, (UQCounts{9, 0, 0, 0}));
  EXPECT_EQ(*p_accurate_given_certain(c), 1.0);
  EXPECT_EQ(*pavpu(c), 1.0);
  EXPECT_FALSE(p_uncertain_given_inaccurate(c).has_value());
}

TEST(CountJoint, TwoByTwoHandExample) {
  const UQCounts c = count_joint(std::vector<std::uint8_t>{1, 1, 0, 0},
                                 std::vector<std::uint8_t>{1, 0, 1, 0}, {});
  EXPECT_EQ(c, (UQCounts{1, 1, 1, 1}));
  EXPECT_EQ(*p_accurate_given_certain(c), 0.5);
  EXPECT_EQ(*p_uncertain_given_inaccurate(c), 0.5);
  EXPECT_EQ(*pavpu(c), 0.5);
}

TEST(CountJoint, MatchesQuadrupleLoop) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto acc = oracle::random_mask(rng, 64, 0.1 + 0.004 * trial);
    const auto cer = oracle::random_mask(rng, 64, 0.9 - 0.004 * trial);
    EXPECT_EQ(count_joint(acc, cer, {}), oracle::counts(acc, cer, 8, 8));
  }
}

TEST(CountJoint, ScoredMaskExcludesPixels) {
  const std::vector<std::uint8_t> acc = {1, 0, 1};
  const std::vector<std::uint8_t> cer = {1, 1, 0};
  const std::vector<std::uint8_t> scored = {1, 0, 1};
  EXPECT_EQ(count_joint(acc, cer, scored), (UQCounts{1, 1, 0, 0}));
}

TEST(Units, WindowOneMatchesPixels) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  const Grid g{6, 5};
  std::vector<double> unc(30);
  for (double& x : unc) x = u(rng);
  const auto acc = oracle::random_mask(rng, 30, 0.6);
  const auto scored = oracle::random_mask(rng, 30, 0.8);
  std::vector<std::uint8_t> cer(30);
  for (std::size_t n = 0; n < 30; ++n) cer[n] = scored[n] && unc[n] < 0.4;
  EXPECT_EQ(count_joint(g, acc, unc, scored, 0.4, 1), count_joint(acc, cer, scored));
}

TEST(Units, WindowedCellsHandExample) {
  // 2 x 4 grid, window 2 -> two cells.
  const Grid g{2, 4};
  const std::vector<std::uint8_t> acc = {1, 0, 0, 0,
                                         1, 0, 0, 1};
  const std::vector<double> unc = {0.1, 0.3, 0.9, 0.9,
                                   0.1, 0.3, 0.1, 0.1};
  const std::vector<std::uint8_t> scored = {1, 1, 1, 0,
                                            1, 1, 1, 0};
  const UnitSet units = make_units(g, acc, unc, scored, 2);
  ASSERT_EQ(units.size(), 2u);
  EXPECT_EQ(units.accurate, (std::vector<std::uint8_t>{1, 0}));
  EXPECT_NEAR(units.uncertainty[0], 0.2, 1e-15);
  EXPECT_NEAR(units.uncertainty[1], 0.5, 1e-15);
  EXPECT_EQ(count_joint(units, 0.3), (UQCounts{1, 0, 0, 1}));
}

TEST(Units, PartialEdgeCellsAndEmptyCells) {
  const Grid g{3, 3};
  const std::vector<std::uint8_t> acc(9, 1);
  const std::vector<double> unc(9, 0.5);
  std::vector<std::uint8_t> scored(9, 0);
  scored[8] = 1;  // only the bottom-right 1 x 1 edge cell is scored
  const UnitSet units = make_units(g, acc, unc, scored, 2);
  EXPECT_EQ(units.size(), 1u);
}

TEST(Units, ZeroWindowRejected) {
  const Grid g{1, 1};
  const std::vector<std::uint8_t> m = {1};
  const std::vector<double> u = {0.0};
  try {
    make_units(g, m, u, m, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidParameter);
  }
}

}  // namespace
}  // namespace mtuq
