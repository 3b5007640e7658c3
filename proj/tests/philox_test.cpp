// Copyright 2026 The spinflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spinflow/philox.hpp"

#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>
#include <set>

#include "spinflow/numerics.hpp"

namespace spinflow {
namespace {

// Known-answer vectors of Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswerZero) {
  const Philox4x32 p(Philox4x32::Key{0, 0});
  EXPECT_EQ(p({0, 0, 0, 0}), (Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes) {
  const Philox4x32 p(Philox4x32::Key{0xffffffff, 0xffffffff});
  EXPECT_EQ(p({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}),
            (Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  const Philox4x32 p(Philox4x32::Key{0xa4093822, 0x299f31d0});
  EXPECT_EQ(p({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}),
            (Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, SeedSplitsIntoKey) {
  const Philox4x32 p(0x0123456789abcdefULL);
  EXPECT_EQ(p.key(), (Philox4x32::Key{0x89abcdef, 0x01234567}));
}

TEST(ToOpenUnit, StaysInsideOpenInterval) {
  EXPECT_GT(to_open_unit(0), 0.0);
  EXPECT_LT(to_open_unit(~std::uint64_t{0}), 1.0);
}

TEST(NormalQuantile, MatchesBoost) {
  const boost::math::normal_distribution<double> nd;
  for (double p : {1e-300, 1e-100, 1e-20, 1e-10, 1e-5, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.97575,
                   0.999, 1 - 1e-10, 1 - 1e-16}) {
    const double want = boost::math::quantile(nd, p);
    EXPECT_NEAR(normal_quantile(p), want, 1e-14 * std::max(1.0, std::fabs(want))) << p;
  }
  for (int k = 1; k < 10000; ++k) {
    const double p = k / 10000.0;
    EXPECT_NEAR(normal_quantile(p), boost::math::quantile(nd, p), 1e-14) << p;
  }
}

TEST(NormalQuantile, Symmetric) {
  for (double p : {1e-8, 0.01, 0.2, 0.4}) {
    EXPECT_NEAR(normal_quantile(p), -normal_quantile(1 - p), 1e-9);
  }
  EXPECT_EQ(normal_quantile(0.5), 0.0);
}

TEST(CounterRng, DeterministicAndKeyed) {
  const CounterRng a(7), b(7), c(8);
  EXPECT_EQ(a.uniform(Stream::kBrownian, 3, 4, 1), b.uniform(Stream::kBrownian, 3, 4, 1));
  EXPECT_NE(a.uniform(Stream::kBrownian, 3, 4, 1), c.uniform(Stream::kBrownian, 3, 4, 1));
  std::set<double> seen;
  for (auto s : {Stream::kBrownian, Stream::kAccept, Stream::kValidator, Stream::kValidatorAccept}) {
    seen.insert(a.uniform(s, 0, 0, 0));
    seen.insert(a.uniform(s, 1, 0, 0));
    seen.insert(a.uniform(s, 0, 1, 0));
    seen.insert(a.uniform(s, 0, 0, 1));
  }
  EXPECT_EQ(seen.size(), 16u);
}

TEST(CounterRng, NormalMoments) {
  const CounterRng rng(11);
  const int n = 1000000;
  CompensatedSum s1, s2;
  for (int k = 0; k < n; ++k) {
    const double z = rng.normal(Stream::kTest, k, 0);
    s1 += z;
    s2 += z * z;
  }
  EXPECT_LT(std::fabs(s1.value() / n), 4.0 / std::sqrt(n));
  EXPECT_LT(std::fabs(s2.value() / n - 1.0), 4.0 * std::sqrt(2.0 / n));
}

TEST(CompensatedSum, RecoversCancelledLowBits) {
  CompensatedSum s;
  s += 1.0;
  for (int k = 0; k < 1000; ++k) s += 1e-16;
  s += -1.0;
  EXPECT_NEAR(s.value(), 1e-13, 1e-25);
}

}  // namespace
}  // namespace spinflow
