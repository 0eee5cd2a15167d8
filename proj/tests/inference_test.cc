// Copyright 2026 The depbound Authors
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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "depbound/inference.h"

namespace depbound {
namespace {

// Bisection on 0.5 * erfc(-x / sqrt 2), sharing no code with the library.
// Above the median it works on the upper tail, where 1 - p is exact.
double QuantileByBisection(double p) {
  if (p > 0.5) return -QuantileByBisection(1.0 - p);
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double Round3(double v) { return std::round(v * 1000.0) / 1000.0; }

TEST(NormalQuantile, Examples) {
  EXPECT_EQ(NormalQuantile(0.5), 0.0);
  EXPECT_NEAR(NormalQuantile(0.975), 1.959964, 1e-6);
  EXPECT_NEAR(NormalQuantile(0.025), -NormalQuantile(0.975), 1e-12);
}

TEST(NormalQuantile, AgreesWithIndependentInversion) {
  for (double p : {1e-300, 1e-12, 1e-6, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97575, 0.999,
                   1 - 1e-6, 1 - 1e-12}) {
    EXPECT_NEAR(NormalQuantile(p), QuantileByBisection(p), 1e-9) << "p = " << p;
  }
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double p = u(rng);
    if (p == 0.0) continue;
    EXPECT_NEAR(NormalQuantile(p), QuantileByBisection(p), 1e-9) << "p = " << p;
  }
}

TEST(NormalQuantile, RejectsOutsideUnitInterval) {
  EXPECT_THROW(NormalQuantile(0.0), std::domain_error);
  EXPECT_THROW(NormalQuantile(1.0), std::domain_error);
  EXPECT_THROW(NormalQuantile(-0.1), std::domain_error);
  EXPECT_THROW(NormalQuantile(std::nan("")), std::domain_error);
}

TEST(NormalCdf, MatchesErfc) {
  for (double x = -8.0; x <= 8.0; x += 0.37) {
    EXPECT_NEAR(NormalCdf(x), 0.5 * std::erfc(-x / std::sqrt(2.0)), 1e-15);
  }
}

TEST(WaldInterval, BinaryOutcomesNaiveInterval) {
  const double se = 0.0147;
  const ConfidenceInterval ci = WaldInterval(0.328, se * se, 0.05);
  EXPECT_EQ(Round3(ci.lower), 0.299);
  EXPECT_EQ(Round3(ci.upper), 0.357);
}

TEST(WaldInterval, WideIntervalRoundsToThreePlaces) {
  const double se = 0.0602;
  const ConfidenceInterval ci = WaldInterval(0.328, se * se, 0.05);
  EXPECT_EQ(Round3(ci.lower), 0.210);
  EXPECT_EQ(Round3(ci.upper), 0.446);
}

TEST(WaldInterval, ZeroVarianceIsDegenerate) {
  const ConfidenceInterval ci = WaldInterval(1.25, 0.0, 0.1);
  EXPECT_EQ(ci.lower, 1.25);
  EXPECT_EQ(ci.upper, 1.25);
  EXPECT_EQ(ci.half_width, 0.0);
}

TEST(WaldInterval, NegativeVarianceNamesTheEstimator) {
  try {
    WaldInterval(0.0, -1e-3, 0.05, "v1");
    FAIL() << "expected an error";
  } catch (const NegativeVarianceError& e) {
    EXPECT_NE(std::string(e.what()).find("v1"), std::string::npos);
  }
}

TEST(WaldInterval, SymmetricAndMonotoneInVariance) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const double mean = u(rng) - 1.0;
    const double a = u(rng), b = u(rng);
    const double alpha = 0.01 + 0.3 * u(rng) / 2.0;
    const ConfidenceInterval ca = WaldInterval(mean, a, alpha);
    const ConfidenceInterval cb = WaldInterval(mean, b, alpha);
    EXPECT_NEAR(ca.upper - mean, mean - ca.lower, 1e-12);
    EXPECT_EQ(ca.lower, ca.center - ca.half_width);
    EXPECT_EQ(ca.upper, ca.center + ca.half_width);
    EXPECT_LE(ca.lower, ca.upper);
    if (a <= b) {
      EXPECT_LE(ca.width(), cb.width());
    } else {
      EXPECT_GE(ca.width(), cb.width());
    }
  }
}

TEST(WaldInterval, RejectsInvalidAlpha) {
  EXPECT_ANY_THROW(WaldInterval(0.0, 1.0, 0.0));
  EXPECT_ANY_THROW(WaldInterval(0.0, 1.0, 1.0));
}

}  // namespace
}  // namespace depbound
