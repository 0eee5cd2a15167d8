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

#ifndef DEPBOUND_INFERENCE_H_
#define DEPBOUND_INFERENCE_H_

#include <stdexcept>
#include <string>

namespace depbound {

// A variance estimate that cannot back an interval.
class NegativeVarianceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ConfidenceInterval {
  double center = 0.0;
  double half_width = 0.0;
  double alpha = 0.05;
  double lower = 0.0;
  double upper = 0.0;

  bool Contains(double value) const { return lower <= value && value <= upper; }
  double width() const { return upper - lower; }
};

// Standard normal CDF.
double NormalCdf(double x);

// Inverse standard normal CDF, absolute error below 1e-9 on (0, 1). Throws
// std::domain_error outside the open unit interval.
double NormalQuantile(double p);

// mean +/- z_{1 - alpha/2} sqrt(variance). `estimator` names the source of
// the variance in the error raised for negative values.
ConfidenceInterval WaldInterval(double mean, double variance, double alpha,
                                const std::string& estimator = "variance");

}  // namespace depbound

#endif  // DEPBOUND_INFERENCE_H_
