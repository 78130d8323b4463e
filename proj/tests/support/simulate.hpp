#pragma once

#include <cstdint>
#include <vector>

#include "srpkit/fp_analysis.hpp"

namespace srp::mock {

// Mixed-effects logistic data: standard normal predictors, one Gaussian
// random intercept per group, outcome drawn from the logistic model.
struct SimSpec {
  std::vector<double> beta;  // intercept first
  int n = 5000;
  int n_groups = 60;
  double group_sd = 0.3;
  std::uint64_t seed = 20240611;
};

LogisticProblem simulate_logistic(const SimSpec& spec);

}  // namespace srp::mock
