#ifndef BRANCHPCR_TEST_FIXTURES_HPP
#define BRANCHPCR_TEST_FIXTURES_HPP

#include <vector>

#include "branchpcr/schedule.hpp"

namespace fixtures {

// 20 cycles at 0.872, 5 at 0.743, 5 at 0.146.
inline std::vector<double> reference_lambdas() {
  std::vector<double> l(20, 0.872);
  l.insert(l.end(), 5, 0.743);
  l.insert(l.end(), 5, 0.146);
  return l;
}

inline branchpcr::EfficiencySchedule reference_schedule() {
  return branchpcr::EfficiencySchedule::deterministic(reference_lambdas());
}

// lambda_k = 0.25 / k
inline branchpcr::EfficiencySchedule decaying_schedule(int n) {
  std::vector<double> l;
  for (int k = 1; k <= n; ++k) l.push_back(0.25 / k);
  return branchpcr::EfficiencySchedule::deterministic(l);
}

inline branchpcr::EfficiencySchedule constant_schedule(double lambda, int n) {
  return branchpcr::EfficiencySchedule::deterministic(std::vector<double>(n, lambda));
}

}  // namespace fixtures

#endif
