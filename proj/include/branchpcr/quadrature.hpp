#ifndef BRANCHPCR_QUADRATURE_HPP
#define BRANCHPCR_QUADRATURE_HPP

#include <functional>

namespace branchpcr {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  bool converged = true;
};

/// Adaptive Simpson rule on [a, b] with Richardson-corrected panels.
/// Stops refining once the evaluation budget is spent and reports
/// `converged = false` in that case.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, long max_evaluations = 1'000'000);

}  // namespace branchpcr

#endif  // BRANCHPCR_QUADRATURE_HPP
