#include "branchpcr/quadrature.hpp"

#include <cmath>

namespace branchpcr {
namespace {

struct Simpson {
  const std::function<double(double)>& f;
  long budget;
  long evaluations = 0;
  bool exhausted = false;
  double error = 0.0;

  double eval(double x) {
    ++evaluations;
    return f(x);
  }

  // fa, fm, fb are f at a, (a+b)/2, b; whole is the Simpson value on [a, b].
  double refine(double a, double b, double fa, double fm, double fb, double whole, double tol,
                int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || evaluations >= budget) {
      exhausted = exhausted || evaluations >= budget;
      error += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    if (std::abs(delta) <= 15.0 * tol) {
      error += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return refine(a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           refine(m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
  }
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, long max_evaluations) {
  Simpson s{f, max_evaluations};
  const double fa = s.eval(a);
  const double fb = s.eval(b);
  const double fm = s.eval(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  QuadratureResult r;
  r.value = s.refine(a, b, fa, fm, fb, whole, abs_tol, 60);
  r.error_estimate = s.error;
  r.evaluations = s.evaluations;
  r.converged = !s.exhausted;
  return r;
}

}  // namespace branchpcr
