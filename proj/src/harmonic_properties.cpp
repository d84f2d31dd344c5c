#include <cmath>

#include "branchpcr/harmonic.hpp"

namespace branchpcr::harmonic {
namespace {

class Checker {
 public:
  explicit Checker(double slack, PropertyReport& report) : slack_(slack), report_(report) {}

  void at(long k, double lambda, double y) {
    k_ = k;
    lambda_ = lambda;
    y_ = y;
  }

  void le(const char* name, double lhs, double rhs) {
    ++report_.checks;
    if (!(lhs <= rhs + slack_)) report_.violations.push_back({name, k_, lambda_, y_, lhs, rhs});
  }

  void eq(const char* name, double lhs, double rhs) {
    ++report_.checks;
    if (!(std::abs(lhs - rhs) <= slack_))
      report_.violations.push_back({name, k_, lambda_, y_, lhs, rhs});
  }

 private:
  double slack_;
  PropertyReport& report_;
  long k_ = 0;
  double lambda_ = 0.0;
  double y_ = 0.0;
};

std::vector<double> default_lambdas() {
  std::vector<double> out;
  for (int i = 1; i <= 20; ++i) out.push_back(0.05 * i);
  return out;
}

}  // namespace

PropertyReport check_harmonic_properties(const PropertyGrid& grid) {
  PropertyReport report;
  Checker c(grid.slack, report);
  const std::vector<double> lambdas = grid.lambdas.empty() ? default_lambdas() : grid.lambdas;

  for (double lam : lambdas) {
    const double alpha = lam / (1.0 + lam);
    const double s = 1.0 + lam;
    const double n2 = lam * (1.0 - lam);
    for (long k = 1; k <= grid.k_max; ++k) {
      c.at(k, lam, 0.0);
      const double h = harmonic_ratio(k, lam);
      const double a = harmonic_gap(k, lam);
      const double a_next = harmonic_gap(k + 1, lam);
      const double g = harmonic_square(k, lam);
      const RecursionCoefficients b = recursion_coefficients(k, lam);

      c.le("harmonic mean at least 1 - alpha", 1.0 - alpha, h);
      c.le("harmonic mean at most 1", h, 1.0);
      c.le("gap nonnegative", 0.0, a);

      c.le("(k+1) A(k) nonincreasing", (k + 2.0) * a_next, (k + 1.0) * a);
      c.le("(k+1) A(k) lower bound", alpha * (1.0 - lam) / (s * s), (k + 1.0) * a);
      c.le("(k+1) A(k) upper bound", (k + 1.0) * a, alpha * (1.0 - lam));

      const double scale = n2 / (s * s * s);
      c.le("A(k) lower bound 1/(k+1)", scale / (k + 1.0), a);
      c.le("A(k) upper bound (k+1)/k^2", a, scale * (k + 1.0) / (static_cast<double>(k) * k));
      if (k >= 2) c.le("A(k) upper bound 1/(k-1)", a, scale / (k - 1.0));

      c.le("B(k) <= alpha (1 - alpha) / k", b.excess, alpha * (1.0 - alpha) / k);
      c.le("B'(k) <= lambda / (k + 1)", b.ratio_variance, lam / (k + 1.0));
      c.le("B''(k) <= lambda (1 - lambda) / (k + 2)", b.pair_spread, n2 / (k + 2.0));

      c.le("G(k) <= 1/(1+lambda)^2 + 3 A(k)", g, 1.0 / (s * s) + 3.0 * a);
      for (int j = 1; j <= 5; ++j)
        c.le("E((k/M)^j) <= (1+lambda)^-j + A j (j+1) / 2", harmonic_power(k, lam, j),
             std::pow(s, -j) + a * j * (j + 1) / 2.0);
      c.le("B'(k) <= A(k) (1 + 3 lambda) / (1 + lambda)", b.ratio_variance,
           a * (1.0 + 3.0 * lam) / s);
      c.le("B(k) >= A(k) / 2", a / 2.0, b.excess);
      c.le("B'(k) >= (1 - lambda) A(k) / 2", (1.0 - lam) * a / 2.0, b.ratio_variance);

      if (k >= 2) {
        c.eq("B''(k) + B1(k) = 1", b.pair_spread + b.pair_product, 1.0);
        const double shifted = expect(k - 2, lam, [&](double j) {
          const double m = 3.0 + (k - 2) + j;
          return k / (m * m);
        });
        c.eq("B''(k) = lambda (1 - lambda) E(k / (3 + M_{k-2})^2)", b.pair_spread, n2 * shifted);
        c.le("B''(k) lower bound", n2 / (s * s) * k / ((k + 1.0) * (k + 1.0)), b.pair_spread);
      }
      c.eq("B2(k) - (1 - H)^2 = B'(k)", b.defect_square - (1.0 - h) * (1.0 - h), b.ratio_variance);

      const TaylorSandwich t = taylor_sandwich(k, lam);
      c.le("H(k) <= Taylor upper bound", h, t.h_upper);
      c.le("G(k) >= Taylor lower bound", t.g_lower, g);

      for (double y : grid.ys) {
        if (k + y <= 0.0) continue;
        c.at(k, lam, y);
        const ContractionCoefficients cc = contraction_coefficients(k, lam, y);
        c.le("C''(k) <= C'(k)", cc.forcing_mu2, cc.forcing_nu);
        c.le("(k + y) C'(k) <= 1 - H(k)", (k + y) * cc.forcing_nu, 1.0 - h);
        c.le("C(k) <= H_y(k)", cc.contraction, cc.harmonic);
        if (y > 1.0 - k) c.le("(k + y) C'(k) <= alpha", (k + y) * cc.forcing_nu, alpha);
        if (y >= 0.0) {
          c.le("C(k) <= 1 - lambda / (y + 2)", cc.contraction, 1.0 - lam / (y + 2.0));
          c.le("H_y nonincreasing", harmonic_ratio(k + 1, lam, y), cc.harmonic);
          c.le("H_y(k) >= 1 / (1 + lambda)", 1.0 / s, cc.harmonic);
        }
        if (y == -1.0 && k >= 2) {
          c.le("C(k) <= 1 - alpha at y = -1", cc.contraction, 1.0 - alpha);
          c.le("H_{-1} nondecreasing", cc.harmonic, harmonic_ratio(k + 1, lam, y));
          c.le("H_{-1}(k) <= 1 / (1 + lambda)", cc.harmonic, 1.0 / s);
        }
      }
    }
  }
  return report;
}

}  // namespace branchpcr::harmonic
