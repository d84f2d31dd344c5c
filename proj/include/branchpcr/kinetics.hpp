#ifndef BRANCHPCR_KINETICS_HPP
#define BRANCHPCR_KINETICS_HPP

#include <cstdint>
#include <optional>

namespace branchpcr {

/// Michaelis-Menten efficiencies lambda_k = D / (C + S_{k-1}).
struct MMParams {
  std::int64_t s0 = 1;
  double c = 0.0;
  double d = 0.0;

  double scaled_initial() const { return static_cast<double>(s0) / c; }  ///< S0 / C
  double saturation() const { return c / d; }                            ///< C / D
  /// Throws DomainError unless C, D > 0 and b (1 + s0) >= 1.
  void validate() const;
};

/// Bounds on w_n = E(sum alpha_k) under Michaelis-Menten efficiencies.
struct WBounds {
  double w_minus = 0.0;
  double w_plus = 0.0;
  std::optional<double> w_star;  ///< only when b >= 1
  double upper = 0.0;            ///< min(w_plus, w_star)
  /// s log(1 + n / r) with a = 2 / D + (2b - 1) / S0, s = a D and
  /// r = a (S0 + C + D) - 1. Agrees with w_plus at b = 1 and stays valid for b < 1.
  double w_plus_corrected = 0.0;
};
WBounds w_bounds(const MMParams& mm, int n);

struct ZetaSum {
  double value = 0.0;      ///< sum_{k=1}^n 1 / (t + k)
  double log_lower = 0.0;  ///< log(1 + n / (t + 1))
};
ZetaSum zeta_sum(int n, double t);

struct Envelope {
  double lo = 0.0;
  double hi = 0.0;
};

/// [mu (w_lo - V), mu w_hi] with the uniform gap bound V of S0.
Envelope random_efficiency_envelope(double w_lo, double w_hi, std::int64_t s0, double mu);

}  // namespace branchpcr

#endif  // BRANCHPCR_KINETICS_HPP
