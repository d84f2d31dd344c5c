#include "branchpcr/kinetics.hpp"

#include <algorithm>
#include <cmath>

#include "branchpcr/errors.hpp"
#include "branchpcr/moments.hpp"

namespace branchpcr {

void MMParams::validate() const {
  if (s0 < 1) throw DomainError("initial population must be at least 1");
  if (!(c > 0.0) || !(d > 0.0)) throw DomainError("Michaelis-Menten constants must be positive");
  if (saturation() * (1.0 + scaled_initial()) < 1.0 - 1e-15)
    throw DomainError("first efficiency D / (C + S0) exceeds 1");
}

WBounds w_bounds(const MMParams& mm, int n) {
  mm.validate();
  if (n < 0) throw DomainError("cycle count must be nonnegative");
  WBounds w;
  if (n == 0) return w;
  const double s = mm.scaled_initial();
  const double b = mm.saturation();
  const double factor = 2.0 + (2.0 * b - 1.0) / s;
  w.w_minus = std::log1p(n / (1.0 + b * (1.0 + s)));
  w.w_plus = factor * std::log1p(n * s / (2.0 + s));
  w.upper = w.w_plus;
  const double a = 2.0 / mm.d + (2.0 * b - 1.0) / static_cast<double>(mm.s0);
  w.w_plus_corrected =
      a * mm.d * std::log1p(n / (a * (static_cast<double>(mm.s0) + mm.c + mm.d) - 1.0));
  if (b >= 1.0) {
    w.w_star = factor * std::log1p(n * s / (2.0 * b * (1.0 + s) * (1.0 + s)));
    w.upper = std::min(w.w_plus, *w.w_star);
  }
  return w;
}

ZetaSum zeta_sum(int n, double t) {
  if (!(t > -1.0)) throw DomainError("shift must exceed -1");
  if (n < 0) throw DomainError("term count must be nonnegative");
  ZetaSum z;
  for (int k = 1; k <= n; ++k) z.value += 1.0 / (t + k);
  z.log_lower = std::log1p(n / (t + 1.0));
  return z;
}

Envelope random_efficiency_envelope(double w_lo, double w_hi, std::int64_t s0, double mu) {
  if (w_lo < 0.0 || w_hi < w_lo) throw DomainError("need 0 <= w_lo <= w_hi");
  if (mu < 0.0) throw DomainError("mutation rate must be nonnegative");
  if (mu == 0.0) return {};
  return {mu * (w_lo - uniform_gap_bound(s0)), mu * w_hi};
}

}  // namespace branchpcr
