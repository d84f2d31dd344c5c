#include "branchpcr/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "branchpcr/errors.hpp"

namespace branchpcr {

double upper_correction_sum(const DerivedSequences& seqs, int n, VppWeighting weighting) {
  return weighting == VppWeighting::alpha ? seqs.v_dprime(n) : seqs.v_dprime_lambda(n);
}

double point_estimate(double t, double w_n) {
  if (!(w_n > 0.0)) throw DomainError("W_n must be positive to estimate a rate");
  if (t < 0.0) throw DomainError("sample mean must be nonnegative");
  return t / w_n;
}

Bracket finite_population_bracket(double mu_star, double v_n, double v_pp_n, double w_n,
                                  std::int64_t s0, bool strict) {
  if (s0 < 1) throw DomainError("initial population must be at least 1");
  if (!(w_n > 0.0)) throw DomainError("W_n must be positive");
  const double r = v_n / w_n;
  const double r_pp = v_pp_n / w_n;
  const double lo_den = 1.0 - r / (s0 + 1.0);
  const double hi_den = 1.0 - r_pp / (s0 + 1.0);
  if (!(lo_den > 0.0) || !(hi_den > 0.0)) throw DomainError("degenerate bracket denominator");
  Bracket b{mu_star / lo_den, mu_star / hi_den};
  if (strict) {
    if (s0 < 2) throw DomainError("strict bracket needs an initial population of at least 2");
    const double den = 1.0 - r / (s0 - 1.0);
    if (den > 0.0) b.hi = std::min(b.hi, mu_star / den);
  }
  return b;
}

CorrectionRatios correction_ratio_report(const EfficiencySchedule& schedule, int n,
                                         std::int64_t s0, VppWeighting weighting) {
  const DerivedSequences seqs = derived_sequences(schedule, n);
  CorrectionRatios c;
  const double w = seqs.w(n);
  if (!(w > 0.0)) throw DomainError("W_n must be positive");
  c.r = seqs.v(n) / w;
  c.r_pp = upper_correction_sum(seqs, n, weighting) / w;
  const Bracket b = finite_population_bracket(1.0, seqs.v(n), upper_correction_sum(seqs, n, weighting),
                                              w, s0);
  c.multiplier_lo = b.lo;
  c.multiplier_hi = b.hi;
  return c;
}

Negligibility negligibility(std::int64_t s0, int n, double lambda_min) {
  if (lambda_min < 0.0) throw DomainError("minimum efficiency must be nonnegative");
  Negligibility g;
  g.criterion = static_cast<double>(s0) * n * lambda_min;
  g.relative_error =
      g.criterion > 0.0 ? 2.0 / g.criterion : std::numeric_limits<double>::infinity();
  g.negligible = g.relative_error <= kNegligibleRelativeError;
  return g;
}

Interval chebyshev_interval(double et_lo, double et_hi, double vt_hi, double z) {
  if (!(z > 1.0)) throw DomainError("Chebyshev multiplier must exceed 1");
  if (vt_hi < 0.0) throw DomainError("variance bound must be nonnegative");
  const double half = z * std::sqrt(vt_hi);
  return {et_lo - half, et_hi + half, 1.0 - 1.0 / (z * z)};
}

PoissonInterval poisson_interval(double t, double w_n, double wp_n, int ell, double z) {
  if (ell < 1) throw DomainError("sample size must be at least 1");
  if (!(z > 1.0)) throw DomainError("Chebyshev multiplier must exceed 1");
  const double mu_star = point_estimate(t, w_n);
  PoissonInterval p;
  p.sigma_star = std::sqrt((t + t * t * wp_n / (w_n * w_n)) / ell);
  const double half = z * p.sigma_star / w_n;
  p.ci = {mu_star - half, mu_star + half, 1.0 - 1.0 / (z * z)};
  p.sqrt_t_over_ell = std::sqrt(t / ell);
  if (t > 0.0) {
    const double rel = z / std::sqrt(t * ell);
    p.small_rate_lo = mu_star * (1.0 - rel);
    p.small_rate_hi = mu_star * (1.0 + rel);
  }
  return p;
}

SampleSizeGuidance sample_size_guidance(const DerivedSequences& seqs, std::int64_t s0, int n) {
  if (n < 0 || n > seqs.n) throw DomainError("cycle count exceeds the derived sequences");
  SampleSizeGuidance g;
  g.homogeneous = static_cast<double>(n) * s0;
  g.heterogeneous = seqs.lambda.head(n).sum() * s0;
  std::ostringstream msg;
  msg << "samples much larger than " << g.heterogeneous << " add little information";
  g.warning = msg.str();
  return g;
}

EstimateReport estimate_report(const EfficiencySchedule& schedule, int n, std::int64_t s0,
                               int ell, double t, double z, VppWeighting weighting,
                               bool strict) {
  const DerivedSequences seqs = derived_sequences(schedule, n);
  EstimateReport r;
  r.n = n;
  r.s0 = s0;
  r.ell = ell;
  r.t = t;
  r.z = z;
  r.w_n = seqs.w(n);
  r.wp_n = seqs.w_prime(n);
  r.v_n = seqs.v(n);
  r.v_pp_n = upper_correction_sum(seqs, n, weighting);
  r.mu_star = point_estimate(t, r.w_n);
  const Bracket b = finite_population_bracket(r.mu_star, r.v_n, r.v_pp_n, r.w_n, s0, strict);
  r.bracket_lo = b.lo;
  r.bracket_hi = b.hi;
  r.r = r.v_n / r.w_n;
  r.r_pp = r.v_pp_n / r.w_n;
  const PoissonInterval p = poisson_interval(t, r.w_n, r.wp_n, ell, z);
  r.sigma_star = p.sigma_star;
  r.ci_lo = p.ci.lo;
  r.ci_hi = p.ci.hi;
  r.level = p.ci.level;
  r.small_rate_lo = p.small_rate_lo;
  r.small_rate_hi = p.small_rate_hi;
  r.sqrt_t_over_ell = p.sqrt_t_over_ell;
  r.negligible = negligibility(s0, n, n > 0 ? seqs.lambda.head(n).minCoeff() : 0.0);
  r.sample_size = sample_size_guidance(seqs, s0, n);
  return r;
}

}  // namespace branchpcr
