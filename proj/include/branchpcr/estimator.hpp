#ifndef BRANCHPCR_ESTIMATOR_HPP
#define BRANCHPCR_ESTIMATOR_HPP

#include <cstdint>
#include <string>

#include "branchpcr/schedule.hpp"

namespace branchpcr {

/// Which weight enters the upper correction sum: alpha_k (1 - lambda_k) or
/// the looser lambda_k (1 - lambda_k).
enum class VppWeighting { alpha, lambda };

double upper_correction_sum(const DerivedSequences& seqs, int n, VppWeighting weighting);

/// Infinite-population estimator t / W_n.
double point_estimate(double t, double w_n);

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// Bracket on the finite-population estimator:
/// [mu* / (1 - r / (S0 + 1)), mu* / (1 - r'' / (S0 + 1))] with r = v_n / W_n and
/// r'' = v''_n / W_n. In strict mode (S0 >= 2) the upper end is also capped by
/// mu* / (1 - r / (S0 - 1)).
Bracket finite_population_bracket(double mu_star, double v_n, double v_pp_n, double w_n,
                                  std::int64_t s0, bool strict = false);

struct CorrectionRatios {
  double r = 0.0;
  double r_pp = 0.0;
  double multiplier_lo = 0.0;  ///< 1 / (1 - r / (S0 + 1))
  double multiplier_hi = 0.0;  ///< 1 / (1 - r'' / (S0 + 1))
};
CorrectionRatios correction_ratio_report(const EfficiencySchedule& schedule, int n,
                                         std::int64_t s0,
                                         VppWeighting weighting = VppWeighting::alpha);

inline constexpr double kNegligibleRelativeError = 0.01;

struct Negligibility {
  double criterion = 0.0;       ///< S0 n min(lambda)
  double relative_error = 0.0;  ///< 2 / (n min(lambda) S0)
  bool negligible = false;      ///< relative_error <= 0.01
};
Negligibility negligibility(std::int64_t s0, int n, double lambda_min);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.0;  ///< 1 - 1 / z^2
};

/// [Et_lo - z sqrt(Vt_hi), Et_hi + z sqrt(Vt_hi)].
Interval chebyshev_interval(double et_lo, double et_hi, double vt_hi, double z);

struct PoissonInterval {
  double sigma_star = 0.0;  ///< sqrt((t + t^2 W'_n / W_n^2) / ell)
  Interval ci;              ///< mu* +- z sigma_star / W_n
  double small_rate_lo = 0.0;  ///< mu* (1 - z / sqrt(t ell))
  double small_rate_hi = 0.0;  ///< mu* (1 + z / sqrt(t ell))
  double sqrt_t_over_ell = 0.0;
};
PoissonInterval poisson_interval(double t, double w_n, double wp_n, int ell, double z);

struct SampleSizeGuidance {
  double homogeneous = 0.0;    ///< n S0
  double heterogeneous = 0.0;  ///< (lambda_1 + ... + lambda_n) S0
  std::string warning;
};
SampleSizeGuidance sample_size_guidance(const DerivedSequences& seqs, std::int64_t s0, int n);

struct EstimateReport {
  int n = 0;
  std::int64_t s0 = 0;
  int ell = 0;
  double t = 0.0;
  double w_n = 0.0;
  double wp_n = 0.0;
  double v_n = 0.0;
  double v_pp_n = 0.0;
  double mu_star = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double r = 0.0;
  double r_pp = 0.0;
  double sigma_star = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double small_rate_lo = 0.0;
  double small_rate_hi = 0.0;
  double sqrt_t_over_ell = 0.0;
  double z = 0.0;
  double level = 0.0;
  Negligibility negligible;
  SampleSizeGuidance sample_size;
};

EstimateReport estimate_report(const EfficiencySchedule& schedule, int n, std::int64_t s0,
                               int ell, double t, double z,
                               VppWeighting weighting = VppWeighting::alpha,
                               bool strict = false);

}  // namespace branchpcr

#endif  // BRANCHPCR_ESTIMATOR_HPP
