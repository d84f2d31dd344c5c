#ifndef BRANCHPCR_MOMENTS_HPP
#define BRANCHPCR_MOMENTS_HPP

#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "branchpcr/schedule.hpp"

namespace branchpcr {

/// First two moments of the state increment attached to each duplication.
struct MutationLaw {
  double mu = 0.0;  ///< mean increment
  double nu = 0.0;  ///< increment variance
  bool poisson = false;
  bool integer_valued = false;

  static MutationLaw poisson_law(double mu);
  static MutationLaw from_moments(double mu, double nu);

  double second_moment() const { return nu + mu * mu; }
  void validate() const;
};

/// Mean and variance of the sample mean t* in the infinite-population limit.
struct InfinitePopulationMoments {
  double mean = 0.0;      ///< mu W_n
  double variance = 0.0;  ///< (nu W_n + mu^2 W'_n) / ell
};
InfinitePopulationMoments infinite_population_moments(const DerivedSequences& seqs,
                                                      const MutationLaw& law, int n, int ell);

inline constexpr std::int64_t kDefaultSizeCap = 2'000'000;

/// Exact law of the population size S_n.
struct SizeLaw {
  int n = 0;
  std::int64_t min_size = 0;
  Eigen::ArrayXd prob;  ///< prob(i) = P(S_n = min_size + i)

  std::int64_t max_size() const { return min_size + prob.size() - 1; }
  double probability(std::int64_t s) const;

  /// E f(S_n), skipping zero-probability support points.
  template <class F>
  double expect(F&& f) const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < prob.size(); ++i)
      if (prob(i) != 0.0) sum += prob(i) * f(min_size + static_cast<std::int64_t>(i));
    return sum;
  }
  double mean() const;
};

/// Exact law of S_n by one binomial convolution per cycle. Throws CapExceeded
/// when 2^n S0 exceeds `cap`.
SizeLaw size_law(const EfficiencySchedule& schedule, std::int64_t s0, int n,
                 std::int64_t cap = kDefaultSizeCap);

/// Exact finite-population gap terms from the size law.
struct ExactGap {
  Eigen::ArrayXd a;          ///< a(k - 1) = E A(S_{k-1}, lambda_k)
  double v_n = 0.0;          ///< sum of a
  double v_prime_n = 0.0;    ///< sum a_k^2 + (1 - 2 alpha_k) a_k (scalar reading)
  /// sum E[A(S)^2 + (1 - 2 alpha_k) A(S)] (reading with the expectation outside)
  double v_prime_expectation_n = 0.0;
};
ExactGap exact_gap(const EfficiencySchedule& schedule, std::int64_t s0, int n,
                   std::int64_t cap = kDefaultSizeCap);

/// Brackets on E(t) = M(eta_n) and the total-variation bound.
struct FirstMomentEnvelope {
  double et_lo = 0.0;
  double et_hi = 0.0;
  double tv_hi = 0.0;
  double gap_lo = 0.0;  ///< lower bound on V_n
  double gap_hi = 0.0;  ///< upper bound on V_n
  std::optional<double> et_exact;  ///< mu (W_n - V_n) when V_n is supplied
};
FirstMomentEnvelope first_moment_envelope(const DerivedSequences& seqs, const MutationLaw& law,
                                          std::int64_t s0, int n,
                                          std::optional<double> exact_v_n = std::nullopt);

/// Uniform V of the error term: 1 / (S0 - 1) for S0 >= 2, 3/2 for S0 = 1.
double uniform_gap_bound(std::int64_t s0);

/// Per-cycle upper bounds on R_n = V(M(zeta_n)).
struct RemainderBound {
  Eigen::ArrayXd shifted;  ///< route valid for S0 >= 2; +inf when S0 = 1
  Eigen::ArrayXd any;      ///< route valid for every S0 >= 1
  Eigen::ArrayXd best;     ///< pointwise minimum of the valid routes
};

/// Closed-form sums over the derived sequences.
RemainderBound remainder_closed_form(const DerivedSequences& seqs, const MutationLaw& law,
                                     std::int64_t s0, int n);

/// The same bounds obtained by iterating the one-step recursion with bounded
/// coefficients, harmonic-moment bounds and the variance contraction.
RemainderBound remainder_recursion_bound(const DerivedSequences& seqs, const MutationLaw& law,
                                         std::int64_t s0, int n);

/// Schedule-free bound on R_n: 2 (nu + mu^2) / (S0 - 1), or 6 nu + 11 mu^2 / 2 at S0 = 1.
double uniform_remainder_bound(const MutationLaw& law, std::int64_t s0);

struct VarianceEnvelope {
  double vt_star = 0.0;
  double vt_lo = 0.0;
  double vt_hi = 0.0;
  double rn_hi = 0.0;
  double zn_hi = 0.0;
};
VarianceEnvelope variance_envelope(const DerivedSequences& seqs, const MutationLaw& law,
                                   std::int64_t s0, int n, int ell);

/// Every certified bound for one (schedule prefix, S0, ell).
struct MomentEnvelope {
  int n = 0;
  std::int64_t s0 = 0;
  int ell = 0;
  double et_star = 0.0;
  double vt_star = 0.0;
  double et_lo = 0.0;
  double et_hi = 0.0;
  double vt_lo = 0.0;
  double vt_hi = 0.0;
  double tv_hi = 0.0;
  double rn_hi = 0.0;
  double zn_hi = 0.0;
  double vn_lo = 0.0;
  double vn_hi = 0.0;
};
MomentEnvelope moment_envelope(const DerivedSequences& seqs, const MutationLaw& law,
                               std::int64_t s0, int n, int ell);

/// n L0 mu0 / S0: crude bound on |M(eta_n) - M(eta_n*)| for general
/// offspring laws with E(L^3) <= L0 and per-child mean increments <= mu0.
double general_mean_bound(int n, double mu0, double l0, std::int64_t s0);

}  // namespace branchpcr

#endif  // BRANCHPCR_MOMENTS_HPP
