#ifndef BRANCHPCR_SCHEDULE_HPP
#define BRANCHPCR_SCHEDULE_HPP

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Core>

namespace branchpcr {

/// Per-cycle duplication probabilities of the Bernoulli branching process.
///
/// Either a fixed sequence (lambda_1, ..., lambda_N) or Michaelis-Menten
/// kinetics, where the efficiency of cycle k is D / (C + S_{k-1}) and so
/// depends on the random population size.
class EfficiencySchedule {
 public:
  enum class Kind { deterministic, michaelis_menten };

  /// Throws DomainError on an empty sequence or a value outside [0, 1].
  static EfficiencySchedule deterministic(std::vector<double> lambdas);
  /// Throws DomainError unless C > 0 and D > 0.
  static EfficiencySchedule michaelis_menten(double c, double d);

  Kind kind() const { return kind_; }
  bool is_deterministic() const { return kind_ == Kind::deterministic; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  std::size_t length() const { return lambdas_.size(); }
  double mm_c() const { return c_; }
  double mm_d() const { return d_; }

  /// Efficiency of cycle k (1-based) after a population of `previous_size`.
  double efficiency(int cycle, std::int64_t previous_size) const;

  /// Checks D <= C + S0 for Michaelis-Menten schedules; no-op otherwise.
  void validate_initial(std::int64_t s0) const;

 private:
  Kind kind_ = Kind::deterministic;
  std::vector<double> lambdas_;
  double c_ = 0.0;
  double d_ = 0.0;
};

/// Michaelis-Menten efficiency D / (C + S_prev).
double mm_lambda(std::int64_t previous_size, double c, double d);

/// The three remainder weight sums that bound the sample-mean variance term,
/// stored without their population prefactor.
struct RemainderWeights {
  Eigen::ArrayXd nu;     ///< coefficient of the increment variance
  Eigen::ArrayXd mu2;    ///< coefficient of the squared increment mean
  Eigen::ArrayXd mixed;  ///< coefficient of (nu + mu^2)
};

/// Deterministic sequences derived from a schedule prefix of n cycles.
///
/// Per-cycle arrays (`lambda`, `alpha`) have length n and are indexed by
/// k - 1. Cumulative arrays have length n + 1 and index m holds the value
/// after m cycles, so index 0 is the empty-prefix value.
struct DerivedSequences {
  int n = 0;
  Eigen::ArrayXd lambda;
  Eigen::ArrayXd alpha;       ///< lambda / (1 + lambda)
  Eigen::ArrayXd gamma;       ///< prod (1 - alpha_k) = 1 / E(S_m / S_0)
  std::map<int, Eigen::ArrayXd> gamma_shift;  ///< i -> prod (1 - lambda_k / i)
  Eigen::ArrayXd w;           ///< sum alpha_k
  Eigen::ArrayXd w_prime;     ///< sum alpha_k (1 - alpha_k)
  Eigen::ArrayXd lambda_min;  ///< running minimum; +inf at index 0
  Eigen::ArrayXd v;           ///< sum gamma_{k-1} alpha_k (1 - lambda_k) / (1 + lambda_k)^2
  Eigen::ArrayXd v_prime;     ///< sum gamma^(2)_{k-1} alpha_k (1 - lambda_k)
  Eigen::ArrayXd v_dprime;    ///< sum gamma^(3)_{k-1} alpha_k (1 - lambda_k)
  /// sum gamma^(3)_{k-1} lambda_k (1 - lambda_k), a looser companion of
  /// v_dprime since alpha_k <= lambda_k.
  Eigen::ArrayXd v_dprime_lambda;
  /// Remainder weights valid for S0 >= 2, prefactor 1 / (S0 - 1) on all three.
  RemainderWeights remainder_shifted;
  /// Remainder weights valid for S0 >= 1, prefactors 1 / S0, 1 / (S0 + 1), 1 / S0.
  RemainderWeights remainder_any;

  const Eigen::ArrayXd& gamma_i(int i) const { return gamma_shift.at(i); }
};

/// prod_{k <= m} (1 - lambda_k / i) for m = 0..n, for any real shift i > 0.
Eigen::ArrayXd shifted_gamma(const Eigen::ArrayXd& lambda, double i);

/// Computes every derived sequence for the first n cycles of a deterministic
/// schedule. Throws DomainError for Michaelis-Menten schedules or
/// n > schedule length.
DerivedSequences derived_sequences(const EfficiencySchedule& schedule, int n);

}  // namespace branchpcr

#endif  // BRANCHPCR_SCHEDULE_HPP
