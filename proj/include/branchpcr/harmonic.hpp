#ifndef BRANCHPCR_HARMONIC_HPP
#define BRANCHPCR_HARMONIC_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "branchpcr/schedule.hpp"

// Exact harmonic-moment functionals of M_k = L_1 + ... + L_k for i.i.d.
// Bernoulli offspring L in {1, 2} with P(L = 2) = lambda. Every expectation
// is a finite sum over j = number of duplications ~ Binomial(k, lambda),
// with M_k = k + j.
namespace branchpcr::harmonic {

/// Binomial(k, lambda) probabilities p(j), j = 0..k; M_k = k + j.
/// The probabilities are normalised to sum to one.
Eigen::ArrayXd binomial_mix(long k, double lambda);

/// E f(j) for j ~ Binomial(k, lambda).
template <class F>
double expect(long k, double lambda, F&& f) {
  const Eigen::ArrayXd p = binomial_mix(k, lambda);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j)
    if (p(j) != 0.0) sum += p(j) * f(static_cast<double>(j));
  return sum;
}

/// E((k + y) / (M_k + y)); y = 0 gives the rescaled harmonic mean H(k).
double harmonic_ratio(long k, double lambda, double y = 0.0);

/// H(k) - 1 / E(L): the excess of the harmonic mean over its limit.
double harmonic_gap(long k, double lambda);

/// E((k / M_k)^2).
double harmonic_square(long k, double lambda);

/// E((k / M_k)^j) for integer j >= 1.
double harmonic_power(long k, double lambda, int j);

/// Coefficients of the one-step recursion for the second moment of the
/// population mean state.
struct RecursionCoefficients {
  double excess = 0.0;          ///< E((M_k - k) / M_k^2)
  double ratio_variance = 0.0;  ///< V(k / M_k)
  double pair_spread = 0.0;     ///< (k / 2) E((L_1 - L_2)^2 / M_k^2); 0 at k = 1
  double pair_product = 0.0;    ///< k^2 E(L_1 L_2 / M_k^2); 1 at k = 1
  double defect_square = 0.0;   ///< E((1 - k / M_k)^2)
};
RecursionCoefficients recursion_coefficients(long k, double lambda);

/// Coefficients of the one-step recursion for E(D(zeta) / (S + y)).
struct ContractionCoefficients {
  double contraction = 0.0;  ///< k^2 (k + y) E(L_1 L_2 / (M_k^2 (M_k + y))); 0 at k = 1
  double forcing_nu = 0.0;   ///< E((M_k - 1)(M_k - k) / (M_k^2 (M_k + y)))
  double forcing_mu2 = 0.0;  ///< E(k (M_k - k) / (M_k^2 (M_k + y)))
  double harmonic = 0.0;     ///< E((k + y) / (M_k + y))
};
ContractionCoefficients contraction_coefficients(long k, double lambda, double y);

/// Closed-form Taylor bounds: H(k) <= h_upper and G(k) >= g_lower.
struct TaylorSandwich {
  double h_upper = 0.0;
  double g_lower = 0.0;
};
TaylorSandwich taylor_sandwich(long k, double lambda);

/// Integral of f(t)^k f'(t)^(-2 ell) over [0, 1] with f(t) = (1 - lambda) t + lambda t^2,
/// by adaptive Simpson to absolute tolerance 1e-12. Requires 0 < lambda < 1;
/// lambda (1 - lambda) times the ell = 1 value equals harmonic_gap(k, lambda).
double gap_integral(long k, int ell, double lambda);

/// Bounds on E(1 / (S_n + y)) for a deterministic schedule.
struct HarmonicMomentBounds {
  double lower = 0.0;
  double upper = 0.0;                 ///< best available upper bound
  double shifted_upper = 0.0;         ///< gamma^(y+2)_n / (S0 + y), or gamma_n / (S0 - |y|)
  std::optional<double> eq5_upper;    ///< gamma_n (1 + 1 / min lambda), S0 = 1 and y = 0 only
};

/// y >= 0: gamma_n / (S0 + y) <= E(1/(S_n + y)) <= gamma_n^(y+2) / (S0 + y).
/// y <= -1 with S0 > |y|: gamma_n / S0 <= E(1/(S_n + y)) <= gamma_n / (S0 + y).
/// Throws DomainError for -1 < y < 0 or S0 + y <= 0.
HarmonicMomentBounds harmonic_moment_bounds(const DerivedSequences& seqs, long s0, int n,
                                            double y);

/// One failed inequality or identity of the harmonic-moment suite.
struct PropertyViolation {
  std::string property;
  long k = 0;
  double lambda = 0.0;
  double y = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;  ///< the check is lhs <= rhs + slack (or |lhs - rhs| <= slack)
};

struct PropertyGrid {
  long k_max = 60;
  std::vector<double> lambdas;  ///< empty means 0.05, 0.10, ..., 1.00
  std::vector<double> ys{-1.0, 0.0, 0.5, 1.0, 5.0};
  double slack = 1e-12;
};

struct PropertyReport {
  long checks = 0;
  std::vector<PropertyViolation> violations;
};

/// Runs the inequality and identity checks of the harmonic functionals
/// over the grid.
PropertyReport check_harmonic_properties(const PropertyGrid& grid);

}  // namespace branchpcr::harmonic

#endif  // BRANCHPCR_HARMONIC_HPP
