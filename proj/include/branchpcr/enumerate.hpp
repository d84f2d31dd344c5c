#ifndef BRANCHPCR_ENUMERATE_HPP
#define BRANCHPCR_ENUMERATE_HPP

#include <cstdint>
#include <vector>

#include "branchpcr/simulator.hpp"

namespace branchpcr {

inline constexpr std::int64_t kEnumerationMaxInitial = 2;
inline constexpr int kEnumerationMaxCycles = 4;

/// Genealogy summary of a population: size, sum of per-particle increment
/// counts, sum of their squares, and sum over increments of the squared
/// number of carriers. These determine every conditional moment of the
/// states given the duplication pattern.
struct Genealogy {
  std::int64_t size = 0;
  std::int64_t depth_sum = 0;
  std::int64_t depth_square_sum = 0;
  std::int64_t carrier_square_sum = 0;

  bool operator==(const Genealogy&) const = default;

  double mean_state(const MutationLaw& law) const;         ///< E[M(zeta) | genealogy]
  double mean_square_state(const MutationLaw& law) const;  ///< E[zeta(s^2) | genealogy]
  double square_mean_state(const MutationLaw& law) const;  ///< E[M(zeta)^2 | genealogy]
};

struct WeightedGenealogy {
  Genealogy g;
  double prob = 0.0;
};

/// Exact law of the genealogy summary after n cycles of a deterministic
/// schedule. Throws DomainError beyond S0 = 2 or n = 4.
std::vector<WeightedGenealogy> genealogy_law(const EfficiencySchedule& schedule, std::int64_t s0,
                                             int n);

struct TinyMoments {
  double et = 0.0;     ///< E(t)
  double vt = 0.0;     ///< V(t)
  double rn = 0.0;     ///< V(M(zeta_n))
  double m_eta = 0.0;  ///< M(eta_n)
  double d_eta = 0.0;  ///< D(eta_n)
};
TinyMoments enumerate_tiny(const ProcessSpec& spec, int ell);

/// nu (W_n - V_n) + mu^2 (W'_n - V'_n) with the exact gap terms.
double dispersion_closed_form(const ProcessSpec& spec);

/// R_k for k = 0..n three ways: exact, iterating the one-step recursion
/// R_{k+1} = R_k + nu E B(S_k) + mu^2 E B'(S_k) + E[D(zeta_k) B''(S_k)], and
/// the same recursion with the two size-fluctuation terms
/// mu^2 V(H(S_k)) - 2 mu Cov(M(zeta_k), H(S_k)) added.
struct RemainderRecursion {
  std::vector<double> exact;
  std::vector<double> dispersion_only;
  std::vector<double> with_size_terms;
};
RemainderRecursion remainder_recursion(const ProcessSpec& spec);

}  // namespace branchpcr

#endif  // BRANCHPCR_ENUMERATE_HPP
