#ifndef BRANCHPCR_SIMULATOR_HPP
#define BRANCHPCR_SIMULATOR_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "branchpcr/moments.hpp"
#include "branchpcr/rng.hpp"
#include "branchpcr/schedule.hpp"

namespace branchpcr {

inline constexpr std::int64_t kDefaultPopulationCap = 100'000'000;

/// A PCR run: initial population, efficiencies, increment law and horizon.
///
/// Poisson laws draw Poisson(mu) increments. Other laws use the two-point
/// law on {0, a} with a = (nu + mu^2) / mu and P(a) = mu^2 / (nu + mu^2),
/// which matches (mu, nu) exactly; mu = 0 means no increments at all.
struct ProcessSpec {
  std::int64_t s0 = 1;
  EfficiencySchedule schedule;
  MutationLaw mutation;
  int n = 0;
  std::int64_t population_cap = kDefaultPopulationCap;

  void validate() const;
};

/// Population as a count table: counts[key] particles carry the state
/// key * unit. All initial particles carry state 0.
struct PopulationState {
  int gen = 0;
  std::int64_t size = 0;
  double unit = 1.0;
  std::vector<std::int64_t> counts;

  double state(std::size_t key) const { return unit * static_cast<double>(key); }
  /// M(zeta): mean state of the population.
  double mean_state() const;
  /// zeta(s^2): mean squared state of the population.
  double mean_square_state() const;
};

struct Trajectory {
  std::vector<std::int64_t> sizes;  ///< S_0, ..., S_gen
  std::vector<double> lambdas;      ///< efficiency actually used at each cycle
  PopulationState final_state;
  bool cap_exceeded = false;
  std::string message;
};

/// Forward simulation; stops early with cap_exceeded set if the population
/// would exceed spec.population_cap.
Trajectory simulate(const ProcessSpec& spec, Engine& engine);
Trajectory simulate(const ProcessSpec& spec, std::uint64_t seed);

/// A uniform sample with replacement, kept as (state, multiplicity) pairs.
struct SampleStats {
  int ell = 0;
  double t = 0.0;
  std::vector<std::pair<double, std::int64_t>> picks;
};
SampleStats draw_sample(const PopulationState& pop, int ell, Engine& engine);

/// Replicate-level summary of a Monte Carlo run. Variance-type fields are
/// empty when there is a single replicate.
struct MonteCarloMoments {
  long replicates = 0;
  int ell = 0;
  double mean_t = 0.0;
  std::optional<double> se_mean_t;
  std::optional<double> var_t;
  std::optional<double> se_var_t;
  double mean_zeta = 0.0;                   ///< E M(zeta_n)
  std::optional<double> se_mean_zeta;
  std::optional<double> rn;                 ///< V(M(zeta_n))
  std::optional<double> se_rn;
  std::optional<double> gap_emp;            ///< W_n - E M(zeta_n) / mu
  double mean_size = 0.0;
  std::optional<double> se_mean_size;
  std::optional<double> martingale_mean;    ///< E gamma_n S_n, deterministic schedules
  std::optional<double> se_martingale;
  double mean_w_random = 0.0;               ///< E sum alpha_k over the realised efficiencies
  std::optional<double> se_w_random;
  double mean_inv_size = 0.0;               ///< E 1 / S_n
  std::optional<double> tv_to_eta_star;     ///< Poisson laws on deterministic schedules
  std::optional<double> tv_mc_error;        ///< (1/2) sum_s sd(zeta_n{s}) / sqrt(N)
  /// Pooled empirical law of the state key, averaged over replicates.
  std::vector<double> pooled_state_law;
};

/// `threads` = 0 picks the hardware concurrency. The result is identical
/// for every thread count.
MonteCarloMoments monte_carlo_moments(const ProcessSpec& spec, int ell, long replicates,
                                      std::uint64_t seed, unsigned threads = 0);

/// Exact law of eps_1 xi_1 + ... + eps_n xi_n for Poisson(mu) increments,
/// truncated once the remaining tail mass drops below tail_tol.
Eigen::ArrayXd eta_star_distribution(const DerivedSequences& seqs, const MutationLaw& law, int n,
                                     double tail_tol = 1e-12);

/// Total-variation distance between two laws on {0, 1, 2, ...}.
double total_variation(const Eigen::ArrayXd& p, const Eigen::ArrayXd& q);

/// Offspring law and mean child increments for one cycle of the general
/// model. prob[j - 1] = P(L = j); child_means[j - 1] lists the j per-child
/// increment means of an arity-j birth (entry 0 is the parent's own copy).
struct OffspringLaw {
  std::vector<double> prob;
  std::vector<std::vector<double>> child_means;

  double mean() const;
  double moment(int power) const;
  void validate() const;
};

struct GeneralSpec {
  std::int64_t s0 = 1;
  std::vector<OffspringLaw> cycles;  ///< one law per cycle
  std::int64_t population_cap = kDefaultPopulationCap;

  int n() const { return static_cast<int>(cycles.size()); }
  void validate() const;
};

/// Per-particle states of one general-model run. Children receive their
/// parent's state plus their (deterministic) mean increment.
std::vector<double> simulate_general(const GeneralSpec& spec, Engine& engine);

/// Infinite-population mean state: sum_k sum_j mu_j^k P(L_k = j) / E(L_k).
double general_infinite_mean(const GeneralSpec& spec);

struct GeneralMonteCarlo {
  double mean_zeta = 0.0;
  double se_mean_zeta = 0.0;
};
GeneralMonteCarlo general_monte_carlo(const GeneralSpec& spec, long replicates,
                                      std::uint64_t seed, unsigned threads = 0);

}  // namespace branchpcr

#endif  // BRANCHPCR_SIMULATOR_HPP
