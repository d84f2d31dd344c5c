#include "branchpcr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include "branchpcr/errors.hpp"

namespace branchpcr {
namespace {

// Increment law on integer keys: a key shift v has probability pmf[v] and
// adds v * unit to the state.
struct IncrementLaw {
  double unit = 1.0;
  std::vector<double> pmf{1.0};
};

std::vector<double> poisson_pmf(double mu, double tail_tol) {
  std::vector<double> pmf;
  double p = std::exp(-mu);
  double cumulative = 0.0;
  for (int v = 0;; ++v) {
    pmf.push_back(p);
    cumulative += p;
    if (1.0 - cumulative < tail_tol && v >= mu) break;
    p *= mu / (v + 1);
    if (v > 100000) break;
  }
  const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  for (double& q : pmf) q /= total;
  return pmf;
}

IncrementLaw increment_law(const MutationLaw& law) {
  if (!law.poisson && law.mu == 0.0 && law.nu > 0.0)
    throw DomainError("simulated increment laws need a positive mean when the variance is positive");
  IncrementLaw inc;
  if (law.mu == 0.0) return inc;
  if (law.poisson) {
    inc.pmf = poisson_pmf(law.mu, 1e-12);
    return inc;
  }
  const double second = law.second_moment();
  inc.unit = second / law.mu;
  const double p = law.mu * law.mu / second;
  inc.pmf = {1.0 - p, p};
  return inc;
}

std::int64_t binomial(std::int64_t trials, double p, Engine& engine) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<std::int64_t> dist(trials, p);
  return dist(engine);
}

// Splits `trials` over the categories of `pmf` (sequential conditional binomials).
template <class Sink>
void multinomial(std::int64_t trials, const std::vector<double>& pmf, Engine& engine, Sink&& sink) {
  double mass = 1.0;
  for (std::size_t v = 0; v < pmf.size() && trials > 0; ++v) {
    std::int64_t b = trials;
    if (v + 1 < pmf.size()) {
      const double q = mass > 0.0 ? std::clamp(pmf[v] / mass, 0.0, 1.0) : 1.0;
      b = binomial(trials, q, engine);
    }
    if (b > 0) sink(v, b);
    trials -= b;
    mass -= pmf[v];
  }
}

double sample_variance(const std::vector<double>& x, double mean) {
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

// Standard error of the sample variance: sqrt((m4 - s^4) / N).
double variance_standard_error(const std::vector<double>& x, double mean, double var) {
  double m4 = 0.0;
  for (double v : x) m4 += std::pow(v - mean, 4);
  m4 /= static_cast<double>(x.size());
  return std::sqrt(std::max(0.0, m4 - var * var) / static_cast<double>(x.size()));
}

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Runs body(i) for i in [0, count) over contiguous chunks; rethrows the first
// failure after all workers join.
template <class Body>
void parallel_for(long count, unsigned threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<long>(threads, std::max(1L, count)));
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  const long chunk = (count + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        const long end = std::min(count, (w + 1) * chunk);
        for (long i = w * chunk; i < end; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct ReplicateRecord {
  double t = 0.0;
  double zeta = 0.0;
  double size = 0.0;
  double gamma_size = 0.0;
  double w_random = 0.0;
  double inv_size = 0.0;
  std::vector<double> state_law;  // zeta_n({key})
};

}  // namespace

void ProcessSpec::validate() const {
  if (s0 < 1) throw DomainError("initial population must be at least 1");
  if (n < 0) throw DomainError("cycle count must be nonnegative");
  if (schedule.is_deterministic() && static_cast<std::size_t>(n) > schedule.length())
    throw DomainError("cycle count exceeds the schedule length");
  if (schedule.is_deterministic() && schedule.length() == 0)
    throw DomainError("efficiency schedule is empty");
  schedule.validate_initial(s0);
  mutation.validate();
  if (population_cap < s0) throw DomainError("population cap is below the initial population");
}

double PopulationState::mean_state() const {
  double sum = 0.0;
  for (std::size_t key = 0; key < counts.size(); ++key)
    sum += static_cast<double>(counts[key]) * state(key);
  return sum / static_cast<double>(size);
}

double PopulationState::mean_square_state() const {
  double sum = 0.0;
  for (std::size_t key = 0; key < counts.size(); ++key)
    sum += static_cast<double>(counts[key]) * state(key) * state(key);
  return sum / static_cast<double>(size);
}

Trajectory simulate(const ProcessSpec& spec, Engine& engine) {
  spec.validate();
  const IncrementLaw inc = increment_law(spec.mutation);

  Trajectory traj;
  PopulationState& pop = traj.final_state;
  pop.unit = inc.unit;
  pop.size = spec.s0;
  pop.counts = {spec.s0};
  traj.sizes.push_back(pop.size);

  for (int k = 1; k <= spec.n; ++k) {
    const double lam = spec.schedule.efficiency(k, pop.size);
    std::vector<std::int64_t> next = pop.counts;
    next.resize(pop.counts.size() + inc.pmf.size() - 1, 0);
    std::int64_t births = 0;
    for (std::size_t key = 0; key < pop.counts.size(); ++key) {
      const std::int64_t dup = binomial(pop.counts[key], lam, engine);
      births += dup;
      multinomial(dup, inc.pmf, engine,
                  [&](std::size_t shift, std::int64_t b) { next[key + shift] += b; });
    }
    while (next.size() > 1 && next.back() == 0) next.pop_back();
    if (pop.size + births > spec.population_cap) {
      traj.cap_exceeded = true;
      std::ostringstream msg;
      msg << "population " << pop.size + births << " exceeds the cap " << spec.population_cap
          << " at cycle " << k;
      traj.message = msg.str();
      return traj;
    }
    traj.lambdas.push_back(lam);
    pop.counts = std::move(next);
    pop.size += births;
    pop.gen = k;
    traj.sizes.push_back(pop.size);
  }
  return traj;
}

Trajectory simulate(const ProcessSpec& spec, std::uint64_t seed) {
  Engine engine = replicate_engine(seed, 0);
  return simulate(spec, engine);
}

SampleStats draw_sample(const PopulationState& pop, int ell, Engine& engine) {
  if (ell < 1) throw DomainError("sample size must be at least 1");
  if (pop.size < 1) throw DomainError("cannot sample an empty population");
  SampleStats s;
  s.ell = ell;
  std::int64_t remaining_draws = ell;
  std::int64_t remaining_particles = pop.size;
  double total = 0.0;
  for (std::size_t key = 0; key < pop.counts.size() && remaining_draws > 0; ++key) {
    const std::int64_t c = pop.counts[key];
    if (c == 0) continue;
    const std::int64_t b =
        c == remaining_particles
            ? remaining_draws
            : binomial(remaining_draws, static_cast<double>(c) / remaining_particles, engine);
    if (b > 0) {
      s.picks.emplace_back(pop.state(key), b);
      total += static_cast<double>(b) * static_cast<double>(key);
    }
    remaining_draws -= b;
    remaining_particles -= c;
  }
  s.t = pop.unit * total / ell;
  return s;
}

MonteCarloMoments monte_carlo_moments(const ProcessSpec& spec, int ell, long replicates,
                                      std::uint64_t seed, unsigned threads) {
  spec.validate();
  (void)increment_law(spec.mutation);
  if (replicates < 1) throw DomainError("at least one replicate is required");
  if (ell < 1) throw DomainError("sample size must be at least 1");

  std::optional<DerivedSequences> seqs;
  if (spec.schedule.is_deterministic()) seqs = derived_sequences(spec.schedule, spec.n);

  std::vector<ReplicateRecord> records(replicates);
  parallel_for(replicates, threads, [&](long i) {
    Engine engine = replicate_engine(seed, static_cast<std::uint64_t>(i));
    const Trajectory traj = simulate(spec, engine);
    if (traj.cap_exceeded) throw CapExceeded(traj.message);
    const PopulationState& pop = traj.final_state;
    ReplicateRecord& r = records[i];
    r.t = draw_sample(pop, ell, engine).t;
    r.zeta = pop.mean_state();
    r.size = static_cast<double>(pop.size);
    r.inv_size = 1.0 / r.size;
    if (seqs) r.gamma_size = seqs->gamma(spec.n) * r.size;
    for (double lam : traj.lambdas) r.w_random += lam / (1.0 + lam);
    r.state_law.resize(pop.counts.size());
    for (std::size_t key = 0; key < pop.counts.size(); ++key)
      r.state_law[key] = static_cast<double>(pop.counts[key]) / r.size;
  });

  const auto column = [&](auto member) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.*member);
    return out;
  };
  const double n_rep = static_cast<double>(replicates);

  MonteCarloMoments mc;
  mc.replicates = replicates;
  mc.ell = ell;
  const std::vector<double> t = column(&ReplicateRecord::t);
  const std::vector<double> zeta = column(&ReplicateRecord::zeta);
  const std::vector<double> size = column(&ReplicateRecord::size);
  const std::vector<double> gamma_size = column(&ReplicateRecord::gamma_size);
  const std::vector<double> w_random = column(&ReplicateRecord::w_random);
  mc.mean_t = mean_of(t);
  mc.mean_zeta = mean_of(zeta);
  mc.mean_size = mean_of(size);
  mc.mean_w_random = mean_of(w_random);
  mc.mean_inv_size = mean_of(column(&ReplicateRecord::inv_size));
  if (seqs) mc.martingale_mean = mean_of(gamma_size);
  if (seqs && spec.mutation.mu > 0.0) mc.gap_emp = seqs->w(spec.n) - mc.mean_zeta / spec.mutation.mu;

  if (replicates >= 2) {
    const double vt = sample_variance(t, mc.mean_t);
    mc.var_t = vt;
    mc.se_mean_t = std::sqrt(vt / n_rep);
    mc.se_var_t = variance_standard_error(t, mc.mean_t, vt);
    const double vz = sample_variance(zeta, mc.mean_zeta);
    mc.rn = vz;
    mc.se_mean_zeta = std::sqrt(vz / n_rep);
    mc.se_rn = variance_standard_error(zeta, mc.mean_zeta, vz);
    mc.se_mean_size = std::sqrt(sample_variance(size, mc.mean_size) / n_rep);
    mc.se_w_random = std::sqrt(sample_variance(w_random, mc.mean_w_random) / n_rep);
    if (seqs) mc.se_martingale = std::sqrt(sample_variance(gamma_size, *mc.martingale_mean) / n_rep);
  }

  std::size_t keys = 0;
  for (const auto& r : records) keys = std::max(keys, r.state_law.size());
  mc.pooled_state_law.assign(keys, 0.0);
  for (const auto& r : records)
    for (std::size_t k = 0; k < r.state_law.size(); ++k) mc.pooled_state_law[k] += r.state_law[k];
  for (double& p : mc.pooled_state_law) p /= n_rep;

  if (seqs && spec.mutation.poisson && spec.mutation.integer_valued) {
    const Eigen::ArrayXd star = eta_star_distribution(*seqs, spec.mutation, spec.n);
    const Eigen::ArrayXd pooled =
        Eigen::Map<const Eigen::ArrayXd>(mc.pooled_state_law.data(), keys);
    mc.tv_to_eta_star = total_variation(pooled, star);
    if (replicates >= 2) {
      double err = 0.0;
      for (std::size_t k = 0; k < keys; ++k) {
        double ss = 0.0;
        for (const auto& r : records) {
          const double x = k < r.state_law.size() ? r.state_law[k] : 0.0;
          ss += (x - mc.pooled_state_law[k]) * (x - mc.pooled_state_law[k]);
        }
        err += std::sqrt(ss / (n_rep - 1.0) / n_rep);
      }
      mc.tv_mc_error = 0.5 * err;
    }
  }
  return mc;
}

Eigen::ArrayXd eta_star_distribution(const DerivedSequences& seqs, const MutationLaw& law, int n,
                                     double tail_tol) {
  if (!law.poisson || !law.integer_valued)
    throw DomainError("exact infinite-population law needs Poisson increments");
  if (n < 0 || n > seqs.n) throw DomainError("cycle count exceeds the derived sequences");
  const std::vector<double> pois = poisson_pmf(law.mu, tail_tol);
  Eigen::ArrayXd law_now = Eigen::ArrayXd::Ones(1);
  for (int k = 0; k < n; ++k) {
    const double a = seqs.alpha(k);
    Eigen::ArrayXd next = Eigen::ArrayXd::Zero(law_now.size() + pois.size() - 1);
    next.head(law_now.size()) = (1.0 - a) * law_now;
    for (Eigen::Index i = 0; i < law_now.size(); ++i)
      for (std::size_t v = 0; v < pois.size(); ++v) next(i + v) += a * law_now(i) * pois[v];
    Eigen::Index keep = next.size();
    double tail = 0.0;
    while (keep > 1 && tail + next(keep - 1) < tail_tol) tail += next(--keep);
    law_now = next.head(keep);
  }
  return law_now;
}

double total_variation(const Eigen::ArrayXd& p, const Eigen::ArrayXd& q) {
  const Eigen::Index size = std::max(p.size(), q.size());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < size; ++i) {
    const double a = i < p.size() ? p(i) : 0.0;
    const double b = i < q.size() ? q(i) : 0.0;
    sum += std::abs(a - b);
  }
  return 0.5 * sum;
}

double OffspringLaw::mean() const { return moment(1); }

double OffspringLaw::moment(int power) const {
  double m = 0.0;
  for (std::size_t j = 0; j < prob.size(); ++j) m += prob[j] * std::pow(j + 1.0, power);
  return m;
}

void OffspringLaw::validate() const {
  if (prob.empty()) throw DomainError("offspring law is empty");
  double total = 0.0;
  for (double p : prob) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("offspring probabilities must lie in [0, 1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("offspring probabilities must sum to 1");
  if (child_means.size() != prob.size())
    throw DomainError("need one child-mean list per arity");
  for (std::size_t j = 0; j < child_means.size(); ++j)
    if (child_means[j].size() != j + 1)
      throw DomainError("an arity-j birth needs j child means");
}

void GeneralSpec::validate() const {
  if (s0 < 1) throw DomainError("initial population must be at least 1");
  for (const auto& law : cycles) law.validate();
}

std::vector<double> simulate_general(const GeneralSpec& spec, Engine& engine) {
  spec.validate();
  std::vector<double> states(spec.s0, 0.0);
  for (const auto& law : spec.cycles) {
    std::discrete_distribution<int> arity(law.prob.begin(), law.prob.end());
    std::vector<double> next;
    next.reserve(states.size() * law.prob.size());
    for (double s : states) {
      const int j = arity(engine);
      for (double inc : law.child_means[j]) next.push_back(s + inc);
      if (static_cast<std::int64_t>(next.size()) > spec.population_cap)
        throw CapExceeded("general-model population exceeds the cap");
    }
    states = std::move(next);
  }
  return states;
}

double general_infinite_mean(const GeneralSpec& spec) {
  spec.validate();
  double total = 0.0;
  for (const auto& law : spec.cycles) {
    const double mean_offspring = law.mean();
    for (std::size_t j = 0; j < law.prob.size(); ++j) {
      const double arity_mean =
          std::accumulate(law.child_means[j].begin(), law.child_means[j].end(), 0.0);
      total += arity_mean * law.prob[j] / mean_offspring;
    }
  }
  return total;
}

GeneralMonteCarlo general_monte_carlo(const GeneralSpec& spec, long replicates,
                                      std::uint64_t seed, unsigned threads) {
  if (replicates < 2) throw DomainError("at least two replicates are required");
  std::vector<double> zeta(replicates);
  parallel_for(replicates, threads, [&](long i) {
    Engine engine = replicate_engine(seed, static_cast<std::uint64_t>(i));
    const std::vector<double> states = simulate_general(spec, engine);
    zeta[i] = mean_of(states);
  });
  GeneralMonteCarlo g;
  g.mean_zeta = mean_of(zeta);
  g.se_mean_zeta = std::sqrt(sample_variance(zeta, g.mean_zeta) / replicates);
  return g;
}

}  // namespace branchpcr
