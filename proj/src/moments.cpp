#include "branchpcr/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "branchpcr/errors.hpp"
#include "branchpcr/harmonic.hpp"

namespace branchpcr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_prefix(const DerivedSequences& seqs, int n) {
  if (n < 0 || n > seqs.n) throw DomainError("cycle count exceeds the derived sequences");
}

void check_s0(std::int64_t s0) {
  if (s0 < 1) throw DomainError("initial population must be at least 1");
}

// Drops exact-zero probability mass at both ends of the support.
void trim(SizeLaw& law) {
  Eigen::Index first = 0;
  Eigen::Index last = law.prob.size() - 1;
  while (first < last && law.prob(first) == 0.0) ++first;
  while (last > first && law.prob(last) == 0.0) --last;
  if (first == 0 && last == law.prob.size() - 1) return;
  law.prob = law.prob.segment(first, last - first + 1).eval();
  law.min_size += first;
}

// Smallest upper bound on V_n available for this S0.
double gap_upper(const DerivedSequences& seqs, std::int64_t s0, int n) {
  const double s = static_cast<double>(s0);
  double hi = std::min({seqs.v_prime(n) / s, seqs.v_dprime(n) / (s + 1.0), uniform_gap_bound(s0)});
  if (s0 >= 2) hi = std::min(hi, seqs.v(n) / (s - 1.0));
  return hi;
}

}  // namespace

MutationLaw MutationLaw::poisson_law(double mu) {
  MutationLaw law{mu, mu, true, true};
  law.validate();
  return law;
}

MutationLaw MutationLaw::from_moments(double mu, double nu) {
  MutationLaw law{mu, nu, false, false};
  law.validate();
  return law;
}

void MutationLaw::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("mutation mean must be >= 0");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("mutation variance must be >= 0");
  if (poisson && nu != mu) throw DomainError("a Poisson mutation law needs nu = mu");
}

InfinitePopulationMoments infinite_population_moments(const DerivedSequences& seqs,
                                                      const MutationLaw& law, int n, int ell) {
  check_prefix(seqs, n);
  if (ell < 1) throw DomainError("sample size must be at least 1");
  return {law.mu * seqs.w(n), (law.nu * seqs.w(n) + law.mu * law.mu * seqs.w_prime(n)) / ell};
}

double SizeLaw::probability(std::int64_t s) const {
  if (s < min_size || s > max_size()) return 0.0;
  return prob(s - min_size);
}

double SizeLaw::mean() const {
  return expect([](std::int64_t s) { return static_cast<double>(s); });
}

SizeLaw size_law(const EfficiencySchedule& schedule, std::int64_t s0, int n, std::int64_t cap) {
  check_s0(s0);
  if (!schedule.is_deterministic()) throw DomainError("size law needs a deterministic schedule");
  if (n < 0 || static_cast<std::size_t>(n) > schedule.length())
    throw DomainError("cycle count exceeds the schedule length");
  if (n >= 62 || s0 > (cap >> n)) {
    std::ostringstream msg;
    msg << "size law support 2^" << n << " * " << s0 << " exceeds the cap " << cap;
    throw CapExceeded(msg.str());
  }

  SizeLaw law;
  law.n = 0;
  law.min_size = s0;
  law.prob = Eigen::ArrayXd::Ones(1);
  for (int k = 1; k <= n; ++k) {
    const double lam = schedule.lambdas()[k - 1];
    SizeLaw next;
    next.n = k;
    next.min_size = law.min_size;
    next.prob = Eigen::ArrayXd::Zero(2 * law.max_size() - law.min_size + 1);
    for (Eigen::Index i = 0; i < law.prob.size(); ++i) {
      const double p = law.prob(i);
      if (p == 0.0) continue;
      const std::int64_t s = law.min_size + i;
      const Eigen::ArrayXd dup = harmonic::binomial_mix(s, lam);
      next.prob.segment(i, dup.size()) += p * dup;
    }
    trim(next);
    law = std::move(next);
  }
  return law;
}

ExactGap exact_gap(const EfficiencySchedule& schedule, std::int64_t s0, int n, std::int64_t cap) {
  ExactGap g;
  g.a = Eigen::ArrayXd::Zero(n);
  for (int k = 1; k <= n; ++k) {
    const SizeLaw sizes = size_law(schedule, s0, k - 1, cap);
    const double lam = schedule.lambdas()[k - 1];
    const double alpha = lam / (1.0 + lam);
    double expected_sq = 0.0;
    const double a = sizes.expect([&](std::int64_t s) {
      const double gap = harmonic::harmonic_gap(s, lam);
      expected_sq += sizes.probability(s) * gap * gap;
      return gap;
    });
    g.a(k - 1) = a;
    g.v_n += a;
    g.v_prime_n += a * a + (1.0 - 2.0 * alpha) * a;
    g.v_prime_expectation_n += expected_sq + (1.0 - 2.0 * alpha) * a;
  }
  return g;
}

double uniform_gap_bound(std::int64_t s0) {
  check_s0(s0);
  return s0 >= 2 ? 1.0 / static_cast<double>(s0 - 1) : 1.5;
}

FirstMomentEnvelope first_moment_envelope(const DerivedSequences& seqs, const MutationLaw& law,
                                          std::int64_t s0, int n,
                                          std::optional<double> exact_v_n) {
  check_prefix(seqs, n);
  check_s0(s0);
  FirstMomentEnvelope e;
  e.gap_lo = seqs.v(n) / static_cast<double>(s0 + 1);
  e.gap_hi = gap_upper(seqs, s0, n);
  e.tv_hi = e.gap_hi;
  e.et_lo = law.mu * (seqs.w(n) - e.gap_hi);
  e.et_hi = law.mu * (seqs.w(n) - e.gap_lo);
  if (exact_v_n) e.et_exact = law.mu * (seqs.w(n) - *exact_v_n);
  return e;
}

RemainderBound remainder_closed_form(const DerivedSequences& seqs, const MutationLaw& law,
                                     std::int64_t s0, int n) {
  check_prefix(seqs, n);
  check_s0(s0);
  const double s = static_cast<double>(s0);
  const double mix = law.second_moment();
  RemainderBound r;
  const auto& ra = seqs.remainder_any;
  r.any = (law.nu * ra.nu.head(n + 1) / s + law.mu * law.mu * ra.mu2.head(n + 1) / (s + 1.0) +
           mix * ra.mixed.head(n + 1) / s);
  if (s0 >= 2) {
    const auto& rs = seqs.remainder_shifted;
    r.shifted = (law.nu * rs.nu.head(n + 1) + law.mu * law.mu * rs.mu2.head(n + 1) +
                 mix * rs.mixed.head(n + 1)) /
                (s - 1.0);
    r.best = r.shifted.min(r.any);
  } else {
    r.shifted = Eigen::ArrayXd::Constant(n + 1, kInf);
    r.best = r.any;
  }
  return r;
}

RemainderBound remainder_recursion_bound(const DerivedSequences& seqs, const MutationLaw& law,
                                         std::int64_t s0, int n) {
  check_prefix(seqs, n);
  check_s0(s0);
  const double s = static_cast<double>(s0);
  const double nu = law.nu;
  const double mu2 = law.mu * law.mu;
  const double mix = law.second_moment();

  RemainderBound r;
  r.shifted = Eigen::ArrayXd::Constant(n + 1, kInf);
  r.any = Eigen::ArrayXd::Zero(n + 1);

  // S0 >= 2: B-type coefficients bounded by b / (k - 1); E 1/(S - 1) contracts
  // by 1 - alpha per cycle; E D(zeta)/(S - 1) contracts by 1 / (1 + lambda).
  if (s0 >= 2) {
    double inv = 1.0 / (s - 1.0);
    double spread = 0.0;
    double rem = 0.0;
    r.shifted(0) = 0.0;
    for (int m = 0; m < n; ++m) {
      const double lam = seqs.lambda(m);
      const double a = lam / (1.0 + lam);
      rem += nu * a * (1.0 - a) * inv + mu2 * lam * inv + lam * (1.0 - lam) * spread;
      spread = spread / (1.0 + lam) + a * inv * mix;
      inv *= 1.0 - a;
      r.shifted(m + 1) = rem;
    }
  }

  // S0 >= 1: b / k with E 1/S, b' / (k + 1) with E 1/(S + 1), b'' / k with
  // E D(zeta)/S contracting by 1 - lambda / 2.
  double inv0 = 1.0 / s;
  double inv1 = 1.0 / (s + 1.0);
  double spread = 0.0;
  double rem = 0.0;
  for (int m = 0; m < n; ++m) {
    const double lam = seqs.lambda(m);
    const double a = lam / (1.0 + lam);
    rem += nu * a * (1.0 - a) * inv0 + mu2 * lam * inv1 + lam * (1.0 - lam) * spread;
    spread = (1.0 - lam / 2.0) * spread + a * inv0 * mix;
    inv0 *= 1.0 - lam / 2.0;
    inv1 *= 1.0 - lam / 3.0;
    r.any(m + 1) = rem;
  }
  r.best = r.shifted.min(r.any);
  return r;
}

double uniform_remainder_bound(const MutationLaw& law, std::int64_t s0) {
  check_s0(s0);
  if (s0 >= 2) return 2.0 * law.second_moment() / static_cast<double>(s0 - 1);
  return 6.0 * law.nu + 5.5 * law.mu * law.mu;
}

VarianceEnvelope variance_envelope(const DerivedSequences& seqs, const MutationLaw& law,
                                   std::int64_t s0, int n, int ell) {
  const InfinitePopulationMoments star = infinite_population_moments(seqs, law, n, ell);
  check_s0(s0);
  VarianceEnvelope e;
  e.vt_star = star.variance;
  const RemainderBound rb = remainder_closed_form(seqs, law, s0, n);
  e.rn_hi = std::min(rb.best(n), uniform_remainder_bound(law, s0));
  e.zn_hi = law.second_moment() * gap_upper(seqs, s0, n);
  const double weight = 1.0 - 1.0 / ell;
  if (ell >= 3) {
    e.vt_lo = e.vt_star;
    e.vt_hi = e.vt_star + weight * e.rn_hi;
  } else if (ell == 1) {
    e.vt_lo = std::max(0.0, e.vt_star - e.zn_hi);
    e.vt_hi = e.vt_star;
  } else {
    e.vt_lo = std::max(0.0, e.vt_star - e.zn_hi);
    e.vt_hi = e.vt_star + weight * e.rn_hi;
  }
  return e;
}

MomentEnvelope moment_envelope(const DerivedSequences& seqs, const MutationLaw& law,
                               std::int64_t s0, int n, int ell) {
  const InfinitePopulationMoments star = infinite_population_moments(seqs, law, n, ell);
  const FirstMomentEnvelope first = first_moment_envelope(seqs, law, s0, n);
  const VarianceEnvelope var = variance_envelope(seqs, law, s0, n, ell);
  MomentEnvelope e;
  e.n = n;
  e.s0 = s0;
  e.ell = ell;
  e.et_star = star.mean;
  e.vt_star = star.variance;
  e.et_lo = first.et_lo;
  e.et_hi = first.et_hi;
  e.vt_lo = var.vt_lo;
  e.vt_hi = var.vt_hi;
  e.tv_hi = first.tv_hi;
  e.rn_hi = var.rn_hi;
  e.zn_hi = var.zn_hi;
  e.vn_lo = first.gap_lo;
  e.vn_hi = first.gap_hi;
  return e;
}

double general_mean_bound(int n, double mu0, double l0, std::int64_t s0) {
  check_s0(s0);
  if (n < 0 || !(mu0 >= 0.0) || !(l0 >= 1.0))
    throw DomainError("general bound needs n >= 0, mu0 >= 0 and L0 >= 1");
  return n * l0 * mu0 / static_cast<double>(s0);
}

}  // namespace branchpcr
