#include "branchpcr/enumerate.hpp"

#include <map>
#include <unordered_map>

#include "branchpcr/errors.hpp"
#include "branchpcr/harmonic.hpp"

namespace branchpcr {
namespace {

struct GenealogyHash {
  std::size_t operator()(const Genealogy& g) const {
    std::size_t h = std::hash<std::int64_t>{}(g.size);
    for (std::int64_t v : {g.depth_sum, g.depth_square_sum, g.carrier_square_sum})
      h ^= std::hash<std::int64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

using Law = std::unordered_map<Genealogy, double, GenealogyHash>;

// The copy's subtree carries one extra increment shared by all its members.
Genealogy join(const Genealogy& kept, const Genealogy& copy) {
  return {kept.size + copy.size, kept.depth_sum + copy.depth_sum + copy.size,
          kept.depth_square_sum + copy.depth_square_sum + 2 * copy.depth_sum + copy.size,
          kept.carrier_square_sum + copy.carrier_square_sum + copy.size * copy.size};
}

Genealogy merge(const Genealogy& a, const Genealogy& b) {
  return {a.size + b.size, a.depth_sum + b.depth_sum, a.depth_square_sum + b.depth_square_sum,
          a.carrier_square_sum + b.carrier_square_sum};
}

template <class Combine>
void product(const Law& a, const Law& b, double weight, Combine&& combine, Law& out) {
  for (const auto& [ga, pa] : a)
    for (const auto& [gb, pb] : b) out[combine(ga, gb)] += weight * pa * pb;
}

void check_tiny(const EfficiencySchedule& schedule, std::int64_t s0, int n) {
  if (!schedule.is_deterministic())
    throw DomainError("enumeration needs a deterministic schedule");
  if (s0 < 1 || s0 > kEnumerationMaxInitial)
    throw DomainError("enumeration supports initial populations of 1 or 2");
  if (n < 0 || n > kEnumerationMaxCycles)
    throw DomainError("enumeration supports at most 4 cycles");
  if (static_cast<std::size_t>(n) > schedule.length())
    throw DomainError("cycle count exceeds the schedule length");
}

template <class F>
double expect(const std::vector<WeightedGenealogy>& law, F&& f) {
  double sum = 0.0;
  for (const auto& w : law) sum += w.prob * f(w.g);
  return sum;
}

}  // namespace

double Genealogy::mean_state(const MutationLaw& law) const {
  return law.mu * static_cast<double>(depth_sum) / static_cast<double>(size);
}

double Genealogy::mean_square_state(const MutationLaw& law) const {
  return (law.nu * depth_sum + law.mu * law.mu * depth_square_sum) / static_cast<double>(size);
}

double Genealogy::square_mean_state(const MutationLaw& law) const {
  const double s = static_cast<double>(size);
  const double d = static_cast<double>(depth_sum);
  return (law.nu * carrier_square_sum + law.mu * law.mu * d * d) / (s * s);
}

std::vector<WeightedGenealogy> genealogy_law(const EfficiencySchedule& schedule, std::int64_t s0,
                                             int n) {
  check_tiny(schedule, s0, n);
  // Law of one particle's clade over the cycles k+1..n, built backwards.
  Law clade{{Genealogy{1, 0, 0, 0}, 1.0}};
  for (int k = n; k >= 1; --k) {
    const double lam = schedule.lambdas()[k - 1];
    Law next;
    for (const auto& [g, p] : clade) next[g] += (1.0 - lam) * p;
    if (lam > 0.0) product(clade, clade, lam, join, next);
    clade = std::move(next);
  }
  Law population = clade;
  for (std::int64_t i = 1; i < s0; ++i) {
    Law next;
    product(population, clade, 1.0, merge, next);
    population = std::move(next);
  }
  // Deterministic order for reproducible summation.
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t>, double> ordered;
  for (const auto& [g, p] : population)
    if (p != 0.0)
      ordered[{g.size, g.depth_sum, g.depth_square_sum, g.carrier_square_sum}] += p;
  std::vector<WeightedGenealogy> out;
  out.reserve(ordered.size());
  for (const auto& [key, p] : ordered) {
    const auto& [size, d1, q, c2] = key;
    out.push_back({Genealogy{size, d1, q, c2}, p});
  }
  return out;
}

TinyMoments enumerate_tiny(const ProcessSpec& spec, int ell) {
  spec.validate();
  if (ell < 1) throw DomainError("sample size must be at least 1");
  const auto law = genealogy_law(spec.schedule, spec.s0, spec.n);
  const MutationLaw& m = spec.mutation;
  TinyMoments r;
  r.m_eta = expect(law, [&](const Genealogy& g) { return g.mean_state(m); });
  const double mean_sq = expect(law, [&](const Genealogy& g) { return g.mean_square_state(m); });
  const double sq_mean = expect(law, [&](const Genealogy& g) { return g.square_mean_state(m); });
  r.d_eta = mean_sq - r.m_eta * r.m_eta;
  r.rn = sq_mean - r.m_eta * r.m_eta;
  r.et = r.m_eta;
  r.vt = (mean_sq - sq_mean) / ell + r.rn;
  return r;
}

double dispersion_closed_form(const ProcessSpec& spec) {
  spec.validate();
  const DerivedSequences seqs = derived_sequences(spec.schedule, spec.n);
  const ExactGap gap = exact_gap(spec.schedule, spec.s0, spec.n);
  const MutationLaw& m = spec.mutation;
  return m.nu * (seqs.w(spec.n) - gap.v_n) +
         m.mu * m.mu * (seqs.w_prime(spec.n) - gap.v_prime_n);
}

RemainderRecursion remainder_recursion(const ProcessSpec& spec) {
  spec.validate();
  check_tiny(spec.schedule, spec.s0, spec.n);
  const MutationLaw& m = spec.mutation;
  RemainderRecursion out;
  out.exact.push_back(0.0);
  out.dispersion_only.push_back(0.0);
  out.with_size_terms.push_back(0.0);
  for (int k = 0; k < spec.n; ++k) {
    const auto law = genealogy_law(spec.schedule, spec.s0, k);
    const double lam = spec.schedule.lambdas()[k];
    std::map<std::int64_t, harmonic::RecursionCoefficients> coeff;
    std::map<std::int64_t, double> harm;
    for (const auto& w : law) {
      if (!coeff.count(w.g.size)) {
        coeff[w.g.size] = harmonic::recursion_coefficients(w.g.size, lam);
        harm[w.g.size] = harmonic::harmonic_ratio(w.g.size, lam);
      }
    }
    const double eb = expect(law, [&](const Genealogy& g) { return coeff[g.size].excess; });
    const double ebp =
        expect(law, [&](const Genealogy& g) { return coeff[g.size].ratio_variance; });
    const double edb = expect(law, [&](const Genealogy& g) {
      return (g.mean_square_state(m) - g.square_mean_state(m)) * coeff[g.size].pair_spread;
    });
    const double eh = expect(law, [&](const Genealogy& g) { return harm[g.size]; });
    const double eh2 = expect(law, [&](const Genealogy& g) { return harm[g.size] * harm[g.size]; });
    const double em = expect(law, [&](const Genealogy& g) { return g.mean_state(m); });
    const double emh = expect(law, [&](const Genealogy& g) { return g.mean_state(m) * harm[g.size]; });
    const double step = m.nu * eb + m.mu * m.mu * ebp + edb;
    const double size_terms = m.mu * m.mu * (eh2 - eh * eh) - 2.0 * m.mu * (emh - em * eh);
    out.dispersion_only.push_back(out.dispersion_only.back() + step);
    out.with_size_terms.push_back(out.with_size_terms.back() + step + size_terms);

    const auto next = genealogy_law(spec.schedule, spec.s0, k + 1);
    const double mn = expect(next, [&](const Genealogy& g) { return g.mean_state(m); });
    out.exact.push_back(expect(next, [&](const Genealogy& g) { return g.square_mean_state(m); }) -
                        mn * mn);
  }
  return out;
}

}  // namespace branchpcr
