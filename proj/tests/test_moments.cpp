#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "branchpcr/enumerate.hpp"
#include "branchpcr/errors.hpp"
#include "branchpcr/moments.hpp"
#include "fixtures.hpp"

using namespace branchpcr;

namespace {

double binom_pmf(long s, long j, double p) {
  return std::exp(std::lgamma(s + 1.0) - std::lgamma(j + 1.0) - std::lgamma(s - j + 1.0)) *
         std::pow(p, j) * std::pow(1 - p, s - j);
}

std::map<long, double> dp(const std::vector<double>& l, long s0, int n) {
  std::map<long, double> law{{s0, 1.0}};
  for (int k = 0; k < n; ++k) {
    std::map<long, double> next;
    for (const auto& [s, p] : law)
      for (long j = 0; j <= s; ++j) {
        const double q = l[k] == 1.0 ? (j == s) : l[k] == 0.0 ? (j == 0) : binom_pmf(s, j, l[k]);
        if (q > 0) next[s + j] += p * q;
      }
    law = next;
  }
  return law;
}

// A(s, lambda) by a direct binomial sum.
double gap(long s, double lam) {
  double h = 0;
  for (long j = 0; j <= s; ++j) {
    const double q = lam == 1.0 ? (j == s) : lam == 0.0 ? (j == 0) : binom_pmf(s, j, lam);
    h += q * double(s) / (s + j);
  }
  return h - 1.0 / (1.0 + lam);
}

ProcessSpec spec_of(std::int64_t s0, std::vector<double> l, MutationLaw law) {
  ProcessSpec spec;
  spec.s0 = s0;
  spec.n = static_cast<int>(l.size());
  spec.schedule = EfficiencySchedule::deterministic(std::move(l));
  spec.mutation = law;
  return spec;
}

}  // namespace

TEST_CASE("infinite-population moments") {
  const auto seqs = derived_sequences(fixtures::reference_schedule(), 30);
  const auto m = infinite_population_moments(seqs, MutationLaw::poisson_law(0.05024), 30, 28);
  CHECK(std::abs(m.mean - 0.60716) < 5e-5);
  CHECK(m.variance == doctest::Approx((0.05024 * seqs.w(30) + 0.05024 * 0.05024 * seqs.w_prime(30)) / 28));
  const auto zero = infinite_population_moments(seqs, MutationLaw::poisson_law(0.0), 30, 28);
  CHECK(zero.mean == 0.0);
  CHECK(zero.variance == 0.0);
  const auto empty = infinite_population_moments(seqs, MutationLaw::poisson_law(0.3), 0, 5);
  CHECK(empty.mean == 0.0);
  CHECK(empty.variance == 0.0);
  CHECK_THROWS_AS(infinite_population_moments(seqs, MutationLaw::poisson_law(0.3), 3, 0),
                  DomainError);
}

TEST_CASE("mutation law validation") {
  CHECK_THROWS_AS(MutationLaw::poisson_law(-0.1), DomainError);
  CHECK_THROWS_AS(MutationLaw::from_moments(0.1, -1.0), DomainError);
  MutationLaw bad{0.2, 0.3, true, true};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK(MutationLaw::poisson_law(0.2).nu == 0.2);
}

TEST_CASE("size law examples") {
  const auto one = size_law(fixtures::constant_schedule(0.5, 1), 1, 1);
  CHECK(one.probability(1) == doctest::Approx(0.5));
  CHECK(one.probability(2) == doctest::Approx(0.5));
  const auto two = size_law(fixtures::constant_schedule(0.5, 2), 1, 2);
  CHECK(two.probability(1) == doctest::Approx(0.25));
  CHECK(two.probability(2) == doctest::Approx(0.375));
  CHECK(two.probability(3) == doctest::Approx(0.25));
  CHECK(two.probability(4) == doctest::Approx(0.125));
  const auto doubling = size_law(fixtures::constant_schedule(1.0, 5), 3, 5);
  CHECK(doubling.min_size == 96);
  CHECK(doubling.prob.size() == 1);
  CHECK(doubling.prob(0) == 1.0);
}

TEST_CASE("size law agrees with a direct convolution") {
  const std::vector<std::vector<double>> schedules = {
      {0.9, 0.6, 0.3, 0.2, 0.1, 0.05, 0.5}, {0.1, 0.8, 0.0, 0.95, 0.4}, std::vector<double>(8, 0.5)};
  for (const auto& l : schedules)
    for (long s0 : {1L, 2L, 5L}) {
      const int n = static_cast<int>(l.size());
      const auto law = size_law(EfficiencySchedule::deterministic(l), s0, n);
      const auto ref = dp(l, s0, n);
      double total = 0.0, mean_expected = s0;
      for (double x : l) mean_expected *= 1 + x;
      for (const auto& [s, p] : ref) CHECK(std::abs(law.probability(s) - p) < 1e-13);
      for (Eigen::Index i = 0; i < law.prob.size(); ++i) total += law.prob(i);
      CHECK(std::abs(total - 1.0) < 1e-12);
      CHECK(law.min_size >= s0);
      CHECK(law.max_size() <= (s0 << n));
      CHECK(law.mean() == doctest::Approx(mean_expected).epsilon(1e-9));
    }
}

TEST_CASE("size law cap") {
  CHECK_THROWS_AS(size_law(fixtures::constant_schedule(0.5, 30), 4, 30), CapExceeded);
  CHECK_THROWS_AS(size_law(fixtures::constant_schedule(0.5, 10), 1, 10, 1000), CapExceeded);
  CHECK_NOTHROW(size_law(fixtures::constant_schedule(0.5, 10), 1, 10, 1024));
}

TEST_CASE("exact gap terms") {
  const auto g = exact_gap(fixtures::constant_schedule(0.5, 1), 1, 1);
  CHECK(g.a(0) == doctest::Approx(1.0 / 12.0));
  const auto dbl = exact_gap(fixtures::constant_schedule(1.0, 6), 2, 6);
  CHECK(std::abs(dbl.v_n) < 1e-15);
  const std::vector<double> l = {0.9, 0.2, 0.6, 0.45, 0.8, 0.1};
  for (long s0 : {1L, 2L, 3L, 5L}) {
    const auto e = exact_gap(EfficiencySchedule::deterministic(l), s0, 6);
    const auto seqs = derived_sequences(EfficiencySchedule::deterministic(l), 6);
    double v = 0, vp = 0, vp_alt = 0;
    for (int k = 1; k <= 6; ++k) {
      double a = 0, a2 = 0;
      for (const auto& [s, p] : dp(l, s0, k - 1)) {
        a += p * gap(s, l[k - 1]);
        a2 += p * gap(s, l[k - 1]) * gap(s, l[k - 1]);
      }
      const double alpha = l[k - 1] / (1 + l[k - 1]);
      CHECK(e.a(k - 1) == doctest::Approx(a).epsilon(1e-12));
      v += a;
      vp += a * a + (1 - 2 * alpha) * a;
      vp_alt += a2 + (1 - 2 * alpha) * a;
      // per-cycle sandwich
      const double lam = l[k - 1];
      const double num = seqs.gamma(k - 1) * alpha * (1 - lam) / ((1 + lam) * (1 + lam));
      CHECK(num / (s0 + 1.0) <= a + 1e-15);
      if (s0 >= 2) CHECK(a <= num / (s0 - 1.0) + 1e-15);
      CHECK(a <= seqs.gamma_i(3)(k - 1) * alpha * (1 - lam) / (s0 + 1.0) + 1e-15);
    }
    CHECK(e.v_n == doctest::Approx(v).epsilon(1e-12));
    CHECK(e.v_prime_n == doctest::Approx(vp).epsilon(1e-12));
    CHECK(e.v_prime_expectation_n == doctest::Approx(vp_alt).epsilon(1e-12));
    CHECK(e.v_prime_n <= e.v_n);
    CHECK(e.v_prime_n >= 0.0);
    CHECK(seqs.v(6) / (s0 + 1.0) <= e.v_n);
    if (s0 >= 2) CHECK(e.v_n <= seqs.v(6) / (s0 - 1.0));
  }
}

TEST_CASE("per-cycle gap sandwich over a grid") {
  for (double lam : {0.05, 0.3, 0.5, 0.7, 0.95})
    for (long s0 : {1L, 2L, 3L, 5L}) {
      const auto sched = fixtures::constant_schedule(lam, 10);
      const auto seqs = derived_sequences(sched, 10);
      const auto e = exact_gap(sched, s0, 10);
      const double alpha = lam / (1 + lam);
      for (int k = 1; k <= 10; ++k) {
        const double num = seqs.gamma(k - 1) * alpha * (1 - lam) / ((1 + lam) * (1 + lam));
        CHECK(num / (s0 + 1.0) <= e.a(k - 1) * (1 + 1e-12));
        if (s0 >= 2) CHECK(e.a(k - 1) <= num / (s0 - 1.0) * (1 + 1e-12));
        CHECK(e.a(k - 1) <= seqs.gamma_i(3)(k - 1) * alpha * (1 - lam) / (s0 + 1.0) * (1 + 1e-12));
      }
    }
}

TEST_CASE("first moment envelope") {
  const auto sched = fixtures::constant_schedule(0.5, 6);
  const auto seqs = derived_sequences(sched, 6);
  const auto law = MutationLaw::poisson_law(0.1);
  const auto gap6 = exact_gap(sched, 2, 6);
  const auto env = first_moment_envelope(seqs, law, 2, 6, gap6.v_n);
  REQUIRE(env.et_exact.has_value());
  CHECK(env.et_lo <= *env.et_exact);
  CHECK(*env.et_exact <= env.et_hi);
  CHECK(env.gap_lo <= gap6.v_n);
  CHECK(gap6.v_n <= env.gap_hi);
  const auto zero = first_moment_envelope(seqs, MutationLaw::poisson_law(0.0), 2, 6);
  CHECK(zero.et_lo == 0.0);
  CHECK(zero.et_hi == 0.0);
  for (long s0 : {1L, 2L, 7L}) {
    const auto e = first_moment_envelope(seqs, law, s0, 6);
    CHECK(e.gap_hi <= uniform_gap_bound(s0));
    CHECK(e.tv_hi == e.gap_hi);
    CHECK(e.et_hi <= 0.1 * seqs.w(6));
  }
  CHECK(uniform_gap_bound(1) == 1.5);
  CHECK(uniform_gap_bound(5) == 0.25);
}

TEST_CASE("remainder bounds: closed form equals the stepwise route") {
  const auto seqs = derived_sequences(fixtures::reference_schedule(), 30);
  for (auto law : {MutationLaw::poisson_law(0.05), MutationLaw::from_moments(0.3, 1.1)})
    for (long s0 : {1L, 2L, 10L}) {
      const auto a = remainder_closed_form(seqs, law, s0, 30);
      const auto b = remainder_recursion_bound(seqs, law, s0, 30);
      for (int m = 0; m <= 30; ++m) {
        CHECK(b.any(m) == doctest::Approx(a.any(m)).epsilon(1e-12));
        if (s0 >= 2) CHECK(b.shifted(m) == doctest::Approx(a.shifted(m)).epsilon(1e-12));
        else CHECK(std::isinf(b.shifted(m)));
      }
      if (s0 >= 2)
        for (int m = 0; m <= 30; ++m)
          CHECK(a.shifted(m) <= uniform_remainder_bound(law, s0) + 1e-12);
    }
  const auto none = remainder_closed_form(seqs, MutationLaw::from_moments(0.0, 0.0), 3, 30);
  CHECK(none.best(30) == 0.0);
}

TEST_CASE("remainder bound stays below the uniform bound on a grid") {
  for (double lam = 0.05; lam <= 1.0; lam += 0.05) {
    const auto seqs = derived_sequences(fixtures::constant_schedule(lam, 60), 60);
    const auto law = MutationLaw::from_moments(0.4, 0.6);
    for (long s0 : {2L, 3L, 10L}) {
      const auto r = remainder_recursion_bound(seqs, law, s0, 60);
      for (int m = 0; m <= 60; ++m) CHECK(r.shifted(m) <= uniform_remainder_bound(law, s0) + 1e-12);
    }
  }
  CHECK(uniform_remainder_bound(MutationLaw::from_moments(1.0, 2.0), 1) == doctest::Approx(17.5));
  CHECK(uniform_remainder_bound(MutationLaw::from_moments(1.0, 2.0), 3) == doctest::Approx(3.0));
}

TEST_CASE("variance envelope") {
  const auto seqs = derived_sequences(fixtures::constant_schedule(0.5, 10), 10);
  const auto law = MutationLaw::poisson_law(0.2);
  const double star1 = 0.2 * seqs.w(10) + 0.04 * seqs.w_prime(10);
  const auto e1 = variance_envelope(seqs, law, 2, 10, 1);
  CHECK(e1.vt_hi == doctest::Approx(star1));
  CHECK(e1.vt_lo <= e1.vt_hi);
  for (long s0 : {2L, 5L}) {
    const auto e = variance_envelope(seqs, law, s0, 10, 10);
    CHECK(e.vt_lo == doctest::Approx(star1 / 10));
    CHECK(e.vt_hi - e.vt_lo <= 0.9 * 2 * law.second_moment() / (s0 - 1.0) + 1e-15);
  }
  const auto e2 = variance_envelope(seqs, law, 2, 10, 2);
  CHECK(e2.vt_lo < e2.vt_star);
  CHECK(e2.vt_hi > e2.vt_star);
  const auto zero = variance_envelope(seqs, MutationLaw::from_moments(0.0, 0.0), 2, 10, 5);
  CHECK(zero.vt_lo == 0.0);
  CHECK(zero.vt_hi == 0.0);
}

TEST_CASE("envelopes contain enumerated moments") {
  for (std::int64_t s0 : {1, 2})
    for (double lam : {0.25, 0.5, 0.9})
      for (int n = 1; n <= 4; ++n)
        for (auto law : {MutationLaw::poisson_law(0.3), MutationLaw::from_moments(1.0, 0.2),
                         MutationLaw::from_moments(0.0, 1.0)})
          for (int ell : {1, 2, 3, 8}) {
            const auto spec = spec_of(s0, std::vector<double>(n, lam), law);
            const auto r = enumerate_tiny(spec, ell);
            const auto seqs = derived_sequences(spec.schedule, n);
            const auto env = moment_envelope(seqs, law, s0, n, ell);
            CHECK(env.et_lo <= r.et + 1e-12);
            CHECK(r.et <= env.et_hi + 1e-12);
            CHECK(env.vt_lo <= r.vt + 1e-12);
            CHECK(r.vt <= env.vt_hi + 1e-12);
            CHECK(r.rn <= env.rn_hi + 1e-12);
            CHECK(r.et <= env.et_star + 1e-12);
            if (ell == 1) CHECK(r.vt <= env.vt_star + 1e-12);
            if (ell >= 3) CHECK(r.vt >= env.vt_star - 1e-12);
            const double dstar = law.nu * seqs.w(n) + law.mu * law.mu * seqs.w_prime(n);
            CHECK(r.d_eta <= dstar + 1e-12);
            CHECK(r.d_eta >= dstar - law.second_moment() * uniform_gap_bound(s0) - 1e-12);
          }
}

TEST_CASE("envelope invariants along the reference schedule") {
  const auto seqs = derived_sequences(fixtures::reference_schedule(), 30);
  const auto law = MutationLaw::poisson_law(0.05);
  for (long s0 : {1L, 2L, 10L, 100L})
    for (int ell : {1, 2, 3, 28})
      for (int n = 0; n <= 30; n += 5) {
        const auto e = moment_envelope(seqs, law, s0, n, ell);
        CHECK(e.et_lo <= e.et_hi);
        CHECK(e.vt_lo <= e.vt_hi);
        CHECK(e.vn_lo <= e.vn_hi);
        CHECK(e.et_hi <= e.et_star);
        if (ell >= 3) CHECK(e.vt_lo >= e.vt_star);
        if (ell == 1) CHECK(e.vt_hi <= e.vt_star);
        CHECK(e.rn_hi <= uniform_remainder_bound(law, s0));
        CHECK(e.vn_hi <= uniform_gap_bound(s0));
      }
}

TEST_CASE("summable schedules keep the envelopes bounded") {
  std::vector<double> summable, flat(400, 0.3);
  for (int k = 1; k <= 400; ++k) summable.push_back(std::pow(2.0, -k));
  const auto law = MutationLaw::poisson_law(0.1);
  const auto s1 = derived_sequences(EfficiencySchedule::deterministic(summable), 400);
  const auto s2 = derived_sequences(EfficiencySchedule::deterministic(flat), 400);
  const auto a100 = moment_envelope(s1, law, 2, 100, 5), a400 = moment_envelope(s1, law, 2, 400, 5);
  CHECK(a400.et_hi - a100.et_hi < 1e-12);
  CHECK(a400.vt_hi - a100.vt_hi < 1e-12);
  const auto b100 = moment_envelope(s2, law, 2, 100, 5), b400 = moment_envelope(s2, law, 2, 400, 5);
  CHECK(b400.et_lo / b100.et_lo == doctest::Approx(4.0).epsilon(0.02));
  CHECK(b400.vt_lo / b100.vt_lo == doctest::Approx(4.0).epsilon(0.02));
  CHECK(b400.rn_hi <= uniform_remainder_bound(law, 2));
}

TEST_CASE("general-model mean bound") {
  CHECK(general_mean_bound(2, 1.0, 8.0, 4) == doctest::Approx(4.0));
  CHECK(general_mean_bound(5, 0.0, 8.0, 4) == 0.0);
  CHECK_THROWS_AS(general_mean_bound(2, -1.0, 8.0, 4), DomainError);
  CHECK_THROWS_AS(general_mean_bound(2, 1.0, 0.5, 4), DomainError);
  CHECK_THROWS_AS(general_mean_bound(2, 1.0, 8.0, 0), DomainError);
}
