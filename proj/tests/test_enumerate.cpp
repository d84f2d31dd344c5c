#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "branchpcr/enumerate.hpp"
#include "branchpcr/errors.hpp"
#include "fixtures.hpp"

using namespace branchpcr;

namespace {

// Every particle carries the set of increment labels on its lineage; all
// duplication patterns are enumerated explicitly.
struct Population {
  double prob;
  std::vector<std::set<int>> particles;
};

TinyMoments brute_force(std::int64_t s0, const std::vector<double>& l, double mu, double nu,
                        int ell) {
  std::vector<Population> pops{{1.0, std::vector<std::set<int>>(s0)}};
  int label = 0;
  for (double lam : l) {
    std::vector<Population> next;
    for (const auto& pop : pops) {
      const std::size_t s = pop.particles.size();
      for (unsigned mask = 0; mask < (1u << s); ++mask) {
        Population child{pop.prob, {}};
        for (std::size_t i = 0; i < s; ++i) {
          child.particles.push_back(pop.particles[i]);
          if ((mask >> i) & 1u) {
            child.prob *= lam;
            auto copy = pop.particles[i];
            copy.insert(++label);
            child.particles.push_back(copy);
          } else {
            child.prob *= 1.0 - lam;
          }
        }
        if (child.prob > 0.0) next.push_back(child);
      }
    }
    pops = next;
  }
  double m = 0, msq = 0, sqm = 0;
  for (const auto& pop : pops) {
    const double s = static_cast<double>(pop.particles.size());
    std::map<int, double> carriers;
    double depth = 0, depth2 = 0;
    for (const auto& x : pop.particles) {
      depth += x.size();
      depth2 += nu * x.size() + mu * mu * x.size() * x.size();
      for (int e : x) carriers[e] += 1.0;
    }
    double c2 = 0;
    for (const auto& [e, c] : carriers) c2 += c * c;
    m += pop.prob * mu * depth / s;
    msq += pop.prob * depth2 / s;
    sqm += pop.prob * (nu * c2 + mu * mu * depth * depth) / (s * s);
  }
  TinyMoments r;
  r.m_eta = r.et = m;
  r.d_eta = msq - m * m;
  r.rn = sqm - m * m;
  r.vt = (msq - sqm) / ell + r.rn;
  return r;
}

ProcessSpec tiny_spec(std::int64_t s0, std::vector<double> l, double mu, double nu) {
  ProcessSpec spec;
  spec.s0 = s0;
  spec.n = static_cast<int>(l.size());
  spec.schedule = EfficiencySchedule::deterministic(std::move(l));
  spec.mutation = MutationLaw::from_moments(mu, nu);
  return spec;
}

}  // namespace

TEST_CASE("one cycle from one particle") {
  for (double mu : {0.1, 0.3, 1.0}) {
    const auto r = enumerate_tiny(tiny_spec(1, {0.5}, mu, mu), 1);
    CHECK(r.et == doctest::Approx(mu / 4));
  }
}

TEST_CASE("doubling has no finite-population gap") {
  const auto r = enumerate_tiny(tiny_spec(1, {1.0, 1.0}, 0.2, 0.2), 3);
  CHECK(r.et == doctest::Approx(0.2));
}

TEST_CASE("matches a pinned independent computation") {
  const auto r = enumerate_tiny(tiny_spec(1, {0.5, 0.5, 0.5}, 0.3, 0.3), 1);
  CHECK(r.m_eta == doctest::Approx(0.2425334821428571).epsilon(1e-14));
}

TEST_CASE("matches explicit particle enumeration") {
  const std::vector<std::vector<double>> schedules = {
      {0.5}, {0.25, 0.9}, {0.9, 0.9, 0.9}, {0.5, 0.25, 0.9}, {0.3, 0.6, 0.1}, {1.0, 0.0, 0.5}};
  for (std::int64_t s0 : {1, 2}) {
    for (const auto& l : schedules) {
      if (s0 == 2 && l.size() > 3) continue;
      for (auto [mu, nu] : {std::pair{0.3, 0.3}, {0.05, 0.7}, {1.2, 0.0}}) {
        for (int ell : {1, 2, 5}) {
          const auto e = enumerate_tiny(tiny_spec(s0, l, mu, nu), ell);
          const auto b = brute_force(s0, l, mu, nu, ell);
          CHECK(e.et == doctest::Approx(b.et).epsilon(1e-13));
          CHECK(e.vt == doctest::Approx(b.vt).epsilon(1e-12));
          CHECK(e.rn == doctest::Approx(b.rn).epsilon(1e-12));
          CHECK(e.d_eta == doctest::Approx(b.d_eta).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("mean state equals mu (W - V) with the exact gap") {
  for (std::int64_t s0 : {1, 2}) {
    for (double lam : {0.25, 0.5, 0.9}) {
      for (int n = 1; n <= 4; ++n) {
        auto spec = tiny_spec(s0, std::vector<double>(n, lam), 0.3, 0.3);
        const auto r = enumerate_tiny(spec, 1);
        const auto seqs = derived_sequences(spec.schedule, n);
        const auto gap = exact_gap(spec.schedule, s0, n);
        CHECK(std::abs(r.m_eta - 0.3 * (seqs.w(n) - gap.v_n)) < 1e-12);
      }
    }
  }
}

TEST_CASE("closed-form dispersion: variance part exact, squared-mean part not") {
  double worst = 0.0;
  for (std::int64_t s0 : {1, 2}) {
    for (double lam : {0.25, 0.5, 0.9}) {
      for (int n = 1; n <= 4; ++n) {
        const std::vector<double> l(n, lam);
        const auto pure_variance = tiny_spec(s0, l, 0.0, 0.7);
        CHECK(std::abs(enumerate_tiny(pure_variance, 1).d_eta -
                       dispersion_closed_form(pure_variance)) < 1e-12);
        const auto with_mean = tiny_spec(s0, l, 0.3, 0.7);
        worst = std::max(worst, std::abs(enumerate_tiny(with_mean, 1).d_eta -
                                         dispersion_closed_form(with_mean)));
      }
    }
  }
  // Lineage counts of a uniform particle are correlated through the size path.
  CHECK(worst > 1e-5);
  const auto s = tiny_spec(1, {0.5, 0.5, 0.5}, 0.3, 0.7);
  CHECK(enumerate_tiny(s, 1).d_eta == doctest::Approx(0.6213534773015652).epsilon(1e-13));
}

TEST_CASE("remainder recursion needs the size-fluctuation terms") {
  double worst_plain = 0.0;
  for (std::int64_t s0 : {1, 2}) {
    for (double lam : {0.25, 0.5, 0.9}) {
      for (auto [mu, nu] : {std::pair{0.0, 1.0}, {0.3, 0.3}, {0.1, 0.5}}) {
        const auto rec = remainder_recursion(tiny_spec(s0, std::vector<double>(4, lam), mu, nu));
        REQUIRE(rec.exact.size() == 5);
        for (int k = 0; k <= 4; ++k) {
          CHECK(std::abs(rec.with_size_terms[k] - rec.exact[k]) < 1e-12);
          if (mu == 0.0) CHECK(std::abs(rec.dispersion_only[k] - rec.exact[k]) < 1e-12);
          worst_plain = std::max(worst_plain, std::abs(rec.dispersion_only[k] - rec.exact[k]));
        }
      }
    }
  }
  CHECK(worst_plain > 1e-5);
}

TEST_CASE("remainder identity against the genealogy law") {
  const auto spec = tiny_spec(2, {0.5, 0.9, 0.25}, 0.3, 0.3);
  const auto law = genealogy_law(spec.schedule, 2, 3);
  double total = 0.0;
  for (const auto& w : law) {
    total += w.prob;
    CHECK(w.g.size >= 2);
    CHECK(w.g.size <= 16);
    CHECK(w.g.carrier_square_sum <= w.g.depth_square_sum * w.g.size);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("instance limits") {
  CHECK_THROWS_AS(enumerate_tiny(tiny_spec(3, {0.5}, 0.1, 0.1), 1), DomainError);
  CHECK_THROWS_AS(enumerate_tiny(tiny_spec(1, std::vector<double>(5, 0.5), 0.1, 0.1), 1),
                  DomainError);
  auto mm = tiny_spec(1, {0.5}, 0.1, 0.1);
  mm.schedule = EfficiencySchedule::michaelis_menten(10, 10);
  CHECK_THROWS_AS(enumerate_tiny(mm, 1), DomainError);
  CHECK_THROWS_AS(enumerate_tiny(tiny_spec(1, {0.5}, 0.1, 0.1), 0), DomainError);
}
