#include "branchpcr/harmonic.hpp"

#include <cmath>
#include <sstream>

#include "branchpcr/errors.hpp"
#include "branchpcr/quadrature.hpp"

namespace branchpcr::harmonic {
namespace {

void check_args(long k, double lambda) {
  if (k < 1) throw DomainError("harmonic functionals need k >= 1");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
}

// E(L_1 L_2 | j duplications among k >= 2 exchangeable offspring).
double pair_product_given(double k, double j) {
  const double both = j * (j - 1.0);
  const double mixed = 2.0 * j * (k - j);
  const double neither = (k - j) * (k - j - 1.0);
  return (4.0 * both + 2.0 * mixed + neither) / (k * (k - 1.0));
}

}  // namespace

Eigen::ArrayXd binomial_mix(long k, double lambda) {
  if (k < 0) throw DomainError("binomial size must be nonnegative");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
  Eigen::ArrayXd p = Eigen::ArrayXd::Zero(k + 1);
  if (lambda == 0.0) {
    p(0) = 1.0;
    return p;
  }
  if (lambda == 1.0) {
    p(k) = 1.0;
    return p;
  }
  // Unnormalised weights grown outward from the mode, so nothing overflows
  // and the tails underflow to zero harmlessly.
  const double odds = lambda / (1.0 - lambda);
  const long mode = std::min(k, static_cast<long>(std::floor((k + 1) * lambda)));
  p(mode) = 1.0;
  for (long j = mode; j < k; ++j) {
    p(j + 1) = p(j) * (static_cast<double>(k - j) / static_cast<double>(j + 1)) * odds;
    if (p(j + 1) < 1e-300) break;
  }
  for (long j = mode; j > 0; --j) {
    p(j - 1) = p(j) * (static_cast<double>(j) / static_cast<double>(k - j + 1)) / odds;
    if (p(j - 1) < 1e-300) break;
  }
  return p / p.sum();
}

double harmonic_ratio(long k, double lambda, double y) {
  check_args(k, lambda);
  if (!(k + y > 0.0)) throw DomainError("harmonic ratio needs k + y > 0");
  const double kd = static_cast<double>(k);
  return expect(k, lambda, [&](double j) { return (kd + y) / (kd + j + y); });
}

double harmonic_gap(long k, double lambda) {
  check_args(k, lambda);
  const double kd = static_cast<double>(k);
  const double limit = 1.0 / (1.0 + lambda);
  return expect(k, lambda, [&](double j) { return kd / (kd + j) - limit; });
}

double harmonic_square(long k, double lambda) { return harmonic_power(k, lambda, 2); }

double harmonic_power(long k, double lambda, int j) {
  check_args(k, lambda);
  if (j < 1) throw DomainError("harmonic power needs j >= 1");
  const double kd = static_cast<double>(k);
  return expect(k, lambda, [&](double d) { return std::pow(kd / (kd + d), j); });
}

RecursionCoefficients recursion_coefficients(long k, double lambda) {
  check_args(k, lambda);
  const double kd = static_cast<double>(k);
  const Eigen::ArrayXd p = binomial_mix(k, lambda);
  RecursionCoefficients c;
  double h = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) h += p(j) * kd / (kd + j);
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (p(j) == 0.0) continue;
    const double jd = static_cast<double>(j);
    const double m = kd + jd;
    const double dev = kd / m - h;
    c.excess += p(j) * jd / (m * m);
    c.ratio_variance += p(j) * dev * dev;
    c.defect_square += p(j) * (jd / m) * (jd / m);
    if (k >= 2) {
      // Exactly one of two tagged offspring duplicates with probability
      // 2 j (k - j) / (k (k - 1)), and then (L_1 - L_2)^2 = 1.
      c.pair_spread += p(j) * jd * (kd - jd) / ((kd - 1.0) * m * m);
      c.pair_product += p(j) * kd * kd * pair_product_given(kd, jd) / (m * m);
    }
  }
  if (k == 1) {
    c.pair_spread = 0.0;
    c.pair_product = 1.0;
  }
  return c;
}

ContractionCoefficients contraction_coefficients(long k, double lambda, double y) {
  check_args(k, lambda);
  if (!(k + y > 0.0)) throw DomainError("contraction coefficients need k + y > 0");
  const double kd = static_cast<double>(k);
  const Eigen::ArrayXd p = binomial_mix(k, lambda);
  ContractionCoefficients c;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (p(j) == 0.0) continue;
    const double jd = static_cast<double>(j);
    const double m = kd + jd;
    const double denom = m * m * (m + y);
    c.harmonic += p(j) * (kd + y) / (m + y);
    c.forcing_nu += p(j) * (m - 1.0) * jd / denom;
    c.forcing_mu2 += p(j) * kd * jd / denom;
    if (k >= 2) c.contraction += p(j) * kd * kd * (kd + y) * pair_product_given(kd, jd) / denom;
  }
  return c;
}

TaylorSandwich taylor_sandwich(long k, double lambda) {
  check_args(k, lambda);
  const double kd = static_cast<double>(k);
  const double n2 = lambda * (1.0 - lambda);
  const double s = 1.0 + lambda;
  const double g1 = n2 / (s * s);
  const double g2 = n2 * (1.0 - 2.0 * lambda) / (s * s * s);
  const double g3 = n2 * (1.0 + 3.0 * (kd - 2.0) * n2) / (s * s * s);
  const double h_tilde = 1.0 + g1 / kd - g2 / (kd * kd) + g3 / (kd * kd * kd);
  const double g_tilde = 1.0 + 3.0 * g1 / kd - 4.0 * g2 / (kd * kd) + 2.0 * g3 / (kd * kd * kd);
  return {h_tilde / s, g_tilde / (s * s)};
}

double gap_integral(long k, int ell, double lambda) {
  if (k < 0 || ell < 1) throw DomainError("gap integral needs k >= 0 and ell >= 1");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw DomainError("integral representation needs 0 < lambda < 1");
  const double kd = static_cast<double>(k);
  auto integrand = [&](double t) {
    const double f = (1.0 - lambda) * t + lambda * t * t;
    const double fp = (1.0 - lambda) + 2.0 * lambda * t;
    return std::pow(f, kd) * std::pow(fp, -2.0 * ell);
  };
  const QuadratureResult r = adaptive_simpson(integrand, 0.0, 1.0, 1e-12);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "gap integral did not converge within " << r.evaluations << " evaluations";
    throw CapExceeded(msg.str());
  }
  return r.value;
}

HarmonicMomentBounds harmonic_moment_bounds(const DerivedSequences& seqs, long s0, int n,
                                            double y) {
  if (s0 < 1) throw DomainError("initial population must be at least 1");
  if (n < 0 || n > seqs.n) throw DomainError("cycle count exceeds the derived sequences");
  const double s = static_cast<double>(s0);
  HarmonicMomentBounds b;
  if (y >= 0.0) {
    const Eigen::ArrayXd g = shifted_gamma(seqs.lambda.head(n), y + 2.0);
    b.lower = seqs.gamma(n) / (s + y);
    b.shifted_upper = g(n) / (s + y);
    b.upper = b.shifted_upper;
    if (s0 == 1 && y == 0.0 && n >= 1) {
      b.eq5_upper = seqs.gamma(n) * (1.0 + 1.0 / seqs.lambda_min(n));
      b.upper = std::min(b.upper, *b.eq5_upper);
    }
    return b;
  }
  if (y > -1.0) throw DomainError("negative shifts must satisfy y <= -1");
  if (!(s + y > 0.0)) throw DomainError("negative shift needs S0 > |y|");
  b.lower = seqs.gamma(n) / s;
  b.shifted_upper = seqs.gamma(n) / (s + y);
  b.upper = b.shifted_upper;
  return b;
}

}  // namespace branchpcr::harmonic
