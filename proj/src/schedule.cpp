#include "branchpcr/schedule.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "branchpcr/errors.hpp"

namespace branchpcr {

EfficiencySchedule EfficiencySchedule::deterministic(std::vector<double> lambdas) {
  if (lambdas.empty()) throw DomainError("efficiency schedule is empty");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double lam = lambdas[k];
    if (!(lam >= 0.0 && lam <= 1.0)) {
      std::ostringstream msg;
      msg << "efficiency of cycle " << k + 1 << " is " << lam << ", outside [0, 1]";
      throw DomainError(msg.str());
    }
  }
  EfficiencySchedule s;
  s.kind_ = Kind::deterministic;
  s.lambdas_ = std::move(lambdas);
  return s;
}

EfficiencySchedule EfficiencySchedule::michaelis_menten(double c, double d) {
  if (!(c > 0.0) || !(d > 0.0))
    throw DomainError("Michaelis-Menten constants C and D must be positive");
  EfficiencySchedule s;
  s.kind_ = Kind::michaelis_menten;
  s.c_ = c;
  s.d_ = d;
  return s;
}

double EfficiencySchedule::efficiency(int cycle, std::int64_t previous_size) const {
  if (kind_ == Kind::michaelis_menten) return mm_lambda(previous_size, c_, d_);
  if (cycle < 1 || static_cast<std::size_t>(cycle) > lambdas_.size())
    throw DomainError("cycle index exceeds the schedule length");
  return lambdas_[cycle - 1];
}

void EfficiencySchedule::validate_initial(std::int64_t s0) const {
  if (s0 < 1) throw DomainError("initial population must be at least 1");
  if (kind_ == Kind::michaelis_menten) (void)mm_lambda(s0, c_, d_);
}

double mm_lambda(std::int64_t previous_size, double c, double d) {
  if (previous_size < 1) throw DomainError("population size must be at least 1");
  if (!(c > 0.0) || !(d > 0.0))
    throw DomainError("Michaelis-Menten constants C and D must be positive");
  const double denom = c + static_cast<double>(previous_size);
  if (d > denom) throw DomainError("D > C + S makes the efficiency exceed 1");
  return d / denom;
}

Eigen::ArrayXd shifted_gamma(const Eigen::ArrayXd& lambda, double i) {
  Eigen::ArrayXd g(lambda.size() + 1);
  g(0) = 1.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) g(k + 1) = g(k) * (1.0 - lambda(k) / i);
  return g;
}

DerivedSequences derived_sequences(const EfficiencySchedule& schedule, int n) {
  if (!schedule.is_deterministic())
    throw DomainError("derived sequences need a deterministic schedule");
  if (n < 0 || static_cast<std::size_t>(n) > schedule.length())
    throw DomainError("cycle count exceeds the schedule length");

  DerivedSequences d;
  d.n = n;
  d.lambda = Eigen::Map<const Eigen::ArrayXd>(schedule.lambdas().data(), n);
  d.alpha = d.lambda / (1.0 + d.lambda);

  d.gamma.resize(n + 1);
  d.gamma(0) = 1.0;
  for (int k = 0; k < n; ++k) d.gamma(k + 1) = d.gamma(k) * (1.0 - d.alpha(k));
  for (int i : {2, 3}) d.gamma_shift.emplace(i, shifted_gamma(d.lambda, i));
  const Eigen::ArrayXd& g2 = d.gamma_i(2);
  const Eigen::ArrayXd& g3 = d.gamma_i(3);

  auto zeros = [n] { return Eigen::ArrayXd::Zero(n + 1).eval(); };
  d.w = zeros();
  d.w_prime = zeros();
  d.v = zeros();
  d.v_prime = zeros();
  d.v_dprime = zeros();
  d.v_dprime_lambda = zeros();
  d.lambda_min = zeros();
  d.lambda_min(0) = std::numeric_limits<double>::infinity();
  d.remainder_shifted = {zeros(), zeros(), zeros()};
  d.remainder_any = {zeros(), zeros(), zeros()};

  double lambda_sum = 0.0;      // sum_{k < m} lambda_k
  double alpha_ratio_sum = 0.0; // sum_{k < m} alpha_k / (1 - lambda_k / 2)
  for (int m = 1; m <= n; ++m) {
    const double lam = d.lambda(m - 1);
    const double a = d.alpha(m - 1);
    const double defect = a * (1.0 - lam);
    d.w(m) = d.w(m - 1) + a;
    d.w_prime(m) = d.w_prime(m - 1) + a * (1.0 - a);
    d.lambda_min(m) = std::min(d.lambda_min(m - 1), lam);
    d.v(m) = d.v(m - 1) + d.gamma(m - 1) * defect / ((1.0 + lam) * (1.0 + lam));
    d.v_prime(m) = d.v_prime(m - 1) + g2(m - 1) * defect;
    d.v_dprime(m) = d.v_dprime(m - 1) + g3(m - 1) * defect;
    d.v_dprime_lambda(m) = d.v_dprime_lambda(m - 1) + g3(m - 1) * lam * (1.0 - lam);

    const double spread = lam * (1.0 - lam);
    auto& rs = d.remainder_shifted;
    rs.nu(m) = rs.nu(m - 1) + a * (1.0 - a) * d.gamma(m - 1);
    rs.mu2(m) = rs.mu2(m - 1) + lam * d.gamma(m - 1);
    rs.mixed(m) = rs.mixed(m - 1) + spread * d.gamma(m - 1) * lambda_sum;

    auto& ra = d.remainder_any;
    ra.nu(m) = ra.nu(m - 1) + a * (1.0 - a) * g2(m - 1);
    ra.mu2(m) = ra.mu2(m - 1) + lam * g3(m - 1);
    ra.mixed(m) = ra.mixed(m - 1) + spread * g2(m - 1) * alpha_ratio_sum;

    lambda_sum += lam;
    alpha_ratio_sum += a / (1.0 - lam / 2.0);
  }
  return d;
}

}  // namespace branchpcr
