#include "branchpcr/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "branchpcr/errors.hpp"
#include "branchpcr/harmonic.hpp"
#include "branchpcr/kinetics.hpp"
#include "branchpcr/simulator.hpp"

namespace branchpcr::cli {
namespace {

using nlohmann::json;

constexpr const char* kEmbeddedFixture = R"golden({
  "schedule": {"lambdas": [0.872, 0.872, 0.872, 0.872, 0.872, 0.872, 0.872, 0.872, 0.872, 0.872,
                           0.872, 0.872, 0.872, 0.872, 0.872, 0.872, 0.872, 0.872, 0.872, 0.872,
                           0.743, 0.743, 0.743, 0.743, 0.743,
                           0.146, 0.146, 0.146, 0.146, 0.146]},
  "n": 30,
  "sample": {"ell": 28, "mutations_total": 17},
  "z": 2.0,
  "vpp_weighting": "lambda",
  "s0_values": [1, 10, 100],
  "expected": {
    "W": {"value": 12.085, "tol": 0.001},
    "W_prime": {"value": 6.755, "tol": 0.001},
    "mu_star": {"value": 0.05024, "tol": 0.00001},
    "v": {"value": 0.03653, "tol": 0.00001},
    "v_dprime": {"value": 0.38435, "tol": 0.00001},
    "sigma_star": {"value": 0.149, "tol": 0.001},
    "sqrt_t_over_ell": {"value": 0.147, "tol": 0.001},
    "ci_lo": {"value": 0.02552, "tol": 0.0001},
    "ci_hi": {"value": 0.07496, "tol": 0.0001},
    "bracket_lo_s0_1": {"value": 0.05032, "tol": 0.00001},
    "bracket_hi_s0_1": {"value": 0.05105, "tol": 0.00001},
    "bracket_lo_s0_10": {"value": 0.05025, "tol": 0.00001},
    "bracket_hi_s0_10": {"value": 0.05039, "tol": 0.00001},
    "bracket_lo_s0_100": {"value": 0.05024, "tol": 0.00001},
    "bracket_hi_s0_100": {"value": 0.05026, "tol": 0.00001}
  }
}
)golden";

template <class T>
T get_field(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "' in " + what);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "' in " + what + ": " + e.what());
  }
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

MutationLaw parse_mutation(const json& m) {
  if (!m.is_object()) throw ConfigError("mutation block must be an object");
  const bool poisson = m.contains("poisson");
  const bool moments = m.contains("mean") || m.contains("var");
  if (poisson == moments) throw ConfigError("mutation needs exactly one of 'poisson' or 'mean'/'var'");
  if (poisson) return MutationLaw::poisson_law(get_field<double>(m.at("poisson"), "mu", "mutation.poisson"));
  return MutationLaw::from_moments(get_field<double>(m, "mean", "mutation"),
                                   get_field<double>(m, "var", "mutation"));
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const RunConfig& cfg) {
  if (flag) return *flag;
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("BRANCHPCR_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("BRANCHPCR_SEED is not an unsigned integer");
    }
  }
  return 1;
}

int sample_size(const RunConfig& cfg) {
  if (!cfg.ell) throw ConfigError("missing field 'sample.ell'");
  return *cfg.ell;
}

json envelope_json(const MomentEnvelope& e) {
  return {{"n", e.n},         {"s0", e.s0},         {"ell", e.ell},       {"Et_star", e.et_star},
          {"Vt_star", e.vt_star}, {"Et_lo", e.et_lo}, {"Et_hi", e.et_hi}, {"Vt_lo", e.vt_lo},
          {"Vt_hi", e.vt_hi}, {"TV_hi", e.tv_hi},   {"Rn_hi", e.rn_hi},   {"Zn_hi", e.zn_hi},
          {"Vn_lo", e.vn_lo}, {"Vn_hi", e.vn_hi}};
}

json sequences_json(const DerivedSequences& s, int n) {
  return {{"W", s.w(n)},
          {"W_prime", s.w_prime(n)},
          {"gamma", s.gamma(n)},
          {"v", s.v(n)},
          {"v_prime", s.v_prime(n)},
          {"v_dprime", s.v_dprime(n)},
          {"v_dprime_lambda", s.v_dprime_lambda(n)},
          {"lambda_min", n > 0 ? json(s.lambda_min(n)) : json(nullptr)},
          {"lambda_sum", s.lambda.head(n).sum()}};
}

std::string sequences_csv(const DerivedSequences& s, int n) {
  std::ostringstream out;
  out.precision(12);
  out << "k,lambda,alpha,gamma,W,W_prime,v,v_prime,v_dprime,v_dprime_lambda\n";
  for (int k = 0; k <= n; ++k) {
    out << k << ',';
    if (k > 0) out << s.lambda(k - 1) << ',' << s.alpha(k - 1);
    else out << ',';
    out << ',' << s.gamma(k) << ',' << s.w(k) << ',' << s.w_prime(k) << ',' << s.v(k) << ','
        << s.v_prime(k) << ',' << s.v_dprime(k) << ',' << s.v_dprime_lambda(k) << '\n';
  }
  return out.str();
}

json report_json(const EstimateReport& r) {
  return {{"n", r.n},
          {"s0", r.s0},
          {"ell", r.ell},
          {"t", r.t},
          {"W", r.w_n},
          {"W_prime", r.wp_n},
          {"v", r.v_n},
          {"v_dprime", r.v_pp_n},
          {"mu_star", r.mu_star},
          {"bracket_lo", r.bracket_lo},
          {"bracket_hi", r.bracket_hi},
          {"r", r.r},
          {"r_pp", r.r_pp},
          {"sigma_star", r.sigma_star},
          {"ci_lo", r.ci_lo},
          {"ci_hi", r.ci_hi},
          {"small_rate_lo", r.small_rate_lo},
          {"small_rate_hi", r.small_rate_hi},
          {"sqrt_t_over_ell", r.sqrt_t_over_ell},
          {"z", r.z},
          {"level", r.level},
          {"negligibility",
           {{"criterion", r.negligible.criterion},
            {"relative_error", std::isfinite(r.negligible.relative_error)
                                   ? json(r.negligible.relative_error)
                                   : json(nullptr)},
            {"negligible", r.negligible.negligible}}},
          {"sample_size",
           {{"homogeneous", r.sample_size.homogeneous},
            {"heterogeneous", r.sample_size.heterogeneous},
            {"warning", r.sample_size.warning}}}};
}

const char* verdict(bool ok) { return ok ? "pass" : "fail"; }

bool within(double x, double lo, double hi, std::optional<double> se) {
  const double slack = 4.0 * se.value_or(0.0);
  return x >= lo - slack && x <= hi + slack;
}

json monte_carlo_json(const MonteCarloMoments& mc) {
  return {{"replicates", mc.replicates},
          {"ell", mc.ell},
          {"mean_t", mc.mean_t},
          {"se_mean_t", opt(mc.se_mean_t)},
          {"var_t", opt(mc.var_t)},
          {"se_var_t", opt(mc.se_var_t)},
          {"mean_zeta", mc.mean_zeta},
          {"se_mean_zeta", opt(mc.se_mean_zeta)},
          {"Rn", opt(mc.rn)},
          {"se_Rn", opt(mc.se_rn)},
          {"Vn_emp", opt(mc.gap_emp)},
          {"mean_size", mc.mean_size},
          {"se_mean_size", opt(mc.se_mean_size)},
          {"martingale_mean", opt(mc.martingale_mean)},
          {"se_martingale", opt(mc.se_martingale)},
          {"mean_w", mc.mean_w_random},
          {"se_mean_w", opt(mc.se_w_random)},
          {"mean_inv_size", mc.mean_inv_size},
          {"tv_to_eta_star", opt(mc.tv_to_eta_star)},
          {"tv_mc_error", opt(mc.tv_mc_error)}};
}

ProcessSpec process_spec(const RunConfig& cfg) {
  if (!cfg.mutation) throw ConfigError("missing field 'mutation'");
  ProcessSpec spec;
  spec.s0 = cfg.s0;
  spec.schedule = cfg.schedule;
  spec.mutation = *cfg.mutation;
  spec.n = cfg.n;
  spec.population_cap = cfg.population_cap;
  return spec;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("not a number: " + item);
    }
  }
  return out;
}

void flatten(const json& j, const std::string& prefix, std::ostringstream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else if (j.is_string()) {
    out << prefix << ",\"" << j.get<std::string>() << "\"\n";
  } else {
    out << prefix << ',' << (j.is_null() ? std::string() : j.dump()) << '\n';
  }
}

struct Output {
  std::ostream& out;
  std::string format;

  void emit(const json& j, const std::string& csv = {}) const {
    if (format == "csv") out << (csv.empty() ? flatten_csv(j) : csv);
    else out << round_numbers(j).dump(2) << '\n';
  }
};

json harmonic_rows(long k_max, const std::vector<double>& lambdas, double y) {
  json rows = json::array();
  for (double lam : lambdas) {
    for (long k = 1; k <= k_max; ++k) {
      const harmonic::RecursionCoefficients b = harmonic::recursion_coefficients(k, lam);
      json row = {{"lambda", lam},
                  {"k", k},
                  {"H", harmonic::harmonic_ratio(k, lam)},
                  {"A", harmonic::harmonic_gap(k, lam)},
                  {"G", harmonic::harmonic_square(k, lam)},
                  {"B", b.excess},
                  {"Bp", b.ratio_variance},
                  {"Bpp", b.pair_spread},
                  {"B1", b.pair_product},
                  {"B2", b.defect_square},
                  {"y", y}};
      if (k + y > 0.0) {
        const harmonic::ContractionCoefficients c = harmonic::contraction_coefficients(k, lam, y);
        row["Hy"] = c.harmonic;
        row["C"] = c.contraction;
        row["Cp"] = c.forcing_nu;
        row["Cpp"] = c.forcing_mu2;
      } else {
        row["Hy"] = row["C"] = row["Cp"] = row["Cpp"] = nullptr;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string rows_csv(const json& rows, const std::vector<std::string>& columns) {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  const json rounded = round_numbers(rows);
  for (const auto& row : rounded) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const json& v = row.at(columns[i]);
      out << (i ? "," : "") << (v.is_null() ? std::string() : v.dump());
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig cfg;
  cfg.s0 = get_field<std::int64_t>(j, "s0", "config");
  if (!j.contains("schedule") || !j.at("schedule").is_object())
    throw ConfigError("missing object 'schedule'");
  const json& sched = j.at("schedule");
  const bool has_lambdas = sched.contains("lambdas");
  const bool has_mm = sched.contains("mm");
  if (has_lambdas == has_mm) throw ConfigError("schedule needs exactly one of 'lambdas' or 'mm'");
  if (has_lambdas) {
    cfg.schedule = EfficiencySchedule::deterministic(get_field<std::vector<double>>(sched, "lambdas", "schedule"));
    cfg.n = j.contains("n") ? get_field<int>(j, "n", "config") : static_cast<int>(cfg.schedule.length());
  } else {
    const json& mm = sched.at("mm");
    cfg.schedule = EfficiencySchedule::michaelis_menten(get_field<double>(mm, "C", "schedule.mm"),
                                                        get_field<double>(mm, "D", "schedule.mm"));
    cfg.n = get_field<int>(j, "n", "config");
  }
  if (j.contains("mutation")) cfg.mutation = parse_mutation(j.at("mutation"));
  if (j.contains("sample")) {
    const json& s = j.at("sample");
    cfg.ell = get_field<int>(s, "ell", "sample");
    const bool has_t = s.contains("t");
    const bool has_total = s.contains("mutations_total");
    if (has_t && has_total) throw ConfigError("sample needs at most one of 't' or 'mutations_total'");
    if (has_t) cfg.t = get_field<double>(s, "t", "sample");
    if (has_total) cfg.t = get_field<double>(s, "mutations_total", "sample") / *cfg.ell;
  }
  if (j.contains("z")) cfg.z = get_field<double>(j, "z", "config");
  if (j.contains("seed")) cfg.seed = get_field<std::uint64_t>(j, "seed", "config");
  if (j.contains("replicates")) cfg.replicates = get_field<long>(j, "replicates", "config");
  if (j.contains("strict")) cfg.strict = get_field<bool>(j, "strict", "config");
  if (j.contains("population_cap"))
    cfg.population_cap = get_field<std::int64_t>(j, "population_cap", "config");
  if (j.contains("vpp_weighting")) {
    const std::string w = get_field<std::string>(j, "vpp_weighting", "config");
    if (w == "alpha") cfg.weighting = VppWeighting::alpha;
    else if (w == "lambda") cfg.weighting = VppWeighting::lambda;
    else throw ConfigError("vpp_weighting must be 'alpha' or 'lambda'");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    return parse_config(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

json golden_fixture() { return json::parse(kEmbeddedFixture); }

json round_numbers(const json& j) {
  if (j.is_object() || j.is_array()) {
    json out = j;
    for (auto it = out.begin(); it != out.end(); ++it) *it = round_numbers(*it);
    return out;
  }
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) return nullptr;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
  }
  return j;
}

std::string flatten_csv(const json& j) {
  std::ostringstream out;
  out << "key,value\n";
  flatten(round_numbers(j), "", out);
  return out.str();
}

json cmd_bounds(const RunConfig& cfg) {
  if (!cfg.schedule.is_deterministic()) throw DomainError("bounds need a deterministic schedule");
  const DerivedSequences seqs = derived_sequences(cfg.schedule, cfg.n);
  json out = {{"n", cfg.n}, {"s0", cfg.s0}, {"sequences", sequences_json(seqs, cfg.n)}};
  if (cfg.mutation) {
    const int ell = cfg.ell.value_or(1);
    out["envelope"] = envelope_json(moment_envelope(seqs, *cfg.mutation, cfg.s0, cfg.n, ell));
  }
  return out;
}

json cmd_estimate(const RunConfig& cfg) {
  if (!cfg.t) throw ConfigError("missing field 'sample.t' or 'sample.mutations_total'");
  if (!cfg.schedule.is_deterministic()) throw DomainError("estimation needs a deterministic schedule");
  return report_json(estimate_report(cfg.schedule, cfg.n, cfg.s0, sample_size(cfg), *cfg.t, cfg.z,
                                     cfg.weighting, cfg.strict));
}

json cmd_golden(const json& fixture) {
  json base = fixture;
  const std::vector<std::int64_t> s0_values = fixture.at("s0_values").get<std::vector<std::int64_t>>();
  json reports = json::object();
  std::map<std::string, double> actual;
  for (std::int64_t s0 : s0_values) {
    base["s0"] = s0;
    const json r = cmd_estimate(parse_config(base));
    reports[std::to_string(s0)] = r;
    const std::string suffix = "_s0_" + std::to_string(s0);
    actual["bracket_lo" + suffix] = r.at("bracket_lo");
    actual["bracket_hi" + suffix] = r.at("bracket_hi");
    for (const char* key : {"W", "W_prime", "mu_star", "v", "v_dprime", "sigma_star",
                            "sqrt_t_over_ell", "ci_lo", "ci_hi"})
      actual[key] = r.at(key);
  }
  json checks = json::object();
  bool pass = true;
  for (const auto& [key, spec] : fixture.at("expected").items()) {
    const double expected = spec.at("value");
    const double tol = spec.at("tol");
    const auto it = actual.find(key);
    const bool ok = it != actual.end() && std::abs(it->second - expected) <= tol;
    pass = pass && ok;
    checks[key] = {{"expected", expected},
                   {"actual", it != actual.end() ? json(it->second) : json(nullptr)},
                   {"tol", tol},
                   {"pass", ok}};
  }
  return {{"reports", reports}, {"checks", checks}, {"pass", pass}};
}

json cmd_simulate(const RunConfig& cfg, std::uint64_t seed, unsigned threads) {
  const ProcessSpec spec = process_spec(cfg);
  const int ell = sample_size(cfg);
  const MonteCarloMoments mc = monte_carlo_moments(spec, ell, cfg.replicates, seed, threads);
  json out = {{"seed", seed}, {"s0", cfg.s0}, {"n", cfg.n}, {"empirical", monte_carlo_json(mc)}};
  json checks = json::object();
  const MutationLaw& law = *cfg.mutation;
  if (cfg.schedule.is_deterministic()) {
    const DerivedSequences seqs = derived_sequences(cfg.schedule, cfg.n);
    const MomentEnvelope env = moment_envelope(seqs, law, cfg.s0, cfg.n, ell);
    out["envelope"] = envelope_json(env);
    checks["Et_in_envelope"] = verdict(within(mc.mean_t, env.et_lo, env.et_hi, mc.se_mean_t));
    if (mc.var_t) checks["Vt_in_envelope"] = verdict(within(*mc.var_t, env.vt_lo, env.vt_hi, mc.se_var_t));
    if (mc.se_martingale)
      checks["martingale"] = verdict(within(*mc.martingale_mean, static_cast<double>(cfg.s0),
                                            static_cast<double>(cfg.s0), mc.se_martingale));
    if (mc.tv_to_eta_star && cfg.s0 >= 2)
      checks["tv_bound"] = verdict(*mc.tv_to_eta_star <= env.tv_hi + 4.0 * mc.tv_mc_error.value_or(0.0));
  } else {
    const WBounds w = w_bounds({cfg.s0, cfg.schedule.mm_c(), cfg.schedule.mm_d()}, cfg.n);
    out["w_bounds"] = {{"w_minus", w.w_minus}, {"w_plus", w.w_plus}, {"w_star", opt(w.w_star)},
                       {"upper", w.upper}, {"w_plus_corrected", w.w_plus_corrected}};
    checks["w_in_bounds"] = verdict(within(mc.mean_w_random, w.w_minus, w.upper, mc.se_w_random));
    if (law.mu > 0.0) {
      const Envelope e = random_efficiency_envelope(w.w_minus, w.upper, cfg.s0, law.mu);
      out["Et_envelope"] = {{"lo", e.lo}, {"hi", e.hi}};
      checks["Et_in_envelope"] = verdict(within(mc.mean_t, e.lo, e.hi, mc.se_mean_t));
    }
  }
  out["checks"] = checks;
  return out;
}

json cmd_mm(const RunConfig& cfg) {
  if (cfg.schedule.is_deterministic()) throw ConfigError("mm needs a 'schedule.mm' block");
  const MMParams mm{cfg.s0, cfg.schedule.mm_c(), cfg.schedule.mm_d()};
  json rows = json::array();
  for (int n = 0; n <= cfg.n; ++n) {
    const WBounds w = w_bounds(mm, n);
    rows.push_back({{"n", n}, {"w_minus", w.w_minus}, {"w_plus", w.w_plus},
                    {"w_star", opt(w.w_star)}, {"upper", w.upper},
                    {"w_plus_corrected", w.w_plus_corrected}});
  }
  return {{"s0", cfg.s0}, {"C", mm.c}, {"D", mm.d}, {"scaled_initial", mm.scaled_initial()},
          {"saturation", mm.saturation()}, {"bounds", rows}};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Branching-process PCR mutation analysis"};
  app.require_subcommand(1);
  std::string config_path;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool golden = false;
  long k_max = 10;
  std::string lambda_list = "0.5";
  double y = 0.0;
  bool check = false;

  const auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt_cfg = cmd->add_option("--config", config_path, "JSON run configuration");
    if (needs_config) opt_cfg->required();
    cmd->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
  };
  CLI::App* bounds = app.add_subcommand("bounds", "derived sequences and moment envelopes");
  add_common(bounds, true);
  CLI::App* estimate = app.add_subcommand("estimate", "mutation-rate estimate and intervals");
  add_common(estimate, false);
  estimate->add_flag("--golden-saiki", golden, "run the bundled reference data set");
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo replicate summary");
  add_common(simulate, true);
  simulate->add_option("--seed", seed, "master seed");
  simulate->add_option("--threads", threads, "worker threads (0 = hardware)");
  CLI::App* harm = app.add_subcommand("harmonic", "harmonic functional tables");
  add_common(harm, false);
  harm->add_option("--k-max", k_max, "largest k");
  harm->add_option("--lambdas", lambda_list, "comma-separated efficiencies");
  harm->add_option("--y", y, "shift for the C family");
  harm->add_flag("--check", check, "run the property suite instead");
  CLI::App* mm = app.add_subcommand("mm", "Michaelis-Menten w_n bounds");
  add_common(mm, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  const Output emit{out, format};
  try {
    if (*bounds) {
      const RunConfig cfg = load_config(config_path);
      const json j = cmd_bounds(cfg);
      emit.emit(j, format == "csv" ? sequences_csv(derived_sequences(cfg.schedule, cfg.n), cfg.n) : "");
    } else if (*estimate) {
      if (golden) {
        const json fixture = golden_fixture();
        const json j = cmd_golden(fixture);
        emit.emit(j);
        if (!j.at("pass").get<bool>()) {
          err << "reference data set mismatch\n";
          return 1;
        }
      } else {
        if (config_path.empty()) throw ConfigError("--config is required");
        emit.emit(cmd_estimate(load_config(config_path)));
      }
    } else if (*simulate) {
      const RunConfig cfg = load_config(config_path);
      const std::uint64_t s = resolve_seed(seed, cfg);
      try {
        emit.emit(cmd_simulate(cfg, s, threads));
      } catch (const CapExceeded& e) {
        Engine engine = replicate_engine(s, 0);
        const Trajectory traj = branchpcr::simulate(process_spec(cfg), engine);
        emit.emit({{"error", e.what()}, {"partial_sizes", traj.sizes}, {"cap_exceeded", true}});
        err << e.what() << '\n';
        return 4;
      }
    } else if (*harm) {
      const std::vector<double> lambdas = parse_list(lambda_list);
      if (check) {
        harmonic::PropertyGrid grid;
        grid.k_max = k_max;
        grid.lambdas = lambdas;
        const harmonic::PropertyReport rep = harmonic::check_harmonic_properties(grid);
        json v = json::array();
        for (const auto& x : rep.violations)
          v.push_back({{"property", x.property}, {"k", x.k}, {"lambda", x.lambda}, {"y", x.y},
                       {"lhs", x.lhs}, {"rhs", x.rhs}});
        emit.emit({{"checks", rep.checks}, {"violations", v}});
        return rep.violations.empty() ? 0 : 1;
      }
      const json rows = harmonic_rows(k_max, lambdas, y);
      emit.emit(rows, format == "csv"
                          ? rows_csv(rows, {"lambda", "k", "y", "H", "A", "G", "B", "Bp", "Bpp",
                                            "B1", "B2", "Hy", "C", "Cp", "Cpp"})
                          : "");
    } else if (*mm) {
      const json j = cmd_mm(load_config(config_path));
      emit.emit(j, format == "csv"
                       ? rows_csv(j.at("bounds"),
                                  {"n", "w_minus", "w_plus", "w_star", "upper", "w_plus_corrected"})
                       : "");
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return 3;
  } catch (const CapExceeded& e) {
    err << "resource cap: " << e.what() << '\n';
    return 4;
  }
  return 0;
}

}  // namespace branchpcr::cli
