#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bellsim/avoidance.hpp"
#include "bellsim/bell.hpp"
#include "bellsim/bridge.hpp"
#include "bellsim/lhv.hpp"
#include "bellsim/scenario.hpp"

namespace bellsim::cli {

using nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kFailure = 1, kValidation = 2, kExhausted = 3 };

struct RunConfig {
  std::optional<int> n;
  std::optional<std::size_t> d;
  std::optional<double> eta;
  double w = 0.0;
  std::optional<std::uint64_t> trials;
  std::uint64_t seed = 0;
  double tol = 1e-3;
  std::string format;  // empty: csv for reports that carry a table, json otherwise
  std::string out;
  std::size_t workers = 1;
  bool cross_check = false;
  std::optional<std::uint64_t> budget;

  // Command-specific extras.
  std::string file;
  std::string scenario;
  std::optional<std::size_t> labels;
  std::string source = "fr_bound";
  std::size_t d_min = 4;
  std::size_t d_max = 4096;
  std::size_t step = 2;
  std::optional<double> c_bits;
  bool symmetry_break = false;
  bool pad = false;
  std::string witness;
  std::string certificate;
};

struct Report {
  ordered_json doc;
  std::string csv;  // preformatted CSV; generated from doc when empty
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_cell(const ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return fmt_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// One header row and one value row from the scalar fields of a report.
inline std::string flat_csv(const ordered_json& doc) {
  std::string head, row;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object() || value.is_array()) continue;
    if (!head.empty()) {
      head += ',';
      row += ',';
    }
    head += key;
    row += csv_cell(value);
  }
  return head + "\n" + row + "\n";
}

inline ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

inline std::size_t dimension(const RunConfig& c) {
  if (c.n && c.d) throw ValidationError("give either --n or --d, not both");
  if (c.n) {
    if (*c.n < 0 || *c.n > 62) throw ValidationError("--n out of range");
    return std::size_t{1} << *c.n;
  }
  if (c.d) return *c.d;
  throw ValidationError("missing --n or --d");
}

inline double require_eta(const RunConfig& c) {
  if (!c.eta) throw ValidationError("missing --eta");
  if (!(*c.eta >= 0.0 && *c.eta <= 1.0)) throw ValidationError("--eta must lie in [0, 1]");
  return *c.eta;
}

inline int require_n(const RunConfig& c) {
  if (c.d && !c.n) {
    const std::size_t d = *c.d;
    if (d < 4 || (d & (d - 1)) != 0) throw ValidationError("the implicit family needs d = 2^n with n >= 2");
    return std::countr_zero(d);
  }
  if (!c.n) throw ValidationError("missing --n");
  if (*c.n < 2 || *c.n > 16) throw ValidationError("--n must lie in [2, 16]");
  return *c.n;
}

// Scenario plus label lists: the built-in CHSH settings, an explicit file, or
// the implicit family with the first M labels 0, 1, ..., M-1.
struct LabelledScenario {
  Scenario scenario;
  std::vector<Setting> alice;
  std::vector<Setting> bob;
  std::string name;
};

inline LabelledScenario labelled_scenario(const RunConfig& c, std::size_t default_labels) {
  auto index_labels = [](std::size_t m) {
    std::vector<Setting> v;
    for (std::size_t i = 0; i < m; ++i) v.emplace_back(i);
    return v;
  };
  if (!c.scenario.empty()) {
    Scenario s = c.scenario == "chsh" ? make_chsh_scenario() : load_explicit_scenario_file(c.scenario);
    const std::size_t ma = s.bases().alice.size();
    const std::size_t mb = s.bases().bob.size();
    const std::size_t m = c.labels.value_or(std::min(ma, mb));
    if (m == 0 || m > ma || m > mb) throw ValidationError("--labels exceeds the bases in the scenario");
    return {std::move(s), index_labels(m), index_labels(m), c.scenario};
  }
  const int n = require_n(c);
  Scenario s = build_bct_scenario(n);
  const std::size_t m = c.labels.value_or(default_labels);
  const std::size_t domain = std::size_t{1} << std::min(std::size_t{1} << n, std::size_t{20});
  if (m == 0 || m > domain) throw ValidationError("--labels must lie in [1, 2^d]");
  std::vector<Setting> labels;
  for (std::size_t i = 0; i < m; ++i) labels.emplace_back(BitString::from_uint(s.d(), i));
  return {std::move(s), labels, labels, "bct"};
}

inline ordered_json label_json(const std::vector<Setting>& labels) {
  ordered_json arr = ordered_json::array();
  for (const auto& l : labels) {
    if (const auto* b = std::get_if<BitString>(&l)) {
      arr.push_back(b->to_string());
    } else {
      arr.push_back(std::get<std::size_t>(l));
    }
  }
  return arr;
}

inline ordered_json bell_json(const BellValue& v) {
  ordered_json j;
  j["d"] = v.d;
  j["eta"] = v.eta;
  j["w"] = v.w;
  j["normalized_value"] = v.normalized;
  j["raw_value"] = opt(v.raw);
  return j;
}

inline ordered_json threshold_json(const ThresholdReport& r) {
  ordered_json j;
  j["d"] = r.d;
  j["method"] = to_string(r.source);
  j["z_size"] = r.z_size ? ordered_json(*r.z_size) : ordered_json(nullptr);
  j["log2_z"] = r.log2_z;
  j["eta_exact_bound"] = r.eta_exact_bound;
  j["eta_asymptotic_bound"] = r.eta_asymptotic_bound;
  j["closes_loophole"] = r.closes_loophole;
  j["lower_bound_only"] = r.lower_bound_only;
  return j;
}

inline void write_witness(const std::string& path, const AvoidanceSet& z) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path);
  for (const auto& m : z.members) f << m.to_string() << '\n';
}

inline std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t ma, std::size_t mb) {
  std::vector<std::pair<std::size_t, std::size_t>> v;
  for (std::size_t i = 0; i < ma; ++i) {
    for (std::size_t j = 0; j < mb; ++j) v.emplace_back(i, j);
  }
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands

inline Report cmd_scenario_validate(const RunConfig& c) {
  ordered_json j;
  if (!c.file.empty()) {
    const Scenario s = load_explicit_scenario_file(c.file);
    j["valid"] = true;
    j["family"] = "explicit";
    j["d"] = s.d();
    j["alice_bases"] = s.bases().alice.size();
    j["bob_bases"] = s.bases().bob.size();
  } else {
    const Scenario s = build_bct_scenario(detail::require_n(c));
    j["valid"] = true;
    j["family"] = "bct";
    j["d"] = s.d();
    j["log2_settings"] = s.log2_alice_settings();
  }
  return {j, {}};
}

inline Report cmd_bell_quantum(const RunConfig& c) {
  return {detail::bell_json(bell_value_quantum(detail::dimension(c), Efficiency(detail::require_eta(c)))), {}};
}

inline Report cmd_bell_table(const RunConfig& c) {
  const Scenario s = build_bct_scenario(detail::require_n(c));
  const Efficiency em(detail::require_eta(c));
  const double w = c.w;
  TableProvider provider = [&](const BitString& x, const BitString& y) {
    return w == 0.0 ? outcome_table(s, x, y, em) : noisy_outcome_table(s, x, y, em, w);
  };
  auto j = detail::bell_json(bell_value_from_table(provider, s.d(), SumMode::automatic, em.value(), w));
  j["method"] = s.d() <= 4 ? "full" : "reduced";
  return {j, {}};
}

inline Report cmd_bell_noisy(const RunConfig& c) {
  if (!(c.w >= 0.0 && c.w <= 1.0)) throw ValidationError("--w must lie in [0, 1]");
  return {detail::bell_json(bell_value_noisy(detail::dimension(c), Efficiency(detail::require_eta(c)), c.w)), {}};
}

inline Report cmd_bell_sample(const RunConfig& c) {
  const Scenario s = build_bct_scenario(detail::require_n(c));
  const double eta = detail::require_eta(c);
  const std::uint64_t samples = c.trials.value_or(1'000'000);
  const auto est = estimate_bell_sampled(s, Efficiency(eta), samples, c.seed, c.workers);
  ordered_json j;
  j["d"] = s.d();
  j["eta"] = eta;
  j["w"] = 0.0;
  j["normalized_value"] = est.mean;
  j["raw_value"] = nullptr;
  j["samples"] = est.samples;
  j["stderr"] = est.std_error;
  j["seed"] = est.seed;
  j["expected_value"] = eta * eta;
  return {j, {}};
}

inline ExactSearchOptions exact_options(const RunConfig& c) {
  ExactSearchOptions o;
  if (c.budget) o.budget = *c.budget;
  o.symmetry_break = c.symmetry_break;
  o.incumbent_seed = c.seed;
  return o;
}

inline Report cmd_zset_exact(const RunConfig& c) {
  const std::size_t d = detail::dimension(c);
  if (c.cross_check && d > 4) throw ValidationError("--cross-check runs full subset enumeration and needs d <= 4");
  const AvoidanceSet z = max_z_exact(d, exact_options(c));
  detail::write_witness(c.witness, z);
  ordered_json j;
  j["d"] = d;
  j["method"] = "exact";
  j["z_size"] = z.size();
  j["certified"] = z.certified;
  j["valid"] = verify_avoidance(z);
  if (d >= 4) {
    const double bound = eta_bound_from_log2_z(d, std::log2(static_cast<double>(z.size())));
    j["eta_exact_bound"] = bound;
    j["eta_asymptotic_bound"] = eta_asymptotic_bound(d);
    j["closes_loophole"] = bound < 1.0;
  }
  if (c.cross_check) {
    const std::size_t oracle = max_z_by_enumeration(d);
    j["oracle_z_size"] = oracle;
    j["oracle_agrees"] = oracle == z.size();
  }
  return {j, {}};
}

inline Report cmd_zset_greedy(const RunConfig& c) {
  const std::size_t d = detail::dimension(c);
  const std::size_t restarts = c.trials.value_or(16);
  const AvoidanceSet z = z_greedy(d, c.seed, restarts);
  detail::write_witness(c.witness, z);
  ordered_json j;
  j["d"] = d;
  j["method"] = "greedy";
  j["z_size"] = z.size();
  j["restarts"] = restarts;
  j["seed"] = c.seed;
  j["valid"] = verify_avoidance(z);
  j["lower_bound_only"] = true;
  return {j, {}};
}

inline ThresholdOptions threshold_options(const RunConfig& c) {
  ThresholdOptions o;
  o.exact = exact_options(c);
  o.seed = c.seed;
  if (c.trials) o.restarts = *c.trials;
  return o;
}

inline Report cmd_zset_thresholds(const RunConfig& c) {
  return {detail::threshold_json(threshold_report(detail::dimension(c), parse_z_source(c.source), threshold_options(c))), {}};
}

inline Report cmd_zset_curve(const RunConfig& c) {
  const auto curve = threshold_curve(c.d_min, c.d_max, c.step, parse_z_source(c.source), threshold_options(c));
  ordered_json j;
  j["source"] = c.source;
  j["first_crossing"] = curve.first_crossing;
  j["rows"] = ordered_json::array();
  std::string csv = "d,eta_asymptotic_bound,eta_source_bound,closes_loophole\n";
  for (const auto& r : curve.rows) {
    ordered_json row;
    row["d"] = r.d;
    row["eta_asymptotic_bound"] = r.eta_asymptotic_bound;
    row["eta_source_bound"] = detail::opt(r.eta_source_bound);
    row["closes_loophole"] = r.closes_loophole;
    j["rows"].push_back(row);
    csv += std::to_string(r.d) + ',' + detail::fmt_double(r.eta_asymptotic_bound) + ',' +
           (r.eta_source_bound ? detail::fmt_double(*r.eta_source_bound) : std::string()) + ',' +
           (r.closes_loophole ? "true" : "false") + '\n';
  }
  csv += "# first_crossing=" + std::to_string(curve.first_crossing) + '\n';
  return {j, csv};
}

inline std::size_t lhv_dimension(const RunConfig& c) {
  const std::size_t d = c.d || c.n ? detail::dimension(c) : 4;
  if (d != 2 && d != 4) throw ValidationError("full-domain strategies need d = 2 or d = 4");
  return d;
}

inline Report cmd_lhv_value(const RunConfig& c) {
  const std::size_t d = lhv_dimension(c);
  const auto labels = all_bitstrings(d);
  const AlphaMatrix am(labels, labels);
  const std::size_t z = max_z_exact(d).size();
  const long long bound = static_cast<long long>(d * z);
  const std::uint64_t trials = c.trials.value_or(100000);
  Rng rng(c.seed);
  long long best = std::numeric_limits<long long>::min();
  double total = 0.0;
  std::uint64_t violations = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const long long v = lv_bell_value(random_strategy_pair(labels.size(), labels.size(), d, rng), am);
    best = std::max(best, v);
    total += static_cast<double>(v);
    violations += v > bound ? 1 : 0;
  }
  ordered_json j;
  j["d"] = d;
  j["trials"] = trials;
  j["seed"] = c.seed;
  j["max_value"] = best;
  j["mean_value"] = total / static_cast<double>(trials);
  j["z_size"] = z;
  j["bound"] = bound;
  j["violations"] = violations;
  return {j, {}};
}

inline Report cmd_lhv_optimize(const RunConfig& c) {
  const std::size_t d = lhv_dimension(c);
  const auto labels = all_bitstrings(d);
  const std::size_t z = max_z_exact(d).size();
  const long long bound = static_cast<long long>(d * z);
  const std::uint64_t restarts = c.trials.value_or(100);
  long long best = std::numeric_limits<long long>::min();
  std::uint64_t violations = 0;
  bool monotone = true;
  for (std::uint64_t r = 0; r < restarts; ++r) {
    const auto res = best_response_maximize(labels, d, derive_seed(c.seed, r), 100);
    for (std::size_t i = 1; i < res.history.size(); ++i) monotone = monotone && res.history[i] >= res.history[i - 1];
    best = std::max(best, res.value);
    violations += res.value > bound ? 1 : 0;
  }
  ordered_json j;
  j["d"] = d;
  j["restarts"] = restarts;
  j["seed"] = c.seed;
  j["best_value"] = best;
  j["bound"] = bound;
  j["z_size"] = z;
  j["violations"] = violations;
  j["monotone"] = monotone;
  return {j, {}};
}

inline Report cmd_lhv_popescu(const RunConfig& c) {
  const auto ls = detail::labelled_scenario(c, 4);
  const auto p = popescu_model(ls.alice, ls.bob, ls.scenario);
  ordered_json j;
  j["scenario"] = ls.name;
  j["d"] = ls.scenario.d();
  j["labels"] = ls.alice.size();
  j["eta"] = p.eta;
  j["strategies"] = p.model.strategies.size();
  j["max_deviation"] = verify_model_reproduces(p.model, ls.scenario, Efficiency(p.eta), ls.alice, ls.bob);
  j["label_list"] = detail::label_json(ls.alice);
  return {j, {}};
}

inline void write_certificate(const std::string& path, const LhvModel& model) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path);
  for (const auto& s : model.strategies) {
    f << detail::fmt_double(s.weight);
    f << ' ';
    for (Outcome o : s.pair.f) f << o << (&o == &s.pair.f.back() ? "" : ",");
    f << ' ';
    for (Outcome o : s.pair.g) f << o << (&o == &s.pair.g.back() ? "" : ",");
    f << '\n';
  }
}

inline FeasibilityOptions lp_options(const RunConfig& c) {
  FeasibilityOptions o;
  if (c.budget) o.simplex.max_pivots = *c.budget;
  return o;
}

inline Report cmd_lhv_lp(const RunConfig& c) {
  const auto ls = detail::labelled_scenario(c, 2);
  const double eta = detail::require_eta(c);
  const auto r = local_feasibility_lp(ls.scenario, ls.alice, ls.bob, Efficiency(eta), lp_options(c));
  ordered_json j;
  j["scenario"] = ls.name;
  j["d"] = ls.scenario.d();
  j["labels"] = ls.alice.size();
  j["eta"] = r.eta;
  j["feasible"] = r.feasible;
  j["residual"] = r.residual;
  j["phase1_objective"] = r.phase1_objective;
  j["strategy_count"] = r.strategy_count;
  j["pivots"] = r.pivots;
  if (!c.certificate.empty() && r.certificate) {
    write_certificate(c.certificate, *r.certificate);
    j["certificate_path"] = c.certificate;
  }
  return {j, {}};
}

inline Report cmd_lhv_etastar(const RunConfig& c) {
  const auto ls = detail::labelled_scenario(c, 2);
  if (!(c.tol > 0.0)) throw ValidationError("--tol must be positive");
  const auto r = eta_star_bisection(ls.scenario, ls.alice, ls.bob, c.tol, lp_options(c));
  ordered_json j;
  j["scenario"] = ls.name;
  j["d"] = ls.scenario.d();
  j["labels"] = ls.alice.size();
  j["tol"] = c.tol;
  j["eta_star"] = r.eta_star;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  j["no_violation"] = r.no_violation;
  j["lp_calls"] = r.lp_calls;
  return {j, {}};
}

inline Report cmd_bridge_rejection(const RunConfig& c) {
  const double eta = detail::require_eta(c);
  if (eta == 0.0) throw ValidationError("the rejection protocol needs --eta > 0");
  const int n = detail::require_n(c);
  const std::size_t cap = n < 20 ? std::size_t{1} << n : std::size_t{1} << 20;
  const std::size_t m = std::min<std::size_t>(cap, static_cast<std::size_t>(std::floor(1.0 / eta + 1e-12)));
  RunConfig cc = c;
  cc.labels = c.labels.value_or(m);
  if (static_cast<double>(*cc.labels) * eta > 1.0 + 1e-12) throw ValidationError("--labels times --eta exceeds 1");
  const auto ls = detail::labelled_scenario(cc, m);
  const LvModelWithEta model = efficiency_model(ls.scenario, ls.alice, ls.bob, eta);
  const std::uint64_t trials = c.trials.value_or(1'000'000);
  const auto st = average_communication_stats(model, ls.scenario.d(), detail::all_pairs(ls.alice.size(), ls.bob.size()),
                                              trials, c.seed, c.workers);
  const auto chi = chi_square_against(st, ls.scenario, ls.alice, ls.bob);
  ordered_json j;
  j["d"] = ls.scenario.d();
  j["eta"] = eta;
  j["labels"] = ls.alice.size();
  j["trials"] = trials;
  j["seed"] = c.seed;
  j["mean_bits"] = st.mean_bits;
  j["expected_bits"] = c_from_eta(eta);
  j["mean_iterations"] = st.mean_iterations;
  j["var_iterations"] = st.var_iterations;
  j["chi2"] = chi.statistic;
  j["chi2_dof"] = chi.dof;
  j["chi2_p"] = chi.p_value;
  return {j, {}};
}

inline Report cmd_bridge_guess(const RunConfig& c) {
  const auto ls = detail::labelled_scenario(c, 4);
  Protocol p = fixture_protocol(ls.scenario, ls.alice, ls.bob);
  if (c.pad) p = equalize_lengths(std::move(p));
  const GuessingModel gm(std::move(p));
  const std::uint64_t trials = c.trials.value_or(100000);
  const auto r = guess_report(gm, ls.scenario, ls.alice, ls.bob, trials, c.seed, c.workers);
  ordered_json j;
  j["label"] = r.label;
  j["scenario"] = ls.name;
  j["d"] = ls.scenario.d();
  j["labels"] = ls.alice.size();
  j["bits_alice"] = r.bits_a;
  j["bits_bob"] = r.bits_b;
  j["eta_alice"] = r.eta_alice;
  j["eta_bob"] = r.eta_bob;
  j["joint_click_expected"] = r.joint_click_expected;
  j["joint_click_max_deviation"] = r.joint_click_max_deviation;
  j["conditional_deviation"] = r.conditional_deviation;
  j["marginal_deviation"] = detail::opt(r.marginal_deviation);
  j["trials"] = r.trials;
  j["seed"] = c.seed;
  j["click_correlation"] = r.click_correlation;
  j["click_correlation_sigma"] = r.click_correlation_sigma;
  return {j, {}};
}

inline Report cmd_bridge_bounds(const RunConfig& c) {
  ordered_json j;
  if (c.eta) j["C_from_eta"] = c_from_eta(*c.eta);
  if (c.c_bits) j["eta_from_C"] = eta_from_c(*c.c_bits);
  if (c.d || c.n) {
    const std::size_t d = detail::dimension(c);
    j["mbcc_bits"] = mbcc_bits(d);
    j["mu_eta_log2"] = mu_eta_log2(d);
  }
  if (c.labels) j["trivial_bits"] = trivial_bits(*c.labels);
  if (j.empty()) throw ValidationError("bridge bounds needs at least one of --eta, --C, --d/--n, --labels");
  return {j, {}};
}

// ---------------------------------------------------------------------------
// Entry point

inline void emit(const Report& r, const RunConfig& c, std::ostream& out) {
  std::string text;
  if (c.format == "csv" || (c.format.empty() && !r.csv.empty())) {
    text = r.csv.empty() ? detail::flat_csv(r.doc) : r.csv;
  } else {
    text = r.doc.dump(2) + "\n";
  }
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + c.out);
  f << text;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"bellsim: detection-loophole analyses"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::function<Report(const RunConfig&)> action;

  auto common = [&](CLI::App* sub, std::function<Report(const RunConfig&)> fn) {
    sub->add_option("--n", cfg.n, "log2 of the dimension");
    sub->add_option("--d", cfg.d, "dimension");
    sub->add_option("--eta", cfg.eta, "detector efficiency");
    sub->add_option("--w", cfg.w, "white-noise weight");
    sub->add_option("--trials", cfg.trials, "samples, trials or restarts");
    sub->add_option("--seed", cfg.seed, "base seed (default 0)");
    sub->add_option("--tol", cfg.tol, "bisection tolerance");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out, "write the report here instead of stdout");
    sub->add_option("--workers", cfg.workers, "worker threads")->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
    sub->add_flag("--cross-check", cfg.cross_check, "compare against brute-force enumeration");
    sub->add_option("--budget", cfg.budget, "node or pivot budget");
    sub->callback([&action, fn] { action = fn; });
    return sub;
  };
  auto group = [&](const char* name, const char* help) {
    auto* g = app.add_subcommand(name, help);
    g->require_subcommand(1);
    return g;
  };

  auto* scenario = group("scenario", "measurement scenarios");
  auto* validate = common(scenario->add_subcommand("validate", "check an explicit scenario file"), cmd_scenario_validate);
  validate->add_option("file", cfg.file, "scenario JSON file");

  auto* bell = group("bell", "Bell values");
  common(bell->add_subcommand("quantum", "closed form for the ideal state"), cmd_bell_quantum);
  common(bell->add_subcommand("table", "double sum over outcome tables"), cmd_bell_table);
  common(bell->add_subcommand("noisy", "closed form with white noise"), cmd_bell_noisy);
  common(bell->add_subcommand("sample", "stratified Monte Carlo"), cmd_bell_sample);

  auto* zset = group("zset", "avoidance sets");
  for (auto [name, fn] : {std::pair{"exact", cmd_zset_exact}, std::pair{"greedy", cmd_zset_greedy}}) {
    auto* sub = common(zset->add_subcommand(name, "largest avoidance set"), fn);
    sub->add_option("--witness", cfg.witness, "write members, one bit string per line");
    sub->add_flag("--symmetry-break", cfg.symmetry_break, "force 0^d into the set");
  }
  auto* thresholds = common(zset->add_subcommand("thresholds", "efficiency bound at one d"), cmd_zset_thresholds);
  thresholds->add_option("--source", cfg.source, "exact, greedy or fr_bound");
  auto* curve = common(zset->add_subcommand("curve", "efficiency bound over a range of d"), cmd_zset_curve);
  curve->add_option("--source", cfg.source, "exact, greedy or fr_bound");
  curve->add_option("--d-min", cfg.d_min);
  curve->add_option("--d-max", cfg.d_max);
  curve->add_option("--step", cfg.step);

  auto* lhv = group("lhv", "local hidden-variable models");
  common(lhv->add_subcommand("value", "random strategy pairs against the bound"), cmd_lhv_value);
  common(lhv->add_subcommand("optimize", "alternating best response"), cmd_lhv_optimize);
  for (auto [name, fn] : {std::pair{"popescu", cmd_lhv_popescu}, std::pair{"lp", cmd_lhv_lp}, std::pair{"etastar", cmd_lhv_etastar}}) {
    auto* sub = common(lhv->add_subcommand(name, "explicit-label analyses"), fn);
    sub->add_option("--scenario", cfg.scenario, "chsh or a scenario JSON file (default: implicit family from --n)");
    sub->add_option("--labels", cfg.labels, "labels per side");
    if (std::string(name) == "lp") sub->add_option("--certificate", cfg.certificate, "write the certificate here");
  }

  auto* bridge = group("bridge", "communication bridges");
  auto* rejection = common(bridge->add_subcommand("rejection", "rejection protocol statistics"), cmd_bridge_rejection);
  rejection->add_option("--labels", cfg.labels, "labels per side (default floor(1/eta))");
  auto* guess = common(bridge->add_subcommand("guess", "conversation-guessing construction"), cmd_bridge_guess);
  guess->add_option("--scenario", cfg.scenario, "chsh or a scenario JSON file (default: implicit family from --n)");
  guess->add_option("--labels", cfg.labels, "labels per side");
  guess->add_flag("--pad", cfg.pad, "pad the shorter side to equal length");
  auto* bounds = common(bridge->add_subcommand("bounds", "closed-form bounds"), cmd_bridge_bounds);
  bounds->add_option("--C", cfg.c_bits, "average bits");
  bounds->add_option("--labels", cfg.labels, "labels per side");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kValidation;
  }

  try {
    emit(action(cfg), cfg, out);
    return kOk;
  } catch (const BudgetExhausted& e) {
    err << "budget exhausted: " << e.what() << " (best so far: " << e.best_so_far().size() << " members)\n";
    return kExhausted;
  } catch (const CapExceeded& e) {
    err << "cap exceeded: " << e.what() << '\n';
    return kExhausted;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace bellsim::cli
