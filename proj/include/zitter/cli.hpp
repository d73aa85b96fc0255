#pragma once

// Single entry point wiring the modules into subcommands. Every run emits a
// metadata header {version, seed, config}; all randomness flows from the
// --seed flag (or the ZITTER_SEED environment variable), so output is
// byte-identical across runs with the same arguments. Timings (bench) go to
// stderr: wall clocks are the one thing a seed cannot pin down.
//
// Exit codes: 0 = SAT/TAUTOLOGY or success, 1 = UNSAT, 2 = input/module
// error or failed verification, 64 = usage error.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zitter/corpus.hpp"
#include "zitter/discriminate.hpp"
#include "zitter/formula.hpp"
#include "zitter/qtp.hpp"
#include "zitter/querymodel.hpp"
#include "zitter/rng.hpp"
#include "zitter/selfcheck.hpp"
#include "zitter/version.hpp"

namespace zitter::cli {

using nlohmann::json;

inline constexpr int kExitSat = 0;
inline constexpr int kExitUnsat = 1;
inline constexpr int kExitError = 2;

namespace detail {

inline std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline json meta(const std::string& command, std::uint64_t seed, json config) {
  return json{{"version", kVersion}, {"command", command}, {"seed", seed},
              {"config", std::move(config)}};
}

inline formula::FormulaAst load_formula(const std::string& path, int cap) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open formula file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".cnf") return formula::load_dimacs(text);
  if (ext == ".txt") return formula::parse(text, 0, cap);
  throw Error("unsupported formula extension '" + ext + "' (expected .txt or .cnf)");
}

struct SatOptions {
  std::string formula_path;
  double epsilon = 0.25;
  int samples = 32;
  std::uint64_t shots = 0;
  double tol = qtp::kDefaultDecisionTol;
  int cap = qtp::kDefaultComputerCap;
  std::uint64_t seed = 0;
};

inline int run_sat(const SatOptions& opt, std::ostream& out) {
  const auto ast = load_formula(opt.formula_path, opt.cap);
  const auto table = formula::brute_force_table(ast, opt.cap);
  const qtp::GedankenComputer gc(table, opt.cap);
  const qtp::TrembleSchedule sched(table.n, opt.epsilon);
  Rng rng(opt.seed);
  const auto verdict = qtp::decide_sat(gc, sched, opt.samples, rng, opt.tol);

  json evidence = json::array();
  for (const auto& probe : verdict.evidence)
    evidence.push_back({{"theta", probe.theta}, {"f", probe.f}, {"fprime", probe.fprime}});
  json doc{
      {"meta", meta("sat", opt.seed,
                    {{"formula", opt.formula_path},
                     {"epsilon", opt.epsilon},
                     {"samples", opt.samples},
                     {"shots", opt.shots},
                     {"tol", opt.tol}})},
      {"verdict", qtp::to_string(verdict.outcome)},
      {"num_vars", table.n},
      {"satisfying_count", table.satisfying_count()},
      {"max_abs_f", verdict.max_abs_f},
      {"min_f", verdict.min_f},
      {"max_abs_fprime", verdict.max_abs_fprime},
      {"evidence", std::move(evidence)},
  };
  if (opt.shots > 0) {
    // Shot mode reports a binomial estimate; it cannot certify an exact zero
    // and never overrides the exact verdict.
    const double theta = verdict.evidence.front().theta;
    const double estimate = qtp::estimate_expectation(gc, sched, theta, opt.shots, rng);
    doc["shot_estimate"] = {
        {"theta", theta},
        {"estimate", estimate},
        {"shots", opt.shots},
        {"standard_error_bound", 0.5 / std::sqrt(static_cast<double>(opt.shots))}};
  }
  out << doc.dump(2) << '\n';
  return verdict.outcome == qtp::SatOutcome::Unsat ? kExitUnsat : kExitSat;
}

struct ScanOptions {
  std::string formula_path;
  std::string csv_path;
  int grid = 256;
  double epsilon = 0.25;
  int cap = qtp::kDefaultComputerCap;
  std::uint64_t seed = 0;
};

inline int run_scan(const ScanOptions& opt, std::ostream& out) {
  const auto ast = load_formula(opt.formula_path, opt.cap);
  const auto table = formula::brute_force_table(ast, opt.cap);
  const qtp::GedankenComputer gc(table, opt.cap);
  const qtp::TrembleSchedule sched(table.n, opt.epsilon);

  std::ofstream csv(opt.csv_path, std::ios::binary);
  if (!csv) throw Error("cannot open output file: " + opt.csv_path);
  csv << "# version=" << kVersion << " command=scan seed=" << opt.seed
      << " formula=" << opt.formula_path << " epsilon=" << g17(opt.epsilon)
      << " grid=" << opt.grid << "\n";
  csv << "theta,f,fprime\n";
  for (int j = 0; j < opt.grid; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / opt.grid;
    csv << g17(theta) << ',' << g17(qtp::output_expectation(gc, sched, theta)) << ','
        << g17(qtp::output_derivative(gc, sched, theta)) << '\n';
  }
  csv.close();

  json doc{{"meta", meta("scan", opt.seed,
                         {{"formula", opt.formula_path},
                          {"epsilon", opt.epsilon},
                          {"grid", opt.grid},
                          {"csv", opt.csv_path}})},
           {"rows", opt.grid},
           {"num_vars", table.n}};
  out << doc.dump(2) << '\n';
  return kExitSat;
}

struct StudyOptions {
  int n = 10;
  std::uint64_t sat_count = 1;
  double epsilon = 0.25;
  int grid = 0;
  std::uint64_t seed = 0;
};

inline int run_study(const StudyOptions& opt, std::ostream& out) {
  const qtp::TrembleSchedule sched(opt.n, opt.epsilon);
  const auto study = qtp::derivative_magnitude_study(sched, opt.sat_count, opt.grid);
  const auto extremes_json = [](const qtp::MagnitudeStudy::Extremes& e) {
    return json{{"max_abs_f", e.max_abs_f},
                {"max_abs_fprime", e.max_abs_fprime},
                {"theta_at_max_f", e.theta_at_max_f},
                {"theta_at_max_fprime", e.theta_at_max_fprime}};
  };
  json doc{{"meta", meta("study", opt.seed,
                         {{"n", opt.n},
                          {"sat_count", opt.sat_count},
                          {"epsilon", opt.epsilon},
                          {"grid", study.grid_points}})},
           {"n", study.n},
           {"sat_count", study.sat_count},
           {"epsilon", study.epsilon},
           {"grid_points", study.grid_points},
           {"low_frequency", extremes_json(study.low_frequency)},
           {"top_frequency", extremes_json(study.top_frequency)},
           {"value_lower_bound", study.value_lower_bound},
           {"value_upper_bound", study.value_upper_bound}};
  out << doc.dump(2) << '\n';
  return kExitSat;
}

struct DiscriminateOptions {
  std::uint64_t runs = 1000;
  int state = 1;
  int max_tests = 0;
  std::uint64_t seed = 0;
};

inline int run_discriminate(const DiscriminateOptions& opt, std::ostream& out) {
  const auto model = query::make_model(8);
  Rng rng(opt.seed);
  const auto stats =
      discriminate::tail_statistics(model, opt.state, opt.runs, rng, opt.max_tests);
  json doc{{"meta", meta("discriminate", opt.seed,
                         {{"runs", opt.runs},
                          {"state", opt.state},
                          {"max_tests", opt.max_tests}})},
           {"runs", stats.runs},
           {"state", opt.state},
           {"verdict_accuracy", stats.verdict_accuracy},
           {"histogram", stats.histogram},
           {"tail_ratio", stats.tail_ratio},
           {"resolved", stats.resolved},
           {"unresolved", stats.unresolved},
           {"max_tests_used", stats.max_tests_used},
           {"max_resolution_rounds", stats.max_resolution_rounds}};
  out << doc.dump(2) << '\n';
  return kExitSat;
}

inline int run_table(int model_size, std::uint64_t seed, std::ostream& out) {
  const auto model = query::make_model(model_size);
  out << "# version=" << kVersion << " command=table seed=" << seed
      << " model=" << model_size << "\n";
  out << "i,k,p\n";
  for (int i = 1; i <= model.num_states; ++i)
    for (int k = 1; k <= model.num_states; ++k)
      out << i << ',' << k << ',' << g17(model.p(i, k)) << '\n';
  return kExitSat;
}

inline int run_verify(std::uint64_t seed, std::ostream& out) {
  const auto results = selfcheck::run_all(seed);
  json checks = json::array();
  int passed = 0, failed = 0;
  for (const auto& r : results) {
    checks.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    (r.pass ? passed : failed)++;
  }
  json doc{{"meta", meta("verify", seed, json::object())},
           {"checks", std::move(checks)},
           {"passed", passed},
           {"failed", failed}};
  out << doc.dump(2) << '\n';
  return failed == 0 ? kExitSat : kExitError;
}

struct BenchOptions {
  int min_n = 4;
  int max_n = 14;
  int samples = 16;
  double epsilon = 0.25;
  std::uint64_t seed = 0;
};

inline int run_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  using clock = std::chrono::steady_clock;
  Rng rng(opt.seed);
  json results = json::array();
  for (int n = opt.min_n; n <= opt.max_n; ++n) {
    const std::uint64_t witness = rng.below(std::uint64_t{1} << n);
    const auto cnf = corpus::planted_single_witness(n, witness);
    const auto ast = cnf.to_ast();

    const auto t0 = clock::now();
    const auto table = formula::brute_force_table(ast, n);
    const auto t1 = clock::now();

    const qtp::GedankenComputer gc(table, n);
    const qtp::TrembleSchedule sched(n, opt.epsilon);
    const auto t2 = clock::now();
    const auto verdict = qtp::decide_sat(gc, sched, opt.samples, rng);
    const auto t3 = clock::now();

    const double classical_s = std::chrono::duration<double>(t1 - t0).count();
    const double qtp_s = std::chrono::duration<double>(t3 - t2).count();
    err << "bench n=" << n << " classical=" << g17(classical_s)
        << "s qtp_decide=" << g17(qtp_s) << "s\n";
    results.push_back({{"n", n},
                       {"classical_assignments", std::uint64_t{1} << n},
                       {"qtp_theta_samples", opt.samples},
                       {"satisfying_count", table.satisfying_count()},
                       {"verdict", qtp::to_string(verdict.outcome)},
                       {"agrees_with_brute_force",
                        (table.satisfying_count() > 0) ==
                            (verdict.outcome != qtp::SatOutcome::Unsat)}});
  }
  json doc{{"meta", meta("bench", opt.seed,
                         {{"min_n", opt.min_n},
                          {"max_n", opt.max_n},
                          {"samples", opt.samples},
                          {"epsilon", opt.epsilon}})},
           {"results", std::move(results)},
           {"note", "wall-clock timings are written to stderr; the classical column "
                    "enumerates all 2^n assignments, the qtp column decides from "
                    "theta samples of the trembling output"}};
  out << doc.dump(2) << '\n';
  return kExitSat;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"zitter: quantum measurement and trembling-input satisfiability simulator"};
  app.require_subcommand(1);

  detail::SatOptions sat_opt;
  bool json_flag = true;
  auto* sat = app.add_subcommand("sat", "decide satisfiability from the trembling output");
  sat->add_option("--formula", sat_opt.formula_path, "input file (.txt grammar or .cnf DIMACS)")
      ->required();
  sat->add_option("--epsilon", sat_opt.epsilon, "tremble depth in [0,1)");
  sat->add_option("--samples", sat_opt.samples, "number of theta samples");
  sat->add_option("--shots", sat_opt.shots, "also report a projective shot estimate");
  sat->add_option("--tol", sat_opt.tol, "flatness tolerance");
  sat->add_option("--cap", sat_opt.cap, "variable cap");
  sat->add_option("--seed", sat_opt.seed, "random seed")->envname("ZITTER_SEED");
  sat->add_flag("--json", json_flag, "emit JSON (the default)");

  detail::ScanOptions scan_opt;
  auto* scan = app.add_subcommand("scan", "tabulate f(theta), f'(theta) to CSV");
  scan->add_option("--formula", scan_opt.formula_path, "input file")->required();
  scan->add_option("--grid", scan_opt.grid, "number of theta grid points");
  scan->add_option("--csv", scan_opt.csv_path, "output CSV path")->required();
  scan->add_option("--epsilon", scan_opt.epsilon, "tremble depth in [0,1)");
  scan->add_option("--cap", scan_opt.cap, "variable cap");
  scan->add_option("--seed", scan_opt.seed, "random seed")->envname("ZITTER_SEED");

  detail::StudyOptions study_opt;
  auto* study = app.add_subcommand("study", "planted-witness signal magnitude report");
  study->add_option("--n", study_opt.n, "variable count")->required();
  study->add_option("--sat-count", study_opt.sat_count, "planted satisfying count")->required();
  study->add_option("--epsilon", study_opt.epsilon, "tremble depth in [0,1)");
  study->add_option("--grid", study_opt.grid, "theta grid points (0 = 4*2^n)");
  study->add_option("--seed", study_opt.seed, "random seed")->envname("ZITTER_SEED");

  detail::DiscriminateOptions disc_opt;
  auto* disc = app.add_subcommand("discriminate", "identify the prepared 8-state preparation");
  disc->add_option("--runs", disc_opt.runs, "number of identification runs");
  disc->add_option("--state", disc_opt.state, "true prepared state 1..8")->required();
  disc->add_option("--max-tests", disc_opt.max_tests, "per-run test budget (0 = unlimited)");
  disc->add_option("--seed", disc_opt.seed, "random seed")->envname("ZITTER_SEED");

  int table_model = 8;
  std::uint64_t table_seed = 0;
  auto* table = app.add_subcommand("table", "emit the outcome probability table as CSV");
  table->add_option("--model", table_model, "4 or 8")->required();
  table->add_option("--seed", table_seed, "random seed")->envname("ZITTER_SEED");

  std::uint64_t verify_seed = 0;
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("--seed", verify_seed, "random seed")->envname("ZITTER_SEED");

  detail::BenchOptions bench_opt;
  auto* bench = app.add_subcommand("bench", "brute-force vs trembling-decision scaling");
  bench->add_option("--min-n", bench_opt.min_n, "smallest variable count");
  bench->add_option("--max-n", bench_opt.max_n, "largest variable count");
  bench->add_option("--samples", bench_opt.samples, "theta samples per decision");
  bench->add_option("--epsilon", bench_opt.epsilon, "tremble depth in [0,1)");
  bench->add_option("--seed", bench_opt.seed, "random seed")->envname("ZITTER_SEED");

  std::vector<const char*> argv;
  argv.push_back("zitter");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help and friends
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << '\n';
    return 64;
  }

  try {
    if (sat->parsed()) return detail::run_sat(sat_opt, out);
    if (scan->parsed()) return detail::run_scan(scan_opt, out);
    if (study->parsed()) return detail::run_study(study_opt, out);
    if (disc->parsed()) return detail::run_discriminate(disc_opt, out);
    if (table->parsed()) return detail::run_table(table_model, table_seed, out);
    if (verify->parsed()) return detail::run_verify(verify_seed, out);
    if (bench->parsed()) return detail::run_bench(bench_opt, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  err << "usage error: no subcommand\n";
  return 64;
}

}  // namespace zitter::cli
