#pragma once

// Invariant suite behind the `verify` subcommand: one named check per module
// invariant, each deterministic given the seed. Checks favor breadth over
// sample size; the acceptance suite carries the full-scale statistical runs.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "zitter/core.hpp"
#include "zitter/corpus.hpp"
#include "zitter/discriminate.hpp"
#include "zitter/formula.hpp"
#include "zitter/qtp.hpp"
#include "zitter/querymodel.hpp"
#include "zitter/rng.hpp"

namespace zitter::selfcheck {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline core::Matrix random_hermitian(Eigen::Index dim, Rng& rng) {
  core::Matrix raw(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      raw(i, j) = core::Complex(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
  return 0.5 * (raw + raw.adjoint().eval());
}

inline core::StateVector random_state(Eigen::Index dim, Rng& rng) {
  core::Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    v[i] = core::Complex(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
  return core::StateVector::normalized(v);
}

inline formula::TruthTable random_table(int n, Rng& rng) {
  formula::TruthTable t;
  t.n = n;
  t.bits.resize(std::uint64_t{1} << n);
  for (std::uint64_t x = 0; x < t.bits.size(); ++x) t.bits[x] = rng.uniform() < 0.5;
  return t;
}

}  // namespace detail

inline CheckResult check_core_unitarity(Rng& rng) {
  double worst = 0.0;
  for (Eigen::Index dim : {2, 3, 5, 8, 16}) {
    const core::HermitianOperator h(detail::random_hermitian(dim, rng));
    const auto decomp = core::spectral_decompose(h);
    for (int rep = 0; rep < 4; ++rep) {
      const double t = 10.0 * rng.uniform() - 5.0;
      const auto psi = detail::random_state(dim, rng);
      worst = std::max(worst,
                       std::abs(core::evolve(decomp, t, psi).amplitudes().norm() - 1.0));
    }
  }
  return {"core.unitarity", worst <= 1e-10, "max norm drift " + detail::fmt(worst)};
}

inline CheckResult check_core_spectral_reconstruction(Rng& rng) {
  double worst = 0.0;
  for (Eigen::Index dim : {2, 4, 8, 16, 32, 64}) {
    const core::Matrix m = detail::random_hermitian(dim, rng);
    const auto decomp = core::spectral_decompose(core::HermitianOperator(m));
    worst = std::max(worst, (decomp.reconstruct() - m).cwiseAbs().maxCoeff());
  }
  return {"core.spectral_reconstruction", worst <= 1e-10,
          "max |sum a_i P_i - A| = " + detail::fmt(worst) + " up to dim 64"};
}

inline CheckResult check_core_born_completeness(Rng& rng) {
  double worst = 0.0;
  for (Eigen::Index dim : {2, 5, 16}) {
    const auto decomp =
        core::spectral_decompose(core::HermitianOperator(detail::random_hermitian(dim, rng)));
    for (int rep = 0; rep < 8; ++rep) {
      const auto probs = core::born_probabilities(detail::random_state(dim, rng), decomp);
      double sum = 0.0;
      for (double p : probs) sum += p;
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  return {"core.born_completeness", worst <= 1e-10, "max |sum p - 1| = " + detail::fmt(worst)};
}

inline CheckResult check_core_collapse_idempotence(Rng& rng) {
  for (int rep = 0; rep < 64; ++rep) {
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng.below(7));
    const auto decomp =
        core::spectral_decompose(core::HermitianOperator(detail::random_hermitian(dim, rng)));
    const auto first = core::measure(detail::random_state(dim, rng), decomp, rng);
    const auto second = core::measure(first.post_state, decomp, rng);
    if (second.value != first.value || std::abs(second.probability - 1.0) > 1e-10)
      return {"core.collapse_idempotence", false,
              "repeat measurement moved: p = " + detail::fmt(second.probability)};
  }
  return {"core.collapse_idempotence", true, "64 random repeat measurements held"};
}

inline CheckResult check_core_seed_determinism(Rng& rng) {
  const std::uint64_t seed = rng.next();
  const auto decomp =
      core::spectral_decompose(core::HermitianOperator(detail::random_hermitian(6, rng)));
  Rng a(seed), b(seed);
  Rng state_src(seed + 1);
  for (int rep = 0; rep < 32; ++rep) {
    const auto psi = detail::random_state(6, state_src);
    const auto ra = core::measure(psi, decomp, a);
    const auto rb = core::measure(psi, decomp, b);
    if (ra.value != rb.value ||
        ra.post_state.amplitudes() != rb.post_state.amplitudes())
      return {"core.seed_determinism", false, "same seed diverged"};
  }
  return {"core.seed_determinism", true, "32 paired measurements identical"};
}

inline CheckResult check_core_evolve_semigroup(Rng& rng) {
  double worst = 0.0;
  for (int rep = 0; rep < 8; ++rep) {
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng.below(7));
    const core::HermitianOperator h(detail::random_hermitian(dim, rng));
    const auto psi = detail::random_state(dim, rng);
    const double t = 4.0 * rng.uniform() - 2.0;
    const double s = 4.0 * rng.uniform() - 2.0;
    const auto once = core::evolve(h, t + s, psi);
    const auto twice = core::evolve(h, t, core::evolve(h, s, psi));
    worst = std::max(worst,
                     (once.amplitudes() - twice.amplitudes()).cwiseAbs().maxCoeff());
  }
  return {"core.evolve_semigroup", worst <= 1e-10,
          "max |U(t+s) - U(t)U(s)| on states = " + detail::fmt(worst)};
}

inline CheckResult check_query_table_born_agreement(Rng&) {
  double worst = 0.0;
  for (int size : {4, 8}) {
    const auto model = query::make_model(size);
    const auto real = query::realize_in_hilbert(model);
    for (int i = 1; i <= size; ++i)
      for (int k = 1; k <= size; ++k) {
        const core::Complex overlap = real.state_vector(k).adjoint() * real.state_vector(i);
        worst = std::max(worst, std::abs(std::norm(overlap) - model.p(i, k)));
      }
  }
  return {"query.table_born_agreement", worst <= 1e-12,
          "max |<k|i>|^2 deviation " + detail::fmt(worst)};
}

inline CheckResult check_query_table_structure(Rng&) {
  for (int size : {4, 8}) {
    const auto model = query::make_model(size);
    for (int i = 1; i <= size; ++i) {
      if (model.p(i, i) != 1.0) return {"query.table_structure", false, "P(i,i) != 1"};
      double row = 0.0;
      for (int k = 1; k <= size; ++k) {
        if (model.p(i, k) != model.p(k, i))
          return {"query.table_structure", false, "table not symmetric"};
        if (i != k && (i - k) % 2 == 0 && model.p(i, k) != 0.0)
          return {"query.table_structure", false, "same-filter entry not 0"};
        if ((i - k) % 2 != 0) row += model.p(i, k);
      }
      if (std::abs(row - 1.0) > 1e-12)
        return {"query.table_structure", false, "cross-filter row does not sum to 1"};
    }
  }
  return {"query.table_structure", true, "identity, zeros, cross rows complete"};
}

inline CheckResult check_query_sampler_frequencies(Rng& rng) {
  const auto model = query::make_model(8);
  const query::OutcomeSampler sampler(model);
  const int draws = 100000;
  int yes = 0;
  for (int d = 0; d < draws; ++d)
    yes += sampler.sample(1, 2, rng) == query::Outcome::Yes;
  const double p = model.p(1, 2);
  const double expected = draws * p;
  const double chi2 = (yes - expected) * (yes - expected) / expected +
                      (yes - expected) * (yes - expected) / (draws - expected);
  // 1 dof, significance 0.001
  if (chi2 > 10.828)
    return {"query.sampler_frequencies", false, "chi^2 = " + detail::fmt(chi2)};
  for (int d = 0; d < 200; ++d) {
    if (sampler.sample(1, 1, rng) != query::Outcome::Yes)
      return {"query.sampler_frequencies", false, "P(1,1) sample returned NO"};
    if (sampler.sample(1, 3, rng) != query::Outcome::No)
      return {"query.sampler_frequencies", false, "P(1,3) sample returned YES"};
  }
  return {"query.sampler_frequencies", true,
          "cross-filter chi^2 = " + detail::fmt(chi2) + ", certain entries exact"};
}

inline CheckResult check_disc_tree_shape(Rng&) {
  const auto tree = discriminate::build_reduction_tree();
  const auto leaves = tree.leaves();
  std::multiset<std::pair<int, int>> got(leaves.begin(), leaves.end());
  std::multiset<std::pair<int, int>> want;
  for (int odd = 1; odd <= 7; odd += 2)
    for (int even = 2; even <= 8; even += 2) want.insert({odd, even});
  const bool ok = tree.depth() == 6 && got == want;
  return {"disc.tree_shape", ok,
          "depth " + std::to_string(tree.depth()) + ", " + std::to_string(leaves.size()) +
              " leaves"};
}

inline CheckResult check_disc_tree_replay(Rng&) {
  const auto tree = discriminate::build_reduction_tree();
  std::function<bool(const discriminate::ReductionTree::Node*, discriminate::KnowledgeSet)>
      walk = [&](const discriminate::ReductionTree::Node* node,
                 discriminate::KnowledgeSet ks) -> bool {
    if (node->is_leaf()) {
      const auto c = ks.candidates();
      return ks.is_cross_pair() &&
             std::min(c[0], c[1]) == std::min(node->leaf.first, node->leaf.second) &&
             std::max(c[0], c[1]) == std::max(node->leaf.first, node->leaf.second);
    }
    return walk(node->yes.get(),
                discriminate::update_knowledge(ks, node->query, query::Outcome::Yes)) &&
           walk(node->no.get(),
                discriminate::update_knowledge(ks, node->query, query::Outcome::No));
  };
  const bool ok = walk(tree.root.get(), discriminate::KnowledgeSet::full());
  return {"disc.tree_replay", ok, ok ? "all 16 paths reproduce their leaves" : "path mismatch"};
}

inline CheckResult check_disc_identify_soundness(Rng& rng) {
  const auto model = query::make_model(8);
  const query::OutcomeSampler sampler(model);
  for (int state = 1; state <= 8; ++state)
    for (int run = 0; run < 2000; ++run) {
      const auto t = discriminate::identify(sampler, state, rng);
      if (t.verdict != state)
        return {"disc.identify_soundness", false,
                "misidentified state " + std::to_string(state)};
      if (t.phase1_tests > 6)
        return {"disc.identify_soundness", false, "phase 1 exceeded 6 tests"};
    }
  return {"disc.identify_soundness", true, "8 states x 2000 runs all correct, phase 1 <= 6"};
}

inline CheckResult check_disc_geometric_tail(Rng& rng) {
  const auto model = query::make_model(8);
  const auto stats = discriminate::tail_statistics(model, 2, 30000, rng);
  const bool ok = stats.verdict_accuracy == 1.0 && stats.tail_ratio >= 0.2 &&
                  stats.tail_ratio <= 0.3;
  return {"disc.geometric_tail", ok,
          "pooled survival ratio " + detail::fmt(stats.tail_ratio) + ", max rounds " +
              std::to_string(stats.max_resolution_rounds)};
}

inline CheckResult check_formula_roundtrip(Rng& rng) {
  for (int rep = 0; rep < 200; ++rep) {
    const auto ast = corpus::random_ast(4, 5, rng);
    const auto back = formula::parse(formula::to_text(ast), ast.num_vars());
    if (!formula::structurally_equal(ast, back))
      return {"formula.roundtrip", false, "reparse changed structure: " + formula::to_text(ast)};
  }
  return {"formula.roundtrip", true, "200 random ASTs round-tripped"};
}

inline CheckResult check_formula_eval_table_agreement(Rng& rng) {
  for (int rep = 0; rep < 50; ++rep) {
    const auto ast = corpus::random_ast(4, 4, rng);
    const auto table = formula::brute_force_table(ast);
    std::vector<bool> assignment(ast.num_vars());
    for (std::uint64_t x = 0; x < table.bits.size(); ++x) {
      for (int j = 0; j < ast.num_vars(); ++j) assignment[j] = (x >> j) & 1u;
      if (formula::eval(ast, assignment) != table.bits[x])
        return {"formula.eval_table_agreement", false, "pointwise mismatch"};
    }
  }
  return {"formula.eval_table_agreement", true, "50 random ASTs agree pointwise"};
}

inline CheckResult check_formula_demorgan(Rng& rng) {
  using formula::NodeKind;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(4));
    auto a = corpus::random_node(n, 3, rng);
    auto b = corpus::random_node(n, 3, rng);
    const formula::FormulaAst lhs(
        formula::make_not(formula::make_binary(NodeKind::And, formula::clone(a.get()),
                                               formula::clone(b.get()))),
        n);
    const formula::FormulaAst rhs(
        formula::make_binary(NodeKind::Or, formula::make_not(std::move(a)),
                             formula::make_not(std::move(b))),
        n);
    std::vector<bool> assignment(n);
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
      for (int j = 0; j < n; ++j) assignment[j] = (x >> j) & 1u;
      if (formula::eval(lhs, assignment) != formula::eval(rhs, assignment))
        return {"formula.demorgan", false, "~(a&b) != ~a|~b at some assignment"};
    }
  }
  return {"formula.demorgan", true, "100 random pairs agree on all assignments"};
}

inline CheckResult check_qtp_oracle_involution(Rng& rng) {
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(6));
    const qtp::GedankenComputer gc(detail::random_table(n, rng));
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(gc.dim()); ++i)
      if (gc.permute(gc.permute(i)) != i)
        return {"qtp.oracle_involution", false, "oracle^2 != identity"};
  }
  return {"qtp.oracle_involution", true, "20 random oracles are involutions"};
}

inline CheckResult check_qtp_classical_determinism(Rng& rng) {
  for (int n = 1; n <= 6; ++n) {
    const auto table = detail::random_table(n, rng);
    const qtp::GedankenComputer gc(table);
    for (std::uint64_t x = 0; x < gc.num_inputs(); ++x) {
      if (qtp::classical_run(gc, x) != table.bits[x])
        return {"qtp.classical_determinism", false, "run disagrees with the truth table"};
      if (qtp::classical_run(gc, x) != qtp::classical_run(gc, x))
        return {"qtp.classical_determinism", false, "repeated run diverged"};
    }
  }
  return {"qtp.classical_determinism", true, "exhaustive n <= 6 runs match truth bits"};
}

inline CheckResult check_qtp_closed_form_equality(Rng& rng) {
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(6));
    const qtp::GedankenComputer gc(detail::random_table(n, rng));
    const qtp::TrembleSchedule sched(n, 0.9 * rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    worst = std::max(worst, std::abs(qtp::output_expectation(gc, sched, theta) -
                                     qtp::closed_form_expectation(gc, sched, theta)));
  }
  return {"qtp.closed_form_equality", worst <= 1e-10,
          "max |simulated - closed form| = " + detail::fmt(worst)};
}

inline CheckResult check_qtp_gradient(Rng& rng) {
  const double step = 1e-5;
  double worst_rel = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(5));
    const qtp::GedankenComputer gc(detail::random_table(n, rng));
    const qtp::TrembleSchedule sched(n, 0.05 + 0.9 * rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    const double analytic = qtp::output_derivative(gc, sched, theta);
    const double fd = (qtp::closed_form_expectation(gc, sched, theta + step) -
                       qtp::closed_form_expectation(gc, sched, theta - step)) /
                      (2.0 * step);
    const double err = std::abs(analytic - fd);
    if (std::abs(analytic) > 1e-9)
      worst_rel = std::max(worst_rel, err / std::abs(analytic));
    else if (err > 1e-9)
      return {"qtp.gradient", false, "absolute error near zero: " + detail::fmt(err)};
  }
  return {"qtp.gradient", worst_rel <= 1e-6,
          "max relative error vs central differences " + detail::fmt(worst_rel)};
}

inline CheckResult check_qtp_zero_derivative_dichotomy(Rng& rng) {
  const auto flat_on_grid = [](const qtp::GedankenComputer& gc,
                               const qtp::TrembleSchedule& sched) {
    const int points = 2 * static_cast<int>(gc.num_inputs()) + 1;
    for (int j = 0; j < points; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / points;
      if (std::abs(qtp::output_derivative(gc, sched, theta)) >= 1e-9) return false;
    }
    return true;
  };
  // n = 2: exhaust all 16 truth tables
  for (std::uint32_t mask = 0; mask < 16; ++mask) {
    formula::TruthTable t;
    t.n = 2;
    t.bits = {bool(mask & 1), bool(mask & 2), bool(mask & 4), bool(mask & 8)};
    const qtp::GedankenComputer gc(t);
    const qtp::TrembleSchedule sched(2, 0.5);
    const bool trivial = mask == 0 || mask == 15;
    if (flat_on_grid(gc, sched) != trivial)
      return {"qtp.zero_derivative_dichotomy", false,
              "n=2 mask " + std::to_string(mask) + " misclassified"};
  }
  // n = 3, 4: random tables
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 3 + static_cast<int>(rng.below(2));
    const auto table = detail::random_table(n, rng);
    const qtp::GedankenComputer gc(table);
    const qtp::TrembleSchedule sched(n, 0.5);
    const std::uint64_t s = table.satisfying_count();
    const bool trivial = s == 0 || s == table.bits.size();
    if (flat_on_grid(gc, sched) != trivial)
      return {"qtp.zero_derivative_dichotomy", false, "n=" + std::to_string(n) + " random table"};
  }
  return {"qtp.zero_derivative_dichotomy", true,
          "flat derivative iff S empty or full (n=2 exhaustive, n=3,4 random)"};
}

inline CheckResult check_qtp_tremble_normalization(Rng& rng) {
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const qtp::TrembleSchedule sched(n, 0.98 * rng.uniform());
    const auto psi = qtp::tremble_state(sched, 8.0 * std::numbers::pi * rng.uniform());
    if (std::abs(psi.amplitudes().squaredNorm() - 1.0) > 1e-12)
      return {"qtp.tremble_normalization", false, "norm drift"};
    for (Eigen::Index i = 0; i < psi.dim(); ++i)
      if (!(psi.amplitude(i).real() > 0.0) || psi.amplitude(i).imag() != 0.0)
        return {"qtp.tremble_normalization", false, "amplitude not strictly positive"};
  }
  const auto uniform = qtp::tremble_state(qtp::TrembleSchedule(3, 0.0), 1.234);
  for (Eigen::Index i = 0; i < uniform.dim(); ++i)
    if (std::abs(uniform.amplitude(i).real() - std::sqrt(1.0 / 8.0)) > 1e-12)
      return {"qtp.tremble_normalization", false, "eps=0 is not the uniform superposition"};
  return {"qtp.tremble_normalization", true, "unit norm, positive amplitudes, eps=0 uniform"};
}

inline CheckResult check_qtp_decision_soundness(Rng& rng) {
  int checked = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 4 + static_cast<int>(rng.below(5));
    const auto cnf = corpus::random_3cnf(n, static_cast<int>(4.2 * n), rng);
    const auto table = formula::brute_force_table(cnf.to_ast());
    const qtp::GedankenComputer gc(table);
    const qtp::TrembleSchedule sched(n, 0.25);
    const auto verdict = qtp::decide_sat(gc, sched, 32, rng);
    const bool sat = table.satisfying_count() > 0;
    if (sat == (verdict.outcome == qtp::SatOutcome::Unsat))
      return {"qtp.decision_soundness", false, "disagrees with brute force at n=" +
                                                   std::to_string(n)};
    ++checked;
  }
  for (const auto& ast : {corpus::contradiction(), corpus::tautology()}) {
    const auto table = formula::brute_force_table(ast);
    const qtp::GedankenComputer gc(table);
    const auto verdict = qtp::decide_sat(gc, qtp::TrembleSchedule(table.n, 0.25), 32, rng);
    const bool sat = table.satisfying_count() > 0;
    if (sat == (verdict.outcome == qtp::SatOutcome::Unsat))
      return {"qtp.decision_soundness", false, "special case misjudged"};
    ++checked;
  }
  return {"qtp.decision_soundness", true,
          std::to_string(checked) + " formulas agree with brute force"};
}

inline CheckResult check_qtp_estimate_convergence(Rng& rng) {
  const auto table = formula::brute_force_table(formula::parse("x1 | x2"));
  const qtp::GedankenComputer gc(table);
  const qtp::TrembleSchedule sched(2, 0.0);
  const double est = qtp::estimate_expectation(gc, sched, 0.37, 100000, rng);
  if (std::abs(est - 0.75) > 0.005)
    return {"qtp.estimate_convergence", false, "estimate " + detail::fmt(est)};
  const qtp::GedankenComputer unsat_gc(formula::brute_force_table(corpus::contradiction()));
  const double zero =
      qtp::estimate_expectation(unsat_gc, qtp::TrembleSchedule(1, 0.25), 0.9, 50000, rng);
  if (zero != 0.0)
    return {"qtp.estimate_convergence", false, "UNSAT estimate not exactly zero"};
  return {"qtp.estimate_convergence", true,
          "f-hat = " + detail::fmt(est) + " vs 0.75; UNSAT estimate exactly 0"};
}

inline std::vector<CheckResult> run_all(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CheckResult> results;
  results.push_back(check_core_unitarity(rng));
  results.push_back(check_core_spectral_reconstruction(rng));
  results.push_back(check_core_born_completeness(rng));
  results.push_back(check_core_collapse_idempotence(rng));
  results.push_back(check_core_seed_determinism(rng));
  results.push_back(check_core_evolve_semigroup(rng));
  results.push_back(check_query_table_born_agreement(rng));
  results.push_back(check_query_table_structure(rng));
  results.push_back(check_query_sampler_frequencies(rng));
  results.push_back(check_disc_tree_shape(rng));
  results.push_back(check_disc_tree_replay(rng));
  results.push_back(check_disc_identify_soundness(rng));
  results.push_back(check_disc_geometric_tail(rng));
  results.push_back(check_formula_roundtrip(rng));
  results.push_back(check_formula_eval_table_agreement(rng));
  results.push_back(check_formula_demorgan(rng));
  results.push_back(check_qtp_oracle_involution(rng));
  results.push_back(check_qtp_classical_determinism(rng));
  results.push_back(check_qtp_closed_form_equality(rng));
  results.push_back(check_qtp_gradient(rng));
  results.push_back(check_qtp_zero_derivative_dichotomy(rng));
  results.push_back(check_qtp_tremble_normalization(rng));
  results.push_back(check_qtp_decision_soundness(rng));
  results.push_back(check_qtp_estimate_convergence(rng));
  return results;
}

}  // namespace zitter::selfcheck
