#pragma once

// Deterministic formula generators for test corpora and benchmarks.

#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "zitter/formula.hpp"
#include "zitter/rng.hpp"

namespace zitter::corpus {

struct Cnf {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;  // DIMACS-style signed literals

  std::string to_dimacs() const {
    std::ostringstream out;
    out << "p cnf " << num_vars << ' ' << clauses.size() << '\n';
    for (const auto& clause : clauses) {
      for (int lit : clause) out << lit << ' ';
      out << "0\n";
    }
    return out.str();
  }

  formula::FormulaAst to_ast() const { return formula::load_dimacs(to_dimacs()); }
};

// Uniform 3-CNF: each clause picks 3 distinct variables and random signs.
inline Cnf random_3cnf(int n, int num_clauses, Rng& rng) {
  Cnf cnf;
  cnf.num_vars = n;
  for (int c = 0; c < num_clauses; ++c) {
    std::vector<int> vars;
    while (static_cast<int>(vars.size()) < 3) {
      const int v = 1 + static_cast<int>(rng.below(n));
      bool seen = false;
      for (int u : vars) seen |= (u == v);
      if (!seen) vars.push_back(v);
    }
    std::vector<int> clause;
    for (int v : vars) clause.push_back(rng.uniform() < 0.5 ? -v : v);
    cnf.clauses.push_back(std::move(clause));
  }
  return cnf;
}

// Conjunction of n unit clauses; the only witness is `witness`.
inline Cnf planted_single_witness(int n, std::uint64_t witness) {
  Cnf cnf;
  cnf.num_vars = n;
  for (int v = 1; v <= n; ++v) {
    const bool bit = (witness >> (v - 1)) & 1u;
    cnf.clauses.push_back({bit ? v : -v});
  }
  return cnf;
}

inline formula::FormulaAst contradiction(int n = 1) {
  return formula::parse("x1 & ~x1", n);
}

inline formula::FormulaAst tautology(int n = 1) {
  return formula::parse("x1 | ~x1", n);
}

// Random AST over x1..xn, connective-heavy, for parser/eval property tests.
inline formula::NodePtr random_node(int n, int depth, Rng& rng) {
  using formula::NodeKind;
  if (depth <= 0 || rng.uniform() < 0.25) {
    if (rng.uniform() < 0.1) return formula::make_const(rng.uniform() < 0.5);
    return formula::make_var(1 + static_cast<int>(rng.below(n)));
  }
  switch (rng.below(5)) {
    case 0:
      return formula::make_not(random_node(n, depth - 1, rng));
    case 1:
      return formula::make_binary(NodeKind::And, random_node(n, depth - 1, rng),
                                  random_node(n, depth - 1, rng));
    case 2:
      return formula::make_binary(NodeKind::Or, random_node(n, depth - 1, rng),
                                  random_node(n, depth - 1, rng));
    case 3:
      return formula::make_binary(NodeKind::Implies, random_node(n, depth - 1, rng),
                                  random_node(n, depth - 1, rng));
    default:
      return formula::make_binary(NodeKind::Iff, random_node(n, depth - 1, rng),
                                  random_node(n, depth - 1, rng));
  }
}

inline formula::FormulaAst random_ast(int n, int depth, Rng& rng) {
  return formula::FormulaAst(random_node(n, depth, rng), n);
}

}  // namespace zitter::corpus
