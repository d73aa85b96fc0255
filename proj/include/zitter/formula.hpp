#pragma once

// Propositional front end.
//
// Text grammar, loosest binding first:
//
//   iff   := impl ('<->' iff)?     right-associative
//   impl  := or  ('->' impl)?      right-associative
//   or    := and ('|' and)*
//   and   := unary ('&' unary)*
//   unary := '~' unary | atom
//   atom  := 'true' | 'false' | x<digits> | '(' iff ')'
//
// Variables are positional x1..x9999; num_vars defaults to the highest index
// mentioned. Assignments are encoded as integers with x1 in the least
// significant bit, an ordering shared with the truth table and the oracle
// construction built on top of it.
//
// brute_force_table is the deliberate exponential-time classical oracle:
// it enumerates all 2^n assignments.

#include <cctype>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zitter/errors.hpp"

namespace zitter::formula {

inline constexpr int kGrammarVarLimit = 9999;
inline constexpr int kDefaultTableCap = 20;

enum class NodeKind { Var, Const, Not, And, Or, Implies, Iff };

struct Node {
  NodeKind kind;
  int var = 0;          // Var
  bool value = false;   // Const
  std::unique_ptr<Node> lhs;
  std::unique_ptr<Node> rhs;  // binary nodes only
};

using NodePtr = std::unique_ptr<Node>;

inline NodePtr make_var(int index) {
  auto n = std::make_unique<Node>();
  n->kind = NodeKind::Var;
  n->var = index;
  return n;
}

inline NodePtr make_const(bool value) {
  auto n = std::make_unique<Node>();
  n->kind = NodeKind::Const;
  n->value = value;
  return n;
}

inline NodePtr make_not(NodePtr operand) {
  auto n = std::make_unique<Node>();
  n->kind = NodeKind::Not;
  n->lhs = std::move(operand);
  return n;
}

inline NodePtr make_binary(NodeKind kind, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_unique<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

inline NodePtr clone(const Node* n) {
  if (!n) return nullptr;
  auto c = std::make_unique<Node>();
  c->kind = n->kind;
  c->var = n->var;
  c->value = n->value;
  c->lhs = clone(n->lhs.get());
  c->rhs = clone(n->rhs.get());
  return c;
}

class FormulaAst {
 public:
  FormulaAst(NodePtr root, int num_vars) : root_(std::move(root)), num_vars_(num_vars) {}
  FormulaAst(const FormulaAst& other)
      : root_(clone(other.root_.get())), num_vars_(other.num_vars_) {}
  FormulaAst& operator=(const FormulaAst& other) {
    root_ = clone(other.root_.get());
    num_vars_ = other.num_vars_;
    return *this;
  }
  FormulaAst(FormulaAst&&) = default;
  FormulaAst& operator=(FormulaAst&&) = default;

  const Node* root() const { return root_.get(); }
  int num_vars() const { return num_vars_; }

 private:
  NodePtr root_;
  int num_vars_;
};

inline bool structurally_equal(const Node* a, const Node* b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind || a->var != b->var || a->value != b->value) return false;
  return structurally_equal(a->lhs.get(), b->lhs.get()) &&
         structurally_equal(a->rhs.get(), b->rhs.get());
}

inline bool structurally_equal(const FormulaAst& a, const FormulaAst& b) {
  return a.num_vars() == b.num_vars() && structurally_equal(a.root(), b.root());
}

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, int var_cap) : text_(text), var_cap_(var_cap) {}

  NodePtr parse_all(int& max_var) {
    NodePtr root = parse_iff();
    skip_ws();
    if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
    max_var = max_var_;
    return root;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  NodePtr parse_iff() {
    NodePtr lhs = parse_impl();
    if (eat("<->")) return make_binary(NodeKind::Iff, std::move(lhs), parse_iff());
    return lhs;
  }

  NodePtr parse_impl() {
    NodePtr lhs = parse_or();
    if (eat("->")) return make_binary(NodeKind::Implies, std::move(lhs), parse_impl());
    return lhs;
  }

  NodePtr parse_or() {
    NodePtr lhs = parse_and();
    while (eat("|")) lhs = make_binary(NodeKind::Or, std::move(lhs), parse_and());
    return lhs;
  }

  NodePtr parse_and() {
    NodePtr lhs = parse_unary();
    while (eat("&")) lhs = make_binary(NodeKind::And, std::move(lhs), parse_unary());
    return lhs;
  }

  NodePtr parse_unary() {
    if (eat("~")) return make_not(parse_unary());
    return parse_atom();
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
    if (eat("(")) {
      NodePtr inner = parse_iff();
      if (!eat(")")) throw SyntaxError("expected ')'", pos_);
      return inner;
    }
    if (match_word("true")) return make_const(true);
    if (match_word("false")) return make_const(false);
    if (text_[pos_] == 'x') return parse_var();
    throw SyntaxError("expected a variable, constant, '~' or '('", pos_);
  }

  bool match_word(std::string_view word) {
    skip_ws();
    if (text_.substr(pos_, word.size()) != word) return false;
    const std::size_t end = pos_ + word.size();
    if (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) return false;
    pos_ = end;
    return true;
  }

  NodePtr parse_var() {
    const std::size_t start = pos_;
    ++pos_;  // 'x'
    std::size_t digits = 0;
    long index = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      index = index * 10 + (text_[pos_] - '0');
      if (index > 10 * kGrammarVarLimit) break;  // avoid overflow on absurd input
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw SyntaxError("expected a variable index after 'x'", start);
    if (index < 1) throw SyntaxError("variable indices start at x1", start);
    if (index > var_cap_)
      throw VariableLimit("variable index x" + std::to_string(index) +
                          " exceeds the cap of " + std::to_string(var_cap_));
    max_var_ = std::max(max_var_, static_cast<int>(index));
    return make_var(static_cast<int>(index));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int var_cap_;
  int max_var_ = 0;
};

}  // namespace detail

// num_vars_override = 0 takes the highest index mentioned.
inline FormulaAst parse(std::string_view text, int num_vars_override = 0,
                        int var_cap = kGrammarVarLimit) {
  detail::Parser p(text, var_cap);
  int max_var = 0;
  NodePtr root = p.parse_all(max_var);
  int num_vars = num_vars_override > 0 ? num_vars_override : max_var;
  if (num_vars_override > 0 && max_var > num_vars_override)
    throw VariableLimit("formula mentions x" + std::to_string(max_var) +
                        " beyond the declared " + std::to_string(num_vars_override));
  return FormulaAst(std::move(root), num_vars);
}

namespace detail {

inline bool eval_node(const Node* n, const std::vector<bool>& assignment) {
  switch (n->kind) {
    case NodeKind::Var:
      return assignment[n->var - 1];
    case NodeKind::Const:
      return n->value;
    case NodeKind::Not:
      return !eval_node(n->lhs.get(), assignment);
    case NodeKind::And:
      return eval_node(n->lhs.get(), assignment) && eval_node(n->rhs.get(), assignment);
    case NodeKind::Or:
      return eval_node(n->lhs.get(), assignment) || eval_node(n->rhs.get(), assignment);
    case NodeKind::Implies:
      return !eval_node(n->lhs.get(), assignment) || eval_node(n->rhs.get(), assignment);
    case NodeKind::Iff:
      return eval_node(n->lhs.get(), assignment) == eval_node(n->rhs.get(), assignment);
  }
  return false;
}

}  // namespace detail

inline bool eval(const FormulaAst& ast, const std::vector<bool>& assignment) {
  if (static_cast<int>(assignment.size()) != ast.num_vars())
    throw ArityMismatch("eval: assignment length " + std::to_string(assignment.size()) +
                        " != num_vars " + std::to_string(ast.num_vars()));
  return detail::eval_node(ast.root(), assignment);
}

// bits[x] = value at the assignment encoded by x (x1 = least significant bit).
struct TruthTable {
  int n = 0;
  std::vector<bool> bits;

  std::uint64_t satisfying_count() const {
    std::uint64_t c = 0;
    for (bool b : bits) c += b;
    return c;
  }

  std::vector<std::uint32_t> satisfying_indices() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t x = 0; x < bits.size(); ++x)
      if (bits[x]) out.push_back(x);
    return out;
  }
};

inline TruthTable brute_force_table(const FormulaAst& ast, int cap = kDefaultTableCap) {
  if (ast.num_vars() > cap)
    throw VariableLimit("brute_force_table: " + std::to_string(ast.num_vars()) +
                        " variables exceed the cap of " + std::to_string(cap));
  const int n = ast.num_vars();
  TruthTable table;
  table.n = n;
  table.bits.resize(std::uint64_t{1} << n);
  std::vector<bool> assignment(n);
  for (std::uint64_t x = 0; x < table.bits.size(); ++x) {
    for (int j = 0; j < n; ++j) assignment[j] = (x >> j) & 1u;
    table.bits[x] = detail::eval_node(ast.root(), assignment);
  }
  return table;
}

namespace detail {

inline int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Iff: return 1;
    case NodeKind::Implies: return 2;
    case NodeKind::Or: return 3;
    case NodeKind::And: return 4;
    case NodeKind::Not: return 5;
    default: return 6;
  }
}

inline void render(const Node* n, std::ostringstream& out, int parent_prec) {
  const int prec = precedence(n->kind);
  const bool parens = prec < parent_prec;
  if (parens) out << '(';
  switch (n->kind) {
    case NodeKind::Var:
      out << 'x' << n->var;
      break;
    case NodeKind::Const:
      out << (n->value ? "true" : "false");
      break;
    case NodeKind::Not:
      out << '~';
      render(n->lhs.get(), out, prec);
      break;
    case NodeKind::And:
    case NodeKind::Or: {
      // left-associative: the right child needs parens at equal precedence
      render(n->lhs.get(), out, prec);
      out << (n->kind == NodeKind::And ? " & " : " | ");
      render(n->rhs.get(), out, prec + 1);
      break;
    }
    case NodeKind::Implies:
    case NodeKind::Iff: {
      // right-associative: the left child needs parens at equal precedence
      render(n->lhs.get(), out, prec + 1);
      out << (n->kind == NodeKind::Implies ? " -> " : " <-> ");
      render(n->rhs.get(), out, prec);
      break;
    }
  }
  if (parens) out << ')';
}

}  // namespace detail

inline std::string to_text(const FormulaAst& ast) {
  std::ostringstream out;
  detail::render(ast.root(), out, 0);
  return out.str();
}

// DIMACS CNF: optional 'c' comment lines, a 'p cnf <n> <m>' header, clauses
// as signed literals each terminated by 0. num_vars comes from the header.
inline FormulaAst load_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int n = -1;
  long m = -1;
  // header
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream hdr(line);
    std::string p, cnf;
    if (!(hdr >> p >> cnf >> n >> m) || p != "p" || cnf != "cnf" || n < 0 || m < 0) {
      throw FormatError("load_dimacs: bad header line: '" + line + "'");
    }
    std::string extra;
    if (hdr >> extra) throw FormatError("load_dimacs: trailing tokens in header");
    break;
  }
  if (n < 0) throw FormatError("load_dimacs: missing 'p cnf' header");

  std::vector<NodePtr> clauses;
  std::vector<int> current;
  std::string tok;
  while (in >> tok) {
    if (tok == "c") {  // comment line in the clause section
      std::getline(in, line);
      continue;
    }
    long lit = 0;
    try {
      std::size_t used = 0;
      lit = std::stol(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw FormatError("load_dimacs: not a literal: '" + tok + "'");
    }
    if (lit == 0) {
      NodePtr clause;
      if (current.empty()) {
        clause = make_const(false);  // empty clause is unsatisfiable
      } else {
        for (int l : current) {
          NodePtr atom = make_var(std::abs(l));
          if (l < 0) atom = make_not(std::move(atom));
          clause = clause ? make_binary(NodeKind::Or, std::move(clause), std::move(atom))
                          : std::move(atom);
        }
      }
      clauses.push_back(std::move(clause));
      current.clear();
      continue;
    }
    if (std::abs(lit) > n)
      throw FormatError("load_dimacs: literal " + std::to_string(lit) +
                        " outside the declared " + std::to_string(n) + " variables");
    current.push_back(static_cast<int>(lit));
  }
  if (!current.empty()) throw FormatError("load_dimacs: clause missing its 0 terminator");

  NodePtr root;
  if (clauses.empty()) {
    root = make_const(true);  // empty conjunction
  } else {
    // balanced fold keeps the tree shallow for large files
    while (clauses.size() > 1) {
      std::vector<NodePtr> next;
      for (std::size_t i = 0; i + 1 < clauses.size(); i += 2)
        next.push_back(
            make_binary(NodeKind::And, std::move(clauses[i]), std::move(clauses[i + 1])));
      if (clauses.size() % 2 == 1) next.push_back(std::move(clauses.back()));
      clauses = std::move(next);
    }
    root = std::move(clauses.front());
  }
  return FormulaAst(std::move(root), n);
}

}  // namespace zitter::formula
