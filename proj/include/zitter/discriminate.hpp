#pragma once

// State identification for the 8-state query model.
//
// Phase 1 walks a fixed reduction tree: query the smallest-index candidate
// whose parity class still has >= 2 candidates, YES eliminating every
// same-parity state except the query, NO eliminating the query alone. After
// at most 6 tests the candidates form one odd plus one even state.
//
// Phase 2 alternates within-pair queries odd, even, odd, ... on fresh ions.
// A NO reply certifies the other member (the true state never answers NO to
// its own query), and arrives with probability 3/4 per informative test; the
// survival probability decays geometrically but never reaches zero, so there
// is no upper bound on the number of tests.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "zitter/errors.hpp"
#include "zitter/querymodel.hpp"
#include "zitter/rng.hpp"

namespace zitter::discriminate {

using query::Outcome;
using query::OutcomeSampler;
using query::QueryModel;

// Candidate subset of {1..8} consistent with all observed outcomes.
class KnowledgeSet {
 public:
  static KnowledgeSet full() {
    KnowledgeSet ks;
    ks.mask_ = 0x1FE;  // bits 1..8
    return ks;
  }
  static KnowledgeSet of(std::initializer_list<int> states) {
    KnowledgeSet ks;
    for (int s : states) ks.mask_ |= (1u << s);
    return ks;
  }

  bool contains(int s) const { return (mask_ >> s) & 1u; }
  int size() const { return __builtin_popcount(mask_); }
  bool empty() const { return mask_ == 0; }

  std::vector<int> candidates() const {
    std::vector<int> out;
    for (int s = 1; s <= 8; ++s)
      if (contains(s)) out.push_back(s);
    return out;
  }

  // One odd plus one even state: the residual alternative of phase 1.
  bool is_cross_pair() const {
    if (size() != 2) return false;
    const auto c = candidates();
    return (c[0] + c[1]) % 2 == 1;
  }

  bool operator==(const KnowledgeSet& other) const = default;

  void remove(int s) { mask_ &= ~(1u << s); }

 private:
  std::uint32_t mask_ = 0;
};

// YES eliminates every same-parity state other than the query (their YES
// probability is zero); NO eliminates the query alone (its NO probability is
// zero). Cross-filter candidates are compatible with either reply.
inline KnowledgeSet update_knowledge(const KnowledgeSet& ks, int query, Outcome outcome) {
  if (query < 1 || query > 8) throw IndexOutOfRange("update_knowledge: query out of range");
  KnowledgeSet next = ks;
  if (outcome == Outcome::Yes) {
    for (int s = query % 2 == 1 ? 1 : 2; s <= 8; s += 2)
      if (s != query) next.remove(s);
  } else {
    next.remove(query);
  }
  if (next.empty())
    throw Contradiction("update_knowledge: outcome impossible under the knowledge set");
  return next;
}

// Smallest-index candidate whose parity class still has >= 2 candidates.
inline int reduction_query(const KnowledgeSet& ks) {
  std::array<int, 2> class_count{0, 0};
  for (int s = 1; s <= 8; ++s)
    if (ks.contains(s)) ++class_count[s % 2];
  for (int s = 1; s <= 8; ++s)
    if (ks.contains(s) && class_count[s % 2] >= 2) return s;
  throw Error("reduction_query: no admissible query (already a cross pair?)");
}

struct ReductionTree {
  struct Node {
    int query = 0;                 // internal nodes
    std::pair<int, int> leaf{0, 0};  // {odd, even}, leaves only
    std::unique_ptr<Node> yes;
    std::unique_ptr<Node> no;
    bool is_leaf() const { return !yes; }
  };

  std::unique_ptr<Node> root;

  int depth() const { return depth_of(root.get()); }

  std::vector<std::pair<int, int>> leaves() const {
    std::vector<std::pair<int, int>> out;
    collect(root.get(), out);
    return out;
  }

 private:
  static int depth_of(const Node* n) {
    if (!n || n->is_leaf()) return 0;
    return 1 + std::max(depth_of(n->yes.get()), depth_of(n->no.get()));
  }
  static void collect(const Node* n, std::vector<std::pair<int, int>>& out) {
    if (!n) return;
    if (n->is_leaf()) {
      out.push_back(n->leaf);
      return;
    }
    collect(n->yes.get(), out);
    collect(n->no.get(), out);
  }
};

namespace detail {

inline std::unique_ptr<ReductionTree::Node> grow(const KnowledgeSet& ks) {
  auto node = std::make_unique<ReductionTree::Node>();
  if (ks.is_cross_pair()) {
    const auto c = ks.candidates();
    const int odd = c[0] % 2 == 1 ? c[0] : c[1];
    const int even = c[0] % 2 == 0 ? c[0] : c[1];
    node->leaf = {odd, even};
    return node;
  }
  node->query = reduction_query(ks);
  node->yes = grow(update_knowledge(ks, node->query, Outcome::Yes));
  node->no = grow(update_knowledge(ks, node->query, Outcome::No));
  return node;
}

}  // namespace detail

inline ReductionTree build_reduction_tree() {
  ReductionTree tree;
  tree.root = detail::grow(KnowledgeSet::full());
  return tree;
}

struct ResolveResult {
  int identified = 0;
  int tests_used = 0;
  // Tests that queried the non-true member; each certifies with p = 3/4.
  int informative_tests = 0;
};

// Alternates queries odd, even, odd, ... on fresh ions until a NO certifies
// the other pair member. max_tests = 0 means unlimited.
inline ResolveResult resolve_pair(const OutcomeSampler& sampler, int odd, int even,
                                  int true_state, Rng& rng, int max_tests = 0) {
  if (true_state != odd && true_state != even)
    throw IndexOutOfRange("resolve_pair: true_state not in the pair");
  KnowledgeSet ks = KnowledgeSet::of({odd, even});
  ResolveResult res;
  while (true) {
    const int q = res.tests_used % 2 == 0 ? odd : even;
    const Outcome outcome = sampler.sample(true_state, q, rng);
    ++res.tests_used;
    if (q != true_state) ++res.informative_tests;
    ks = update_knowledge(ks, q, outcome);
    if (ks.size() == 1) {
      res.identified = ks.candidates().front();
      return res;
    }
    if (max_tests > 0 && res.tests_used >= max_tests)
      throw Unresolved("resolve_pair: test budget exhausted", odd, even, res.tests_used);
  }
}

inline ResolveResult resolve_pair(const QueryModel& model, int odd, int even, int true_state,
                                  Rng& rng, int max_tests = 0) {
  return resolve_pair(OutcomeSampler(model), odd, even, true_state, rng, max_tests);
}

struct Transcript {
  struct Step {
    int query;
    Outcome outcome;
    KnowledgeSet knowledge;
  };
  std::vector<Step> steps;
  int verdict = 0;
  int tests_used = 0;
  int phase1_tests = 0;
  int resolution_tests = 0;
  int resolution_rounds = 0;  // informative tests in phase 2
};

inline Transcript identify(const OutcomeSampler& sampler, int true_state, Rng& rng,
                           int max_tests = 0) {
  if (sampler.model().num_states != 8)
    throw UnsupportedSize("identify: the reduction tree is defined for the 8-state model");
  if (true_state < 1 || true_state > 8)
    throw IndexOutOfRange("identify: true_state out of range");

  Transcript t;
  KnowledgeSet ks = KnowledgeSet::full();
  while (!ks.is_cross_pair()) {
    const int q = reduction_query(ks);
    const Outcome outcome = sampler.sample(true_state, q, rng);
    ks = update_knowledge(ks, q, outcome);
    t.steps.push_back({q, outcome, ks});
    ++t.phase1_tests;
  }

  const auto pair = ks.candidates();
  const int odd = pair[0] % 2 == 1 ? pair[0] : pair[1];
  const int even = pair[0] % 2 == 0 ? pair[0] : pair[1];
  while (true) {
    const int q = t.resolution_tests % 2 == 0 ? odd : even;
    const Outcome outcome = sampler.sample(true_state, q, rng);
    ++t.resolution_tests;
    if (q != true_state) ++t.resolution_rounds;
    ks = update_knowledge(ks, q, outcome);
    t.steps.push_back({q, outcome, ks});
    if (ks.size() == 1) break;
    if (max_tests > 0 && t.phase1_tests + t.resolution_tests >= max_tests)
      throw Unresolved("identify: test budget exhausted", odd, even,
                       t.phase1_tests + t.resolution_tests);
  }
  t.verdict = ks.candidates().front();
  t.tests_used = t.phase1_tests + t.resolution_tests;
  return t;
}

inline Transcript identify(const QueryModel& model, int true_state, Rng& rng,
                           int max_tests = 0) {
  return identify(OutcomeSampler(model), true_state, rng, max_tests);
}

struct TailStatistics {
  std::uint64_t runs = 0;
  std::uint64_t resolved = 0;
  std::uint64_t unresolved = 0;
  std::uint64_t correct = 0;
  std::vector<std::uint64_t> histogram;  // histogram[t] = runs with tests_used == t
  double verdict_accuracy = 0.0;
  // Pooled per-round survival fraction of the resolution phase; 1/4 in law.
  double tail_ratio = 0.0;
  int max_tests_used = 0;
  int max_resolution_rounds = 0;
};

inline TailStatistics tail_statistics(const QueryModel& model, int true_state,
                                      std::uint64_t runs, Rng& rng, int max_tests = 0) {
  if (runs < 1) throw Error("tail_statistics: runs must be >= 1");
  const OutcomeSampler sampler(model);
  TailStatistics stats;
  stats.runs = runs;
  std::uint64_t informative_total = 0;
  for (std::uint64_t r = 0; r < runs; ++r) {
    try {
      const Transcript t = identify(sampler, true_state, rng, max_tests);
      ++stats.resolved;
      if (t.verdict == true_state) ++stats.correct;
      if (static_cast<std::size_t>(t.tests_used) >= stats.histogram.size())
        stats.histogram.resize(t.tests_used + 1, 0);
      ++stats.histogram[t.tests_used];
      informative_total += t.resolution_rounds;
      stats.max_tests_used = std::max(stats.max_tests_used, t.tests_used);
      stats.max_resolution_rounds = std::max(stats.max_resolution_rounds, t.resolution_rounds);
    } catch (const Unresolved&) {
      ++stats.unresolved;
    }
  }
  stats.verdict_accuracy =
      stats.resolved == 0 ? 0.0 : static_cast<double>(stats.correct) / stats.resolved;
  stats.tail_ratio = informative_total == 0
                         ? 0.0
                         : 1.0 - static_cast<double>(stats.resolved) / informative_total;
  return stats;
}

}  // namespace zitter::discriminate
