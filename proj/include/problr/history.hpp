#pragma once
// LR parse histories: the shift/reduce/accept event sequence of one
// derivation, plus event counting for supervised training. Every event is a
// (state, lookahead, action) transition; derivation probability is the
// product over its events.

#include <map>
#include <tuple>

#include "problr/forest.hpp"
#include "problr/lalr.hpp"

namespace problr {

struct TransitionEvent {
  int state = -1;
  int lookahead = -1;  // terminal symbol id, or the grammar's EOT
  Action action;

  bool operator==(const TransitionEvent& o) const {
    return state == o.state && lookahead == o.lookahead && action == o.action;
  }
  bool operator<(const TransitionEvent& o) const {
    if (state != o.state) return state < o.state;
    if (lookahead != o.lookahead) return lookahead < o.lookahead;
    return action < o.action;
  }
};

// Histories compare lexicographically; Shift orders before Reduce, so at the
// first divergence of two derivations the shift-preferring one comes first.
using ParseHistory = std::vector<TransitionEvent>;

struct HistoryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The unique event sequence an LR parse of the tree performs: one shift per
// leaf, one reduce per internal node with the terminal after that node (or
// EOT) as lookahead, one final accept. The tree must span the whole input
// from position 0. Throws HistoryError naming the first impossible event.
ParseHistory extract_history(const BackboneGrammar& bg, const LRTables& tables,
                             const DerivTree& tree);

struct TransitionCounts {
  std::map<TransitionEvent, long long> counts;
  std::map<std::pair<int, int>, long long> contextTotals;
};

// Pure event counting; merge_counts(train(A), train(B)) = train(A ++ B).
TransitionCounts train(const std::vector<ParseHistory>& histories);
void merge_counts(TransitionCounts& into, const TransitionCounts& from);

// Deterministic rendering "s12 la=pco reduce r7" per line, for diagnostics
// and golden tests.
std::string history_to_string(const ParseHistory& h, const BackboneGrammar& bg);

}  // namespace problr
