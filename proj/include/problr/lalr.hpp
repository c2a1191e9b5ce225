#pragma once
// LALR(1) tables over the backbone via lookahead propagation on the LR(0)
// automaton. Conflict cells keep their full action sets: the GLR engine
// explores all of them and the probability model distributes mass over them.

#include <string>
#include <vector>

#include "problr/backbone.hpp"

namespace problr {

struct TableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LRItem {
  int rule = -1;  // >= nRules means augmented rule (index - nRules)
  int dot = 0;
  bool operator==(const LRItem& o) const { return rule == o.rule && dot == o.dot; }
  bool operator<(const LRItem& o) const {
    return rule != o.rule ? rule < o.rule : dot < o.dot;
  }
};

struct LRState {
  std::vector<LRItem> kernel;   // sorted
  std::vector<LRItem> closure;  // non-kernel items, sorted
  std::vector<std::pair<int, int>> transitions;  // symbol -> state, sorted
};

struct Action {
  enum Kind : uint8_t { Shift, Reduce, Accept };
  Kind kind = Shift;
  int arg = 0;  // target state or rule id
  bool operator==(const Action& o) const { return kind == o.kind && arg == o.arg; }
  bool operator<(const Action& o) const {
    return kind != o.kind ? kind < o.kind : arg < o.arg;
  }
};

struct LRTables {
  std::vector<LRState> states;
  // per state, sorted by symbol id
  std::vector<std::vector<std::pair<int, std::vector<Action>>>> actions;
  std::vector<std::vector<std::pair<int, int>>> gotos;
  std::vector<int> augmentedStart;  // start symbol of each augmented rule
  size_t conflictCells = 0;

  const std::vector<Action>* actionsFor(int state, int term) const {
    auto& row = actions[size_t(state)];
    auto it = std::lower_bound(row.begin(), row.end(), term,
                               [](auto& p, int t) { return p.first < t; });
    return it != row.end() && it->first == term ? &it->second : nullptr;
  }
  int gotoFor(int state, int sym) const {
    auto& row = gotos[size_t(state)];
    auto it = std::lower_bound(row.begin(), row.end(), sym,
                               [](auto& p, int t) { return p.first < t; });
    return it != row.end() && it->first == sym ? it->second : -1;
  }
};

// FIRST sets per symbol (terminal lists, sorted). The backbone is
// epsilon-free, so no nullability bookkeeping is needed.
std::vector<std::vector<int>> first_sets(const BackboneGrammar& bg);

// Throws TableError("no viable sentences...") when the start symbol derives
// no strings (no productive start instantiation survived compilation).
LRTables build_tables(const BackboneGrammar& bg);

// Deterministic text rendering for golden tests and the artifact file.
std::string dump_tables(const BackboneGrammar& bg, const LRTables& t);

}  // namespace problr
