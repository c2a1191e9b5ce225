#pragma once
// Good-Turing smoothed transition probabilities over the LALR action table:
// training-count smoothing, derivation scoring, versioned model files, and
// exact n-best extraction from packed forests.

#include <optional>

#include "problr/history.hpp"

namespace problr {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProbModel {
  // seen events: raw count and smoothed log-probability
  std::map<TransitionEvent, std::pair<long long, double>> seen;
  // per (state, lookahead) context with >= 1 unseen action: log-probability
  // of each unseen action in that context
  std::map<std::pair<int, int>, double> unseenLog;
  // global count-of-counts over every action cell of the table, r >= 0
  std::map<long long, long long> countOfCounts;
  std::string method = "good-turing-global";
  uint64_t grammarHash = 0;
  uint64_t tableHash = 0;

  // nullopt when the event's context is unknown to the model (the action
  // table has no such cell, or the cell was fully seen and lacks the action).
  std::optional<double> logProbOf(const TransitionEvent& e) const {
    auto it = seen.find(e);
    if (it != seen.end()) return it->second.second;
    auto uit = unseenLog.find({e.state, e.lookahead});
    if (uit != unseenLog.end()) return uit->second;
    return std::nullopt;
  }
};

// Adjusted count r* = (r+1)N_{r+1}/N_r with count-of-counts pooled over the
// whole table; plain r where N_{r+1}=0; unseen actions get r*(0) (0.5 when
// no singletons exist, so unseen mass never collapses to zero); per-context
// normalization; an entirely unseen context is uniform over its actions.
ProbModel smooth(const TransitionCounts& counts, const BackboneGrammar& bg,
                 const LRTables& tables);

// Sum of event log-probabilities. Throws ModelError on an event whose
// context the model does not know.
double score(const ParseHistory& h, const ProbModel& m);

// Largest absolute deviation of any (state, lookahead) context mass from 1;
// the model's structural invariant keeps this within 1e-9.
double max_normalization_error(const ProbModel& m, const LRTables& tables);

// Versioned deterministic text round-trip.
std::string save_model(const ProbModel& m);
ProbModel load_model(const std::string& text);

struct RankedAnalysis {
  DerivPtr tree;
  ParseHistory history;
  double logProb = 0.0;
  int rank = 0;  // 1-based
};

// The n most probable derivations, ordered by (logProb descending, event
// sequence ascending), computed by per-(forest node, entry state) best-n
// merging; agrees exactly with enumerate-score-sort. Empty for forests
// without roots. Throws std::invalid_argument for n < 1.
std::vector<RankedAnalysis> nbest(const BackboneGrammar& bg,
                                  const LRTables& tables, const ProbModel& m,
                                  const ParseForest& f, int n);

}  // namespace problr
