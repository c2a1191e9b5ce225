#pragma once
// Graph-structured-stack GLR parser over the LALR tables. Conflicts fork the
// stack, stacks merging on equal (state, position) share structure, and
// completed constituents pack into the forest. Residue unification runs at
// every reduce; a clash prunes that path (probability zero).

#include "problr/forest.hpp"
#include "problr/lalr.hpp"

namespace problr {

struct ParseOptions {
  double timeoutSeconds = 30.0;
  // When set, count_analyses reports exceeded=true above this bound.
  std::optional<BigInt> maxParsesToCount;
  // Constituent spans every analysis must be consistent with (no crossing).
  std::vector<std::pair<int, int>> constraintBrackets;
};

struct ConstraintError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Throws TokenError for a label that is not a backbone terminal (message
// names the token index); ConstraintError for ill-nested constraint
// brackets. Timeout is checked at token boundaries; on expiry the forest
// comes back empty with status Timeout.
ParseForest parse(const BackboneGrammar& bg, const LRTables& tables,
                  const std::vector<Token>& tokens,
                  const ParseOptions& opts = {});

// parse() with constraint brackets: only analyses whose constituents nest
// with every given span survive. brackets = {} yields the identical forest.
ParseForest constrained_parse(const BackboneGrammar& bg, const LRTables& tables,
                              const std::vector<Token>& tokens,
                              const std::vector<std::pair<int, int>>& brackets,
                              const ParseOptions& opts = {});

}  // namespace problr
