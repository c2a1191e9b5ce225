#pragma once
// Exhaustive bottom-up enumeration of analyses, independent of the LR
// machinery (no tables, no stack). Cross-checks the parser on short inputs.

#include "problr/forest.hpp"

namespace problr {

// Every analysis of the token string, memoized per (symbol, span). Tree
// order: rules ascending, split points lexicographic, child combinations
// with the leftmost child slowest. Throws TokenError for an unknown label
// and std::runtime_error for inputs longer than 20 tokens.
UnpackResult oracle_enumerate(const BackboneGrammar& bg,
                              const std::vector<Token>& tokens, size_t cap);

}  // namespace problr
