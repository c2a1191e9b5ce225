#pragma once
// Punctuation sentence grammar (sentences, units, adjuncts), its integration
// into a tag-sequence grammar by adjunction, and the depunctuation transform.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "problr/grammar.hpp"
#include "problr/token.hpp"

namespace problr {

struct TextGrammarError : std::runtime_error {
  explicit TextGrammarError(const std::string& msg) : std::runtime_error(msg) {}
};

// Grammar-DSL source of the punctuation sentence grammar; grammars/text.glr
// ships the identical text.
const std::string& text_grammar_source();

// Parsed form of text_grammar_source().
Grammar text_grammar();

struct IntegrateOptions {
  // Adjunction sites; empty means every major appearing as a rule mother in
  // the tag grammar.
  std::vector<std::string> hosts;
  // Categories that may fill a text unit; empty means the tag grammar's
  // start major.
  std::vector<std::string> fillers;
  // Major that fillers plug into (the word-run site of the standalone text
  // grammar).
  std::string fillerSite = "Tc";
  // Standalone word-filler layer, dropped on integration.
  std::vector<std::string> wordMajors = {"WD", "w"};
};

// Merge a tag-sequence grammar with the text grammar: text rules are kept,
// the word-filler layer is replaced by filler rules over `fillers`, and each
// host gets right-adjunction rules for balanced adjuncts plus a preposed
// left-adjunct rule. Host backbone features and the tag grammar's residue
// features pass through adjunction unchanged; a `ta` residue mark blocks
// stacked adjuncts on one host. Throws TextGrammarError on feature or rule
// name collisions and on unknown host/filler majors. An empty `txt` returns
// `pos` unchanged.
Grammar integrate(const Grammar& pos, const Grammar& txt,
                  const IntegrateOptions& opts = {});

struct DepunctResult {
  std::vector<Token> tokens;
  std::map<int, int> indexMap;  // original index -> new index for kept tokens
};

// Remove punctuation-labelled tokens; a sentence-final terminator (pfs, pqu,
// pex) in literally final position is kept. Idempotent.
DepunctResult depunctuate(const std::vector<Token>& tokens);

// The closed punctuation label set.
const std::vector<std::string>& punct_labels();

}  // namespace problr
