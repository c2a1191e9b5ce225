#pragma once
// Compiles a feature grammar into an epsilon-free context-free backbone:
// kleene/optional/disjunction expanded, backbone features instantiated into
// atomic symbols, residue constraints attached per rule.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "problr/grammar.hpp"

namespace problr {

struct BackboneSymbol {
  std::string name;       // e.g. "Tu[sc=-,da=+]" or terminal label "pco"
  int major = -1;         // index into BackboneGrammar::majorNames; -1 for EOT
  bool terminal = false;
  FeatureStructure fs;    // total assignment of the major's backbone features
};

struct BackboneRule {
  int id = -1;
  int lhs = -1;
  std::vector<int> rhs;
  std::vector<FeatureStructure> rhsResidue;  // one per rhs position
  FeatureStructure lhsResidue;
  std::string sourceRule;  // schema name, or the rendered term for aux rules
  bool aux = false;
  int varCount = 0;        // residue variable ids are 0..varCount-1
};

struct BackboneGrammar {
  Vocab vocab;
  std::vector<std::string> majorNames;
  std::vector<BackboneSymbol> symbols;
  std::map<std::string, int> symByName;
  std::vector<BackboneRule> rules;
  std::vector<std::vector<int>> rulesByLhs;  // indexed by symbol id
  std::vector<int> startSymbols;
  int eot = -1;

  int symId(const std::string& name) const {
    auto it = symByName.find(name);
    return it == symByName.end() ? -1 : it->second;
  }
  bool isTerminal(int sym) const { return symbols[size_t(sym)].terminal; }
};

// Throws GrammarError on: expansion above ruleCap (naming the offending
// schema), a modifier combination expanding to an empty rule, or a unary
// rule cycle (which would make analysis counts infinite).
BackboneGrammar compile_backbone(const Grammar& g, int ruleCap = 50000);

// Deterministic text rendering of the whole backbone (for golden tests and
// the compiled-artifact file).
std::string dump_backbone(const BackboneGrammar& bg);

// Unifies the rule's daughter constraints with the structures exported by
// the daughters (canonical, variables renamed apart) and returns the
// canonical mother structure; nullopt on clash. children.size() must equal
// rule.rhs.size().
std::optional<FeatureStructure> apply_rule_residue(
    const BackboneRule& rule,
    const std::vector<const FeatureStructure*>& children);

}  // namespace problr
