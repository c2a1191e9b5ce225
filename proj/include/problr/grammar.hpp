#pragma once
// Feature-based grammar: rule schemata with kleene/optional/disjunction
// daughters over categories that split features into backbone and residue.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "problr/feature.hpp"

namespace problr {

struct GrammarError : std::runtime_error {
  int line, col;
  GrammarError(int line_, int col_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ":" +
                           std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

struct Category {
  int major = -1;              // index into Grammar::majors
  FeatureStructure fs;         // backbone and residue slots mixed
};

struct DaughterTerm {
  enum Mod { None, Star, Opt };
  Mod mod = None;
  std::vector<Category> alts;  // >1 = disjunction
};

struct RuleSchema {
  std::string name;
  Category mother;
  std::vector<DaughterTerm> daughters;
  int line = 0;
  int varCount = 0;            // rule-local variable ids are 0..varCount-1
  std::vector<std::string> varNames;
};

struct Grammar {
  Vocab vocab;
  std::vector<std::string> majors;
  std::map<std::string, int> majorByName;
  std::vector<RuleSchema> rules;
  Category start;
  bool hasStart = false;
  std::set<int> terminals;     // major ids never appearing as mothers

  int majorId(const std::string& name) const {
    auto it = majorByName.find(name);
    return it == majorByName.end() ? -1 : it->second;
  }
  int internMajor(const std::string& name) {
    auto it = majorByName.find(name);
    if (it != majorByName.end()) return it->second;
    majors.push_back(name);
    majorByName[name] = int(majors.size()) - 1;
    return int(majors.size()) - 1;
  }
  bool empty() const { return rules.empty() && !hasStart; }
};

// Parse the grammar DSL. Throws GrammarError with line/column positions.
Grammar load_grammar(const std::string& text);

// Render a category as "Major[f=v, g=V]" (canonical feature order, variables
// by rule-local name when provided).
std::string category_to_string(const Category& c, const Grammar& g);

}  // namespace problr
