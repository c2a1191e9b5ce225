#pragma once
// Packed parse forest: nodes keyed by (symbol, span, canonical residue) so
// that every pack of a node exports the same feature structure and the
// memoized product-sum count is exact.

#include <boost/multiprecision/cpp_int.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "problr/backbone.hpp"
#include "problr/token.hpp"

namespace problr {

using BigInt = boost::multiprecision::cpp_int;

struct Pack {
  int rule = -1;
  std::vector<int> children;  // forest node ids, left to right
  bool operator==(const Pack& o) const {
    return rule == o.rule && children == o.children;
  }
  bool operator<(const Pack& o) const {
    return rule != o.rule ? rule < o.rule : children < o.children;
  }
};

struct ForestNode {
  int sym = -1;
  int start = 0, end = 0;
  FeatureStructure residue;  // canonical exported structure
  std::vector<Pack> packs;   // empty for leaves
  bool leaf = false;
};

enum class ParseStatus { Ok, NoParse, Timeout };

struct ParseStats {
  size_t shifts = 0;
  size_t reduces = 0;        // reduce path applications attempted
  size_t forks = 0;          // extra actions pursued beyond one per (node, lookahead)
  size_t packs = 0;          // packs merged into an already-existing node
  size_t gssNodes = 0;
  size_t gssLinks = 0;
  size_t unifyFailures = 0;  // reduce paths pruned by residue clash
  size_t tokens = 0;
  double seconds = 0.0;
};

struct ParseForest {
  ParseStatus status = ParseStatus::NoParse;
  std::vector<ForestNode> nodes;
  std::vector<int> roots;          // full-span start-symbol nodes
  std::vector<Token> tokens;
  std::vector<int> tokenSyms;
  int rightmostShift = -1;         // furthest token index shifted over
  ParseStats stats;
};

struct CountResult {
  BigInt count = 0;
  bool exceeded = false;  // true when a limit was given and count > limit
};

// Exact analysis count via memoized product-sum over the forest DAG.
// A no-parse or timeout forest counts 0.
CountResult count_analyses(const ParseForest& forest,
                           const BigInt* limit = nullptr);

// Derivation tree over the backbone. Shared subtrees keep unpacking linear
// in output size.
struct DerivTree;
using DerivPtr = std::shared_ptr<const DerivTree>;
struct DerivTree {
  int rule = -1;  // -1 for leaves
  int sym = -1;
  int start = 0, end = 0;
  std::vector<DerivPtr> children;
  FeatureStructure exportFS;
};

struct UnpackResult {
  std::vector<DerivPtr> trees;
  bool truncated = false;
};

// All derivation trees in deterministic order (roots in order, packs in
// stored order, child combinations lexicographic). Stops at cap.
UnpackResult unpack_all(const ParseForest& forest, size_t cap);

// Compact deterministic rendering "(sym@start-end:rule child ...)".
std::string tree_to_string(const DerivTree& t, const BackboneGrammar& bg);

// Schema-level rendering: kleene auxiliary nodes spliced into their host,
// nodes labelled by source-rule name.
std::string schema_tree_to_string(const DerivTree& t, const BackboneGrammar& bg);

// Deduplicated constituent spans of the schema-level tree (auxiliary nodes
// spliced away, leaves excluded).
std::vector<std::pair<int, int>> tree_brackets(const DerivTree& t,
                                               const BackboneGrammar& bg);

// Deterministic rendering of the whole forest, for goldens and determinism
// checks.
std::string dump_forest(const ParseForest& forest, const BackboneGrammar& bg);

}  // namespace problr
