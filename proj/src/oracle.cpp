#include "problr/oracle.hpp"

#include <map>
#include <tuple>

namespace problr {
namespace {

struct Enumerator {
  const BackboneGrammar& bg;
  const std::vector<int>& termSyms;
  std::map<std::tuple<int, int, int>, std::vector<DerivPtr>> memo{};

  // Well-founded: spans shrink except across unary rules, and unary chains
  // are acyclic by construction.
  const std::vector<DerivPtr>& derive(int sym, int i, int j) {
    auto key = std::make_tuple(sym, i, j);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    std::vector<DerivPtr> out;
    if (bg.isTerminal(sym)) {
      if (j == i + 1 && termSyms[size_t(i)] == sym) {
        auto leaf = std::make_shared<DerivTree>();
        leaf->rule = -1;
        leaf->sym = sym;
        leaf->start = i;
        leaf->end = j;
        out.push_back(std::move(leaf));
      }
    } else {
      for (int rid : bg.rulesByLhs[size_t(sym)]) {
        const BackboneRule& rule = bg.rules[size_t(rid)];
        int m = int(rule.rhs.size());
        if (j - i < m) continue;
        std::vector<int> cuts(size_t(m) + 1);
        cuts[0] = i;
        cuts[size_t(m)] = j;
        auto splits = [&](auto&& self, int d) -> void {
          if (d == m - 1) {
            combine(rule, cuts, out);
            return;
          }
          // child d may end anywhere leaving >= 1 token per later child
          for (int c = cuts[size_t(d)] + 1; c <= j - (m - 1 - d); ++c) {
            cuts[size_t(d) + 1] = c;
            self(self, d + 1);
          }
        };
        splits(splits, 0);
      }
    }
    return memo.emplace(key, std::move(out)).first->second;
  }

  void combine(const BackboneRule& rule, const std::vector<int>& cuts,
               std::vector<DerivPtr>& out) {
    int m = int(rule.rhs.size());
    std::vector<const std::vector<DerivPtr>*> lists(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
      lists[size_t(k)] =
          &derive(rule.rhs[size_t(k)], cuts[size_t(k)], cuts[size_t(k) + 1]);
      if (lists[size_t(k)]->empty()) return;
    }
    std::vector<size_t> idx(size_t(m), 0);
    for (;;) {
      std::vector<DerivPtr> kids(static_cast<size_t>(m));
      std::vector<const FeatureStructure*> childFS(static_cast<size_t>(m));
      for (int k = 0; k < m; ++k) {
        kids[size_t(k)] = (*lists[size_t(k)])[idx[size_t(k)]];
        childFS[size_t(k)] = &kids[size_t(k)]->exportFS;
      }
      if (auto mother = apply_rule_residue(rule, childFS)) {
        auto t = std::make_shared<DerivTree>();
        t->rule = rule.id;
        t->sym = rule.lhs;
        t->start = cuts.front();
        t->end = cuts.back();
        t->children = std::move(kids);
        t->exportFS = std::move(*mother);
        out.push_back(std::move(t));
      }
      // odometer, leftmost slowest
      int k = m - 1;
      while (k >= 0 && ++idx[size_t(k)] == lists[size_t(k)]->size()) {
        idx[size_t(k)] = 0;
        --k;
      }
      if (k < 0) break;
    }
  }
};

}  // namespace

UnpackResult oracle_enumerate(const BackboneGrammar& bg,
                              const std::vector<Token>& tokens, size_t cap) {
  if (tokens.size() > 20)
    throw std::runtime_error("enumeration limited to 20 tokens, got " +
                             std::to_string(tokens.size()));
  int n = int(tokens.size());
  std::vector<int> termSyms(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    int s = bg.symId(tokens[size_t(i)].label);
    if (s < 0 || s == bg.eot || !bg.isTerminal(s))
      throw TokenError(i, "token " + std::to_string(i) +
                              ": unknown terminal label '" +
                              tokens[size_t(i)].label + "'");
    termSyms[size_t(i)] = s;
  }

  Enumerator en{bg, termSyms};
  UnpackResult res;
  if (n == 0) return res;
  for (int start : bg.startSymbols) {
    for (const DerivPtr& t : en.derive(start, 0, n)) {
      if (res.trees.size() >= cap) {
        res.truncated = true;
        return res;
      }
      res.trees.push_back(t);
    }
  }
  return res;
}

}  // namespace problr
