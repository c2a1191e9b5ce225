#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "problr/lalr.hpp"

namespace problr {

std::vector<std::vector<int>> first_sets(const BackboneGrammar& bg) {
  size_t n = bg.symbols.size();
  std::vector<std::set<int>> first(n);
  for (size_t s = 0; s < n; ++s)
    if (bg.symbols[s].terminal) first[s].insert(int(s));
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& r : bg.rules) {
      auto& src = first[size_t(r.rhs[0])];
      auto& dst = first[size_t(r.lhs)];
      for (int t : src)
        if (dst.insert(t).second) changed = true;
    }
  }
  std::vector<std::vector<int>> out(n);
  for (size_t s = 0; s < n; ++s) out[s].assign(first[s].begin(), first[s].end());
  return out;
}

namespace {

struct Builder {
  const BackboneGrammar& bg;
  int nRules;
  std::vector<std::vector<int>> first;

  explicit Builder(const BackboneGrammar& b)
      : bg(b), nRules(int(b.rules.size())), first(first_sets(b)) {}

  int ruleLen(int r) const {
    return r < nRules ? int(bg.rules[size_t(r)].rhs.size()) : 1;
  }
  int ruleSym(int r, int i) const {
    return r < nRules ? bg.rules[size_t(r)].rhs[size_t(i)]
                      : bg.startSymbols[size_t(r - nRules)];
  }
  int ruleLhs(int r) const {
    return r < nRules ? bg.rules[size_t(r)].lhs : -1;
  }

  std::vector<LRItem> closure(const std::vector<LRItem>& kernel) const {
    std::set<LRItem> seen(kernel.begin(), kernel.end());
    std::vector<LRItem> work(kernel.begin(), kernel.end());
    std::set<LRItem> extra;
    while (!work.empty()) {
      LRItem it = work.back();
      work.pop_back();
      if (it.dot >= ruleLen(it.rule)) continue;
      int sym = ruleSym(it.rule, it.dot);
      if (bg.isTerminal(sym)) continue;
      for (int r : bg.rulesByLhs[size_t(sym)]) {
        LRItem ni{r, 0};
        if (seen.insert(ni).second) {
          extra.insert(ni);
          work.push_back(ni);
        }
      }
    }
    return {extra.begin(), extra.end()};
  }
};

}  // namespace

LRTables build_tables(const BackboneGrammar& bg) {
  if (bg.startSymbols.empty() || bg.rules.empty())
    throw TableError(
        "no viable sentences: the start symbol derives no terminal strings");

  Builder b(bg);
  int nRules = b.nRules;
  LRTables t;
  t.augmentedStart = bg.startSymbols;

  // LR(0) automaton, BFS with kernels as state identity
  std::map<std::vector<LRItem>, int> stateByKernel;
  {
    std::vector<LRItem> k0;
    for (size_t i = 0; i < bg.startSymbols.size(); ++i)
      k0.push_back({nRules + int(i), 0});
    std::sort(k0.begin(), k0.end());
    stateByKernel[k0] = 0;
    t.states.push_back({k0, b.closure(k0), {}});
  }
  for (size_t si = 0; si < t.states.size(); ++si) {
    std::map<int, std::vector<LRItem>> bySym;
    auto visit = [&](const LRItem& it) {
      if (it.dot >= b.ruleLen(it.rule)) return;
      bySym[b.ruleSym(it.rule, it.dot)].push_back({it.rule, it.dot + 1});
    };
    for (auto& it : t.states[si].kernel) visit(it);
    for (auto& it : t.states[si].closure) visit(it);
    for (auto& [sym, kernel] : bySym) {
      std::vector<LRItem> k = kernel;
      std::sort(k.begin(), k.end());
      k.erase(std::unique(k.begin(), k.end()), k.end());
      auto [pos, inserted] = stateByKernel.try_emplace(k, int(t.states.size()));
      if (inserted) t.states.push_back({k, b.closure(k), {}});
      t.states[si].transitions.emplace_back(sym, pos->second);
    }
  }

  auto transFor = [&](int state, int sym) -> int {
    for (auto& [s, st] : t.states[size_t(state)].transitions)
      if (s == sym) return st;
    return -1;
  };
  auto kernelIndex = [&](int state, const LRItem& item) -> int {
    auto& k = t.states[size_t(state)].kernel;
    auto it = std::lower_bound(k.begin(), k.end(), item);
    return int(it - k.begin());
  };

  // lookaheads per (state, kernel item): spontaneous generation plus
  // propagation links, then fixpoint
  std::vector<std::vector<std::set<int>>> la(t.states.size());
  std::vector<std::vector<std::vector<std::pair<int, int>>>> prop(
      t.states.size());
  for (size_t s = 0; s < t.states.size(); ++s) {
    la[s].resize(t.states[s].kernel.size());
    prop[s].resize(t.states[s].kernel.size());
  }
  for (size_t i = 0; i < bg.startSymbols.size(); ++i) {
    LRItem aug{nRules + int(i), 0};
    la[0][size_t(kernelIndex(0, aug))].insert(bg.eot);
  }

  constexpr int kDummy = -7;
  for (size_t s = 0; s < t.states.size(); ++s) {
    for (size_t ki = 0; ki < t.states[s].kernel.size(); ++ki) {
      const LRItem seed = t.states[s].kernel[ki];
      // closure with lookaheads over {dummy}
      std::map<LRItem, std::set<int>> items;
      items[seed].insert(kDummy);
      std::vector<LRItem> work{seed};
      while (!work.empty()) {
        LRItem it = work.back();
        work.pop_back();
        if (it.dot >= b.ruleLen(it.rule)) continue;
        int sym = b.ruleSym(it.rule, it.dot);
        if (bg.isTerminal(sym)) continue;
        std::set<int> newLa;
        if (it.dot + 1 < b.ruleLen(it.rule)) {
          int nxt = b.ruleSym(it.rule, it.dot + 1);
          newLa.insert(b.first[size_t(nxt)].begin(), b.first[size_t(nxt)].end());
        } else {
          newLa = items[it];
        }
        for (int r : bg.rulesByLhs[size_t(sym)]) {
          LRItem ni{r, 0};
          auto& dst = items[ni];
          size_t before = dst.size();
          dst.insert(newLa.begin(), newLa.end());
          if (dst.size() != before) work.push_back(ni);
        }
      }
      // distribute to successor kernels
      for (auto& [it, las] : items) {
        if (it.dot >= b.ruleLen(it.rule)) continue;
        int sym = b.ruleSym(it.rule, it.dot);
        int target = transFor(int(s), sym);
        LRItem adv{it.rule, it.dot + 1};
        int ti = kernelIndex(target, adv);
        for (int l : las) {
          if (l == kDummy)
            prop[s][ki].emplace_back(target, ti);
          else
            la[size_t(target)][size_t(ti)].insert(l);
        }
      }
    }
  }
  {
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t s = 0; s < t.states.size(); ++s)
        for (size_t ki = 0; ki < t.states[s].kernel.size(); ++ki)
          for (auto& [ts, ti] : prop[s][ki]) {
            auto& dst = la[size_t(ts)][size_t(ti)];
            size_t before = dst.size();
            dst.insert(la[s][ki].begin(), la[s][ki].end());
            if (dst.size() != before) changed = true;
          }
    }
  }

  // action and goto tables
  t.actions.resize(t.states.size());
  t.gotos.resize(t.states.size());
  for (size_t s = 0; s < t.states.size(); ++s) {
    std::map<int, std::set<Action>> cells;
    for (auto& [sym, target] : t.states[s].transitions) {
      if (bg.isTerminal(sym))
        cells[sym].insert({Action::Shift, target});
      else
        t.gotos[s].emplace_back(sym, target);
    }
    for (size_t ki = 0; ki < t.states[s].kernel.size(); ++ki) {
      const LRItem& it = t.states[s].kernel[ki];
      if (it.dot != b.ruleLen(it.rule)) continue;
      for (int l : la[s][ki]) {
        if (it.rule >= nRules)
          cells[l].insert({Action::Accept, it.rule - nRules});
        else
          cells[l].insert({Action::Reduce, it.rule});
      }
    }
    for (auto& [sym, acts] : cells) {
      t.actions[s].emplace_back(sym, std::vector<Action>(acts.begin(), acts.end()));
      if (acts.size() > 1) ++t.conflictCells;
    }
    std::sort(t.gotos[s].begin(), t.gotos[s].end());
  }
  return t;
}

std::string dump_tables(const BackboneGrammar& bg, const LRTables& t) {
  std::ostringstream os;
  auto sym = [&](int s) -> std::string {
    return s < 0 ? "$accept" : bg.symbols[size_t(s)].name;
  };
  auto item = [&](const LRItem& it) {
    int nRules = int(bg.rules.size());
    std::string out;
    if (it.rule < nRules) {
      auto& r = bg.rules[size_t(it.rule)];
      out = sym(r.lhs) + " ->";
      for (int i = 0; i < int(r.rhs.size()); ++i) {
        if (i == it.dot) out += " .";
        out += " " + sym(r.rhs[size_t(i)]);
      }
      if (it.dot == int(r.rhs.size())) out += " .";
      out += "  [" + std::to_string(it.rule) + "]";
    } else {
      int k = it.rule - nRules;
      out = "$accept ->";
      if (it.dot == 0) out += " .";
      out += " " + sym(t.augmentedStart[size_t(k)]);
      if (it.dot == 1) out += " .";
    }
    return out;
  };
  os << "states " << t.states.size() << "\n";
  for (size_t s = 0; s < t.states.size(); ++s) {
    os << "state " << s << "\n";
    for (auto& it : t.states[s].kernel) os << "  k " << item(it) << "\n";
    for (auto& it : t.states[s].closure) os << "  c " << item(it) << "\n";
    for (auto& [term, acts] : t.actions[s]) {
      os << "  on " << sym(term) << " :";
      for (auto& a : acts) {
        if (a.kind == Action::Shift) os << " shift " << a.arg;
        else if (a.kind == Action::Reduce) os << " reduce " << a.arg;
        else os << " accept";
      }
      os << "\n";
    }
    for (auto& [nt, st] : t.gotos[s]) os << "  goto " << sym(nt) << " : " << st << "\n";
  }
  os << "conflict-cells " << t.conflictCells << "\n";
  return os.str();
}

}  // namespace problr
