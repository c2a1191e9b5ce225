#include "problr/history.hpp"

#include <sstream>

namespace problr {
namespace {

void collect_terms(const DerivTree& t, std::vector<int>& terms) {
  if (t.rule < 0) {
    terms.push_back(t.sym);
    return;
  }
  for (auto& c : t.children) collect_terms(*c, terms);
}

struct Simulator {
  const BackboneGrammar& bg;
  const LRTables& tables;
  const std::vector<int>& terms;
  std::vector<int> stack{0};
  ParseHistory events{};

  [[noreturn]] void fail(const std::string& what) {
    throw HistoryError("event " + std::to_string(events.size() + 1) + ": " +
                       what);
  }

  void walk(const DerivTree& t) {
    if (t.rule < 0) {
      int st = stack.back();
      const std::vector<Action>* cell = tables.actionsFor(st, t.sym);
      const Action* sh = nullptr;
      if (cell)
        for (auto& a : *cell)
          if (a.kind == Action::Shift) sh = &a;
      if (!sh)
        fail("no shift on '" + bg.symbols[size_t(t.sym)].name +
             "' from state " + std::to_string(st));
      events.push_back({st, t.sym, *sh});
      stack.push_back(sh->arg);
      return;
    }
    for (auto& c : t.children) walk(*c);
    int la = size_t(t.end) < terms.size() ? terms[size_t(t.end)] : bg.eot;
    int st = stack.back();
    const std::vector<Action>* cell = tables.actionsFor(st, la);
    const Action* red = nullptr;
    if (cell)
      for (auto& a : *cell)
        if (a.kind == Action::Reduce && a.arg == t.rule) red = &a;
    if (!red)
      fail("no reduce by rule " + std::to_string(t.rule) + " from state " +
           std::to_string(st) + " on lookahead '" +
           bg.symbols[size_t(la)].name + "'");
    events.push_back({st, la, *red});
    stack.resize(stack.size() - bg.rules[size_t(t.rule)].rhs.size());
    int g = tables.gotoFor(stack.back(), t.sym);
    if (g < 0)
      fail("no goto on '" + bg.symbols[size_t(t.sym)].name + "' from state " +
           std::to_string(stack.back()));
    stack.push_back(g);
  }
};

}  // namespace

ParseHistory extract_history(const BackboneGrammar& bg, const LRTables& tables,
                             const DerivTree& tree) {
  std::vector<int> terms;
  collect_terms(tree, terms);
  Simulator sim{bg, tables, terms};
  sim.walk(tree);
  int st = sim.stack.back();
  const std::vector<Action>* cell = tables.actionsFor(st, bg.eot);
  const Action* acc = nullptr;
  if (cell)
    for (auto& a : *cell)
      if (a.kind == Action::Accept &&
          tables.augmentedStart[size_t(a.arg)] == tree.sym)
        acc = &a;
  if (!acc) sim.fail("no accept from state " + std::to_string(st));
  sim.events.push_back({st, bg.eot, *acc});
  return std::move(sim.events);
}

TransitionCounts train(const std::vector<ParseHistory>& histories) {
  TransitionCounts tc;
  for (auto& h : histories)
    for (auto& e : h) {
      ++tc.counts[e];
      ++tc.contextTotals[{e.state, e.lookahead}];
    }
  return tc;
}

void merge_counts(TransitionCounts& into, const TransitionCounts& from) {
  for (auto& [e, c] : from.counts) into.counts[e] += c;
  for (auto& [ctx, c] : from.contextTotals) into.contextTotals[ctx] += c;
}

std::string history_to_string(const ParseHistory& h,
                              const BackboneGrammar& bg) {
  std::ostringstream os;
  for (auto& e : h) {
    os << "s" << e.state << " la=" << bg.symbols[size_t(e.lookahead)].name
       << " ";
    switch (e.action.kind) {
      case Action::Shift:
        os << "shift s" << e.action.arg;
        break;
      case Action::Reduce:
        os << "reduce r" << e.action.arg;
        break;
      case Action::Accept:
        os << "accept";
        break;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace problr
