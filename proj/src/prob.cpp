#include "problr/prob.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "problr/hash.hpp"

namespace problr {

ProbModel smooth(const TransitionCounts& counts, const BackboneGrammar& bg,
                 const LRTables& tables) {
  ProbModel m;
  m.grammarHash = fnv1a(dump_backbone(bg));
  m.tableHash = fnv1a(dump_tables(bg, tables));

  auto countOf = [&](int st, int la, const Action& a) -> long long {
    auto it = counts.counts.find({st, la, a});
    return it == counts.counts.end() ? 0 : it->second;
  };
  for (size_t s = 0; s < tables.actions.size(); ++s)
    for (auto& [la, cell] : tables.actions[s])
      for (auto& a : cell) ++m.countOfCounts[countOf(int(s), la, a)];

  auto N = [&](long long r) -> long long {
    auto it = m.countOfCounts.find(r);
    return it == m.countOfCounts.end() ? 0 : it->second;
  };
  auto rstar = [&](long long r) -> double {
    long long nr = N(r), nr1 = N(r + 1);
    if (r == 0) return nr1 > 0 && nr > 0 ? double(nr1) / double(nr) : 0.5;
    if (nr1 > 0 && nr > 0) return double(r + 1) * double(nr1) / double(nr);
    return double(r);
  };

  for (size_t s = 0; s < tables.actions.size(); ++s) {
    for (auto& [la, cell] : tables.actions[s]) {
      std::pair<int, int> ctx{int(s), la};
      bool anySeen = false;
      for (auto& a : cell) anySeen = anySeen || countOf(int(s), la, a) > 0;
      if (!anySeen) {
        m.unseenLog[ctx] = -std::log(double(cell.size()));
        continue;
      }
      double total = 0.0;
      size_t unseen = 0;
      for (auto& a : cell) {
        long long r = countOf(int(s), la, a);
        if (r == 0) ++unseen;
        total += rstar(r);
      }
      for (auto& a : cell) {
        long long r = countOf(int(s), la, a);
        if (r > 0)
          m.seen[{int(s), la, a}] = {r, std::log(rstar(r) / total)};
      }
      if (unseen > 0) m.unseenLog[ctx] = std::log(rstar(0) / total);
    }
  }
  return m;
}

double score(const ParseHistory& h, const ProbModel& m) {
  double lp = 0.0;
  for (auto& e : h) {
    auto v = m.logProbOf(e);
    if (!v)
      throw ModelError("event at state " + std::to_string(e.state) +
                       " lookahead " + std::to_string(e.lookahead) +
                       " outside the model");
    lp += *v;
  }
  return lp;
}

double max_normalization_error(const ProbModel& m, const LRTables& tables) {
  double worst = 0.0;
  for (size_t s = 0; s < tables.actions.size(); ++s) {
    for (auto& [la, cell] : tables.actions[s]) {
      double mass = 0.0;
      for (auto& a : cell) {
        TransitionEvent e{int(s), la, a};
        auto it = m.seen.find(e);
        if (it != m.seen.end()) {
          mass += std::exp(it->second.second);
        } else {
          auto uit = m.unseenLog.find({int(s), la});
          if (uit != m.unseenLog.end()) mass += std::exp(uit->second);
        }
      }
      worst = std::max(worst, std::abs(mass - 1.0));
    }
  }
  return worst;
}

namespace {

char action_char(Action::Kind k) {
  switch (k) {
    case Action::Shift:
      return 'S';
    case Action::Reduce:
      return 'R';
    case Action::Accept:
      return 'A';
  }
  return '?';
}

std::string hex64(uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

std::string save_model(const ProbModel& m) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "problr-model 1\n";
  os << "method " << m.method << "\n";
  os << "grammar-hash " << hex64(m.grammarHash) << "\n";
  os << "table-hash " << hex64(m.tableHash) << "\n";
  for (auto& [r, nr] : m.countOfCounts) os << "coc " << r << " " << nr << "\n";
  for (auto& [e, cl] : m.seen)
    os << "event " << e.state << " " << e.lookahead << " "
       << action_char(e.action.kind) << " " << e.action.arg << " " << cl.first
       << " " << cl.second << "\n";
  for (auto& [ctx, lp] : m.unseenLog)
    os << "unseen " << ctx.first << " " << ctx.second << " " << lp << "\n";
  os << "end\n";
  return os.str();
}

ProbModel load_model(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "problr-model 1")
    throw ModelError("unsupported model file version: '" + line + "'");
  ProbModel m;
  m.method.clear();
  bool ended = false;
  int lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    auto bad = [&]() -> ModelError {
      return ModelError("model file line " + std::to_string(lineNo) +
                        ": malformed '" + line + "'");
    };
    if (kw == "method") {
      ls >> m.method;
    } else if (kw == "grammar-hash") {
      std::string h;
      ls >> h;
      m.grammarHash = std::stoull(h, nullptr, 16);
    } else if (kw == "table-hash") {
      std::string h;
      ls >> h;
      m.tableHash = std::stoull(h, nullptr, 16);
    } else if (kw == "coc") {
      long long r, nr;
      if (!(ls >> r >> nr)) throw bad();
      m.countOfCounts[r] = nr;
    } else if (kw == "event") {
      int st, la, arg;
      char kind;
      long long cnt;
      double lp;
      if (!(ls >> st >> la >> kind >> arg >> cnt >> lp)) throw bad();
      Action a;
      a.arg = arg;
      if (kind == 'S') a.kind = Action::Shift;
      else if (kind == 'R') a.kind = Action::Reduce;
      else if (kind == 'A') a.kind = Action::Accept;
      else throw bad();
      m.seen[{st, la, a}] = {cnt, lp};
    } else if (kw == "unseen") {
      int st, la;
      double lp;
      if (!(ls >> st >> la >> lp)) throw bad();
      m.unseenLog[{st, la}] = lp;
    } else if (kw == "end") {
      ended = true;
      break;
    } else {
      throw bad();
    }
  }
  if (!ended) throw ModelError("truncated model file: no end line");
  return m;
}

namespace {

struct Cand {
  double logp = 0.0;
  ParseHistory ev{};
  DerivPtr tree{};
};

// logp descending, event sequence ascending; distinct derivations always
// differ in their event sequences, so the order is total and deterministic
bool cand_before(const Cand& a, const Cand& b) {
  if (a.logp != b.logp) return a.logp > b.logp;
  return a.ev < b.ev;
}

struct NBest {
  const BackboneGrammar& bg;
  const LRTables& tables;
  const ProbModel& m;
  const ParseForest& f;
  size_t n;
  std::map<std::pair<int, int>, std::vector<Cand>> memo{};
  std::map<int, DerivPtr> leafTrees{};

  const Action* findShift(int st, int term) const {
    auto* cell = tables.actionsFor(st, term);
    if (cell)
      for (auto& a : *cell)
        if (a.kind == Action::Shift) return &a;
    return nullptr;
  }
  const Action* findReduce(int st, int la, int rule) const {
    auto* cell = tables.actionsFor(st, la);
    if (cell)
      for (auto& a : *cell)
        if (a.kind == Action::Reduce && a.arg == rule) return &a;
    return nullptr;
  }
  int transition(int st, int sym) const {
    if (bg.isTerminal(sym)) {
      const Action* sh = findShift(st, sym);
      return sh ? sh->arg : -1;
    }
    return tables.gotoFor(st, sym);
  }

  // sequential sum in event order: the same association the plain score()
  // of a full history uses, so ranks agree with enumerate-score-sort to the
  // last bit
  static double seq_sum(const ParseHistory& ev, const ProbModel& m) {
    double lp = 0.0;
    for (auto& e : ev) {
      auto v = m.logProbOf(e);
      if (!v) return -std::numeric_limits<double>::infinity();
      lp += *v;
    }
    return lp;
  }

  void cube(const Pack& p, const ForestNode& v,
            const std::vector<const std::vector<Cand>*>& lists,
            const TransitionEvent& re, std::vector<Cand>& out) {
    size_t mm = lists.size();
    auto build = [&](const std::vector<size_t>& idx) -> Cand {
      Cand c;
      std::vector<DerivPtr> kids(mm);
      for (size_t k = 0; k < mm; ++k) {
        const Cand& ck = (*lists[k])[idx[k]];
        c.ev.insert(c.ev.end(), ck.ev.begin(), ck.ev.end());
        kids[k] = ck.tree;
      }
      c.ev.push_back(re);
      c.logp = seq_sum(c.ev, m);
      auto t = std::make_shared<DerivTree>();
      t->rule = p.rule;
      t->sym = v.sym;
      t->start = v.start;
      t->end = v.end;
      t->children = std::move(kids);
      t->exportFS = v.residue;
      c.tree = std::move(t);
      return c;
    };
    using Entry = std::pair<Cand, std::vector<size_t>>;
    auto later = [](const Entry& a, const Entry& b) {
      return cand_before(b.first, a.first);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(later)> heap(later);
    std::set<std::vector<size_t>> visited;
    std::vector<size_t> zero(mm, 0);
    visited.insert(zero);
    heap.push({build(zero), zero});
    size_t emitted = 0;
    while (!heap.empty() && emitted < n) {
      Entry top = heap.top();
      heap.pop();
      out.push_back(std::move(top.first));
      ++emitted;
      for (size_t k = 0; k < mm; ++k) {
        std::vector<size_t> nx = top.second;
        ++nx[k];
        if (nx[k] < lists[k]->size() && visited.insert(nx).second)
          heap.push({build(nx), nx});
      }
    }
  }

  const std::vector<Cand>& klist(int id, int sigma) {
    auto key = std::make_pair(id, sigma);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::vector<Cand> out;
    const ForestNode& v = f.nodes[size_t(id)];
    if (v.leaf) {
      if (const Action* sh = findShift(sigma, v.sym)) {
        TransitionEvent e{sigma, v.sym, *sh};
        if (auto lp = m.logProbOf(e)) {
          auto lt = leafTrees.find(id);
          if (lt == leafTrees.end()) {
            auto t = std::make_shared<DerivTree>();
            t->sym = v.sym;
            t->start = v.start;
            t->end = v.end;
            lt = leafTrees.emplace(id, std::move(t)).first;
          }
          out.push_back({*lp, {e}, lt->second});
        }
      }
    } else {
      int la = size_t(v.end) < f.tokenSyms.size() ? f.tokenSyms[size_t(v.end)]
                                                  : bg.eot;
      for (auto& p : v.packs) {
        size_t mm = p.children.size();
        std::vector<const std::vector<Cand>*> lists(mm);
        int st = sigma;
        bool dead = false;
        for (size_t k = 0; k < mm && !dead; ++k) {
          lists[k] = &klist(p.children[k], st);
          if (lists[k]->empty()) dead = true;
          st = transition(st, f.nodes[size_t(p.children[k])].sym);
          if (st < 0) dead = true;
        }
        if (dead) continue;
        const Action* red = findReduce(st, la, p.rule);
        if (!red) continue;
        TransitionEvent re{st, la, *red};
        if (!m.logProbOf(re)) continue;
        cube(p, v, lists, re, out);
      }
    }
    std::sort(out.begin(), out.end(), cand_before);
    if (out.size() > n) out.resize(n);
    return memo.emplace(key, std::move(out)).first->second;
  }
};

}  // namespace

std::vector<RankedAnalysis> nbest(const BackboneGrammar& bg,
                                  const LRTables& tables, const ProbModel& m,
                                  const ParseForest& f, int n) {
  if (n < 1) throw std::invalid_argument("nbest: n must be >= 1");
  std::vector<RankedAnalysis> res;
  if (f.status != ParseStatus::Ok) return res;
  NBest nb{bg, tables, m, f, size_t(n)};
  std::vector<Cand> all;
  for (int r : f.roots) {
    const ForestNode& v = f.nodes[size_t(r)];
    int rho = tables.gotoFor(0, v.sym);
    if (rho < 0) continue;
    const Action* acc = nullptr;
    auto* cell = tables.actionsFor(rho, bg.eot);
    if (cell)
      for (auto& a : *cell)
        if (a.kind == Action::Accept &&
            tables.augmentedStart[size_t(a.arg)] == v.sym)
          acc = &a;
    if (!acc) continue;
    TransitionEvent ae{rho, bg.eot, *acc};
    if (!m.logProbOf(ae)) continue;
    for (const Cand& c : nb.klist(r, 0)) {
      Cand cc = c;
      cc.ev.push_back(ae);
      cc.logp = NBest::seq_sum(cc.ev, m);
      all.push_back(std::move(cc));
    }
  }
  std::sort(all.begin(), all.end(), cand_before);
  if (all.size() > size_t(n)) all.resize(size_t(n));
  int rank = 1;
  for (auto& c : all)
    res.push_back({c.tree, std::move(c.ev), c.logp, rank++});
  return res;
}

}  // namespace problr
