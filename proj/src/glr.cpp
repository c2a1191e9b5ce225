#include "problr/glr.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <tuple>

namespace problr {
namespace {

struct GssLink {
  int id = -1;
  int target = -1;   // gss node id at an earlier position
  int payload = -1;  // forest node id spanning (target.pos, source.pos)
};

struct GssNode {
  int state = -1;
  int pos = 0;
  std::vector<GssLink> links;
};

struct Engine {
  const BackboneGrammar& bg;
  const LRTables& tables;
  const ParseOptions& opts;
  const std::vector<int>& termSyms;
  int nTokens = 0;

  std::vector<GssNode> gss{};
  int nLinks = 0;
  std::map<int, int> frontier{};  // state -> gss node id at curPos
  int curPos = 0;
  int lookahead = -1;
  int rightmostShift = -1;

  std::vector<ForestNode> nodes{};
  std::map<std::tuple<int, int, int, FeatureStructure>, int> nodeIndex{};

  // A pending reduce re-triggered by a new link is restricted to paths
  // starting with that link; links deeper in a path predate the frontier
  // and never change, so first-link restriction is exhaustive.
  struct PendingReduce {
    int node = -1;
    int rule = -1;
    int firstLink = -1;  // -1: any
  };
  std::vector<PendingReduce> work{};
  size_t workCursor = 0;

  ParseStats stats{};
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  bool timedOut() const { return elapsed() > opts.timeoutSeconds; }

  bool crosses(int s, int e) const {
    for (auto& [a, b] : opts.constraintBrackets) {
      if (s < a && a < e && e < b) return true;
      if (a < s && s < b && b < e) return true;
    }
    return false;
  }

  int newGssNode(int state) {
    gss.push_back({state, curPos, {}});
    return int(gss.size()) - 1;
  }

  int addLink(int from, int to, int payload) {
    int id = nLinks++;
    gss[size_t(from)].links.push_back({id, to, payload});
    return id;
  }

  int leafNode(int i) {
    auto key = std::make_tuple(termSyms[size_t(i)], i, i + 1, FeatureStructure{});
    auto it = nodeIndex.find(key);
    if (it != nodeIndex.end()) return it->second;
    ForestNode n;
    n.sym = termSyms[size_t(i)];
    n.start = i;
    n.end = i + 1;
    n.leaf = true;
    nodes.push_back(std::move(n));
    int id = int(nodes.size()) - 1;
    nodeIndex.emplace(std::move(key), id);
    return id;
  }

  void enqueueReduces(int node, int firstLink) {
    const std::vector<Action>* cell =
        tables.actionsFor(gss[size_t(node)].state, lookahead);
    if (!cell) return;
    // a conflict cell forks the stack once per action beyond the first;
    // counted once per (node, lookahead), not on re-triggered links
    if (firstLink < 0 && cell->size() > 1) stats.forks += cell->size() - 1;
    for (const Action& a : *cell)
      if (a.kind == Action::Reduce) work.push_back({node, a.arg, firstLink});
  }

  void pushGoto(int base, int sym, int payload) {
    int s2 = tables.gotoFor(gss[size_t(base)].state, sym);
    if (s2 < 0) return;
    auto fit = frontier.find(s2);
    if (fit == frontier.end()) {
      int u = newGssNode(s2);
      frontier.emplace(s2, u);
      addLink(u, base, payload);
      enqueueReduces(u, -1);
      return;
    }
    int u = fit->second;
    for (auto& l : gss[size_t(u)].links)
      if (l.target == base && l.payload == payload) return;
    int lid = addLink(u, base, payload);
    enqueueReduces(u, lid);
  }

  void finishReduce(int ruleId, const std::vector<int>& children, int base) {
    ++stats.reduces;
    const BackboneRule& rule = bg.rules[size_t(ruleId)];
    int start = gss[size_t(base)].pos;
    int end = curPos;
    if (crosses(start, end)) return;

    std::vector<const FeatureStructure*> childFS(children.size());
    for (size_t j = 0; j < children.size(); ++j)
      childFS[j] = &nodes[size_t(children[j])].residue;
    auto mother = apply_rule_residue(rule, childFS);
    if (!mother) {
      ++stats.unifyFailures;
      return;
    }

    auto key = std::make_tuple(rule.lhs, start, end, *mother);
    auto it = nodeIndex.find(key);
    int fn;
    if (it == nodeIndex.end()) {
      fn = int(nodes.size());
      ForestNode n;
      n.sym = rule.lhs;
      n.start = start;
      n.end = end;
      n.residue = std::move(*mother);
      n.packs.push_back({ruleId, children});
      nodes.push_back(std::move(n));
      nodeIndex.emplace(std::move(key), fn);
    } else {
      fn = it->second;
      Pack p{ruleId, children};
      auto& ps = nodes[size_t(fn)].packs;
      if (std::find(ps.begin(), ps.end(), p) == ps.end()) {
        ps.push_back(std::move(p));
        ++stats.packs;
      }
    }
    pushGoto(base, rule.lhs, fn);
  }

  void applyReduce(const PendingReduce& pr) {
    const BackboneRule& rule = bg.rules[size_t(pr.rule)];
    int m = int(rule.rhs.size());
    // enumerate paths fully before applying: applications add links to
    // frontier nodes and must not perturb the walk
    std::vector<std::pair<std::vector<int>, int>> paths;
    std::vector<int> payloads(static_cast<size_t>(m));
    auto dfs = [&](auto&& self, int at, int d) -> void {
      for (const GssLink link : gss[size_t(at)].links) {
        if (d == 0 && pr.firstLink >= 0 && link.id != pr.firstLink) continue;
        payloads[size_t(m - 1 - d)] = link.payload;
        if (d + 1 == m) paths.emplace_back(payloads, link.target);
        else self(self, link.target, d + 1);
      }
    };
    dfs(dfs, pr.node, 0);
    for (auto& [kids, basenode] : paths) finishReduce(pr.rule, kids, basenode);
  }

  // Returns false on timeout.
  bool reducePhase() {
    work.clear();
    workCursor = 0;
    for (auto& [st, v] : frontier) {
      (void)st;
      enqueueReduces(v, -1);
    }
    while (workCursor < work.size()) {
      if ((workCursor & 2047u) == 0 && timedOut()) return false;
      PendingReduce pr = work[workCursor++];
      applyReduce(pr);
    }
    return true;
  }

  bool shiftPhase(int i) {
    std::map<int, int> next;
    int leaf = -1;
    int term = termSyms[size_t(i)];
    auto prev = std::move(frontier);
    frontier.clear();
    curPos = i + 1;
    for (auto& [st, v] : prev) {
      const std::vector<Action>* cell = tables.actionsFor(st, term);
      if (!cell) continue;
      for (const Action& a : *cell) {
        if (a.kind != Action::Shift) continue;
        if (leaf < 0) leaf = leafNode(i);
        auto fit = next.find(a.arg);
        int u;
        if (fit == next.end()) {
          u = newGssNode(a.arg);
          next.emplace(a.arg, u);
        } else {
          u = fit->second;
        }
        addLink(u, v, leaf);
        ++stats.shifts;
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) return false;
    rightmostShift = i;
    return true;
  }
};

}  // namespace

ParseForest parse(const BackboneGrammar& bg, const LRTables& tables,
                  const std::vector<Token>& tokens, const ParseOptions& opts) {
  int n = int(tokens.size());
  auto renderSpan = [](std::pair<int, int> s) {
    return "(" + std::to_string(s.first) + "," + std::to_string(s.second) + ")";
  };
  for (auto& s : opts.constraintBrackets) {
    if (!(0 <= s.first && s.first < s.second && s.second <= n))
      throw ConstraintError("constraint bracket " + renderSpan(s) +
                            " out of range for " + std::to_string(n) + " tokens");
    for (auto& t : opts.constraintBrackets)
      if (s.first < t.first && t.first < s.second && s.second < t.second)
        throw ConstraintError("constraint brackets " + renderSpan(s) + " and " +
                              renderSpan(t) + " cross");
  }

  std::vector<int> termSyms(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    int s = bg.symId(tokens[size_t(i)].label);
    if (s < 0 || s == bg.eot || !bg.isTerminal(s))
      throw TokenError(i, "token " + std::to_string(i) +
                              ": unknown terminal label '" +
                              tokens[size_t(i)].label + "'");
    termSyms[size_t(i)] = s;
  }

  Engine eng{bg, tables, opts, termSyms};
  eng.nTokens = n;
  int v0 = eng.newGssNode(0);
  eng.frontier.emplace(0, v0);

  auto finish = [&](ParseStatus status, std::vector<int> roots) {
    ParseForest f;
    f.status = status;
    if (status != ParseStatus::Timeout) f.nodes = std::move(eng.nodes);
    f.roots = std::move(roots);
    f.tokens = tokens;
    f.tokenSyms = termSyms;
    f.rightmostShift = eng.rightmostShift;
    f.stats = eng.stats;
    f.stats.gssNodes = eng.gss.size();
    f.stats.gssLinks = size_t(eng.nLinks);
    f.stats.tokens = size_t(n);
    f.stats.seconds = eng.elapsed();
    return f;
  };

  bool completed = true;
  for (int i = 0; i <= n; ++i) {
    if (eng.timedOut()) return finish(ParseStatus::Timeout, {});
    eng.lookahead = i < n ? termSyms[size_t(i)] : bg.eot;
    if (!eng.reducePhase()) return finish(ParseStatus::Timeout, {});
    if (i == n) break;
    if (!eng.shiftPhase(i)) {
      completed = false;
      break;
    }
  }

  std::set<int> rootSet;
  if (completed) {
    for (auto& [st, v] : eng.frontier) {
      const std::vector<Action>* cell = tables.actionsFor(st, bg.eot);
      if (!cell) continue;
      for (const Action& a : *cell) {
        if (a.kind != Action::Accept) continue;
        int sym = tables.augmentedStart[size_t(a.arg)];
        for (auto& l : eng.gss[size_t(v)].links) {
          const ForestNode& fn = eng.nodes[size_t(l.payload)];
          if (fn.sym == sym && fn.start == 0 && fn.end == n)
            rootSet.insert(l.payload);
        }
      }
    }
  }
  std::vector<int> roots(rootSet.begin(), rootSet.end());
  ParseStatus st = roots.empty() ? ParseStatus::NoParse : ParseStatus::Ok;
  return finish(st, std::move(roots));
}

ParseForest constrained_parse(const BackboneGrammar& bg, const LRTables& tables,
                              const std::vector<Token>& tokens,
                              const std::vector<std::pair<int, int>>& brackets,
                              const ParseOptions& opts) {
  ParseOptions o = opts;
  o.constraintBrackets = brackets;
  return parse(bg, tables, tokens, o);
}

}  // namespace problr
