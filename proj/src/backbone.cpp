#include <algorithm>
#include <functional>
#include <sstream>

#include "problr/backbone.hpp"

namespace problr {
namespace {

// A schema flattened of modifiers: fixed mother + daughter list.
struct FlatRule {
  Category mother;
  std::vector<Category> daughters;
  std::string sourceRule;
  bool aux = false;
  int line = 0;
  int varCount = 0;
};

std::string renderCat(const Category& c, const Grammar& g,
                      std::map<uint32_t, uint32_t>* ren) {
  std::string out = g.majors[size_t(c.major)];
  if (c.fs.empty()) return out;
  out += "[";
  bool first = true;
  for (auto& s : c.fs.slots) {
    if (!first) out += ",";
    first = false;
    out += g.vocab.feats[size_t(s.first)].name;
    out += "=";
    if (s.second.kind == FeatureValue::Atom) {
      out += g.vocab.atoms[s.second.id];
    } else {
      uint32_t v = s.second.id;
      if (ren) {
        auto it = ren->find(v);
        if (it == ren->end()) {
          uint32_t n = uint32_t(ren->size());
          (*ren)[v] = n;
          v = n;
        } else {
          v = it->second;
        }
      }
      out += "$" + std::to_string(v);
    }
  }
  out += "]";
  return out;
}

// Canonical rendering of a starred term, used to share auxiliary symbols
// between identical terms; variables renamed by first occurrence.
std::string renderTerm(const DaughterTerm& term, const Grammar& g) {
  std::map<uint32_t, uint32_t> ren;
  std::string out = "(";
  for (size_t i = 0; i < term.alts.size(); ++i) {
    if (i) out += "|";
    out += renderCat(term.alts[i], g, &ren);
  }
  out += ")";
  return out;
}

Category renumberVars(const Category& c, std::map<uint32_t, uint32_t>& ren,
                      int& counter) {
  Category out = c;
  for (auto& s : out.fs.slots) {
    if (s.second.kind != FeatureValue::Var) continue;
    auto it = ren.find(s.second.id);
    if (it == ren.end()) {
      ren[s.second.id] = uint32_t(counter);
      s.second.id = uint32_t(counter++);
    } else {
      s.second.id = it->second;
    }
  }
  return out;
}

struct Compiler {
  const Grammar& g;
  int ruleCap;

  std::map<std::string, int> auxMajorByRender;
  std::vector<FlatRule> flats;
  // featSet: backbone features mentioned per major, sorted
  std::map<int, std::vector<int>> featSet;

  explicit Compiler(const Grammar& g_, int cap) : g(g_), ruleCap(cap) {}

  void noteMention(const Category& c, std::map<int, std::set<int>>& acc) {
    for (auto& s : c.fs.slots)
      if (g.vocab.feats[size_t(s.first)].kind == FeatKind::Backbone)
        acc[c.major].insert(s.first);
  }

  void flattenSchema(const RuleSchema& r, Grammar& scratch) {
    // choice lists per daughter position
    std::vector<std::vector<std::vector<Category>>> choices;
    struct AuxIntro {
      std::string render;
      const DaughterTerm* term;
      int line;
    };
    std::vector<AuxIntro> auxIntroduced;
    for (auto& term : r.daughters) {
      std::vector<std::vector<Category>> cs;
      if (term.mod == DaughterTerm::Star) {
        std::string render = renderTerm(term, g);
        auto it = auxMajorByRender.find(render);
        int auxMajor;
        if (it == auxMajorByRender.end()) {
          auxMajor = scratch.internMajor(render + "+");
          auxMajorByRender[render] = auxMajor;
          auxIntroduced.push_back({render, &term, r.line});
        } else {
          auxMajor = it->second;
        }
        cs.push_back({});                       // without
        Category auxCat;
        auxCat.major = auxMajor;
        cs.push_back({auxCat});                 // with the iterated symbol
      } else if (term.mod == DaughterTerm::Opt) {
        for (auto& alt : term.alts) cs.push_back({alt});
        cs.push_back({});                       // without, last
      } else {
        for (auto& alt : term.alts) cs.push_back({alt});
      }
      choices.push_back(std::move(cs));
    }
    // odometer, leftmost position slowest
    std::vector<size_t> idx(choices.size(), 0);
    while (true) {
      FlatRule fr;
      fr.mother = r.mother;
      fr.sourceRule = r.name;
      fr.line = r.line;
      fr.varCount = r.varCount;
      for (size_t p = 0; p < choices.size(); ++p)
        for (auto& c : choices[p][idx[p]]) fr.daughters.push_back(c);
      if (fr.daughters.empty())
        throw GrammarError(r.line, 1,
                           "rule " + r.name + " expands to an empty rule");
      flats.push_back(std::move(fr));
      size_t p = choices.size();
      while (p > 0) {
        --p;
        if (++idx[p] < choices[p].size()) break;
        idx[p] = 0;
        if (p == 0) goto done;
      }
      if (choices.empty()) break;
    }
  done:;
    // auxiliary schemas for terms introduced by this schema, in order
    for (auto& intro : auxIntroduced) {
      int auxMajor = auxMajorByRender[intro.render];
      Category auxCat;
      auxCat.major = auxMajor;
      for (int recursive = 1; recursive >= 0; --recursive) {
        for (auto& alt : intro.term->alts) {
          FlatRule fr;
          fr.aux = true;
          fr.sourceRule = intro.render + "*";
          fr.line = intro.line;
          fr.mother = auxCat;
          std::map<uint32_t, uint32_t> ren;
          int counter = 0;
          if (recursive) fr.daughters.push_back(auxCat);
          fr.daughters.push_back(renumberVars(alt, ren, counter));
          fr.varCount = counter;
          flats.push_back(std::move(fr));
        }
      }
    }
  }
};

}  // namespace

BackboneGrammar compile_backbone(const Grammar& gIn, int ruleCap) {
  // scratch grammar view so aux majors can extend the major table
  Grammar g = gIn;
  Compiler comp(g, ruleCap);

  // mention-based backbone feature sets per major (source categories only;
  // aux majors carry no features)
  {
    std::map<int, std::set<int>> acc;
    for (auto& r : gIn.rules) {
      comp.noteMention(r.mother, acc);
      for (auto& d : r.daughters)
        for (auto& alt : d.alts) comp.noteMention(alt, acc);
    }
    if (gIn.hasStart) comp.noteMention(gIn.start, acc);
    for (auto& [m, s] : acc)
      comp.featSet[m] = std::vector<int>(s.begin(), s.end());
  }

  for (auto& r : gIn.rules) comp.flattenSchema(r, g);

  BackboneGrammar bg;
  bg.vocab = g.vocab;

  struct ProtoRule {
    int lhs;
    std::vector<int> rhs;
    std::vector<FeatureStructure> rhsResidue;
    FeatureStructure lhsResidue;
    std::string sourceRule;
    bool aux;
    int varCount;
  };
  std::vector<ProtoRule> proto;

  auto symbolFor = [&](int major, const FeatureStructure& bbFS) -> int {
    Category c;
    c.major = major;
    c.fs = bbFS;
    std::string name = renderCat(c, g, nullptr);
    auto it = bg.symByName.find(name);
    if (it != bg.symByName.end()) return it->second;
    BackboneSymbol s;
    s.name = name;
    s.major = major;
    s.terminal = g.terminals.count(major) > 0;
    s.fs = bbFS;
    bg.symbols.push_back(std::move(s));
    bg.symByName[name] = int(bg.symbols.size()) - 1;
    return int(bg.symbols.size()) - 1;
  };

  // instantiate each flat rule over its backbone feature assignments
  for (auto& fr : comp.flats) {
    // positions: 0 = mother, 1.. = daughters
    std::vector<const Category*> cats;
    cats.push_back(&fr.mother);
    for (auto& d : fr.daughters) cats.push_back(&d);

    // dimensions: distinct backbone variables and free slots, in
    // (position, feature) order of first occurrence
    struct Dim {
      bool isVar;
      uint32_t var;
      int pos, feat;                 // for free slots
      std::vector<int> domain;       // atom ids
      size_t cursor = 0;
    };
    std::vector<Dim> dims;
    std::map<uint32_t, int> varDim;
    bool impossible = false;

    for (size_t p = 0; p < cats.size() && !impossible; ++p) {
      auto fsIt = comp.featSet.find(cats[p]->major);
      if (fsIt == comp.featSet.end()) continue;
      for (int feat : fsIt->second) {
        const auto& decl = g.vocab.feats[size_t(feat)];
        const FeatureValue* bound = cats[p]->fs.get(feat);
        if (bound && bound->kind == FeatureValue::Atom) continue;  // fixed
        if (bound && bound->kind == FeatureValue::Var) {
          auto it = varDim.find(bound->id);
          if (it == varDim.end()) {
            Dim d{true, bound->id, int(p), feat, decl.values, 0};
            varDim[bound->id] = int(dims.size());
            dims.push_back(std::move(d));
          } else {
            // intersect domains when one variable spans features
            auto& dom = dims[size_t(it->second)].domain;
            std::vector<int> inter;
            for (int v : dom)
              if (std::find(decl.values.begin(), decl.values.end(), v) !=
                  decl.values.end())
                inter.push_back(v);
            dom = inter;
            if (dom.empty()) impossible = true;
          }
        } else {
          dims.push_back(Dim{false, 0, int(p), feat, decl.values, 0});
        }
      }
    }
    if (impossible) continue;

    // enumerate assignments, leftmost dimension slowest
    while (true) {
      std::map<uint32_t, int> varAtom;
      for (auto& d : dims)
        if (d.isVar) varAtom[d.var] = d.domain[d.cursor];

      auto buildPos = [&](size_t p, FeatureStructure& bb, FeatureStructure& res) {
        const Category& c = *cats[p];
        auto fsIt = comp.featSet.find(c.major);
        if (fsIt != comp.featSet.end()) {
          for (int feat : fsIt->second) {
            const FeatureValue* bound = c.fs.get(feat);
            if (bound && bound->kind == FeatureValue::Atom) {
              bb.set(feat, *bound);
            } else if (bound && bound->kind == FeatureValue::Var) {
              bb.set(feat, FeatureValue::atom(uint32_t(varAtom[bound->id])));
            } else {
              for (auto& d : dims)
                if (!d.isVar && d.pos == int(p) && d.feat == feat) {
                  bb.set(feat, FeatureValue::atom(uint32_t(d.domain[d.cursor])));
                  break;
                }
            }
          }
        }
        for (auto& s : c.fs.slots) {
          if (g.vocab.feats[size_t(s.first)].kind != FeatKind::Residue) continue;
          FeatureValue v = s.second;
          if (v.kind == FeatureValue::Var) {
            auto it = varAtom.find(v.id);
            if (it != varAtom.end()) v = FeatureValue::atom(uint32_t(it->second));
          }
          res.set(s.first, v);
        }
      };

      ProtoRule pr;
      pr.sourceRule = fr.sourceRule;
      pr.aux = fr.aux;
      pr.varCount = fr.varCount;
      {
        FeatureStructure bb, res;
        buildPos(0, bb, res);
        pr.lhs = symbolFor(fr.mother.major, bb);
        pr.lhsResidue = res;
      }
      for (size_t p = 1; p < cats.size(); ++p) {
        FeatureStructure bb, res;
        buildPos(p, bb, res);
        pr.rhs.push_back(symbolFor(cats[p]->major, bb));
        pr.rhsResidue.push_back(res);
      }
      proto.push_back(std::move(pr));
      if (int(proto.size()) > ruleCap)
        throw GrammarError(fr.line, 1,
                           "backbone explosion: rule cap " +
                               std::to_string(ruleCap) + " exceeded while "
                               "expanding schema " + fr.sourceRule);

      size_t d = dims.size();
      bool carried = true;
      while (d > 0) {
        --d;
        if (++dims[d].cursor < dims[d].domain.size()) {
          carried = false;
          break;
        }
        dims[d].cursor = 0;
      }
      if (dims.empty() || carried) break;
    }
  }

  // start symbol instantiations
  std::vector<int> startSyms;
  if (gIn.hasStart) {
    auto fsIt = comp.featSet.find(gIn.start.major);
    std::vector<int> feats = fsIt == comp.featSet.end() ? std::vector<int>{}
                                                        : fsIt->second;
    std::vector<std::vector<int>> domains;
    for (int feat : feats) {
      const FeatureValue* bound = gIn.start.fs.get(feat);
      if (bound && bound->kind == FeatureValue::Atom)
        domains.push_back({int(bound->id)});
      else
        domains.push_back(g.vocab.feats[size_t(feat)].values);
    }
    std::vector<size_t> idx(domains.size(), 0);
    while (true) {
      FeatureStructure bb;
      for (size_t i = 0; i < feats.size(); ++i)
        bb.set(feats[i], FeatureValue::atom(uint32_t(domains[i][idx[i]])));
      Category c;
      c.major = gIn.start.major;
      c.fs = bb;
      std::string name = renderCat(c, g, nullptr);
      int id = bg.symId(name);
      if (id >= 0) startSyms.push_back(id);
      size_t d = idx.size();
      bool carried = true;
      while (d > 0) {
        --d;
        if (++idx[d] < domains[d].size()) {
          carried = false;
          break;
        }
        idx[d] = 0;
      }
      if (idx.empty() || carried) break;
    }
  }

  // prune: productive symbols, then rules reachable from productive starts
  size_t nSyms = bg.symbols.size();
  std::vector<char> productive(nSyms, 0);
  for (size_t s = 0; s < nSyms; ++s)
    if (bg.symbols[s].terminal) productive[s] = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& pr : proto) {
      if (productive[size_t(pr.lhs)]) continue;
      bool all = true;
      for (int r : pr.rhs)
        if (!productive[size_t(r)]) {
          all = false;
          break;
        }
      if (all) {
        productive[size_t(pr.lhs)] = 1;
        changed = true;
      }
    }
  }
  std::vector<char> reachable(nSyms, 0);
  {
    std::vector<int> work;
    for (int s : startSyms)
      if (productive[size_t(s)] && !reachable[size_t(s)]) {
        reachable[size_t(s)] = 1;
        work.push_back(s);
      }
    while (!work.empty()) {
      int s = work.back();
      work.pop_back();
      for (auto& pr : proto) {
        if (pr.lhs != s) continue;
        bool all = true;
        for (int r : pr.rhs)
          if (!productive[size_t(r)]) {
            all = false;
            break;
          }
        if (!all) continue;
        for (int r : pr.rhs)
          if (!reachable[size_t(r)]) {
            reachable[size_t(r)] = 1;
            work.push_back(r);
          }
      }
    }
  }

  // rebuild with dense ids, original order preserved
  BackboneGrammar out;
  out.vocab = g.vocab;
  out.majorNames = g.majors;
  auto mapSym = [&](int old) -> int {
    const BackboneSymbol& s = bg.symbols[size_t(old)];
    auto it = out.symByName.find(s.name);
    if (it != out.symByName.end()) return it->second;
    out.symbols.push_back(s);
    out.symByName[s.name] = int(out.symbols.size()) - 1;
    return int(out.symbols.size()) - 1;
  };
  for (auto& pr : proto) {
    if (!reachable[size_t(pr.lhs)]) continue;
    bool all = true;
    for (int r : pr.rhs)
      if (!productive[size_t(r)]) {
        all = false;
        break;
      }
    if (!all) continue;
    BackboneRule br;
    br.id = int(out.rules.size());
    br.lhs = mapSym(pr.lhs);
    for (int r : pr.rhs) br.rhs.push_back(mapSym(r));
    br.rhsResidue = pr.rhsResidue;
    br.lhsResidue = pr.lhsResidue;
    br.sourceRule = pr.sourceRule;
    br.aux = pr.aux;
    br.varCount = pr.varCount;
    out.rules.push_back(std::move(br));
  }
  for (int s : startSyms)
    if (productive[size_t(s)] && reachable[size_t(s)])
      out.startSymbols.push_back(mapSym(s));

  // unary-rule cycle detection (would make analysis counts infinite)
  {
    size_t n = out.symbols.size();
    std::vector<std::vector<int>> uni(n);
    for (auto& r : out.rules)
      if (r.rhs.size() == 1 && !out.symbols[size_t(r.rhs[0])].terminal)
        uni[size_t(r.lhs)].push_back(r.rhs[0]);
    std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
    std::function<void(int)> dfs = [&](int s) {
      state[size_t(s)] = 1;
      for (int t : uni[size_t(s)]) {
        if (state[size_t(t)] == 1)
          throw GrammarError(0, 0,
                             "unary rule cycle through symbol " +
                                 out.symbols[size_t(t)].name +
                                 " makes analysis counts infinite");
        if (state[size_t(t)] == 0) dfs(t);
      }
      state[size_t(s)] = 2;
    };
    for (size_t s = 0; s < n; ++s)
      if (state[s] == 0) dfs(int(s));
  }

  // end-of-input terminal, used by the LR tables
  {
    BackboneSymbol s;
    s.name = "$end";
    s.major = -1;
    s.terminal = true;
    out.symbols.push_back(std::move(s));
    out.eot = int(out.symbols.size()) - 1;
    out.symByName["$end"] = out.eot;
  }
  out.rulesByLhs.assign(out.symbols.size(), {});
  for (auto& r : out.rules) out.rulesByLhs[size_t(r.lhs)].push_back(r.id);
  return out;
}

std::optional<FeatureStructure> apply_rule_residue(
    const BackboneRule& rule,
    const std::vector<const FeatureStructure*>& children) {
  UnifyEnv env;
  uint32_t offset = uint32_t(rule.varCount);
  for (size_t j = 0; j < children.size(); ++j) {
    const FeatureStructure& child = *children[j];
    int span = 0;
    for (auto& s : child.slots)
      if (s.second.kind == FeatureValue::Var)
        span = std::max(span, int(s.second.id) + 1);
    FeatureStructure shifted = offset_vars(child, offset);
    offset += uint32_t(span);
    if (!unify_overlap(env, rule.rhsResidue[j], shifted)) return std::nullopt;
  }
  return canonical_fs(resolve_fs(rule.lhsResidue, env));
}

std::string dump_backbone(const BackboneGrammar& bg) {
  std::ostringstream os;
  os << "symbols " << bg.symbols.size() << "\n";
  for (size_t i = 0; i < bg.symbols.size(); ++i) {
    os << "  " << i << " " << bg.symbols[i].name
       << (bg.symbols[i].terminal ? " terminal" : "") << "\n";
  }
  os << "start";
  for (int s : bg.startSymbols) os << " " << s;
  os << "\nrules " << bg.rules.size() << "\n";
  for (auto& r : bg.rules) {
    os << "  " << r.id << " " << bg.symbols[size_t(r.lhs)].name << " ->";
    for (int s : r.rhs) os << " " << bg.symbols[size_t(s)].name;
    os << "  ;";
    if (!r.lhsResidue.empty())
      os << " mother " << fs_to_string(r.lhsResidue, bg.vocab);
    for (size_t p = 0; p < r.rhsResidue.size(); ++p)
      if (!r.rhsResidue[p].empty())
        os << " d" << p << " " << fs_to_string(r.rhsResidue[p], bg.vocab);
    os << " src=" << r.sourceRule << (r.aux ? " aux" : "") << "\n";
  }
  return os.str();
}

}  // namespace problr
