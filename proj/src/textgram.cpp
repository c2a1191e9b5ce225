#include <algorithm>
#include <set>
#include <sstream>

#include "problr/textgram.hpp"

namespace problr {
namespace {

const char* kTextGrammarSource = R"GLR(# Punctuation sentence grammar.
# Terminals: w (word) and the punctuation labels pco , psc ; pcl : pda --
# pbo ( pbc ) pfs . pqu ? pex !
#
# sc: unit closed by a semicolon          cl: unit contains a colon adjunct
# da: constituent contains a dash         bal: adjunct delimiter pairing
# ta: residue mark carried by adjoined hosts (used by integration)

feature sc backbone {+, -}
feature cl backbone {+, -}
feature da backbone {+, -}
feature bal backbone {-, da, bo, co}
feature ta residue

start TxtS

# sentence layer
rule T/txt-sc1: TxtS -> (Tu[sc=+])* Tu[sc=-] (pex | pqu)?
rule T/txt-sc2: TxtS -> (Tu[sc=+])* Tu[sc=-] pfs

# unit layer; an unbalanced dash adjunct must close its unit
rule tu/base: Tu[sc=-, da=D] -> T[sc=-, cl=-, da=D]
rule Ta/dash-: Tu[sc=-] -> T[sc=-, cl=-, da=-] Ta[da=+, bal=-]
rule tu/colon: Tu[sc=-, da=D] -> T[sc=-, cl=-, da=-] pcl TuB[da=D]
rule tu/semi: Tu[sc=+, da=D] -> TuB[da=D] psc

# unit body: colon-free content of semicolon and colon units
rule tub/base: TuB[da=D] -> T[sc=-, cl=-, da=D]
rule tub/dash: TuB[da=+] -> T[sc=-, cl=-, da=-] Ta[da=+, bal=-]

# adjunct zone; bracketed adjuncts require a dash-free host
rule t/base: T[sc=-, cl=-, da=-] -> Tc
rule t/adj-co: T[sc=-, cl=-, da=D] -> T[sc=-, cl=-, da=D] Ta[da=-, bal=co] Tc
rule t/adj-bo: T[sc=-, cl=-, da=-] -> T[sc=-, cl=-, da=-] Ta[da=-, bal=bo] Tc
rule t/adj-bo-fin: T[sc=-, cl=-, da=-] -> T[sc=-, cl=-, da=-] Ta[da=-, bal=bo]
rule t/adj-da: T[sc=-, cl=-, da=+] -> T[sc=-, cl=-, da=-] Ta[da=+, bal=da] Tc

# adjunct definitions
rule ta/co: Ta[da=-, bal=co] -> pco T[sc=-, cl=-, da=-] pco
rule ta/bo: Ta[da=-, bal=bo] -> pbo T[sc=-, cl=-] pbc
rule ta/da: Ta[da=+, bal=da] -> pda T[sc=-, cl=-, da=-] pda
rule T/t_ta-da-_t: Ta[da=+, bal=-] -> pda Tu[sc=-, da=-]

# separator zone: comma as separator, ambiguous grouping
rule tc/word: Tc -> WD
rule tc/sep: Tc -> Tc pco Tc

# word runs
rule wd/one: WD -> w
rule wd/more: WD -> WD w
)GLR";

// Import a category across grammars; feature names must already be declared
// in dst, atoms are interned by name, variable ids stay rule-local.
Category importCat(const Category& c, const Grammar& src, Grammar& dst) {
  Category out;
  out.major = dst.internMajor(src.majors[size_t(c.major)]);
  for (auto& s : c.fs.slots) {
    int fid = dst.vocab.featId(src.vocab.feats[size_t(s.first)].name);
    FeatureValue v = s.second;
    if (v.kind == FeatureValue::Atom)
      v = FeatureValue::atom(
          uint32_t(dst.vocab.internAtom(src.vocab.atoms[v.id])));
    out.fs.set(fid, v);
  }
  return out;
}

void importFeatures(const Grammar& src, Grammar& dst) {
  for (auto& f : src.vocab.feats) {
    std::vector<int> values;
    for (int a : f.values)
      values.push_back(dst.vocab.internAtom(src.vocab.atoms[size_t(a)]));
    dst.vocab.declareFeature(f.name, f.kind, values);
  }
}

bool mentionsMajor(const RuleSchema& r, const std::set<int>& majors) {
  if (majors.count(r.mother.major)) return true;
  for (auto& d : r.daughters)
    for (auto& alt : d.alts)
      if (majors.count(alt.major)) return true;
  return false;
}

std::string joinNames(const std::vector<std::string>& names) {
  std::string out;
  for (auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

}  // namespace

const std::string& text_grammar_source() {
  static const std::string s = kTextGrammarSource;
  return s;
}

Grammar text_grammar() { return load_grammar(text_grammar_source()); }

Grammar integrate(const Grammar& pos, const Grammar& txt,
                  const IntegrateOptions& opts) {
  if (txt.empty()) return pos;

  std::vector<std::string> collisions;
  for (auto& f : txt.vocab.feats)
    if (pos.vocab.featId(f.name) >= 0) collisions.push_back(f.name);
  if (!collisions.empty())
    throw TextGrammarError("feature namespace collision: " +
                           joinNames(collisions));
  {
    std::set<std::string> posRules;
    for (auto& r : pos.rules) posRules.insert(r.name);
    std::vector<std::string> dup;
    for (auto& r : txt.rules)
      if (posRules.count(r.name)) dup.push_back(r.name);
    if (!dup.empty())
      throw TextGrammarError("rule name collision: " + joinNames(dup));
  }

  Grammar g;
  importFeatures(pos, g);
  importFeatures(txt, g);
  for (auto& name : pos.majors) g.internMajor(name);

  std::set<int> dropTxt;
  for (auto& name : opts.wordMajors) {
    int m = txt.majorId(name);
    if (m >= 0) dropTxt.insert(m);
  }
  for (auto& r : pos.rules) {
    RuleSchema nr;
    nr.name = r.name;
    nr.line = r.line;
    nr.varCount = r.varCount;
    nr.varNames = r.varNames;
    nr.mother = importCat(r.mother, pos, g);
    for (auto& d : r.daughters) {
      DaughterTerm nd;
      nd.mod = d.mod;
      for (auto& alt : d.alts) nd.alts.push_back(importCat(alt, pos, g));
      nr.daughters.push_back(std::move(nd));
    }
    g.rules.push_back(std::move(nr));
  }
  for (auto& r : txt.rules) {
    if (mentionsMajor(r, dropTxt)) continue;
    RuleSchema nr;
    nr.name = r.name;
    nr.line = r.line;
    nr.varCount = r.varCount;
    nr.varNames = r.varNames;
    nr.mother = importCat(r.mother, txt, g);
    for (auto& d : r.daughters) {
      DaughterTerm nd;
      nd.mod = d.mod;
      for (auto& alt : d.alts) nd.alts.push_back(importCat(alt, txt, g));
      nr.daughters.push_back(std::move(nd));
    }
    g.rules.push_back(std::move(nr));
  }

  std::set<int> posMothers;
  for (auto& r : pos.rules) posMothers.insert(r.mother.major);

  std::vector<std::string> hosts = opts.hosts;
  if (hosts.empty())
    for (int m : posMothers) hosts.push_back(pos.majors[size_t(m)]);
  std::vector<std::string> fillers = opts.fillers;
  if (fillers.empty()) {
    if (!pos.hasStart)
      throw TextGrammarError("no fillers given and the tag grammar has no start");
    fillers.push_back(pos.majors[size_t(pos.start.major)]);
  }
  for (auto& name : hosts)
    if (pos.majorId(name) < 0 || !posMothers.count(pos.majorId(name)))
      throw TextGrammarError("host is not a tag-grammar mother: " + name);
  for (auto& name : fillers)
    if (pos.majorId(name) < 0 || !posMothers.count(pos.majorId(name)))
      throw TextGrammarError("filler is not a tag-grammar mother: " + name);

  int siteMajor = g.majorId(opts.fillerSite);
  if (txt.majorId(opts.fillerSite) < 0)
    throw TextGrammarError("filler site is not a text-grammar category: " +
                           opts.fillerSite);
  int taFeat = g.vocab.featId("ta");
  int balFeat = g.vocab.featId("bal");
  int daFeat = g.vocab.featId("da");
  if (taFeat < 0 || balFeat < 0 || daFeat < 0)
    throw TextGrammarError(
        "text grammar must declare features ta, bal and da");
  FeatureValue plus = FeatureValue::atom(uint32_t(g.vocab.internAtom("+")));
  FeatureValue minus = FeatureValue::atom(uint32_t(g.vocab.internAtom("-")));
  int taMajor = g.majorId("Ta");
  if (taMajor < 0)
    throw TextGrammarError("text grammar must define an adjunct category Ta");

  for (auto& f : fillers) {
    RuleSchema fr;
    fr.name = "fill/" + f;
    fr.mother.major = siteMajor;
    DaughterTerm d;
    Category c;
    c.major = g.majorId(f);
    d.alts.push_back(c);
    fr.daughters.push_back(std::move(d));
    g.rules.push_back(std::move(fr));

    RuleSchema pre;
    pre.name = "pre/" + f;
    pre.mother.major = taMajor;
    pre.mother.fs.set(balFeat, minus);
    pre.mother.fs.set(daFeat, minus);
    DaughterTerm d0;
    d0.alts.push_back(c);
    pre.daughters.push_back(std::move(d0));
    DaughterTerm d1;
    Category comma;
    comma.major = g.internMajor("pco");
    d1.alts.push_back(comma);
    pre.daughters.push_back(std::move(d1));
    g.rules.push_back(std::move(pre));
  }

  // backbone features mentioned on each pos major, linked through adjunction
  std::map<int, std::set<int>> posFeatSet;
  auto note = [&](const Category& c) {
    for (auto& s : c.fs.slots)
      if (pos.vocab.feats[size_t(s.first)].kind == FeatKind::Backbone)
        posFeatSet[c.major].insert(
            g.vocab.featId(pos.vocab.feats[size_t(s.first)].name));
  };
  for (auto& r : pos.rules) {
    note(r.mother);
    for (auto& d : r.daughters)
      for (auto& alt : d.alts) note(alt);
  }
  std::vector<int> posResidue;
  for (auto& f : pos.vocab.feats)
    if (f.kind == FeatKind::Residue) posResidue.push_back(g.vocab.featId(f.name));

  const std::vector<std::string> pairings = {"da", "bo", "co"};
  for (auto& h : hosts) {
    int hm = g.majorId(h);
    std::vector<int> linked;
    for (int f : posFeatSet[pos.majorId(h)]) linked.push_back(f);
    for (int f : posResidue) linked.push_back(f);

    auto hostPair = [&](RuleSchema& r) {
      Category mother, host;
      mother.major = hm;
      host.major = hm;
      for (size_t i = 0; i < linked.size(); ++i) {
        FeatureValue v = FeatureValue::var(uint32_t(i));
        mother.fs.set(linked[size_t(i)], v);
        host.fs.set(linked[size_t(i)], v);
        r.varNames.push_back("V" + std::to_string(i));
      }
      mother.fs.set(taFeat, plus);
      host.fs.set(taFeat, minus);
      r.varCount = int(linked.size());
      r.mother = mother;
      return host;
    };

    for (auto& b : pairings) {
      RuleSchema r;
      r.name = "adj/" + h + "-" + b;
      Category host = hostPair(r);
      Category adj;
      adj.major = taMajor;
      adj.fs.set(balFeat,
                 FeatureValue::atom(uint32_t(g.vocab.internAtom(b))));
      DaughterTerm d0, d1;
      d0.alts.push_back(host);
      d1.alts.push_back(adj);
      r.daughters.push_back(std::move(d0));
      r.daughters.push_back(std::move(d1));
      g.rules.push_back(std::move(r));
    }
    {
      RuleSchema r;
      r.name = "adj/" + h + "-pre";
      Category host = hostPair(r);
      Category adj;
      adj.major = taMajor;
      adj.fs.set(balFeat, minus);
      adj.fs.set(daFeat, minus);
      DaughterTerm d0, d1;
      d0.alts.push_back(adj);
      d1.alts.push_back(host);
      r.daughters.push_back(std::move(d0));
      r.daughters.push_back(std::move(d1));
      g.rules.push_back(std::move(r));
    }
  }

  g.start = importCat(txt.start, txt, g);
  g.hasStart = true;

  std::set<int> mothers;
  for (auto& r : g.rules) mothers.insert(r.mother.major);
  g.terminals.clear();
  for (int m = 0; m < int(g.majors.size()); ++m)
    if (!mothers.count(m)) g.terminals.insert(m);
  return g;
}

const std::vector<std::string>& punct_labels() {
  static const std::vector<std::string> labels = {
      "pco", "psc", "pcl", "pda", "pbo", "pbc", "pfs", "pqu", "pex"};
  return labels;
}

DepunctResult depunctuate(const std::vector<Token>& tokens) {
  static const std::set<std::string> punct(punct_labels().begin(),
                                           punct_labels().end());
  static const std::set<std::string> terminators = {"pfs", "pqu", "pex"};
  DepunctResult out;
  int n = int(tokens.size());
  for (int i = 0; i < n; ++i) {
    bool isPunct = punct.count(tokens[i].label) > 0;
    bool keep =
        !isPunct || (i == n - 1 && terminators.count(tokens[i].label) > 0);
    if (!keep) continue;
    out.indexMap[i] = int(out.tokens.size());
    out.tokens.push_back(tokens[i]);
  }
  return out;
}

}  // namespace problr
