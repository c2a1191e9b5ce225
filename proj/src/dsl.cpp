#include <algorithm>
#include <cctype>
#include <sstream>

#include "problr/grammar.hpp"

namespace problr {
namespace {

struct Cursor {
  const std::string& s;
  int line;
  size_t pos = 0;

  void skipWs() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool done() {
    skipWs();
    return pos >= s.size();
  }
  char peek() {
    skipWs();
    return pos < s.size() ? s[pos] : '\0';
  }
  int col() const { return int(pos) + 1; }
  [[noreturn]] void fail(const std::string& msg) {
    throw GrammarError(line, col(), msg);
  }
};

bool isSymChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '/' || c == '+' || c == '.';
}

std::string readSym(Cursor& cur) {
  cur.skipWs();
  size_t start = cur.pos;
  while (cur.pos < cur.s.size() && isSymChar(cur.s[cur.pos])) ++cur.pos;
  if (cur.pos == start) cur.fail("expected a symbol");
  return cur.s.substr(start, cur.pos - start);
}

struct RuleVarScope {
  std::map<std::string, int>& vars;
  std::vector<std::string>& names;
  int intern(const std::string& name) {
    auto it = vars.find(name);
    if (it != vars.end()) return it->second;
    int id = int(vars.size());
    vars[name] = id;
    names.push_back(name);
    return id;
  }
};

Category parseCategory(Cursor& cur, Grammar& g, RuleVarScope* scope) {
  Category c;
  std::string major = readSym(cur);
  c.major = g.internMajor(major);
  cur.skipWs();
  if (cur.pos < cur.s.size() && cur.s[cur.pos] == '[') {
    ++cur.pos;
    while (true) {
      cur.skipWs();
      if (cur.pos < cur.s.size() && cur.s[cur.pos] == ']') {
        ++cur.pos;
        break;
      }
      std::string fname = readSym(cur);
      int fid = g.vocab.featId(fname);
      if (fid < 0) cur.fail("undeclared feature: " + fname);
      cur.skipWs();
      if (cur.pos >= cur.s.size() || cur.s[cur.pos] != '=')
        cur.fail("expected '=' after feature name");
      ++cur.pos;
      std::string vtext = readSym(cur);
      FeatureValue fv;
      if (std::isupper(static_cast<unsigned char>(vtext[0]))) {
        if (!scope) cur.fail("variable not allowed here: " + vtext);
        fv = FeatureValue::var(uint32_t(scope->intern(vtext)));
      } else {
        int atom = g.vocab.atomId(vtext);
        const FeatureDecl& decl = g.vocab.feats[size_t(fid)];
        if (decl.kind == FeatKind::Backbone) {
          if (atom < 0 ||
              std::find(decl.values.begin(), decl.values.end(), atom) ==
                  decl.values.end())
            cur.fail("value '" + vtext + "' not declared for backbone feature " +
                     fname);
        } else {
          atom = g.vocab.internAtom(vtext);
        }
        fv = FeatureValue::atom(uint32_t(atom));
      }
      if (c.fs.get(fid)) cur.fail("duplicate feature in category: " + fname);
      c.fs.set(fid, fv);
      cur.skipWs();
      if (cur.pos < cur.s.size() && cur.s[cur.pos] == ',') ++cur.pos;
    }
  }
  return c;
}

}  // namespace

Grammar load_grammar(const std::string& text) {
  Grammar g;
  std::vector<std::pair<int, std::string>> startLines;
  std::istringstream in(text);
  std::string raw;
  int lineNo = 0;
  std::set<std::string> ruleNames;

  while (std::getline(in, raw)) {
    ++lineNo;
    std::string line = raw;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    Cursor cur{line, lineNo};
    if (cur.done()) continue;
    std::string kw = readSym(cur);

    if (kw == "feature") {
      std::string name = readSym(cur);
      std::string kind = readSym(cur);
      if (kind == "residue") {
        if (!cur.done()) cur.fail("unexpected text after residue declaration");
        g.vocab.declareFeature(name, FeatKind::Residue, {});
      } else if (kind == "backbone") {
        cur.skipWs();
        if (cur.peek() != '{')
          cur.fail("backbone feature needs a finite value set {v1,v2}");
        ++cur.pos;
        std::vector<int> values;
        while (true) {
          cur.skipWs();
          if (cur.peek() == '}') {
            ++cur.pos;
            break;
          }
          values.push_back(g.vocab.internAtom(readSym(cur)));
          cur.skipWs();
          if (cur.peek() == ',') ++cur.pos;
        }
        if (values.empty())
          cur.fail("backbone feature needs a finite value set {v1,v2}");
        g.vocab.declareFeature(name, FeatKind::Backbone, values);
      } else {
        cur.fail("feature kind must be 'backbone' or 'residue'");
      }
    } else if (kw == "start") {
      startLines.emplace_back(lineNo, line.substr(cur.pos));
    } else if (kw == "rule") {
      size_t colon = line.find(':', cur.pos);
      if (colon == std::string::npos) cur.fail("expected ':' after rule name");
      std::string name = line.substr(cur.pos, colon - cur.pos);
      while (!name.empty() && name.back() == ' ') name.pop_back();
      while (!name.empty() && name.front() == ' ') name.erase(name.begin());
      if (name.empty()) cur.fail("empty rule name");
      if (!ruleNames.insert(name).second)
        throw GrammarError(lineNo, int(cur.pos) + 1, "duplicate rule name: " + name);

      size_t arrow = line.find("->", colon);
      if (arrow == std::string::npos) cur.fail("expected '->' in rule");
      RuleSchema rule;
      rule.name = name;
      rule.line = lineNo;
      std::map<std::string, int> vars;
      RuleVarScope scope{vars, rule.varNames};

      std::string motherText = line.substr(colon + 1, arrow - colon - 1);
      Cursor mcur{motherText, lineNo};
      rule.mother = parseCategory(mcur, g, &scope);
      if (!mcur.done()) mcur.fail("unexpected text after mother category");

      std::string body = line.substr(arrow + 2);
      Cursor bcur{body, lineNo};
      std::set<int> plainVars, starVars;
      while (!bcur.done()) {
        DaughterTerm term;
        std::set<int> termVars;
        if (bcur.peek() == '(') {
          ++bcur.pos;
          while (true) {
            size_t before = vars.size();
            term.alts.push_back(parseCategory(bcur, g, &scope));
            for (size_t v = before; v < vars.size(); ++v) termVars.insert(int(v));
            for (auto& s : term.alts.back().fs.slots)
              if (s.second.kind == FeatureValue::Var)
                termVars.insert(int(s.second.id));
            if (bcur.peek() == '|') {
              ++bcur.pos;
              continue;
            }
            if (bcur.peek() == ')') {
              ++bcur.pos;
              break;
            }
            bcur.fail("expected '|' or ')' in daughter group");
          }
          if (bcur.pos < bcur.s.size() && bcur.s[bcur.pos] == '*') {
            term.mod = DaughterTerm::Star;
            ++bcur.pos;
          } else if (bcur.pos < bcur.s.size() && bcur.s[bcur.pos] == '?') {
            term.mod = DaughterTerm::Opt;
            ++bcur.pos;
          }
        } else {
          term.alts.push_back(parseCategory(bcur, g, &scope));
          for (auto& s : term.alts.back().fs.slots)
            if (s.second.kind == FeatureValue::Var)
              termVars.insert(int(s.second.id));
        }
        auto& sink = term.mod == DaughterTerm::Star ? starVars : plainVars;
        sink.insert(termVars.begin(), termVars.end());
        rule.daughters.push_back(std::move(term));
      }
      if (rule.daughters.empty())
        throw GrammarError(lineNo, int(arrow) + 3, "at least one daughter required");
      for (auto& s : rule.mother.fs.slots)
        if (s.second.kind == FeatureValue::Var) plainVars.insert(int(s.second.id));
      for (int v : starVars)
        if (plainVars.count(v))
          throw GrammarError(lineNo, 1,
                             "variable " + rule.varNames[size_t(v)] +
                                 " crosses a kleene-star boundary");
      rule.varCount = int(vars.size());
      g.rules.push_back(std::move(rule));
    } else {
      cur.fail("expected 'feature', 'start', 'rule' or comment");
    }
  }

  // terminals: majors that never appear as a mother
  std::set<int> mothers;
  for (auto& r : g.rules) mothers.insert(r.mother.major);
  for (int m = 0; m < int(g.majors.size()); ++m)
    if (!mothers.count(m)) g.terminals.insert(m);

  for (auto& r : g.rules)
    for (auto& d : r.daughters)
      for (auto& alt : d.alts)
        if (g.terminals.count(alt.major) && !alt.fs.empty())
          throw GrammarError(r.line, 1,
                             "terminal symbol carries features: " +
                                 g.majors[size_t(alt.major)]);

  if (startLines.empty()) {
    if (!g.rules.empty())
      throw GrammarError(lineNo, 1, "missing start declaration");
    return g;
  }
  if (startLines.size() > 1)
    throw GrammarError(startLines[1].first, 1, "duplicate start declaration");
  {
    Cursor scur{startLines[0].second, startLines[0].first};
    g.start = parseCategory(scur, g, nullptr);
    if (!scur.done()) scur.fail("unexpected text after start symbol");
    g.hasStart = true;
    if (!mothers.count(g.start.major))
      throw GrammarError(startLines[0].first, 1,
                         "start symbol never appears as a mother: " +
                             g.majors[size_t(g.start.major)]);
  }
  return g;
}

}  // namespace problr
