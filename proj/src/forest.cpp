#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "problr/forest.hpp"

namespace problr {

CountResult count_analyses(const ParseForest& forest, const BigInt* limit) {
  CountResult out;
  if (forest.status != ParseStatus::Ok) return out;
  std::vector<BigInt> memo(forest.nodes.size(), -1);
  std::function<const BigInt&(int)> cnt = [&](int id) -> const BigInt& {
    BigInt& m = memo[size_t(id)];
    if (m >= 0) return m;
    const ForestNode& n = forest.nodes[size_t(id)];
    if (n.leaf) {
      m = 1;
      return m;
    }
    BigInt total = 0;
    for (auto& p : n.packs) {
      BigInt prod = 1;
      for (int c : p.children) prod *= cnt(c);
      total += prod;
    }
    m = total;
    return m;
  };
  for (int r : forest.roots) out.count += cnt(r);
  if (limit && out.count > *limit) out.exceeded = true;
  return out;
}

namespace {

struct Unpacker {
  const ParseForest& forest;
  size_t cap;
  bool truncated = false;
  size_t made = 0;
  std::map<int, std::vector<DerivPtr>> memo{};

  const std::vector<DerivPtr>& trees(int id) {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const ForestNode& n = forest.nodes[size_t(id)];
    std::vector<DerivPtr> out;
    if (n.leaf) {
      auto t = std::make_shared<DerivTree>();
      t->sym = n.sym;
      t->start = n.start;
      t->end = n.end;
      out.push_back(std::move(t));
    } else {
      for (auto& p : n.packs) {
        std::vector<const std::vector<DerivPtr>*> lists;
        for (int c : p.children) lists.push_back(&trees(c));
        std::vector<size_t> idx(lists.size(), 0);
        while (true) {
          bool any = true;
          for (size_t k = 0; k < lists.size(); ++k)
            if (idx[k] >= lists[k]->size()) any = false;
          if (!any) break;
          if (made >= cap) {
            truncated = true;
            break;
          }
          auto t = std::make_shared<DerivTree>();
          t->rule = p.rule;
          t->sym = n.sym;
          t->start = n.start;
          t->end = n.end;
          t->exportFS = n.residue;
          for (size_t k = 0; k < lists.size(); ++k)
            t->children.push_back((*lists[k])[idx[k]]);
          out.push_back(std::move(t));
          ++made;
          size_t d = idx.size();
          bool carried = true;
          while (d > 0) {
            --d;
            if (++idx[d] < lists[d]->size()) {
              carried = false;
              break;
            }
            idx[d] = 0;
          }
          if (idx.empty() || carried) break;
        }
        if (truncated) break;
      }
    }
    return memo.emplace(id, std::move(out)).first->second;
  }
};

}  // namespace

UnpackResult unpack_all(const ParseForest& forest, size_t cap) {
  UnpackResult out;
  if (forest.status != ParseStatus::Ok) return out;
  Unpacker u{forest, cap};
  for (int r : forest.roots) {
    auto& ts = u.trees(r);
    out.trees.insert(out.trees.end(), ts.begin(), ts.end());
  }
  out.truncated = u.truncated;
  return out;
}

std::string tree_to_string(const DerivTree& t, const BackboneGrammar& bg) {
  std::string out = "(" + bg.symbols[size_t(t.sym)].name + "@" +
                    std::to_string(t.start) + "-" + std::to_string(t.end);
  if (t.rule >= 0) out += ":" + std::to_string(t.rule);
  for (auto& c : t.children) out += " " + tree_to_string(*c, bg);
  out += ")";
  return out;
}

namespace {

void spliceAux(const DerivTree& t, const BackboneGrammar& bg,
               std::vector<const DerivTree*>& out) {
  // flatten the left-recursive auxiliary spine into its iterated daughters
  if (t.rule >= 0 && bg.rules[size_t(t.rule)].aux) {
    for (auto& c : t.children) spliceAux(*c, bg, out);
  } else {
    out.push_back(&t);
  }
}

void schemaRender(const DerivTree& t, const BackboneGrammar& bg,
                  std::string& out) {
  if (t.rule < 0) {
    out += bg.symbols[size_t(t.sym)].name;
    out += "@" + std::to_string(t.start);
    return;
  }
  const BackboneRule& r = bg.rules[size_t(t.rule)];
  out += "(" + r.sourceRule + " " + bg.symbols[size_t(t.sym)].name + "@" +
         std::to_string(t.start) + "-" + std::to_string(t.end);
  std::vector<const DerivTree*> kids;
  for (auto& c : t.children) spliceAux(*c, bg, kids);
  for (auto* c : kids) {
    out += " ";
    schemaRender(*c, bg, out);
  }
  out += ")";
}

void schemaBrackets(const DerivTree& t, const BackboneGrammar& bg,
                    std::set<std::pair<int, int>>& out) {
  if (t.rule < 0) return;
  out.insert({t.start, t.end});
  std::vector<const DerivTree*> kids;
  for (auto& c : t.children) spliceAux(*c, bg, kids);
  for (auto* c : kids) schemaBrackets(*c, bg, out);
}

}  // namespace

std::string schema_tree_to_string(const DerivTree& t, const BackboneGrammar& bg) {
  std::string out;
  schemaRender(t, bg, out);
  return out;
}

std::vector<std::pair<int, int>> tree_brackets(const DerivTree& t,
                                               const BackboneGrammar& bg) {
  std::set<std::pair<int, int>> s;
  schemaBrackets(t, bg, s);
  return {s.begin(), s.end()};
}

std::string dump_forest(const ParseForest& forest, const BackboneGrammar& bg) {
  std::ostringstream os;
  os << "status ";
  switch (forest.status) {
    case ParseStatus::Ok: os << "ok"; break;
    case ParseStatus::NoParse: os << "no-parse"; break;
    case ParseStatus::Timeout: os << "timeout"; break;
  }
  os << "\ntokens";
  for (auto& t : forest.tokens) os << " " << t.surface << "_" << t.label;
  os << "\nnodes " << forest.nodes.size() << "\n";
  for (size_t i = 0; i < forest.nodes.size(); ++i) {
    const ForestNode& n = forest.nodes[i];
    os << "  " << i << " " << bg.symbols[size_t(n.sym)].name << " " << n.start
       << ".." << n.end;
    if (!n.residue.empty()) os << " " << fs_to_string(n.residue, bg.vocab);
    if (n.leaf) os << " leaf";
    os << "\n";
    for (auto& p : n.packs) {
      os << "    pack rule=" << p.rule << " children";
      for (int c : p.children) os << " " << c;
      os << "\n";
    }
  }
  os << "roots";
  for (int r : forest.roots) os << " " << r;
  os << "\nrightmost-shift " << forest.rightmostShift << "\n";
  return os.str();
}

}  // namespace problr
