#include "problr/grammar.hpp"

namespace problr {

std::string category_to_string(const Category& c, const Grammar& g) {
  std::string out = c.major >= 0 ? g.majors[size_t(c.major)] : "?";
  if (c.fs.empty()) return out;
  out += "[";
  bool first = true;
  for (auto& s : c.fs.slots) {
    if (!first) out += ",";
    first = false;
    out += g.vocab.feats[size_t(s.first)].name;
    out += "=";
    if (s.second.kind == FeatureValue::Atom)
      out += g.vocab.atoms[s.second.id];
    else if (s.second.id < 1000)
      out += "$" + std::to_string(s.second.id);
    else
      out += "V" + std::to_string(s.second.id);
  }
  out += "]";
  return out;
}

}  // namespace problr
