#include "problr/feature.hpp"

#include <algorithm>

namespace problr {

bool unify_overlap(UnifyEnv& env, const FeatureStructure& a,
                   const FeatureStructure& b) {
  size_t i = 0, j = 0;
  while (i < a.slots.size() && j < b.slots.size()) {
    if (a.slots[i].first < b.slots[j].first) ++i;
    else if (b.slots[j].first < a.slots[i].first) ++j;
    else {
      if (!env.meet(a.slots[i].second, b.slots[j].second)) return false;
      ++i;
      ++j;
    }
  }
  return true;
}

FeatureStructure resolve_fs(const FeatureStructure& fs, const UnifyEnv& env) {
  FeatureStructure out;
  out.slots.reserve(fs.slots.size());
  for (auto& s : fs.slots) out.slots.emplace_back(s.first, env.resolve(s.second));
  return out;
}

FeatureStructure canonical_fs(const FeatureStructure& fs) {
  FeatureStructure out;
  out.slots.reserve(fs.slots.size());
  std::map<uint32_t, uint32_t> ren;
  for (auto& s : fs.slots) {
    FeatureValue v = s.second;
    if (v.kind == FeatureValue::Var) {
      auto it = ren.find(v.id);
      if (it == ren.end()) {
        uint32_t n = uint32_t(ren.size());
        ren[v.id] = n;
        v.id = n;
      } else {
        v.id = it->second;
      }
    }
    out.slots.emplace_back(s.first, v);
  }
  return out;
}

FeatureStructure offset_vars(const FeatureStructure& fs, uint32_t offset) {
  FeatureStructure out = fs;
  for (auto& s : out.slots)
    if (s.second.kind == FeatureValue::Var) s.second.id += offset;
  return out;
}

std::optional<FeatureStructure> unify(const FeatureStructure& a,
                                      const FeatureStructure& b) {
  UnifyEnv env;
  if (!unify_overlap(env, a, b)) return std::nullopt;
  FeatureStructure merged;
  size_t i = 0, j = 0;
  while (i < a.slots.size() || j < b.slots.size()) {
    if (j == b.slots.size() ||
        (i < a.slots.size() && a.slots[i].first < b.slots[j].first)) {
      merged.slots.push_back(a.slots[i++]);
    } else if (i == a.slots.size() || b.slots[j].first < a.slots[i].first) {
      merged.slots.push_back(b.slots[j++]);
    } else {
      merged.slots.push_back(a.slots[i]);
      ++i;
      ++j;
    }
  }
  return resolve_fs(merged, env);
}

std::string fs_to_string(const FeatureStructure& fs, const Vocab& vocab) {
  std::string out = "{";
  bool first = true;
  for (auto& s : fs.slots) {
    if (!first) out += ", ";
    first = false;
    out += vocab.feats[size_t(s.first)].name;
    out += "=";
    if (s.second.kind == FeatureValue::Atom)
      out += vocab.atoms[s.second.id];
    else
      out += "V" + std::to_string(s.second.id);
  }
  out += "}";
  return out;
}

}  // namespace problr
