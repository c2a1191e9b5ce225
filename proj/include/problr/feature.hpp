#pragma once
// Flat feature structures over interned feature names and atomic values,
// plus the unifier used both as a public operation and by the parse engine.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace problr {

enum class FeatKind { Backbone, Residue };

struct FeatureDecl {
  std::string name;
  FeatKind kind = FeatKind::Residue;
  std::vector<int> values;  // atom ids; empty for residue features
};

// Interner shared by a Grammar and the BackboneGrammar compiled from it.
struct Vocab {
  std::vector<FeatureDecl> feats;
  std::map<std::string, int> featByName;
  std::vector<std::string> atoms;
  std::map<std::string, int> atomByName;

  int featId(const std::string& name) const {
    auto it = featByName.find(name);
    return it == featByName.end() ? -1 : it->second;
  }
  int atomId(const std::string& name) const {
    auto it = atomByName.find(name);
    return it == atomByName.end() ? -1 : it->second;
  }
  int internAtom(const std::string& name) {
    auto it = atomByName.find(name);
    if (it != atomByName.end()) return it->second;
    atoms.push_back(name);
    atomByName[name] = int(atoms.size()) - 1;
    return int(atoms.size()) - 1;
  }
  int declareFeature(const std::string& name, FeatKind kind,
                     const std::vector<int>& values) {
    if (featByName.count(name))
      throw std::runtime_error("feature redeclared: " + name);
    feats.push_back({name, kind, values});
    featByName[name] = int(feats.size()) - 1;
    return int(feats.size()) - 1;
  }
};

struct FeatureValue {
  enum Kind : uint8_t { Atom, Var };
  Kind kind = Atom;
  uint32_t id = 0;

  static FeatureValue atom(uint32_t a) { return {Atom, a}; }
  static FeatureValue var(uint32_t v) { return {Var, v}; }
  bool operator==(const FeatureValue& o) const {
    return kind == o.kind && id == o.id;
  }
  bool operator<(const FeatureValue& o) const {
    if (kind != o.kind) return kind < o.kind;
    return id < o.id;
  }
};

// Slots sorted by feature id; at most one slot per feature.
struct FeatureStructure {
  std::vector<std::pair<int, FeatureValue>> slots;

  bool empty() const { return slots.empty(); }
  const FeatureValue* get(int feat) const {
    for (auto& s : slots)
      if (s.first == feat) return &s.second;
    return nullptr;
  }
  void set(int feat, FeatureValue v) {
    for (auto& s : slots)
      if (s.first == feat) {
        s.second = v;
        return;
      }
    slots.emplace_back(feat, v);
    for (size_t i = slots.size(); i-- > 1;)
      if (slots[i].first < slots[i - 1].first) std::swap(slots[i], slots[i - 1]);
  }
  bool operator==(const FeatureStructure& o) const { return slots == o.slots; }
  bool operator<(const FeatureStructure& o) const { return slots < o.slots; }
};

// Variable bindings discovered during unification. Variables from distinct
// structures must be renamed apart by the caller unless sharing is intended.
struct UnifyEnv {
  std::map<uint32_t, FeatureValue> bind;
  uint32_t nextFresh = 1u << 20;  // above any grammar-local variable id

  uint32_t fresh() { return nextFresh++; }

  FeatureValue resolve(FeatureValue v) const {
    while (v.kind == FeatureValue::Var) {
      auto it = bind.find(v.id);
      if (it == bind.end()) return v;
      v = it->second;
    }
    return v;
  }
  // Unify two values; false on atom clash.
  bool meet(FeatureValue a, FeatureValue b) {
    a = resolve(a);
    b = resolve(b);
    if (a == b) return true;
    if (a.kind == FeatureValue::Atom && b.kind == FeatureValue::Atom)
      return false;
    if (a.kind == FeatureValue::Var && b.kind == FeatureValue::Var) {
      // bind the higher id to the lower for canonical-ish results
      if (a.id < b.id) bind[b.id] = a;
      else bind[a.id] = b;
      return true;
    }
    if (a.kind == FeatureValue::Var) bind[a.id] = b;
    else bind[b.id] = a;
    return true;
  }
};

// Unify only the features present in both; used at reduce time where a rule
// constraint meets a daughter's exported structure.
bool unify_overlap(UnifyEnv& env, const FeatureStructure& a,
                   const FeatureStructure& b);

// Resolve every slot through the environment.
FeatureStructure resolve_fs(const FeatureStructure& fs, const UnifyEnv& env);

// Rename variables to 0,1,2,... in order of first occurrence (slots are
// feature-sorted, so equal structures canonicalize identically).
FeatureStructure canonical_fs(const FeatureStructure& fs);

// Rename variables by a fixed offset (keeps structures from different
// sources disjoint inside one environment).
FeatureStructure offset_vars(const FeatureStructure& fs, uint32_t offset);

// Public operation: least upper bound of two structures sharing one variable
// namespace. nullopt on failure.
std::optional<FeatureStructure> unify(const FeatureStructure& a,
                                      const FeatureStructure& b);

// Render "{f=v, g=V0}" using vocab names; variables print as V<n>.
std::string fs_to_string(const FeatureStructure& fs, const Vocab& vocab);

}  // namespace problr
