#pragma once

// Tower description files: a YAML document with the sections
//
//   groups:            name -> {generators: n, relators: [[...], ...]}
//   maps:              name -> {source: G, target: H, matrix: [[...], ...]}
//   tower:             {prefix: [{group, bond}], tail: {group, endo, splice}}
//                      or {family: {name, params}}
//   towers:            name -> tower (used by ses)
//   ses:               {sub, total, quot, inject: {prefix, tail}, surject: {...}}
//                      or {family: {name, params}}
//   complexes:         name -> {vertices: n, simplices: [[...], ...]}
//   simplicial_maps:   name -> {source, target, vertex_map: [...]}
//   simplicial_tower:  {prefix: [{complex, bond}], tail: {complex, bond, splice}}
//                      or {example: {name, params}}
//
// A bond between complexes is {map: f} or {sd: K, down: f, retract: r}. A
// prefix entry's bond maps it to the previous prefix level. Matrices are row
// lists of decimal integers; relators are rows of length `generators`.

#include <yaml-cpp/yaml.h>

#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "shapelim/errors.hpp"
#include "shapelim/exactlat.hpp"
#include "shapelim/shape.hpp"
#include "shapelim/towers.hpp"

namespace shapelim {

using Rows = std::vector<std::vector<Integer>>;

struct GroupSpec {
  std::size_t generators = 0;
  Rows relators;
  bool operator==(const GroupSpec&) const = default;
};

struct MapSpec {
  std::string source;
  std::string target;
  Rows matrix;
  bool operator==(const MapSpec&) const = default;
};

struct FamilySpec {
  std::string name;
  std::vector<Integer> params;
  bool operator==(const FamilySpec&) const = default;
};

struct PrefixLevelSpec {
  std::string group;
  std::optional<std::string> bond;
  bool operator==(const PrefixLevelSpec&) const = default;
};

struct TowerSpec {
  std::optional<FamilySpec> family;
  std::vector<PrefixLevelSpec> prefix;
  std::string tail_group;
  std::string tail_endo;
  std::optional<std::string> splice;
  bool operator==(const TowerSpec&) const = default;
};

struct LevelMapsSpec {
  std::vector<std::string> prefix;
  std::string tail;
  bool operator==(const LevelMapsSpec&) const = default;
};

struct SesSpec {
  std::optional<FamilySpec> family;
  std::string sub, total, quot;
  LevelMapsSpec inject, surject;
  bool operator==(const SesSpec&) const = default;
};

struct ComplexSpec {
  std::size_t vertices = 0;
  std::vector<std::vector<std::size_t>> simplices;
  bool operator==(const ComplexSpec&) const = default;
};

struct SimplicialMapSpec {
  std::string source, target;
  std::vector<std::size_t> vertex_map;
  bool operator==(const SimplicialMapSpec&) const = default;
};

struct BondSpec {
  std::optional<std::string> map;  // plain simplicial map
  std::string sd, down, retract;   // subdivided bond otherwise
  bool operator==(const BondSpec&) const = default;
};

struct ComplexLevelSpec {
  std::string complex;
  std::optional<BondSpec> bond;
  bool operator==(const ComplexLevelSpec&) const = default;
};

struct SimplicialTowerSpec {
  std::optional<FamilySpec> example;
  std::vector<ComplexLevelSpec> prefix;
  std::string tail_complex;
  BondSpec tail_bond;
  std::optional<BondSpec> splice;
  bool operator==(const SimplicialTowerSpec&) const = default;
};

struct TowerFile {
  std::map<std::string, GroupSpec> groups;
  std::map<std::string, MapSpec> maps;
  std::optional<TowerSpec> tower;
  std::map<std::string, TowerSpec> towers;
  std::optional<SesSpec> ses;
  std::map<std::string, ComplexSpec> complexes;
  std::map<std::string, SimplicialMapSpec> simplicial_maps;
  std::optional<SimplicialTowerSpec> simplicial_tower;
  bool operator==(const TowerFile&) const = default;
};

// ---------------------------------------------------------------------------
// Reading

namespace detail {

class YamlReader {
 public:
  [[noreturn]] static void fail(const YAML::Node& n, const std::string& what) {
    const YAML::Mark m = n.Mark();
    if (m.is_null()) throw ParseError(what, 1, 1);
    throw ParseError(what, static_cast<std::size_t>(m.line) + 1, static_cast<std::size_t>(m.column) + 1);
  }

  static void require_map(const YAML::Node& n, const std::string& what) {
    if (!n.IsMap()) fail(n, what + " must be a mapping");
  }

  static void require_seq(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence()) fail(n, what + " must be a list");
  }

  // Rejects keys outside `allowed` and duplicate keys.
  static void keys(const YAML::Node& n, const std::string& what, const std::set<std::string>& allowed) {
    require_map(n, what);
    std::set<std::string> seen;
    for (const auto& kv : n) {
      const std::string k = key(kv.first);
      if (!allowed.count(k)) fail(kv.first, "unknown key '" + k + "' in " + what);
      if (!seen.insert(k).second) fail(kv.first, "duplicate key '" + k + "' in " + what);
    }
  }

  static std::string key(const YAML::Node& n) {
    if (!n.IsScalar()) fail(n, "keys must be plain names");
    return n.Scalar();
  }

  static YAML::Node need(const YAML::Node& n, const std::string& k, const std::string& what) {
    YAML::Node v = n[k];
    if (!v) fail(n, what + " is missing '" + k + "'");
    return v;
  }

  static std::string name(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar() || n.Scalar().empty()) fail(n, what + " must be a name");
    return n.Scalar();
  }

  static Integer integer(const YAML::Node& n) {
    static const std::regex pat("-?[0-9]+");
    if (!n.IsScalar() || !std::regex_match(n.Scalar(), pat)) fail(n, "expected a decimal integer");
    return Integer(n.Scalar());
  }

  static std::size_t count(const YAML::Node& n) {
    static const std::regex pat("[0-9]{1,9}");
    if (!n.IsScalar() || !std::regex_match(n.Scalar(), pat)) fail(n, "expected a non-negative count");
    return static_cast<std::size_t>(std::stoul(n.Scalar()));
  }

  static std::vector<Integer> integers(const YAML::Node& n, const std::string& what) {
    require_seq(n, what);
    std::vector<Integer> out;
    for (const auto& x : n) out.push_back(integer(x));
    return out;
  }

  static std::vector<std::size_t> counts(const YAML::Node& n, const std::string& what) {
    require_seq(n, what);
    std::vector<std::size_t> out;
    for (const auto& x : n) out.push_back(count(x));
    return out;
  }

  static Rows rows(const YAML::Node& n, const std::string& what) {
    require_seq(n, what);
    Rows out;
    for (const auto& r : n) out.push_back(integers(r, "a row of " + what));
    return out;
  }

  template <class T, class F>
  static std::map<std::string, T> named(const YAML::Node& n, const std::string& what, F read) {
    require_map(n, what);
    std::map<std::string, T> out;
    for (const auto& kv : n) {
      const std::string k = key(kv.first);
      if (!out.emplace(k, read(kv.second, what + " '" + k + "'")).second)
        fail(kv.first, "duplicate name '" + k + "' in " + what);
    }
    return out;
  }

  static FamilySpec family(const YAML::Node& n, const std::string& what) {
    keys(n, what, {"name", "params"});
    FamilySpec f;
    f.name = name(need(n, "name", what), what + " name");
    if (n["params"]) f.params = integers(n["params"], what + " params");
    return f;
  }

  static GroupSpec group(const YAML::Node& n, const std::string& what) {
    keys(n, what, {"generators", "relators"});
    GroupSpec g;
    g.generators = count(need(n, "generators", what));
    if (n["relators"]) g.relators = rows(n["relators"], what + " relators");
    for (std::size_t k = 0; k < g.relators.size(); ++k)
      if (g.relators[k].size() != g.generators)
        fail(n["relators"][k], "relator of " + what + " must have one entry per generator");
    return g;
  }

  static MapSpec map(const YAML::Node& n, const std::string& what) {
    keys(n, what, {"source", "target", "matrix"});
    return {name(need(n, "source", what), "source"), name(need(n, "target", what), "target"),
            rows(need(n, "matrix", what), what + " matrix")};
  }

  static TowerSpec tower(const YAML::Node& n, const std::string& what) {
    require_map(n, what);
    TowerSpec t;
    if (n["family"]) {
      keys(n, what, {"family"});
      t.family = family(n["family"], what + " family");
      return t;
    }
    keys(n, what, {"prefix", "tail"});
    if (n["prefix"]) {
      require_seq(n["prefix"], what + " prefix");
      for (const auto& lv : n["prefix"]) {
        keys(lv, "prefix level", {"group", "bond"});
        PrefixLevelSpec p{name(need(lv, "group", "prefix level"), "group"), std::nullopt};
        if (lv["bond"]) p.bond = name(lv["bond"], "bond");
        t.prefix.push_back(std::move(p));
      }
    }
    YAML::Node tail = need(n, "tail", what);
    keys(tail, what + " tail", {"group", "endo", "splice"});
    t.tail_group = name(need(tail, "group", "tail"), "group");
    t.tail_endo = name(need(tail, "endo", "tail"), "endo");
    if (tail["splice"]) t.splice = name(tail["splice"], "splice");
    return t;
  }

  static LevelMapsSpec level_maps(const YAML::Node& n, const std::string& what) {
    keys(n, what, {"prefix", "tail"});
    LevelMapsSpec m;
    if (n["prefix"]) {
      require_seq(n["prefix"], what + " prefix");
      for (const auto& x : n["prefix"]) m.prefix.push_back(name(x, "map"));
    }
    m.tail = name(need(n, "tail", what), "map");
    return m;
  }

  static SesSpec ses(const YAML::Node& n) {
    require_map(n, "ses");
    SesSpec s;
    if (n["family"]) {
      keys(n, "ses", {"family"});
      s.family = family(n["family"], "ses family");
      return s;
    }
    keys(n, "ses", {"sub", "total", "quot", "inject", "surject"});
    s.sub = name(need(n, "sub", "ses"), "tower");
    s.total = name(need(n, "total", "ses"), "tower");
    s.quot = name(need(n, "quot", "ses"), "tower");
    s.inject = level_maps(need(n, "inject", "ses"), "ses inject");
    s.surject = level_maps(need(n, "surject", "ses"), "ses surject");
    return s;
  }

  static ComplexSpec complex(const YAML::Node& n, const std::string& what) {
    keys(n, what, {"vertices", "simplices"});
    ComplexSpec c;
    c.vertices = count(need(n, "vertices", what));
    if (n["simplices"]) {
      require_seq(n["simplices"], what + " simplices");
      for (const auto& s : n["simplices"]) c.simplices.push_back(counts(s, "simplex"));
    }
    return c;
  }

  static SimplicialMapSpec simplicial_map(const YAML::Node& n, const std::string& what) {
    keys(n, what, {"source", "target", "vertex_map"});
    return {name(need(n, "source", what), "source"), name(need(n, "target", what), "target"),
            counts(need(n, "vertex_map", what), what + " vertex_map")};
  }

  static BondSpec bond(const YAML::Node& n, const std::string& what) {
    require_map(n, what);
    BondSpec b;
    if (n["map"]) {
      keys(n, what, {"map"});
      b.map = name(n["map"], "map");
      return b;
    }
    keys(n, what, {"sd", "down", "retract"});
    b.sd = name(need(n, "sd", what), "complex");
    b.down = name(need(n, "down", what), "map");
    b.retract = name(need(n, "retract", what), "map");
    return b;
  }

  static SimplicialTowerSpec simplicial_tower(const YAML::Node& n) {
    const std::string what = "simplicial_tower";
    require_map(n, what);
    SimplicialTowerSpec s;
    if (n["example"]) {
      keys(n, what, {"example"});
      s.example = family(n["example"], "example");
      return s;
    }
    keys(n, what, {"prefix", "tail"});
    if (n["prefix"]) {
      require_seq(n["prefix"], what + " prefix");
      for (const auto& lv : n["prefix"]) {
        keys(lv, "prefix level", {"complex", "bond"});
        ComplexLevelSpec c{name(need(lv, "complex", "prefix level"), "complex"), std::nullopt};
        if (lv["bond"]) c.bond = bond(lv["bond"], "prefix bond");
        s.prefix.push_back(std::move(c));
      }
    }
    YAML::Node tail = need(n, "tail", what);
    keys(tail, what + " tail", {"complex", "bond", "splice"});
    s.tail_complex = name(need(tail, "complex", "tail"), "complex");
    s.tail_bond = bond(need(tail, "bond", "tail"), "tail bond");
    if (tail["splice"]) s.splice = bond(tail["splice"], "splice");
    return s;
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Resolution

/// Builds the algebraic and simplicial objects a document names. Every
/// lookup resolves references and checks dimensions.
class TowerFileResolver {
 public:
  explicit TowerFileResolver(const TowerFile& doc) : doc_(doc) {}

  FgAbGroup group(const std::string& name) const {
    auto it = doc_.groups.find(name);
    if (it == doc_.groups.end()) throw UnresolvedReference(name);
    const GroupSpec& g = it->second;
    IntMatrix rel(g.generators, g.relators.size());
    for (std::size_t k = 0; k < g.relators.size(); ++k) {
      if (g.relators[k].size() != g.generators)
        throw DimensionMismatch("relator of group '" + name + "' has the wrong length");
      for (std::size_t i = 0; i < g.generators; ++i) rel(i, k) = g.relators[k][i];
    }
    return FgAbGroup(g.generators, rel);
  }

  Homomorphism map(const std::string& name) const {
    auto it = doc_.maps.find(name);
    if (it == doc_.maps.end()) throw UnresolvedReference(name);
    const MapSpec& m = it->second;
    FgAbGroup src = group(m.source), tgt = group(m.target);
    if (m.matrix.size() != tgt.generator_count())
      throw DimensionMismatch("map '" + name + "' needs one row per target generator");
    for (const auto& r : m.matrix)
      if (r.size() != src.generator_count())
        throw DimensionMismatch("map '" + name + "' needs one column per source generator");
    return Homomorphism(src, tgt, IntMatrix::from_rows(m.matrix, src.generator_count()));
  }

  Tower tower(const TowerSpec& t) const {
    if (t.family) return Tower::streamed(t.family->name, t.family->params);
    std::vector<FgAbGroup> prefix;
    std::vector<Homomorphism> bonds;
    for (std::size_t i = 0; i < t.prefix.size(); ++i) {
      prefix.push_back(group(t.prefix[i].group));
      if (i == 0 && t.prefix[i].bond) throw DimensionMismatch("the first prefix level has no bond");
      if (i > 0) {
        if (!t.prefix[i].bond) throw DimensionMismatch("prefix level " + std::to_string(i) + " needs a bond");
        bonds.push_back(map(*t.prefix[i].bond));
      }
    }
    std::optional<Homomorphism> splice;
    if (t.splice) splice = map(*t.splice);
    FgAbGroup tail = group(t.tail_group);
    return Tower::periodic(std::move(prefix), std::move(bonds), tail, map(t.tail_endo), splice);
  }

  Tower main_tower() const {
    if (!doc_.tower) throw Error("the file has no 'tower' section");
    return tower(*doc_.tower);
  }

  Tower named_tower(const std::string& name) const {
    auto it = doc_.towers.find(name);
    if (it == doc_.towers.end()) throw UnresolvedReference(name);
    return tower(it->second);
  }

  TowerSES ses(std::size_t depth = 16) const {
    if (!doc_.ses) throw Error("the file has no 'ses' section");
    const SesSpec& s = *doc_.ses;
    if (s.family) {
      if (s.family->name != "padic_ses") throw UnknownFamily("unknown SES family: " + s.family->name);
      if (s.family->params.size() != 1) throw DimensionMismatch("padic_ses takes one parameter");
      return padic_ses(s.family->params[0], depth);
    }
    PeriodicSesMaps maps;
    for (const auto& m : s.inject.prefix) maps.prefix_inject.push_back(map(m));
    for (const auto& m : s.surject.prefix) maps.prefix_surject.push_back(map(m));
    maps.tail_inject = map(s.inject.tail);
    maps.tail_surject = map(s.surject.tail);
    return tower_ses(named_tower(s.sub), named_tower(s.total), named_tower(s.quot), std::move(maps), depth);
  }

  SimplicialComplex complex(const std::string& name) const {
    auto it = doc_.complexes.find(name);
    if (it == doc_.complexes.end()) throw UnresolvedReference(name);
    return SimplicialComplex::from_simplices(it->second.vertices, it->second.simplices);
  }

  SimplicialMap simplicial_map(const std::string& name) const {
    auto it = doc_.simplicial_maps.find(name);
    if (it == doc_.simplicial_maps.end()) throw UnresolvedReference(name);
    const auto& m = it->second;
    return SimplicialMap(complex(m.source), complex(m.target), m.vertex_map);
  }

  SubdividedBond bond(const BondSpec& b) const {
    if (b.map) return SubdividedBond::plain(simplicial_map(*b.map));
    return {complex(b.sd), simplicial_map(b.down), simplicial_map(b.retract)};
  }

  SimplicialTower simplicial_tower() const {
    if (!doc_.simplicial_tower) throw Error("the file has no 'simplicial_tower' section");
    const auto& s = *doc_.simplicial_tower;
    if (s.example) return make_example(s.example->name, s.example->params);
    PeriodicComplexes p;
    for (std::size_t i = 0; i < s.prefix.size(); ++i) {
      p.prefix.push_back(complex(s.prefix[i].complex));
      if (i == 0 && s.prefix[i].bond) throw DimensionMismatch("the first prefix level has no bond");
      if (i > 0) {
        if (!s.prefix[i].bond) throw DimensionMismatch("prefix level " + std::to_string(i) + " needs a bond");
        p.prefix_bonds.push_back(bond(*s.prefix[i].bond));
      }
    }
    p.tail = complex(s.tail_complex);
    p.tail_bond = bond(s.tail_bond);
    if (s.splice) p.splice = bond(*s.splice);
    return SimplicialTower::periodic(std::move(p));
  }

  /// Resolves everything the document defines.
  void validate() const {
    for (const auto& [n, _] : doc_.groups) group(n);
    for (const auto& [n, _] : doc_.maps) map(n);
    for (const auto& [n, _] : doc_.towers) named_tower(n);
    if (doc_.tower) main_tower();
    if (doc_.ses) ses();
    for (const auto& [n, _] : doc_.complexes) complex(n);
    for (const auto& [n, _] : doc_.simplicial_maps) simplicial_map(n);
    if (doc_.simplicial_tower) simplicial_tower();
  }

 private:
  const TowerFile& doc_;
};

/// Strict parse; the result has been validated by TowerFileResolver.
inline TowerFile parse_tower_text(const std::string& text) {
  using R = detail::YamlReader;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, static_cast<std::size_t>(e.mark.line) + 1, static_cast<std::size_t>(e.mark.column) + 1);
  }
  if (!root || root.IsNull()) throw ParseError("empty document", 1, 1);
  R::keys(root, "the document",
          {"groups", "maps", "tower", "towers", "ses", "complexes", "simplicial_maps", "simplicial_tower"});
  TowerFile doc;
  if (root["groups"]) doc.groups = R::named<GroupSpec>(root["groups"], "groups", R::group);
  if (root["maps"]) doc.maps = R::named<MapSpec>(root["maps"], "maps", R::map);
  if (root["tower"]) doc.tower = R::tower(root["tower"], "tower");
  if (root["towers"]) doc.towers = R::named<TowerSpec>(root["towers"], "towers", R::tower);
  if (root["ses"]) doc.ses = R::ses(root["ses"]);
  if (root["complexes"]) doc.complexes = R::named<ComplexSpec>(root["complexes"], "complexes", R::complex);
  if (root["simplicial_maps"])
    doc.simplicial_maps = R::named<SimplicialMapSpec>(root["simplicial_maps"], "simplicial_maps", R::simplicial_map);
  if (root["simplicial_tower"]) doc.simplicial_tower = R::simplicial_tower(root["simplicial_tower"]);
  TowerFileResolver(doc).validate();
  return doc;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline TowerFile parse_tower_file(const std::string& path) { return parse_tower_text(read_file(path)); }

// ---------------------------------------------------------------------------
// Writing

namespace detail {

inline void emit_integers(YAML::Emitter& out, const std::vector<Integer>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (const auto& x : v) out << x.get_str();
  out << YAML::EndSeq;
}

inline void emit_rows(YAML::Emitter& out, const Rows& rows) {
  out << YAML::Flow << YAML::BeginSeq;
  for (const auto& r : rows) emit_integers(out, r);
  out << YAML::EndSeq;
}

inline void emit_family(YAML::Emitter& out, const FamilySpec& f) {
  out << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << f.name;
  if (!f.params.empty()) {
    out << YAML::Key << "params" << YAML::Value;
    emit_integers(out, f.params);
  }
  out << YAML::EndMap;
}

inline void emit_tower(YAML::Emitter& out, const TowerSpec& t) {
  out << YAML::BeginMap;
  if (t.family) {
    out << YAML::Key << "family" << YAML::Value;
    emit_family(out, *t.family);
    out << YAML::EndMap;
    return;
  }
  if (!t.prefix.empty()) {
    out << YAML::Key << "prefix" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : t.prefix) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "group" << YAML::Value << p.group;
      if (p.bond) out << YAML::Key << "bond" << YAML::Value << *p.bond;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::Key << "tail" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "group" << YAML::Value << t.tail_group;
  out << YAML::Key << "endo" << YAML::Value << t.tail_endo;
  if (t.splice) out << YAML::Key << "splice" << YAML::Value << *t.splice;
  out << YAML::EndMap << YAML::EndMap;
}

inline void emit_level_maps(YAML::Emitter& out, const LevelMapsSpec& m) {
  out << YAML::Flow << YAML::BeginMap;
  if (!m.prefix.empty()) {
    out << YAML::Key << "prefix" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& x : m.prefix) out << x;
    out << YAML::EndSeq;
  }
  out << YAML::Key << "tail" << YAML::Value << m.tail << YAML::EndMap;
}

inline void emit_bond(YAML::Emitter& out, const BondSpec& b) {
  out << YAML::Flow << YAML::BeginMap;
  if (b.map) {
    out << YAML::Key << "map" << YAML::Value << *b.map;
  } else {
    out << YAML::Key << "sd" << YAML::Value << b.sd;
    out << YAML::Key << "down" << YAML::Value << b.down;
    out << YAML::Key << "retract" << YAML::Value << b.retract;
  }
  out << YAML::EndMap;
}

inline void emit_counts(YAML::Emitter& out, const std::vector<std::size_t>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (auto x : v) out << x;
  out << YAML::EndSeq;
}

}  // namespace detail

inline std::string serialize(const TowerFile& doc) {
  using namespace detail;
  YAML::Emitter out;
  out << YAML::BeginMap;
  if (!doc.groups.empty()) {
    out << YAML::Key << "groups" << YAML::Value << YAML::BeginMap;
    for (const auto& [n, g] : doc.groups) {
      out << YAML::Key << n << YAML::Value << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "generators" << YAML::Value << g.generators;
      if (!g.relators.empty()) {
        out << YAML::Key << "relators" << YAML::Value;
        emit_rows(out, g.relators);
      }
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  if (!doc.maps.empty()) {
    out << YAML::Key << "maps" << YAML::Value << YAML::BeginMap;
    for (const auto& [n, m] : doc.maps) {
      out << YAML::Key << n << YAML::Value << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "source" << YAML::Value << m.source;
      out << YAML::Key << "target" << YAML::Value << m.target;
      out << YAML::Key << "matrix" << YAML::Value;
      emit_rows(out, m.matrix);
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  if (doc.tower) {
    out << YAML::Key << "tower" << YAML::Value;
    emit_tower(out, *doc.tower);
  }
  if (!doc.towers.empty()) {
    out << YAML::Key << "towers" << YAML::Value << YAML::BeginMap;
    for (const auto& [n, t] : doc.towers) {
      out << YAML::Key << n << YAML::Value;
      emit_tower(out, t);
    }
    out << YAML::EndMap;
  }
  if (doc.ses) {
    const SesSpec& s = *doc.ses;
    out << YAML::Key << "ses" << YAML::Value << YAML::BeginMap;
    if (s.family) {
      out << YAML::Key << "family" << YAML::Value;
      emit_family(out, *s.family);
    } else {
      out << YAML::Key << "sub" << YAML::Value << s.sub;
      out << YAML::Key << "total" << YAML::Value << s.total;
      out << YAML::Key << "quot" << YAML::Value << s.quot;
      out << YAML::Key << "inject" << YAML::Value;
      emit_level_maps(out, s.inject);
      out << YAML::Key << "surject" << YAML::Value;
      emit_level_maps(out, s.surject);
    }
    out << YAML::EndMap;
  }
  if (!doc.complexes.empty()) {
    out << YAML::Key << "complexes" << YAML::Value << YAML::BeginMap;
    for (const auto& [n, c] : doc.complexes) {
      out << YAML::Key << n << YAML::Value << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "vertices" << YAML::Value << c.vertices;
      if (!c.simplices.empty()) {
        out << YAML::Key << "simplices" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (const auto& s : c.simplices) emit_counts(out, s);
        out << YAML::EndSeq;
      }
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  if (!doc.simplicial_maps.empty()) {
    out << YAML::Key << "simplicial_maps" << YAML::Value << YAML::BeginMap;
    for (const auto& [n, m] : doc.simplicial_maps) {
      out << YAML::Key << n << YAML::Value << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "source" << YAML::Value << m.source;
      out << YAML::Key << "target" << YAML::Value << m.target;
      out << YAML::Key << "vertex_map" << YAML::Value;
      emit_counts(out, m.vertex_map);
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  if (doc.simplicial_tower) {
    const auto& s = *doc.simplicial_tower;
    out << YAML::Key << "simplicial_tower" << YAML::Value << YAML::BeginMap;
    if (s.example) {
      out << YAML::Key << "example" << YAML::Value;
      emit_family(out, *s.example);
    } else {
      if (!s.prefix.empty()) {
        out << YAML::Key << "prefix" << YAML::Value << YAML::BeginSeq;
        for (const auto& p : s.prefix) {
          out << YAML::Flow << YAML::BeginMap << YAML::Key << "complex" << YAML::Value << p.complex;
          if (p.bond) {
            out << YAML::Key << "bond" << YAML::Value;
            emit_bond(out, *p.bond);
          }
          out << YAML::EndMap;
        }
        out << YAML::EndSeq;
      }
      out << YAML::Key << "tail" << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "complex" << YAML::Value << s.tail_complex;
      out << YAML::Key << "bond" << YAML::Value;
      emit_bond(out, s.tail_bond);
      if (s.splice) {
        out << YAML::Key << "splice" << YAML::Value;
        emit_bond(out, *s.splice);
      }
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Documents from objects (counterexample dumps)

namespace detail {

inline GroupSpec group_spec(const FgAbGroup& g) {
  GroupSpec s;
  s.generators = g.generator_count();
  for (std::size_t k = 0; k < g.relations().cols(); ++k) {
    std::vector<Integer> r;
    for (std::size_t i = 0; i < s.generators; ++i) r.push_back(g.relations()(i, k));
    s.relators.push_back(std::move(r));
  }
  return s;
}

inline std::string add_group(TowerFile& doc, const std::string& stem, const FgAbGroup& g) {
  GroupSpec s = group_spec(g);
  for (const auto& [n, existing] : doc.groups)
    if (existing == s) return n;
  std::string name = stem;
  for (int k = 2; doc.groups.count(name); ++k) name = stem + "_" + std::to_string(k);
  doc.groups.emplace(name, std::move(s));
  return name;
}

}  // namespace detail

/// Registers h's groups and h itself under `name`; returns the map name.
inline std::string add_map(TowerFile& doc, const std::string& name, const Homomorphism& h) {
  MapSpec m;
  m.source = detail::add_group(doc, "G_" + name + "_src", h.source());
  m.target = detail::add_group(doc, "G_" + name + "_tgt", h.target());
  m.matrix = h.matrix().to_rows();
  doc.maps[name] = std::move(m);
  return name;
}

/// Describes t with groups and maps prefixed by `stem`.
inline TowerSpec tower_spec(TowerFile& doc, const std::string& stem, const Tower& t) {
  TowerSpec s;
  if (!t.is_periodic()) {
    const auto& d = t.streamed_data();
    if (d.offset != 0) throw Error("shifted streamed towers have no file description");
    s.family = FamilySpec{d.family, d.params};
    return s;
  }
  const auto& p = t.periodic_data();
  for (std::size_t i = 0; i < p.prefix_groups.size(); ++i) {
    PrefixLevelSpec lv;
    lv.group = detail::add_group(doc, stem + "_G" + std::to_string(i), p.prefix_groups[i]);
    if (i > 0) lv.bond = add_map(doc, stem + "_b" + std::to_string(i - 1), p.prefix_bonds[i - 1]);
    s.prefix.push_back(std::move(lv));
  }
  s.tail_group = detail::add_group(doc, stem + "_T", p.tail_group);
  s.tail_endo = add_map(doc, stem + "_endo", p.tail_endo);
  if (p.splice) s.splice = add_map(doc, stem + "_splice", *p.splice);
  return s;
}

inline TowerFile tower_document(const Tower& t) {
  TowerFile doc;
  doc.tower = tower_spec(doc, "t", t);
  return doc;
}

}  // namespace shapelim
