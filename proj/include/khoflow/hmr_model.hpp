#pragma once

// Model tilde complexes: a "to" complex of irreducibles and towers
// a_0, a_1, ... with an endomorphism upsilon of degree -1 shifting each
// tower down, and the mapping cone of upsilon on a finite truncation.
//
// Tower level a_i sits in grading gr(a_0) + i. Both copies of the cone use
// the same grading, so the cone differential has degree -1.

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "khoflow/error.hpp"
#include "khoflow/linalg.hpp"

namespace khoflow {

struct Irreducible {
  std::string name;
  int grading = 0;
  int spin_c = 0;
};

struct HmrModel {
  std::string name;
  std::vector<Irreducible> irreducibles;
  std::size_t tower_count = 0;
  std::vector<int> tower_gradings;  // gr(a_0) per tower
  std::vector<int> tower_spin_c;
  // upsilon beyond the tower shift, and the check differential, as
  // (source, target) pairs of irreducible or a_0 names
  std::vector<std::pair<std::string, std::string>> upsilon_extra;
  std::vector<std::pair<std::string, std::string>> differential;

  std::string tower_name(std::size_t t) const { return tower_count == 1 ? "a" : "a" + std::to_string(t + 1); }
  int tower_grading(std::size_t t) const { return tower_gradings.empty() ? 0 : tower_gradings.at(t); }
  int tower_spin(std::size_t t) const { return tower_spin_c.empty() ? 0 : tower_spin_c.at(t); }

  // Irreducibles first, then the bottom of each tower.
  std::size_t core_size() const { return irreducibles.size() + tower_count; }
  std::string core_name(std::size_t i) const {
    return i < irreducibles.size() ? irreducibles[i].name : tower_name(i - irreducibles.size());
  }
  int core_grading(std::size_t i) const {
    return i < irreducibles.size() ? irreducibles[i].grading : tower_grading(i - irreducibles.size());
  }
  int core_spin_c(std::size_t i) const {
    return i < irreducibles.size() ? irreducibles[i].spin_c : tower_spin(i - irreducibles.size());
  }

  std::vector<int> irreducible_gradings() const {
    std::vector<int> out;
    for (const auto& g : irreducibles) out.push_back(g.grading);
    return out;
  }

  std::size_t default_cutoff() const {
    int top = 0;
    for (const auto& g : irreducibles) top = std::max(top, g.grading);
    return static_cast<std::size_t>(top) + 2;
  }

  void validate() const;
};

namespace detail {

using CoreMap = std::vector<std::set<std::size_t>>;

inline CoreMap core_map(const HmrModel& m, const std::vector<std::pair<std::string, std::string>>& pairs,
                        bool from_irreducibles_only, const char* what) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < m.core_size(); ++i) index[m.core_name(i)] = i;
  CoreMap out(m.core_size());
  for (const auto& [src, dst] : pairs) {
    const auto s = index.find(src), t = index.find(dst);
    if (s == index.end() || t == index.end())
      fail(ErrorKind::InvalidModel, std::string(what) + " names an unknown generator: " + src + " -> " + dst);
    if (from_irreducibles_only && s->second >= m.irreducibles.size())
      fail(ErrorKind::InvalidModel, std::string(what) + " must vanish on towers, but " + src + " -> " + dst);
    if (m.core_grading(t->second) != m.core_grading(s->second) - 1)
      fail(ErrorKind::InvalidModel, std::string(what) + " must lower grading by one: " + src + " -> " + dst);
    if (m.core_spin_c(t->second) != m.core_spin_c(s->second))
      fail(ErrorKind::InvalidModel, std::string(what) + " must preserve spin-c: " + src + " -> " + dst);
    auto& image = out[s->second];
    if (!image.insert(t->second).second) image.erase(t->second);
  }
  return out;
}

inline std::set<std::size_t> compose(const CoreMap& outer, const std::set<std::size_t>& v) {
  std::set<std::size_t> out;
  for (auto x : v)
    for (auto y : outer[x])
      if (!out.insert(y).second) out.erase(y);
  return out;
}

}  // namespace detail

inline void HmrModel::validate() const {
  std::set<std::string> names;
  for (std::size_t i = 0; i < core_size(); ++i) {
    if (core_name(i).empty()) fail(ErrorKind::InvalidModel, "generator with an empty name");
    if (!names.insert(core_name(i)).second) fail(ErrorKind::InvalidModel, "duplicate generator " + core_name(i));
  }
  if (!tower_gradings.empty() && tower_gradings.size() != tower_count)
    fail(ErrorKind::InvalidModel, "tower_gradings needs one entry per tower");
  if (!tower_spin_c.empty() && tower_spin_c.size() != tower_count)
    fail(ErrorKind::InvalidModel, "tower_spin_c needs one entry per tower");
  const auto d = detail::core_map(*this, differential, true, "differential");
  const auto u = detail::core_map(*this, upsilon_extra, false, "upsilon");
  for (std::size_t i = 0; i < core_size(); ++i) {
    if (!detail::compose(d, d[i]).empty()) fail(ErrorKind::InvalidModel, "differential does not square to zero");
    if (detail::compose(d, u[i]) != detail::compose(u, d[i]))
      fail(ErrorKind::InvalidModel, "upsilon does not commute with the differential at " + core_name(i));
  }
}

/// Generator of a truncated complex; tower < 0 marks an irreducible.
struct ModelGenerator {
  std::string name;
  int grading = 0;
  int spin_c = 0;
  int tower = -1;
  std::size_t level = 0;
};

struct ModelComplex {
  std::vector<ModelGenerator> gens;
  std::vector<std::vector<std::uint32_t>> d;
};

/// The finite "to" complex with towers up to level N + 1 (upper) and N
/// (lower), and upsilon from upper to lower.
struct Truncation {
  std::size_t cutoff = 0;
  ModelComplex upper;
  ModelComplex lower;
  std::vector<std::vector<std::uint32_t>> upsilon;
};

namespace detail {

inline ModelComplex model_complex(const HmrModel& m, std::size_t top, const CoreMap& d) {
  ModelComplex c;
  for (const auto& g : m.irreducibles) c.gens.push_back({g.name, g.grading, g.spin_c, -1, 0});
  for (std::size_t t = 0; t < m.tower_count; ++t)
    for (std::size_t i = 0; i <= top; ++i)
      c.gens.push_back({m.tower_name(t) + "_" + std::to_string(i), m.tower_grading(t) + static_cast<int>(i),
                        m.tower_spin(t), static_cast<int>(t), i});
  c.d.resize(c.gens.size());
  for (std::size_t i = 0; i < m.irreducibles.size(); ++i)
    for (auto t : d[i]) {
      const auto idx = t < m.irreducibles.size() ? t : m.irreducibles.size() + (t - m.irreducibles.size()) * (top + 1);
      c.d[i].push_back(static_cast<std::uint32_t>(idx));
    }
  for (auto& b : c.d) std::sort(b.begin(), b.end());
  return c;
}

}  // namespace detail

inline Truncation truncate(const HmrModel& m, std::size_t cutoff) {
  m.validate();
  if (cutoff < m.default_cutoff())
    fail(ErrorKind::CutoffTooSmall, "cutoff " + std::to_string(cutoff) + " is below the minimum " +
                                        std::to_string(m.default_cutoff()) + " for model " + m.name);
  const auto d = detail::core_map(m, m.differential, true, "differential");
  const auto u = detail::core_map(m, m.upsilon_extra, false, "upsilon");
  Truncation tr;
  tr.cutoff = cutoff;
  tr.upper = detail::model_complex(m, cutoff + 1, d);
  tr.lower = detail::model_complex(m, cutoff, d);
  const std::size_t irr = m.irreducibles.size();
  const auto lower_index = [&](std::size_t core) {
    return core < irr ? core : irr + (core - irr) * (cutoff + 1);
  };
  tr.upsilon.resize(tr.upper.gens.size());
  for (std::size_t g = 0; g < tr.upper.gens.size(); ++g) {
    const auto& gen = tr.upper.gens[g];
    auto& image = tr.upsilon[g];
    if (gen.tower >= 0 && gen.level > 0) {
      image.push_back(static_cast<std::uint32_t>(irr + static_cast<std::size_t>(gen.tower) * (cutoff + 1) + gen.level - 1));
      continue;
    }
    const std::size_t core = gen.tower < 0 ? g : irr + static_cast<std::size_t>(gen.tower);
    for (auto t : u[core]) image.push_back(static_cast<std::uint32_t>(lower_index(t)));
    std::sort(image.begin(), image.end());
  }
  return tr;
}

struct ConeGenerator {
  ModelGenerator gen;
  int copy = 0;  // 0 for (x, 0), 1 for (0, y)
};

struct ConeComplex {
  std::size_t cutoff = 0;
  std::vector<ConeGenerator> gens;
  std::vector<std::vector<std::uint32_t>> boundary;

  std::size_t size() const noexcept { return gens.size(); }
};

inline ConeComplex mapping_cone(const Truncation& tr) {
  ConeComplex c;
  c.cutoff = tr.cutoff;
  const auto offset = static_cast<std::uint32_t>(tr.upper.gens.size());
  for (const auto& g : tr.upper.gens) c.gens.push_back({g, 0});
  for (const auto& g : tr.lower.gens) c.gens.push_back({g, 1});
  c.boundary.resize(c.gens.size());
  for (std::size_t g = 0; g < tr.upper.gens.size(); ++g) {
    auto& b = c.boundary[g];
    b = tr.upper.d[g];
    for (auto t : tr.upsilon[g]) b.push_back(offset + t);
  }
  for (std::size_t g = 0; g < tr.lower.gens.size(); ++g)
    for (auto t : tr.lower.d[g]) c.boundary[offset + g].push_back(offset + t);
  for (std::size_t g = 0; g < c.size(); ++g) {
    std::map<std::uint32_t, int> dd;
    for (auto t : c.boundary[g]) {
      if (c.gens[t].gen.grading != c.gens[g].gen.grading - 1 || c.gens[t].gen.spin_c != c.gens[g].gen.spin_c)
        fail(ErrorKind::InvariantViolation, "cone differential is not homogeneous");
      for (auto u : c.boundary[t]) dd[u] ^= 1;
    }
    for (const auto& [u, bit] : dd)
      if (bit) fail(ErrorKind::InvariantViolation, "cone differential does not square to zero");
  }
  return c;
}

inline ConeComplex mapping_cone(const HmrModel& m, std::optional<std::size_t> cutoff = std::nullopt) {
  return mapping_cone(truncate(m, cutoff.value_or(m.default_cutoff())));
}

struct ConeHomology {
  std::map<std::pair<int, int>, std::size_t> dims;  // (spin-c, grading) -> dim

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& [k, d] : dims) t += d;
    return t;
  }
  std::map<int, std::size_t> by_grading() const {
    std::map<int, std::size_t> out;
    for (const auto& [k, d] : dims) out[k.second] += d;
    return out;
  }
  std::map<int, std::size_t> by_spin_c() const {
    std::map<int, std::size_t> out;
    for (const auto& [k, d] : dims) out[k.first] += d;
    return out;
  }
  long long euler(std::optional<int> spin_c = std::nullopt) const {
    long long chi = 0;
    for (const auto& [k, d] : dims)
      if (!spin_c || k.first == *spin_c) chi += (k.second % 2 == 0 ? 1 : -1) * static_cast<long long>(d);
    return chi;
  }
};

inline ConeHomology cone_homology(const ConeComplex& c) {
  std::map<std::pair<int, int>, std::vector<std::uint32_t>> groups;
  std::vector<std::size_t> local(c.size());
  for (std::uint32_t g = 0; g < c.size(); ++g) {
    auto& grp = groups[{c.gens[g].gen.spin_c, c.gens[g].gen.grading}];
    local[g] = grp.size();
    grp.push_back(g);
  }
  std::map<std::pair<int, int>, std::size_t> out_rank;
  for (const auto& [key, gens] : groups) {
    const auto target = groups.find({key.first, key.second - 1});
    if (target == groups.end()) continue;
    F2Matrix d(gens.size(), target->second.size());
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (auto t : c.boundary[gens[i]]) d.flip(i, local[t]);
    out_rank[key] = rank_f2(std::move(d));
  }
  ConeHomology h;
  for (const auto& [key, gens] : groups) {
    const auto rank_of = [&](std::pair<int, int> k) {
      const auto it = out_rank.find(k);
      return it == out_rank.end() ? std::size_t{0} : it->second;
    };
    const auto dim = gens.size() - rank_of(key) - rank_of({key.first, key.second + 1});
    if (dim > 0) h.dims[key] = dim;
  }
  return h;
}

namespace detail {

inline F2Matrix dense(const std::vector<std::vector<std::uint32_t>>& columns, std::size_t rows) {
  F2Matrix m(rows, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (auto r : columns[c]) m.flip(r, c);
  return m;
}

}  // namespace detail

/// dim ker + dim coker of upsilon_* : H(upper) -> H(lower), computed in
/// the truncated "to" complexes without building the cone.
inline std::size_t les_dimension(const Truncation& tr) {
  const auto d1 = detail::dense(tr.upper.d, tr.upper.gens.size());
  const auto d2 = detail::dense(tr.lower.d, tr.lower.gens.size());
  const auto u = detail::dense(tr.upsilon, tr.lower.gens.size());
  const std::size_t h1 = tr.upper.gens.size() - 2 * rank_f2(d1);
  const std::size_t h2 = tr.lower.gens.size() - 2 * rank_f2(d2);
  // rows of z1 span the cycles of the upper complex; rows of b2 the
  // boundaries of the lower one
  const auto z1 = kernel_basis_f2(d1);
  const auto b2 = d2.transpose();
  const auto image = (u * z1.transpose()).transpose();
  const std::size_t rank_u = rank_f2(vstack(image, b2)) - rank_f2(b2);
  return h1 + h2 - 2 * rank_u;
}

/// |1 + 2 sum (-1)^g| over irreducible gradings.
inline std::size_t euler_char_formula(const std::vector<int>& gradings) {
  long long sum = 1;
  for (int g : gradings) sum += 2 * (g % 2 == 0 ? 1 : -1);
  return static_cast<std::size_t>(std::llabs(sum));
}

namespace detail {

inline std::optional<long long> call_argument(std::string_view name, std::string_view head) {
  if (name.size() < head.size() + 3 || name.substr(0, head.size()) != head || name[head.size()] != '(' ||
      name.back() != ')')
    return std::nullopt;
  const auto digits = name.substr(head.size() + 1, name.size() - head.size() - 2);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size())
    fail(ErrorKind::UnknownModel, "bad model argument in '" + std::string(name) + "'");
  return value;
}

}  // namespace detail

inline HmrModel model_library(std::string_view name) {
  HmrModel m;
  m.name = std::string(name);
  if (name == "p237") {
    m.irreducibles = {{"alpha", -1, 0}, {"beta", -1, 0}};
    m.tower_count = 1;
    m.upsilon_extra = {{"a", "alpha"}, {"a", "beta"}};
  } else if (name == "torus_odd" || name == "unknot") {
    m.tower_count = 1;
  } else if (const auto n = detail::call_argument(name, "unlink")) {
    if (*n < 0 || *n > 16) fail(ErrorKind::UnknownModel, "unlink(n) needs 0 <= n <= 16");
    // one tower per critical point of a perfect Morse function on T^n,
    // graded by its index
    m.tower_count = std::size_t{1} << *n;
    for (std::size_t s = 0; s < m.tower_count; ++s) m.tower_gradings.push_back(std::popcount(s));
  } else if (const auto det = detail::call_argument(name, "two_bridge")) {
    if (*det < 1 || *det > 100000) fail(ErrorKind::UnknownModel, "two_bridge(d) needs d >= 1");
    m.tower_count = static_cast<std::size_t>(*det);
    for (std::size_t s = 0; s < m.tower_count; ++s) m.tower_spin_c.push_back(static_cast<int>(s));
  } else {
    fail(ErrorKind::UnknownModel, "no library model named '" + std::string(name) + "'");
  }
  m.validate();
  return m;
}

/// A representative set of library models.
inline std::vector<std::string> library_model_names() {
  return {"unknot", "unlink(0)", "unlink(1)", "unlink(2)", "unlink(3)", "unlink(4)", "unlink(5)",
          "p237",   "torus_odd", "two_bridge(3)", "two_bridge(5)", "two_bridge(10)", "two_bridge(11)"};
}

/// Model from the JSON schema
///   {"irreducibles": [[name, gr], [name, gr, spin_c], ...], "towers": k,
///    "tower_gradings": [...], "tower_spin_c": [...],
///    "upsilon_extra": [[src, dst], ...], "differential": [[src, dst], ...]}.
inline HmrModel model_from_json(const nlohmann::json& j) {
  HmrModel m;
  try {
    m.name = j.value("name", "custom");
    for (const auto& g : j.value("irreducibles", nlohmann::json::array())) {
      if (!g.is_array() || g.size() < 2 || g.size() > 3) fail(ErrorKind::InvalidModel, "irreducible needs [name, gr]");
      m.irreducibles.push_back({g[0].get<std::string>(), g[1].get<int>(), g.size() == 3 ? g[2].get<int>() : 0});
    }
    const auto towers = j.value("towers", 0);
    if (towers < 0) fail(ErrorKind::InvalidModel, "negative tower count");
    m.tower_count = static_cast<std::size_t>(towers);
    m.tower_gradings = j.value("tower_gradings", std::vector<int>{});
    m.tower_spin_c = j.value("tower_spin_c", std::vector<int>{});
    for (const char* key : {"upsilon_extra", "differential"}) {
      auto& target = std::string_view(key) == "differential" ? m.differential : m.upsilon_extra;
      for (const auto& p : j.value(key, nlohmann::json::array())) {
        if (!p.is_array() || p.size() != 2) fail(ErrorKind::InvalidModel, std::string(key) + " entries are pairs");
        target.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::InvalidModel, std::string("model JSON: ") + ex.what());
  }
  m.validate();
  return m;
}

inline HmrModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::UnknownModel, "cannot open model file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::InvalidModel, "model file " + path + ": " + ex.what());
  }
  return model_from_json(j);
}

struct TriangleCheck {
  bool pass = true;
  std::vector<std::string> violations;
};

/// Arithmetic consequences of a 3-periodic exact sequence of finite F2
/// spaces with dimensions a, b, c.
inline TriangleCheck triangle_rank_check(std::size_t a, std::size_t b, std::size_t c) {
  TriangleCheck out;
  const auto check = [&](std::size_t x, std::size_t y, std::size_t z, const char* label) {
    if (x > y + z) {
      out.pass = false;
      out.violations.push_back(std::string(label) + ": " + std::to_string(x) + " > " + std::to_string(y) + " + " +
                               std::to_string(z));
    }
  };
  check(a, b, c, "a <= b + c");
  check(b, c, a, "b <= c + a");
  check(c, a, b, "c <= a + b");
  if ((a + b + c) % 2 != 0) {
    out.pass = false;
    out.violations.push_back("a + b + c = " + std::to_string(a + b + c) + " is odd");
  }
  return out;
}

inline nlohmann::json to_json(const HmrModel& m, const ConeHomology& h, std::size_t cutoff) {
  nlohmann::json grades = nlohmann::json::array(), spins = nlohmann::json::array();
  for (const auto& [g, d] : h.by_grading()) grades.push_back({g, d});
  for (const auto& [s, d] : h.by_spin_c()) spins.push_back({{"spin_c", s}, {"dim", d}, {"abs_chi", std::llabs(h.euler(s))}});
  return {{"schema", 1},
          {"model", m.name},
          {"cutoff", cutoff},
          {"total_dim", h.total()},
          {"abs_chi", std::llabs(h.euler())},
          {"by_grading", grades},
          {"spin_c", spins}};
}

inline nlohmann::json to_json(const TriangleCheck& t, std::size_t a, std::size_t b, std::size_t c) {
  return {{"schema", 1}, {"dims", {a, b, c}}, {"pass", t.pass}, {"violations", t.violations}};
}

}  // namespace khoflow
