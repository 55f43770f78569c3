#pragma once

// Cube of resolutions and Khovanov homology over F2.
//
// A generator is a monomial of the exterior algebra on the circles of a
// resolution, stored as a bitmask over the canonical circle order. For a
// monomial x at vertex v with k circles:
//   p(x) = k - 2|x|,  h(x) = |v| - n_minus,  q(x) = p(x) + h(x) + n_plus - n_minus.
// The reduced complex keeps the monomials avoiding the basepoint circle,
// which is the quotient by the image of wedging with that circle, and
// shifts q by -1.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "khoflow/diagram.hpp"
#include "khoflow/error.hpp"
#include "khoflow/linalg.hpp"

namespace khoflow {

using Monomial = std::uint32_t;
using Circles = std::vector<std::vector<int>>;

inline constexpr std::size_t kDefaultCrossingLimit = 14;
inline constexpr std::size_t kMaxCircles = 24;

namespace detail {

inline Monomial relabel(Monomial m, std::span<const std::size_t> circle_map) {
  Monomial out = 0;
  while (m) {
    const auto i = static_cast<std::size_t>(std::countr_zero(m));
    out |= Monomial{1} << circle_map[i];
    m &= m - 1;
  }
  return out;
}

// Images of m under a merge of source circles x, y; empty when m holds both.
inline std::size_t merge_image(Monomial m, std::span<const std::size_t> target_of, std::size_t x, std::size_t y,
                               Monomial out[2]) {
  if (((m >> x) & 1u) && ((m >> y) & 1u)) return 0;
  out[0] = relabel(m, target_of);
  return 1;
}

// Images of m under the split of source circle z into target circles x, y.
// lift_of sends z to x and every other source circle to its target.
inline std::size_t split_image(Monomial m, std::span<const std::size_t> lift_of, std::size_t z, std::size_t x,
                               std::size_t y, Monomial out[2]) {
  const Monomial lift = relabel(m, lift_of);
  if ((m >> z) & 1u) {
    out[0] = lift | (Monomial{1} << y);
    return 1;
  }
  out[0] = lift | (Monomial{1} << x);
  out[1] = lift | (Monomial{1} << y);
  return 2;
}

struct MergeData {
  std::size_t x = 0, y = 0;
};

inline MergeData check_merge(std::size_t source_count, std::size_t target_count,
                             std::span<const std::size_t> target_of) {
  if (target_of.size() != source_count || source_count != target_count + 1 || target_count == 0)
    fail(ErrorKind::CircleMismatch, "a merge needs one circle fewer in the target");
  std::vector<std::size_t> first(target_count, source_count);
  std::optional<MergeData> pair;
  for (std::size_t i = 0; i < source_count; ++i) {
    const auto t = target_of[i];
    if (t >= target_count) fail(ErrorKind::CircleMismatch, "merge target circle out of range");
    if (first[t] == source_count) {
      first[t] = i;
    } else {
      if (pair) fail(ErrorKind::CircleMismatch, "merge identifies more than one pair of circles");
      pair = MergeData{first[t], i};
    }
  }
  if (!pair) fail(ErrorKind::CircleMismatch, "merge identifies no circles");
  return *pair;
}

struct SplitData {
  std::size_t z = 0, x = 0, y = 0;
  std::vector<std::size_t> lift_of;
};

inline SplitData check_split(std::size_t source_count, std::size_t target_count,
                             std::span<const std::size_t> source_of) {
  if (source_of.size() != target_count || target_count != source_count + 1 || source_count == 0)
    fail(ErrorKind::CircleMismatch, "a split needs one circle more in the target");
  SplitData s;
  s.lift_of.assign(source_count, target_count);
  bool found = false;
  for (std::size_t t = 0; t < target_count; ++t) {
    const auto src = source_of[t];
    if (src >= source_count) fail(ErrorKind::CircleMismatch, "split source circle out of range");
    if (s.lift_of[src] == target_count) {
      s.lift_of[src] = t;
    } else {
      if (found) fail(ErrorKind::CircleMismatch, "split divides more than one circle");
      found = true;
      s.z = src;
      s.x = s.lift_of[src];
      s.y = t;
    }
  }
  if (!found) fail(ErrorKind::CircleMismatch, "split divides no circle");
  return s;
}

// For each circle of `small` (a circle partition finer than `big`), the
// circle of `big` containing it.
inline std::vector<std::size_t> containing_circles(const Circles& small, const Circles& big) {
  std::map<int, std::size_t> owner;
  for (std::size_t i = 0; i < big.size(); ++i)
    for (int label : big[i]) owner[label] = i;
  std::vector<std::size_t> out;
  out.reserve(small.size());
  for (const auto& c : small) {
    if (c.empty()) fail(ErrorKind::CircleMismatch, "empty circle");
    const auto it = owner.find(c.front());
    if (it == owner.end()) fail(ErrorKind::CircleMismatch, "circle is not contained in the other resolution");
    for (int label : c) {
      const auto jt = owner.find(label);
      if (jt == owner.end() || jt->second != it->second)
        fail(ErrorKind::CircleMismatch, "circle is not contained in the other resolution");
    }
    out.push_back(it->second);
  }
  return out;
}

inline void check_circle_count(std::size_t k) {
  if (k > kMaxCircles) fail(ErrorKind::TooManyCrossings, "resolution has more than 24 circles");
}

}  // namespace detail

/// Merge map in monomial bases; target_of[i] is the target circle of source
/// circle i. Rows index target monomials, columns source monomials.
inline F2Matrix merge_map(std::size_t source_count, std::size_t target_count,
                          std::span<const std::size_t> target_of) {
  detail::check_circle_count(source_count);
  const auto [x, y] = detail::check_merge(source_count, target_count, target_of);
  F2Matrix m(std::size_t{1} << target_count, std::size_t{1} << source_count);
  Monomial out[2];
  for (Monomial s = 0; s < (Monomial{1} << source_count); ++s)
    for (std::size_t k = detail::merge_image(s, target_of, x, y, out); k-- > 0;) m.flip(out[k], s);
  return m;
}

/// Split map; source_of[t] is the source circle containing target circle t.
inline F2Matrix split_map(std::size_t source_count, std::size_t target_count,
                          std::span<const std::size_t> source_of) {
  detail::check_circle_count(target_count);
  const auto s = detail::check_split(source_count, target_count, source_of);
  F2Matrix m(std::size_t{1} << target_count, std::size_t{1} << source_count);
  Monomial out[2];
  for (Monomial src = 0; src < (Monomial{1} << source_count); ++src)
    for (std::size_t k = detail::split_image(src, s.lift_of, s.z, s.x, s.y, out); k-- > 0;) m.flip(out[k], src);
  return m;
}

/// Merge map between two resolutions given by their circles.
inline F2Matrix merge_map(const Circles& source, const Circles& target) {
  return merge_map(source.size(), target.size(), detail::containing_circles(source, target));
}

inline F2Matrix split_map(const Circles& source, const Circles& target) {
  return split_map(source.size(), target.size(), detail::containing_circles(target, source));
}

/// Dimensions indexed by (h, q).
struct BigradedDims {
  std::map<std::pair<int, int>, std::size_t> dims;

  std::size_t at(int h, int q) const {
    const auto it = dims.find({h, q});
    return it == dims.end() ? 0 : it->second;
  }
  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& [key, dim] : dims) t += dim;
    return t;
  }
  bool operator==(const BigradedDims&) const = default;
};

/// (h, q) -> (-h, -q).
inline BigradedDims dual(const BigradedDims& b) {
  BigradedDims out;
  for (const auto& [key, dim] : b.dims) out.dims[{-key.first, -key.second}] = dim;
  return out;
}

/// Finite F2 complex with two gradings; boundary[g] lists the generators
/// in d(g). The differential raises h by one and preserves q.
struct BigradedF2Complex {
  std::vector<int> h;
  std::vector<int> q;
  std::vector<std::vector<std::uint32_t>> boundary;

  std::size_t size() const noexcept { return h.size(); }
};

namespace detail {

struct Slices {
  // generators grouped by (h, q), and each generator's position in its group
  std::map<std::pair<int, int>, std::vector<std::uint32_t>> groups;
  std::vector<std::uint32_t> local;
};

inline Slices slice(const BigradedF2Complex& c) {
  Slices s;
  s.local.resize(c.size());
  for (std::uint32_t g = 0; g < c.size(); ++g) {
    auto& group = s.groups[{c.h[g], c.q[g]}];
    s.local[g] = static_cast<std::uint32_t>(group.size());
    group.push_back(g);
  }
  return s;
}

}  // namespace detail

/// Homology dimensions, computed one q-slice at a time.
inline BigradedDims bigraded_homology(const BigradedF2Complex& c) {
  const auto s = detail::slice(c);
  // rank of d leaving each (h, q) group
  std::map<std::pair<int, int>, std::size_t> out_rank;
  for (const auto& [key, sources] : s.groups) {
    const auto target = s.groups.find({key.first + 1, key.second});
    if (target == s.groups.end()) {
      for (auto g : sources)
        if (!c.boundary[g].empty()) fail(ErrorKind::InvariantViolation, "differential leaves its bigrading");
      continue;
    }
    F2Matrix d(sources.size(), target->second.size());  // transposed: rows are sources
    for (std::size_t i = 0; i < sources.size(); ++i)
      for (auto t : c.boundary[sources[i]]) {
        if (c.h[t] != key.first + 1 || c.q[t] != key.second)
          fail(ErrorKind::InvariantViolation, "differential leaves its bigrading");
        d.flip(i, s.local[t]);
      }
    out_rank[key] = rank_f2(std::move(d));
  }
  BigradedDims result;
  for (const auto& [key, gens] : s.groups) {
    const auto rank_of = [&](std::pair<int, int> k) {
      const auto it = out_rank.find(k);
      return it == out_rank.end() ? std::size_t{0} : it->second;
    };
    const auto dim = gens.size() - rank_of(key) - rank_of({key.first - 1, key.second});
    if (dim > 0) result.dims[key] = dim;
  }
  return result;
}

enum class EdgeKind { Merge, Split };

/// Edge of the cube from `source` to `target` = source + e_crossing.
struct CubeEdge {
  std::uint64_t source = 0;
  std::uint64_t target = 0;
  std::size_t crossing = 0;
  EdgeKind kind = EdgeKind::Merge;
  // merge: source circles x, y fuse. split: source circle z becomes target
  // circles x < y.
  std::size_t x = 0, y = 0, z = 0;
  // merge: target circle of each source circle. split: lift of each source
  // circle, with z sent to x.
  std::vector<std::size_t> circle_map;

  std::size_t images(Monomial m, Monomial out[2]) const {
    return kind == EdgeKind::Merge ? detail::merge_image(m, circle_map, x, y, out)
                                   : detail::split_image(m, circle_map, z, x, y, out);
  }
};

class CubeComplex {
public:
  struct Vertex {
    Circles circles;
    std::size_t basepoint_circle = 0;
    std::size_t offset = 0;  // first generator in the unreduced total complex
    std::vector<std::uint8_t> circle_of_label;  // indexed by label_index
  };

  explicit CubeComplex(const LinkDiagram& d, std::size_t crossing_limit = kDefaultCrossingLimit) : diagram_(d) {
    const std::size_t n = d.crossing_count();
    if (n > crossing_limit)
      fail(ErrorKind::TooManyCrossings, "diagram has " + std::to_string(n) + " crossings; the cube limit is " +
                                            std::to_string(crossing_limit));
    std::tie(n_plus_, n_minus_) = crossing_signs(d);
    const std::uint64_t count = std::uint64_t{1} << n;
    vertices_.reserve(count);
    std::size_t offset = 0;
    for (std::uint64_t v = 0; v < count; ++v) {
      Vertex vx;
      vx.circles = resolve_circles(d, v);
      detail::check_circle_count(vx.circles.size());
      vx.basepoint_circle = circle_containing(vx.circles, d.basepoint());
      vx.offset = offset;
      vx.circle_of_label.resize(d.labels().size());
      for (std::size_t i = 0; i < vx.circles.size(); ++i)
        for (int label : vx.circles[i])
          if (label > 0) vx.circle_of_label[d.label_index(label)] = static_cast<std::uint8_t>(i);
      offset += std::size_t{1} << vx.circles.size();
      vertices_.push_back(std::move(vx));
    }
    dim_ = offset;
  }

  const LinkDiagram& diagram() const noexcept { return diagram_; }
  std::size_t crossing_count() const noexcept { return diagram_.crossing_count(); }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept {
    const auto n = crossing_count();
    return n == 0 ? 0 : n << (n - 1);
  }
  std::size_t n_plus() const noexcept { return n_plus_; }
  std::size_t n_minus() const noexcept { return n_minus_; }
  const Vertex& vertex(std::uint64_t v) const { return vertices_.at(v); }
  std::size_t vertex_dim(std::uint64_t v) const { return std::size_t{1} << vertex(v).circles.size(); }
  /// Dimension of the unreduced total complex.
  std::size_t dim() const noexcept { return dim_; }

  int h_grading(std::uint64_t v) const {
    return std::popcount(v) - static_cast<int>(n_minus_);
  }
  int q_grading(std::uint64_t v, Monomial m) const {
    const int p = static_cast<int>(vertex(v).circles.size()) - 2 * std::popcount(m);
    return p + h_grading(v) + static_cast<int>(n_plus_) - static_cast<int>(n_minus_);
  }

  /// Edge leaving v along a crossing whose coordinate in v is 0.
  CubeEdge edge(std::uint64_t v, std::size_t crossing) const {
    if (crossing >= crossing_count()) fail(ErrorKind::CrossingOutOfRange, "no such crossing");
    const std::uint64_t bit = std::uint64_t{1} << crossing;
    if (v & bit) fail(ErrorKind::InvalidArgument, "edge must raise the chosen coordinate");
    CubeEdge e;
    e.source = v;
    e.target = v | bit;
    e.crossing = crossing;
    const auto& src = vertex(e.source);
    const auto& dst = vertex(e.target);
    if (dst.circles.size() + 1 == src.circles.size()) {
      e.kind = EdgeKind::Merge;
      e.circle_map = map_circles(src, dst);
      const auto pair = detail::check_merge(src.circles.size(), dst.circles.size(), e.circle_map);
      e.x = pair.x;
      e.y = pair.y;
    } else if (dst.circles.size() == src.circles.size() + 1) {
      e.kind = EdgeKind::Split;
      auto split = detail::check_split(src.circles.size(), dst.circles.size(), map_circles(dst, src));
      e.z = split.z;
      e.x = split.x;
      e.y = split.y;
      e.circle_map = std::move(split.lift_of);
    } else {
      fail(ErrorKind::InvariantViolation, "edge neither merges nor splits");
    }
    return e;
  }

  /// Edge map as a matrix, rows indexing target monomials.
  F2Matrix edge_matrix(const CubeEdge& e) const {
    const std::size_t rows = vertex_dim(e.target), cols = vertex_dim(e.source);
    F2Matrix m(rows, cols);
    Monomial out[2];
    for (Monomial s = 0; s < cols; ++s)
      for (std::size_t k = e.images(s, out); k-- > 0;) m.flip(out[k], s);
    return m;
  }

  /// Unreduced generator index of monomial m at vertex v.
  std::size_t generator(std::uint64_t v, Monomial m) const { return vertex(v).offset + m; }

  /// Total complex. Reduced generators are numbered vertex by vertex, in
  /// increasing monomial order.
  BigradedF2Complex chains(bool reduced) const {
    BigradedF2Complex c;
    const std::size_t n = crossing_count();
    std::vector<std::size_t> offsets(vertices_.size());
    std::size_t total = 0;
    for (std::uint64_t v = 0; v < vertices_.size(); ++v) {
      offsets[v] = total;
      total += vertex_dim(v) >> (reduced ? 1 : 0);
    }
    c.h.reserve(total);
    c.q.reserve(total);
    c.boundary.resize(total);
    const auto index = [&](std::uint64_t v, Monomial m) -> std::optional<std::uint32_t> {
      if (!reduced) return static_cast<std::uint32_t>(offsets[v] + m);
      const auto bp = vertex(v).basepoint_circle;
      if ((m >> bp) & 1u) return std::nullopt;
      const Monomial low = m & ((Monomial{1} << bp) - 1);
      return static_cast<std::uint32_t>(offsets[v] + (low | ((m >> (bp + 1)) << bp)));
    };
    const int shift = reduced ? -1 : 0;
    for (std::uint64_t v = 0; v < vertices_.size(); ++v) {
      std::vector<CubeEdge> out_edges;
      for (std::size_t j = 0; j < n; ++j)
        if (!((v >> j) & 1u)) out_edges.push_back(edge(v, j));
      Monomial img[2];
      for (Monomial m = 0; m < vertex_dim(v); ++m) {
        const auto g = index(v, m);
        if (!g) continue;
        c.h.push_back(h_grading(v));
        c.q.push_back(q_grading(v, m) + shift);
        auto& b = c.boundary[*g];
        for (const auto& e : out_edges)
          for (std::size_t k = e.images(m, img); k-- > 0;)
            if (const auto t = index(e.target, img[k])) b.push_back(*t);
        std::sort(b.begin(), b.end());
      }
    }
    return c;
  }

  /// Wedge with the basepoint circle, on unreduced generators.
  std::optional<std::size_t> phi_infinity(std::uint64_t v, Monomial m) const {
    const Monomial bp = Monomial{1} << vertex(v).basepoint_circle;
    if (m & bp) return std::nullopt;
    return generator(v, m | bp);
  }

private:
  // circle of `big` containing each circle of `small`
  std::vector<std::size_t> map_circles(const Vertex& small, const Vertex& big) const {
    std::vector<std::size_t> out(small.circles.size());
    for (std::size_t i = 0; i < small.circles.size(); ++i) {
      const int label = small.circles[i].front();
      // crossing-free circles come first in both orders
      out[i] = label < 0 ? i : big.circle_of_label[diagram_.label_index(label)];
    }
    return out;
  }

  LinkDiagram diagram_;
  std::size_t n_plus_ = 0;
  std::size_t n_minus_ = 0;
  std::vector<Vertex> vertices_;
  std::size_t dim_ = 0;
};

inline CubeComplex build_cube(const LinkDiagram& d, std::size_t crossing_limit = kDefaultCrossingLimit) {
  return CubeComplex(d, crossing_limit);
}

inline BigradedDims kh_homology(const CubeComplex& cube) { return bigraded_homology(cube.chains(false)); }
inline BigradedDims khr_homology(const CubeComplex& cube) { return bigraded_homology(cube.chains(true)); }
inline BigradedDims kh_homology(const LinkDiagram& d) { return kh_homology(build_cube(d)); }
inline BigradedDims khr_homology(const LinkDiagram& d) { return khr_homology(build_cube(d)); }

/// |sum (-1)^h i^q dim| over a dimension table.
inline std::uint64_t graded_euler_det(const BigradedDims& dims) {
  std::int64_t re = 0, im = 0;
  for (const auto& [key, dim] : dims.dims) {
    const auto [h, q] = key;
    std::int64_t term = static_cast<std::int64_t>(dim) * ((h % 2 == 0) ? 1 : -1);
    switch (((q % 4) + 4) % 4) {
      case 0: re += term; break;
      case 1: im += term; break;
      case 2: re -= term; break;
      case 3: im -= term; break;
    }
  }
  const auto norm = static_cast<std::uint64_t>(re * re + im * im);
  auto root = static_cast<std::uint64_t>(std::llround(std::sqrt(static_cast<double>(norm))));
  while (root * root > norm) --root;
  while ((root + 1) * (root + 1) <= norm) ++root;
  if (root * root != norm) fail(ErrorKind::InvariantViolation, "graded Euler characteristic has no integer modulus");
  return root;
}

inline std::uint64_t graded_euler_det(const LinkDiagram& d) { return graded_euler_det(khr_homology(d)); }

inline nlohmann::json to_json(const BigradedDims& dims, const std::string& diagram, bool reduced) {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& [key, dim] : dims.dims) table.push_back({key.first, key.second, dim});
  return {{"schema", 1}, {"diagram", diagram}, {"reduced", reduced}, {"table", table}, {"total_dim", dims.total()}};
}

}  // namespace khoflow
