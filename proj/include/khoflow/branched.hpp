#pragma once

// Link determinant and H1 of the double branched cover from the Goeritz
// form of a checkerboard coloring.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "khoflow/diagram.hpp"
#include "khoflow/error.hpp"
#include "khoflow/linalg.hpp"

namespace khoflow {

/// Corner of a crossing between slots `slot` and `slot + 1`.
struct Corner {
  std::size_t crossing = 0;
  int slot = 0;
  bool operator==(const Corner&) const = default;
};

struct FaceStructure {
  std::vector<std::vector<Corner>> faces;
  std::vector<int> color;  // 0 white, 1 black
  std::vector<std::array<std::size_t, 4>> corner_face;

  std::size_t face_count() const noexcept { return faces.size(); }
};

namespace detail {

// Crossings grouped into connected pieces of the diagram; crossing-free
// circles are pieces of their own and are not listed.
inline std::vector<std::vector<std::size_t>> crossing_pieces(const LinkDiagram& d) {
  const auto xs = d.crossings();
  std::vector<std::size_t> parent(xs.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int label : d.labels()) {
    const auto [tail, head] = d.strand_ends(label);
    const auto a = find(tail.crossing), b = find(head.crossing);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < xs.size(); ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

inline std::size_t piece_count(const LinkDiagram& d) {
  return crossing_pieces(d).size() + static_cast<std::size_t>(d.n_unknotted());
}

}  // namespace detail

inline FaceStructure faces(const LinkDiagram& d) {
  if (detail::piece_count(d) != 1) fail(ErrorKind::DisconnectedDiagram, "diagram is not connected");
  FaceStructure fs;
  const auto xs = d.crossings();
  if (xs.empty()) {
    // a single round circle bounds two discs
    fs.faces.assign(2, {});
    fs.color = {0, 1};
    return fs;
  }
  std::map<std::pair<std::size_t, int>, StrandEnd> other;
  for (int label : d.labels()) {
    const auto [a, b] = d.strand_ends(label);
    other[{a.crossing, a.slot}] = b;
    other[{b.crossing, b.slot}] = a;
  }
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  fs.corner_face.assign(xs.size(), {kNone, kNone, kNone, kNone});
  for (std::size_t x = 0; x < xs.size(); ++x)
    for (int p = 0; p < 4; ++p) {
      if (fs.corner_face[x][p] != kNone) continue;
      const std::size_t id = fs.faces.size();
      fs.faces.emplace_back();
      Corner cur{x, p};
      while (fs.corner_face[cur.crossing][cur.slot] == kNone) {
        fs.corner_face[cur.crossing][cur.slot] = id;
        fs.faces[id].push_back(cur);
        const auto next = other.at({cur.crossing, (cur.slot + 1) % 4});
        cur = {next.crossing, next.slot};
      }
    }
  if (fs.faces.size() != xs.size() + 2)
    fail(ErrorKind::InvariantViolation, "face count " + std::to_string(fs.faces.size()) + " breaks Euler's formula");
  // corners p and p+1 of a crossing sit on opposite sides of a strand
  std::vector<std::vector<std::size_t>> adjacent(fs.faces.size());
  for (std::size_t x = 0; x < xs.size(); ++x)
    for (int p = 0; p < 4; ++p) {
      const auto a = fs.corner_face[x][p], b = fs.corner_face[x][(p + 1) % 4];
      adjacent[a].push_back(b);
      adjacent[b].push_back(a);
    }
  fs.color.assign(fs.faces.size(), -1);
  fs.color[0] = 0;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const auto f = stack.back();
    stack.pop_back();
    for (auto g : adjacent[f]) {
      if (fs.color[g] < 0) {
        fs.color[g] = 1 - fs.color[f];
        stack.push_back(g);
      } else if (fs.color[g] == fs.color[f]) {
        fail(ErrorKind::InvariantViolation, "faces admit no checkerboard coloring");
      }
    }
  }
  return fs;
}

/// Goeritz matrix on the white faces, with the first white face removed.
inline IntMatrix goeritz_form(const LinkDiagram& d) {
  const auto fs = faces(d);
  std::vector<std::size_t> white_index(fs.face_count(), 0);
  std::size_t white = 0;
  for (std::size_t f = 0; f < fs.face_count(); ++f)
    if (fs.color[f] == 0) white_index[f] = white++;
  IntMatrix g(white, white);
  for (std::size_t x = 0; x < d.crossing_count(); ++x) {
    const auto& cf = fs.corner_face[x];
    // the crossing type decides the sign
    const bool even = fs.color[cf[0]] == 0;
    const int eta = even ? -1 : 1;
    const auto a = white_index[even ? cf[0] : cf[1]], b = white_index[even ? cf[2] : cf[3]];
    if (a == b) continue;
    g(a, b) -= eta;
    g(b, a) -= eta;
    g(a, a) += eta;
    g(b, b) += eta;
  }
  IntMatrix reduced(white - 1, white - 1);
  for (std::size_t r = 1; r < white; ++r)
    for (std::size_t c = 1; c < white; ++c) reduced(r - 1, c - 1) = g(r, c);
  return reduced;
}

inline BigInt determinant(const LinkDiagram& d) {
  if (detail::piece_count(d) > 1) return 0;
  const auto g = goeritz_form(d);
  const BigInt det = abs(determinant_bareiss(g));
  BigInt product = 1;
  for (const auto& f : smith_normal_form(g)) product *= f;
  if (product != det) fail(ErrorKind::InvariantViolation, "Goeritz determinant disagrees with its Smith form");
  return det;
}

/// Invariant factors of H1 of the double branched cover, units dropped and
/// free summands listed as 0 at the end.
inline std::vector<BigInt> h1_double_cover(const LinkDiagram& d) {
  std::vector<BigInt> factors;
  std::size_t free_rank = detail::piece_count(d) - 1;
  // a split diagram is a distant union of its pieces
  std::vector<IntMatrix> blocks;
  std::size_t size = 0;
  for (const auto& piece : detail::crossing_pieces(d)) {
    std::vector<Crossing> xs;
    for (auto i : piece) xs.push_back(d.crossings()[i]);
    blocks.push_back(goeritz_form(LinkDiagram(std::move(xs), 0)));
    size += blocks.back().rows();
  }
  IntMatrix sum(size, size);
  std::size_t at = 0;
  for (const auto& b : blocks) {
    for (std::size_t r = 0; r < b.rows(); ++r)
      for (std::size_t c = 0; c < b.cols(); ++c) sum(at + r, at + c) = b(r, c);
    at += b.rows();
  }
  for (const auto& f : smith_normal_form(sum)) {
    if (f == 0) {
      ++free_rank;
    } else if (f != 1) {
      factors.push_back(f);
    }
  }
  factors.insert(factors.end(), free_rank, BigInt{0});
  return factors;
}

inline std::size_t first_betti(const std::vector<BigInt>& factors) {
  return static_cast<std::size_t>(std::count(factors.begin(), factors.end(), BigInt{0}));
}

inline nlohmann::json bigint_json(const BigInt& v) {
  if (v >= 0 && v <= std::numeric_limits<std::uint64_t>::max()) return v.convert_to<std::uint64_t>();
  return v.str();
}

inline nlohmann::json branched_json(const LinkDiagram& d) {
  const auto h1 = h1_double_cover(d);
  nlohmann::json factors = nlohmann::json::array();
  for (const auto& f : h1) factors.push_back(bigint_json(f));
  return {{"schema", 1}, {"det", bigint_json(determinant(d))}, {"h1_invariant_factors", factors},
          {"b1", first_betti(h1)}};
}

}  // namespace khoflow
