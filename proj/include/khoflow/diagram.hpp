#pragma once

// Planar diagram (PD) codes: parsing, validation, orientation data,
// resolutions, mirrors and skein triples.
//
// A crossing X(a,b,c,d) lists its four strand labels counterclockwise,
// starting at the incoming under-strand. The 0-smoothing joins (a,b) and
// (c,d); the 1-smoothing joins (a,d) and (b,c).

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "khoflow/error.hpp"

namespace khoflow {

using Crossing = std::array<int, 4>;

/// Position of a strand end: crossing index and slot 0..3 within its tuple.
struct StrandEnd {
  std::size_t crossing = 0;
  int slot = 0;
  bool operator==(const StrandEnd&) const = default;
};

/// Marks either a strand (label > 0) or a crossing-free circle (index >= 0).
struct Basepoint {
  int strand = 0;
  int circle = -1;

  static Basepoint on_strand(int label) { return {label, -1}; }
  static Basepoint on_circle(int index) { return {0, index}; }
  bool on_circle() const noexcept { return circle >= 0; }
  bool operator==(const Basepoint&) const = default;
};

/// Validated link diagram; immutable after construction.
class LinkDiagram {
public:
  LinkDiagram(std::vector<Crossing> crossings, int n_unknotted, std::optional<Basepoint> basepoint = std::nullopt)
      : crossings_(std::move(crossings)), n_unknotted_(n_unknotted) {
    if (n_unknotted_ < 0) fail(ErrorKind::MalformedToken, "negative circle count");
    derive();
    set_basepoint(basepoint);
  }

  std::span<const Crossing> crossings() const noexcept { return crossings_; }
  std::size_t crossing_count() const noexcept { return crossings_.size(); }
  int n_unknotted() const noexcept { return n_unknotted_; }
  const Basepoint& basepoint() const noexcept { return basepoint_; }

  /// Strand labels in ascending order.
  std::span<const int> labels() const noexcept { return labels_; }
  /// Dense index of a strand label in labels().
  std::size_t label_index(int label) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) fail(ErrorKind::InvalidArgument, "unknown strand label");
    return static_cast<std::size_t>(it - labels_.begin());
  }
  bool has_label(int label) const noexcept { return std::binary_search(labels_.begin(), labels_.end(), label); }

  /// Components that pass through crossings, each as strand labels in
  /// orientation order starting at the smallest label.
  const std::vector<std::vector<int>>& crossing_components() const noexcept { return components_; }
  std::size_t component_count() const noexcept { return components_.size() + static_cast<std::size_t>(n_unknotted_); }

  /// +1 or -1 per crossing.
  std::span<const int> signs() const noexcept { return signs_; }
  /// Slot (1 or 3) where the over-strand enters each crossing.
  std::span<const int> over_incoming_slots() const noexcept { return over_in_; }

  /// The two ends of a strand; the first is its tail (where it leaves a crossing).
  std::pair<StrandEnd, StrandEnd> strand_ends(int label) const {
    const auto i = label_index(label);
    return {tails_[i], heads_[i]};
  }

  bool is_incoming(std::size_t crossing, int slot) const noexcept {
    return slot == 0 || (slot != 2 && slot == over_in_[crossing]);
  }

  std::string to_pd() const {
    std::string out;
    for (const auto& x : crossings_) {
      if (!out.empty()) out += ' ';
      out += "X(" + std::to_string(x[0]) + "," + std::to_string(x[1]) + "," + std::to_string(x[2]) + "," +
             std::to_string(x[3]) + ")";
    }
    if (n_unknotted_ > 0) {
      if (!out.empty()) out += ' ';
      out += "U(" + std::to_string(n_unknotted_) + ")";
    }
    if (!out.empty()) out += ' ';
    out += basepoint_.on_circle() ? "B(" + std::to_string(-1 - basepoint_.circle) + ")"
                                  : "B(" + std::to_string(basepoint_.strand) + ")";
    return out;
  }

private:
  void derive();
  void set_basepoint(std::optional<Basepoint> requested);

  std::vector<Crossing> crossings_;
  int n_unknotted_ = 0;
  Basepoint basepoint_;
  std::vector<int> labels_;
  std::vector<StrandEnd> tails_, heads_;
  std::vector<std::vector<int>> components_;
  std::vector<int> signs_;
  std::vector<int> over_in_;
};

inline void LinkDiagram::derive() {
  // every label exactly twice
  std::vector<std::pair<int, StrandEnd>> occurrences;
  for (std::size_t x = 0; x < crossings_.size(); ++x)
    for (int s = 0; s < 4; ++s) {
      const int label = crossings_[x][static_cast<std::size_t>(s)];
      if (label <= 0) fail(ErrorKind::MalformedToken, "strand labels must be positive, got " + std::to_string(label));
      occurrences.push_back({label, StrandEnd{x, s}});
    }
  std::ranges::stable_sort(occurrences, {}, &std::pair<int, StrandEnd>::first);
  std::vector<std::array<StrandEnd, 2>> ends;
  for (std::size_t i = 0; i < occurrences.size();) {
    std::size_t j = i;
    while (j < occurrences.size() && occurrences[j].first == occurrences[i].first) ++j;
    if (j - i != 2)
      fail(ErrorKind::InconsistentStrands,
           "strand " + std::to_string(occurrences[i].first) + " occurs " + std::to_string(j - i) + " times");
    labels_.push_back(occurrences[i].first);
    ends.push_back({occurrences[i].second, occurrences[i + 1].second});
    i = j;
  }

  const std::size_t n = labels_.size();
  auto other_end = [&](std::size_t idx, StrandEnd e) { return ends[idx][0] == e ? ends[idx][1] : ends[idx][0]; };
  auto label_at = [&](StrandEnd e) { return crossings_[e.crossing][static_cast<std::size_t>(e.slot)]; };

  tails_.assign(n, {});
  heads_.assign(n, {});
  over_in_.assign(crossings_.size(), 0);
  signs_.assign(crossings_.size(), 0);
  std::vector<bool> seen(n, false);

  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    // walk the component, leaving each crossing through the opposite slot
    struct Step {
      std::size_t strand;
      StrandEnd from, to;
    };
    std::vector<Step> walk;
    StrandEnd from = ends[start][0];
    std::size_t strand = start;
    for (;;) {
      seen[strand] = true;
      const StrandEnd to = other_end(strand, from);
      walk.push_back({strand, from, to});
      from = StrandEnd{to.crossing, (to.slot + 2) % 4};
      strand = label_index(label_at(from));
      if (strand == start && from == ends[start][0]) break;
      if (walk.size() > 2 * n) fail(ErrorKind::DisconnectedNumbering, "strand walk does not close");
    }

    // orientation: under passages run from slot 0 to slot 2
    int forced = 0;  // +1 keep walk direction, -1 reverse
    for (const auto& st : walk) {
      int vote = 0;
      if (st.to.slot == 0) vote = +1;
      if (st.to.slot == 2) vote = -1;
      if (vote == 0) continue;
      if (forced != 0 && forced != vote)
        fail(ErrorKind::DisconnectedNumbering, "under passages disagree on orientation");
      forced = vote;
    }
    const std::size_t m = walk.size();
    auto label_of = [&](std::size_t i) { return labels_[walk[i].strand]; };
    auto increasing = [&](int dir) {
      // labels must advance by one along the orientation, wrapping once
      std::size_t wraps = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const int a = label_of(i);
        const int b = label_of((i + 1) % m);
        const int step = dir > 0 ? b - a : a - b;
        if (step == 1) continue;
        if (step == -static_cast<int>(m) + 1) {
          ++wraps;
          continue;
        }
        return false;
      }
      return m == 1 || wraps == 1;
    };
    int dir = forced;
    if (dir == 0) dir = increasing(+1) ? +1 : -1;
    if (!increasing(dir))
      fail(ErrorKind::DisconnectedNumbering,
           "labels along the component through strand " + std::to_string(labels_[start]) +
               " do not increase consecutively in the orientation direction");

    std::vector<int> component;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& st = walk[dir > 0 ? i : m - 1 - i];
      const StrandEnd tail = dir > 0 ? st.from : st.to;
      const StrandEnd head = dir > 0 ? st.to : st.from;
      tails_[st.strand] = tail;
      heads_[st.strand] = head;
      component.push_back(labels_[st.strand]);
      if (head.slot == 1 || head.slot == 3) over_in_[head.crossing] = head.slot;
    }
    std::rotate(component.begin(), std::ranges::min_element(component), component.end());
    components_.push_back(std::move(component));
  }
  std::ranges::sort(components_, {}, [](const auto& c) { return c.front(); });

  for (std::size_t x = 0; x < crossings_.size(); ++x) {
    if (over_in_[x] == 0) fail(ErrorKind::DisconnectedNumbering, "over-strand direction undetermined");
    // over-strand entering at d and leaving at b is a positive crossing
    signs_[x] = over_in_[x] == 3 ? +1 : -1;
  }
}

inline void LinkDiagram::set_basepoint(std::optional<Basepoint> requested) {
  if (!requested) {
    if (!labels_.empty())
      basepoint_ = Basepoint::on_strand(labels_.front());
    else if (n_unknotted_ > 0)
      basepoint_ = Basepoint::on_circle(0);
    else
      basepoint_ = Basepoint::on_circle(-1);  // empty diagram
    return;
  }
  if (requested->on_circle()) {
    if (requested->circle >= n_unknotted_)
      fail(ErrorKind::InconsistentStrands, "basepoint circle " + std::to_string(requested->circle) + " does not exist");
  } else if (!has_label(requested->strand)) {
    fail(ErrorKind::InconsistentStrands, "basepoint strand " + std::to_string(requested->strand) + " does not exist");
  }
  basepoint_ = *requested;
}

namespace detail {

struct PdCursor {
  std::string_view text;
  std::size_t pos = 0;

  void skip_space() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool done() {
    skip_space();
    return pos >= text.size();
  }
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::MalformedToken, what + " at offset " + std::to_string(pos));
  }
  void expect(char c) {
    skip_space();
    if (pos >= text.size() || text[pos] != c) error(std::string("expected '") + c + "'");
    ++pos;
  }
  int integer() {
    skip_space();
    int value = 0;
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr == begin) error("expected integer");
    pos += static_cast<std::size_t>(ptr - begin);
    return value;
  }
  std::vector<int> arguments() {
    expect('(');
    std::vector<int> args;
    skip_space();
    if (pos < text.size() && text[pos] == ')') {
      ++pos;
      return args;
    }
    for (;;) {
      args.push_back(integer());
      skip_space();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      expect(')');
      return args;
    }
  }
};

}  // namespace detail

/// Parses whitespace-separated X(a,b,c,d), U(k) and B(s) tokens. B(s) with
/// s < 0 marks crossing-free circle -s-1.
inline LinkDiagram parse_pd(std::string_view text) {
  detail::PdCursor cur{text};
  std::vector<Crossing> crossings;
  int unknotted = 0;
  std::optional<Basepoint> basepoint;
  while (!cur.done()) {
    const char tag = text[cur.pos++];
    const auto args = cur.arguments();
    switch (tag) {
      case 'X':
        if (args.size() != 4) cur.error("X token needs 4 labels, got " + std::to_string(args.size()));
        crossings.push_back({args[0], args[1], args[2], args[3]});
        break;
      case 'U':
        if (args.size() != 1 || args[0] < 0) cur.error("U token needs one nonnegative count");
        unknotted += args[0];
        break;
      case 'B':
        if (args.size() != 1 || args[0] == 0) cur.error("B token needs one nonzero label");
        if (basepoint) cur.error("duplicate basepoint");
        basepoint = args[0] > 0 ? Basepoint::on_strand(args[0]) : Basepoint::on_circle(-args[0] - 1);
        break;
      default:
        cur.error(std::string("unknown token '") + tag + "'");
    }
  }
  return LinkDiagram(std::move(crossings), unknotted, basepoint);
}

/// Circles of a resolved diagram; each circle is its sorted strand labels,
/// or {-k-1} for crossing-free circle k.
struct ResolutionState {
  std::vector<std::uint8_t> vertex;
  std::vector<std::vector<int>> circles;
  std::size_t basepoint_circle = 0;

  std::size_t circle_count() const noexcept { return circles.size(); }
};

/// Circles for the vertex given as one bit per crossing (bit j = crossing j).
inline std::vector<std::vector<int>> resolve_circles(const LinkDiagram& d, std::uint64_t vertex_bits) {
  const auto labels = d.labels();
  std::vector<std::size_t> parent(labels.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](int a, int b) {
    const auto ra = find(d.label_index(a));
    const auto rb = find(d.label_index(b));
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  };
  const auto crossings = d.crossings();
  for (std::size_t j = 0; j < crossings.size(); ++j) {
    const auto& [a, b, c, e] = crossings[j];
    if ((vertex_bits >> j) & 1u) {
      unite(a, e);
      unite(b, c);
    } else {
      unite(a, b);
      unite(c, e);
    }
  }
  std::vector<std::vector<int>> circles;
  for (int k = 0; k < d.n_unknotted(); ++k) circles.push_back({-k - 1});
  std::vector<std::size_t> slot(labels.size(), labels.size());
  std::vector<std::vector<int>> crossing_circles;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto root = find(i);
    if (slot[root] == labels.size()) {
      slot[root] = crossing_circles.size();
      crossing_circles.emplace_back();
    }
    crossing_circles[slot[root]].push_back(labels[i]);
  }
  // labels are visited in ascending order, so circles come out keyed by
  // their minimal label and already sorted
  for (auto& c : crossing_circles) circles.push_back(std::move(c));
  return circles;
}

inline std::size_t circle_containing(const std::vector<std::vector<int>>& circles, const Basepoint& bp) {
  for (std::size_t i = 0; i < circles.size(); ++i) {
    const auto& c = circles[i];
    if (bp.on_circle() ? (c.size() == 1 && c.front() == -bp.circle - 1) : std::ranges::binary_search(c, bp.strand))
      return i;
  }
  fail(ErrorKind::InvariantViolation, "basepoint lies on no circle");
}

inline ResolutionState resolve(const LinkDiagram& d, std::span<const std::uint8_t> vertex) {
  if (vertex.size() != d.crossing_count())
    fail(ErrorKind::VertexLengthMismatch,
         "vertex has " + std::to_string(vertex.size()) + " entries for " + std::to_string(d.crossing_count()) +
             " crossings");
  if (d.crossing_count() > 64) fail(ErrorKind::TooManyCrossings, "resolution supports at most 64 crossings");
  std::uint64_t bits = 0;
  for (std::size_t j = 0; j < vertex.size(); ++j) {
    if (vertex[j] > 1) fail(ErrorKind::VertexLengthMismatch, "vertex entries must be 0 or 1");
    if (vertex[j]) bits |= std::uint64_t{1} << j;
  }
  ResolutionState state;
  state.vertex.assign(vertex.begin(), vertex.end());
  state.circles = resolve_circles(d, bits);
  if (!state.circles.empty()) state.basepoint_circle = circle_containing(state.circles, d.basepoint());
  return state;
}

inline std::pair<std::size_t, std::size_t> crossing_signs(const LinkDiagram& d) {
  const auto signs = d.signs();
  const auto plus = static_cast<std::size_t>(std::ranges::count(signs, +1));
  return {plus, signs.size() - plus};
}

/// Switches every crossing: each tuple is rotated to start at its incoming
/// over-strand, which becomes the new under-strand.
inline LinkDiagram mirror(const LinkDiagram& d) {
  std::vector<Crossing> out;
  const auto crossings = d.crossings();
  const auto over_in = d.over_incoming_slots();
  for (std::size_t x = 0; x < crossings.size(); ++x) {
    const auto& [a, b, c, e] = crossings[x];
    out.push_back(over_in[x] == 3 ? Crossing{e, a, b, c} : Crossing{b, c, e, a});
  }
  return LinkDiagram(std::move(out), d.n_unknotted(), d.basepoint());
}

/// Replaces crossing `index` by its 0- or 1-smoothing and renumbers the
/// result. Components are re-oriented where the smoothing forces it.
inline LinkDiagram smooth_crossing(const LinkDiagram& d, std::size_t index, int smoothing) {
  const auto crossings = d.crossings();
  if (index >= crossings.size()) fail(ErrorKind::CrossingOutOfRange, "crossing index out of range");

  auto partner = [&](StrandEnd e) -> std::pair<StrandEnd, bool> {
    if (e.crossing != index) return {StrandEnd{e.crossing, (e.slot + 2) % 4}, true};
    static constexpr std::array<int, 4> zero{1, 0, 3, 2};
    static constexpr std::array<int, 4> one{3, 2, 1, 0};
    const auto& table = smoothing == 0 ? zero : one;
    return {StrandEnd{index, table[static_cast<std::size_t>(e.slot)]}, false};
  };
  auto label_at = [&](StrandEnd e) { return crossings[e.crossing][static_cast<std::size_t>(e.slot)]; };
  auto across = [&](StrandEnd e) {
    auto [t, h] = d.strand_ends(label_at(e));
    return t == e ? h : t;
  };

  // new crossings keep their relative order
  std::vector<std::size_t> new_index(crossings.size(), crossings.size());
  std::size_t kept = 0;
  for (std::size_t x = 0; x < crossings.size(); ++x)
    if (x != index) new_index[x] = kept++;
  std::vector<Crossing> out(kept, Crossing{0, 0, 0, 0});
  std::vector<std::array<bool, 4>> incoming(kept, {false, false, false, false});

  int next_label = 1;
  int free_circles = 0;
  std::optional<Basepoint> basepoint;
  const Basepoint old_bp = d.basepoint();
  std::vector<bool> used(d.labels().size(), false);

  for (int start_label : d.labels()) {
    if (used[d.label_index(start_label)]) continue;
    struct Step {
      StrandEnd tail, head;
      int label;
      bool pass_after;
    };
    std::vector<Step> walk;
    const StrandEnd origin = d.strand_ends(start_label).first;
    StrandEnd tail = origin;
    do {
      const int label = label_at(tail);
      used[d.label_index(label)] = true;
      const StrandEnd head = across(tail);
      const auto [next, is_pass] = partner(head);
      walk.push_back({tail, head, label, is_pass});
      tail = next;
    } while (tail != origin);

    std::size_t last_pass = walk.size();
    for (std::size_t i = 0; i < walk.size(); ++i)
      if (walk[i].pass_after) last_pass = i;
    if (last_pass == walk.size()) {
      const bool marked = std::ranges::any_of(walk, [&](const Step& st) {
        return !old_bp.on_circle() && st.label == old_bp.strand;
      });
      if (marked) basepoint = Basepoint::on_circle(d.n_unknotted() + free_circles);
      ++free_circles;
      continue;
    }
    // rotate so the walk begins right after a pass; start_label then sits in
    // the final segment, which takes the first new label
    std::rotate(walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>((last_pass + 1) % walk.size()), walk.end());
    std::vector<std::pair<std::size_t, std::size_t>> segments;  // [first, last] step indices
    for (std::size_t i = 0, begin = 0; i < walk.size(); ++i)
      if (walk[i].pass_after) {
        segments.push_back({begin, i});
        begin = i + 1;
      }
    std::rotate(segments.begin(), segments.end() - 1, segments.end());
    for (const auto& [first, last] : segments) {
      const int label = next_label++;
      const StrandEnd seg_tail = walk[first].tail;
      const StrandEnd seg_head = walk[last].head;
      out[new_index[seg_tail.crossing]][static_cast<std::size_t>(seg_tail.slot)] = label;
      out[new_index[seg_head.crossing]][static_cast<std::size_t>(seg_head.slot)] = label;
      incoming[new_index[seg_head.crossing]][static_cast<std::size_t>(seg_head.slot)] = true;
      for (std::size_t i = first; i <= last; ++i)
        if (!old_bp.on_circle() && walk[i].label == old_bp.strand) basepoint = Basepoint::on_strand(label);
    }
  }

  for (std::size_t x = 0; x < kept; ++x) {
    if (incoming[x][0] == incoming[x][2])
      fail(ErrorKind::InvariantViolation, "under-strand orientation broken by smoothing");
    if (!incoming[x][0]) out[x] = Crossing{out[x][2], out[x][3], out[x][0], out[x][1]};
  }
  if (old_bp.on_circle()) basepoint = old_bp;
  return LinkDiagram(std::move(out), d.n_unknotted() + free_circles, basepoint);
}

struct SkeinTriple {
  LinkDiagram original;   // K2
  LinkDiagram one;        // K1, the 1-smoothing
  LinkDiagram zero;       // K0, the 0-smoothing
};

inline SkeinTriple skein_triple(const LinkDiagram& d, std::size_t crossing) {
  if (d.crossing_count() == 0) fail(ErrorKind::NoCrossings, "diagram has no crossings to resolve");
  if (crossing >= d.crossing_count())
    fail(ErrorKind::CrossingOutOfRange,
         "crossing " + std::to_string(crossing) + " of " + std::to_string(d.crossing_count()));
  const auto& x = d.crossings()[crossing];
  if (!d.basepoint().on_circle() && std::ranges::find(x, d.basepoint().strand) != x.end())
    fail(ErrorKind::BasepointOnCrossing,
         "basepoint strand " + std::to_string(d.basepoint().strand) + " meets crossing " + std::to_string(crossing));
  return SkeinTriple{d, smooth_crossing(d, crossing, 1), smooth_crossing(d, crossing, 0)};
}

inline nlohmann::json to_json(const LinkDiagram& d) {
  nlohmann::json crossings = nlohmann::json::array();
  for (const auto& x : d.crossings()) crossings.push_back({x[0], x[1], x[2], x[3]});
  const auto& bp = d.basepoint();
  return {{"crossings", crossings},
          {"n_unknotted", d.n_unknotted()},
          {"basepoint", bp.on_circle() ? nlohmann::json{{"circle", bp.circle}} : nlohmann::json{{"strand", bp.strand}}}};
}

}  // namespace khoflow
