#pragma once

// Spectral sequence of a finite filtered F2 complex.
//
// F_p is spanned by the generators of weight <= p, and the differential may
// not raise weight. Pages follow
//   Z_r^p = {x in F_p : dx in F_{p-r}},
//   E_r^p = Z_r^p / (Z_{r-1}^{p-1} + d Z_{r-1}^{p+r-1}),
// with d_r : E_r^p -> E_r^{p-r}. Generators also carry an internal grading
// preserved by d, and every page is computed one grading at a time.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "khoflow/error.hpp"
#include "khoflow/khovanov.hpp"
#include "khoflow/linalg.hpp"

namespace khoflow {

struct FilteredComplex {
  std::vector<int> weight;
  std::vector<int> grading;
  std::vector<std::vector<std::uint32_t>> boundary;  // generators in d(g)

  std::size_t size() const noexcept { return weight.size(); }

  std::size_t add(int w, int gr = 0) {
    weight.push_back(w);
    grading.push_back(gr);
    boundary.emplace_back();
    return weight.size() - 1;
  }
  void add_arrow(std::size_t from, std::size_t to) {
    auto& b = boundary.at(from);
    const auto t = static_cast<std::uint32_t>(to);
    const auto it = std::lower_bound(b.begin(), b.end(), t);
    if (it != b.end() && *it == t) b.erase(it); else b.insert(it, t);
  }

  /// Throws InvalidArgument unless d is a filtered, grading-preserving
  /// differential with d^2 = 0.
  void validate() const {
    if (grading.size() != size() || boundary.size() != size())
      fail(ErrorKind::InvalidArgument, "filtered complex fields differ in length");
    for (std::size_t g = 0; g < size(); ++g) {
      std::map<std::uint32_t, int> dd;
      for (auto t : boundary[g]) {
        if (t >= size()) fail(ErrorKind::InvalidArgument, "differential names a missing generator");
        if (weight[t] > weight[g]) fail(ErrorKind::InvalidArgument, "differential raises filtration weight");
        if (grading[t] != grading[g]) fail(ErrorKind::InvalidArgument, "differential changes the internal grading");
        for (auto u : boundary[t]) dd[u] ^= 1;
      }
      for (const auto& [u, bit] : dd)
        if (bit) fail(ErrorKind::InvalidArgument, "differential does not square to zero");
    }
  }

  std::optional<std::pair<int, int>> weight_range() const {
    if (weight.empty()) return std::nullopt;
    const auto [lo, hi] = std::minmax_element(weight.begin(), weight.end());
    return std::pair{*lo, *hi};
  }
};

struct PageTable {
  int r = 1;
  std::map<int, std::size_t> dims;                         // weight -> dim
  std::map<std::pair<int, int>, std::size_t> graded_dims;  // (weight, grading) -> dim
  // d_r from E_r^{w} to E_r^{w-r} in the chosen coset bases, keyed by (w, grading)
  std::map<std::pair<int, int>, F2Matrix> differentials;

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& [w, d] : dims) t += d;
    return t;
  }
};

/// Weight N - |v| on the cube of a diagram, so that the differential lowers
/// weight by exactly one and Fltr_n is spanned by the vertices with
/// |v| <= n in the mirror diagram's cube. Information beyond the edge maps
/// is not available from a diagram and is taken to be zero.
inline FilteredComplex from_cube(const CubeComplex& cube, bool reduced) {
  const auto chains = cube.chains(reduced);
  FilteredComplex fc;
  fc.weight.reserve(chains.size());
  const int n = static_cast<int>(cube.crossing_count());
  for (std::uint64_t v = 0; v < cube.vertex_count(); ++v) {
    const std::size_t count = cube.vertex_dim(v) >> (reduced ? 1 : 0);
    fc.weight.insert(fc.weight.end(), count, n - std::popcount(v));
  }
  fc.grading = chains.q;
  fc.boundary = chains.boundary;
  return fc;
}

namespace detail {

class SliceSequence {
public:
  SliceSequence(const FilteredComplex& fc, std::vector<std::uint32_t> gens) : gens_(std::move(gens)) {
    std::stable_sort(gens_.begin(), gens_.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return fc.weight[a] < fc.weight[b]; });
    std::map<std::uint32_t, std::size_t> local;
    for (std::size_t i = 0; i < gens_.size(); ++i) {
      local[gens_[i]] = i;
      weight_.push_back(fc.weight[gens_[i]]);
    }
    d_ = F2Matrix(gens_.size(), gens_.size());
    for (std::size_t i = 0; i < gens_.size(); ++i)
      for (auto t : fc.boundary[gens_[i]]) d_.flip(local.at(t), i);
  }

  int min_weight() const { return weight_.front(); }
  int max_weight() const { return weight_.back(); }

  // number of generators of weight <= p
  std::size_t end(int p) const {
    return static_cast<std::size_t>(std::upper_bound(weight_.begin(), weight_.end(), p) - weight_.begin());
  }

  // basis of Z_r^p in slice coordinates
  std::vector<F2Vector> cycles(int r, int p) const {
    const std::size_t cols = end(p);
    if (cols == 0) return {};
    std::vector<std::size_t> rows(end(p) - end(p - r));
    std::iota(rows.begin(), rows.end(), end(p - r));
    std::vector<std::size_t> col_index(cols);
    std::iota(col_index.begin(), col_index.end(), std::size_t{0});
    const auto kernel = kernel_basis_f2(select(d_, rows, col_index));
    std::vector<F2Vector> out;
    out.reserve(kernel.rows());
    for (std::size_t k = 0; k < kernel.rows(); ++k) {
      F2Vector v(gens_.size());
      for (std::size_t c = 0; c < cols; ++c)
        if (kernel.get(k, c)) v.set(c);
      out.push_back(std::move(v));
    }
    return out;
  }

  F2Vector apply(const F2Vector& x) const { return d_.apply(x); }
  std::size_t size() const { return gens_.size(); }

private:
  std::vector<std::uint32_t> gens_;
  std::vector<int> weight_;
  F2Matrix d_;
};

struct PageColumn {
  F2SpanBasis basis;  // boundaries first, then coset representatives
  std::size_t boundary_dim = 0;
  std::vector<F2Vector> reps;
};

}  // namespace detail

inline PageTable page(const FilteredComplex& fc, int r) {
  if (r < 1) fail(ErrorKind::InvalidPage, "page index must be at least 1, got " + std::to_string(r));
  fc.validate();
  PageTable table;
  table.r = r;
  std::map<int, std::vector<std::uint32_t>> by_grading;
  for (std::uint32_t g = 0; g < fc.size(); ++g) by_grading[fc.grading[g]].push_back(g);
  for (auto& [gr, gens] : by_grading) {
    const detail::SliceSequence s(fc, std::move(gens));
    std::map<int, detail::PageColumn> columns;
    for (int p = s.min_weight(); p <= s.max_weight(); ++p) {
      detail::PageColumn col{F2SpanBasis(s.size()), 0, {}};
      for (const auto& z : s.cycles(r - 1, p - 1)) col.basis.insert(z);
      for (const auto& z : s.cycles(r - 1, p + r - 1)) col.basis.insert(s.apply(z));
      col.boundary_dim = col.basis.dim();
      for (const auto& z : s.cycles(r, p))
        if (col.basis.insert(z)) col.reps.push_back(z);
      if (col.basis.dim() != col.boundary_dim + col.reps.size())
        fail(ErrorKind::InvariantViolation, "page bookkeeping lost a representative");
      if (!col.reps.empty()) {
        table.graded_dims[{p, gr}] = col.reps.size();
        table.dims[p] += col.reps.size();
      }
      columns.emplace(p, std::move(col));
    }
    // induced differential, read off in the target column's coset basis
    for (const auto& [p, col] : columns) {
      if (col.reps.empty()) continue;
      const auto target = columns.find(p - r);
      const std::size_t rows = target == columns.end() ? 0 : target->second.reps.size();
      F2Matrix dr(rows, col.reps.size());
      for (std::size_t j = 0; j < col.reps.size(); ++j) {
        const auto y = s.apply(col.reps[j]);
        if (target == columns.end()) {
          if (!y.is_zero()) fail(ErrorKind::InvariantViolation, "d_r leaves the filtration");
          continue;
        }
        const auto red = target->second.basis.reduce(y);
        if (!red.residual.is_zero()) fail(ErrorKind::InvariantViolation, "d_r image is not a cycle of the page");
        for (std::size_t i = 0; i < rows; ++i)
          if (red.combination.get(target->second.boundary_dim + i)) dr.set(i, j);
      }
      if (rows > 0) table.differentials.emplace(std::pair{p, gr}, std::move(dr));
    }
    for (const auto& [key, dr] : table.differentials) {
      if (key.second != gr) continue;
      const auto next = table.differentials.find({key.first - r, gr});
      if (next != table.differentials.end() && !(next->second * dr).is_zero())
        fail(ErrorKind::InvariantViolation, "d_r does not square to zero");
    }
  }
  return table;
}

/// Index of the first page that is guaranteed to be stable.
inline int stable_page(const FilteredComplex& fc) {
  const auto range = fc.weight_range();
  return range ? range->second - range->first + 1 : 1;
}

inline PageTable e_infinity(const FilteredComplex& fc) { return page(fc, stable_page(fc)); }

/// Homology of the total complex, ignoring the filtration.
inline std::size_t total_homology_dim(const FilteredComplex& fc) {
  fc.validate();
  std::map<int, std::vector<std::uint32_t>> by_grading;
  for (std::uint32_t g = 0; g < fc.size(); ++g) by_grading[fc.grading[g]].push_back(g);
  std::size_t total = 0;
  for (const auto& [gr, gens] : by_grading) {
    std::map<std::uint32_t, std::size_t> local;
    for (std::size_t i = 0; i < gens.size(); ++i) local[gens[i]] = i;
    F2Matrix d(gens.size(), gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (auto t : fc.boundary[gens[i]]) d.flip(local.at(t), i);
    total += gens.size() - 2 * rank_f2(std::move(d));
  }
  return total;
}

inline nlohmann::json to_json(const PageTable& t) {
  nlohmann::json dims = nlohmann::json::array();
  for (const auto& [w, d] : t.dims) dims.push_back({w, d});
  return {{"r", t.r}, {"dims", dims}};
}

inline nlohmann::json spectral_json(const std::vector<PageTable>& pages, const PageTable& e_inf) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : pages) out.push_back(to_json(p));
  return {{"schema", 1}, {"pages", out}, {"e_infinity_total", e_inf.total()}};
}

}  // namespace khoflow
