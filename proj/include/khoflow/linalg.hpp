#pragma once

// Exact linear algebra: packed-bit F2 matrices and arbitrary-precision
// integer matrices (Smith normal form, Bareiss determinant).

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "khoflow/error.hpp"

namespace khoflow {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t bits) noexcept { return (bits + kWordBits - 1) / kWordBits; }

/// Fixed-length vector over F2 with packed storage.
class F2Vector {
public:
  F2Vector() = default;
  explicit F2Vector(std::size_t size) : size_(size), words_(words_for(size), 0) {}

  std::size_t size() const noexcept { return size_; }

  bool get(std::size_t i) const noexcept { return (words_[i / kWordBits] >> (i % kWordBits)) & 1u; }
  void set(std::size_t i, bool value = true) noexcept {
    const auto mask = std::uint64_t{1} << (i % kWordBits);
    if (value)
      words_[i / kWordBits] |= mask;
    else
      words_[i / kWordBits] &= ~mask;
  }
  void flip(std::size_t i) noexcept { words_[i / kWordBits] ^= std::uint64_t{1} << (i % kWordBits); }

  F2Vector& operator^=(const F2Vector& other) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    return *this;
  }

  bool is_zero() const noexcept {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
  }

  std::size_t popcount() const noexcept {
    std::size_t total = 0;
    for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
  }

  /// Index of the lowest set bit, or size() when zero.
  std::size_t lowest() const noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] != 0) return w * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[w]));
    return size_;
  }

  std::span<std::uint64_t> words() noexcept { return words_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  bool operator==(const F2Vector&) const = default;

private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Dense row-major F2 matrix, one packed bit row per matrix row.
class F2Matrix {
public:
  F2Matrix() = default;
  F2Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_(words_for(cols)), bits_(rows * stride_, 0) {}

  static F2Matrix identity(std::size_t n) {
    F2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i);
    return m;
  }

  static F2Matrix from_rows(std::initializer_list<std::initializer_list<int>> rows) {
    const std::size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
    F2Matrix m(rows.size(), cols);
    std::size_t r = 0;
    for (const auto& row : rows) {
      if (row.size() != cols) fail(ErrorKind::InvalidArgument, "ragged F2 matrix literal");
      std::size_t c = 0;
      for (int v : row) m.set(r, c++, (v & 1) != 0);
      ++r;
    }
    return m;
  }

  static F2Matrix from_vectors(std::span<const F2Vector> vectors, std::size_t cols) {
    F2Matrix m(vectors.size(), cols);
    for (std::size_t r = 0; r < vectors.size(); ++r) m.set_row(r, vectors[r]);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  bool get(std::size_t r, std::size_t c) const noexcept {
    return (bits_[r * stride_ + c / kWordBits] >> (c % kWordBits)) & 1u;
  }
  void set(std::size_t r, std::size_t c, bool value = true) noexcept {
    auto& word = bits_[r * stride_ + c / kWordBits];
    const auto mask = std::uint64_t{1} << (c % kWordBits);
    word = value ? (word | mask) : (word & ~mask);
  }
  void flip(std::size_t r, std::size_t c) noexcept {
    bits_[r * stride_ + c / kWordBits] ^= std::uint64_t{1} << (c % kWordBits);
  }

  std::span<std::uint64_t> row_words(std::size_t r) noexcept { return {bits_.data() + r * stride_, stride_}; }
  std::span<const std::uint64_t> row_words(std::size_t r) const noexcept {
    return {bits_.data() + r * stride_, stride_};
  }

  F2Vector row(std::size_t r) const {
    F2Vector v(cols_);
    std::copy_n(bits_.begin() + static_cast<std::ptrdiff_t>(r * stride_), stride_, v.words().begin());
    return v;
  }
  void set_row(std::size_t r, const F2Vector& v) {
    if (v.size() != cols_) fail(ErrorKind::InvalidArgument, "row length mismatch");
    std::copy(v.words().begin(), v.words().end(), bits_.begin() + static_cast<std::ptrdiff_t>(r * stride_));
  }

  void xor_row(std::size_t dst, std::size_t src, std::size_t from_word = 0) noexcept {
    auto* d = bits_.data() + dst * stride_;
    const auto* s = bits_.data() + src * stride_;
    for (std::size_t w = from_word; w < stride_; ++w) d[w] ^= s[w];
  }
  void swap_rows(std::size_t a, std::size_t b) noexcept {
    if (a == b) return;
    std::swap_ranges(bits_.begin() + static_cast<std::ptrdiff_t>(a * stride_),
                     bits_.begin() + static_cast<std::ptrdiff_t>((a + 1) * stride_),
                     bits_.begin() + static_cast<std::ptrdiff_t>(b * stride_));
  }

  bool is_zero() const noexcept {
    return std::all_of(bits_.begin(), bits_.end(), [](std::uint64_t w) { return w == 0; });
  }

  std::size_t popcount() const noexcept {
    std::size_t total = 0;
    for (auto w : bits_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
  }

  F2Matrix transpose() const {
    F2Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        if (get(r, c)) t.set(c, r);
    return t;
  }

  /// Matrix product this * rhs.
  F2Matrix operator*(const F2Matrix& rhs) const {
    if (cols_ != rhs.rows_) fail(ErrorKind::InvalidArgument, "F2 product shape mismatch");
    F2Matrix out(rows_, rhs.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      auto* dst = out.bits_.data() + r * out.stride_;
      for (std::size_t k = 0; k < cols_; ++k) {
        if (!get(r, k)) continue;
        const auto* src = rhs.bits_.data() + k * rhs.stride_;
        for (std::size_t w = 0; w < out.stride_; ++w) dst[w] ^= src[w];
      }
    }
    return out;
  }

  F2Matrix operator+(const F2Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) fail(ErrorKind::InvalidArgument, "F2 sum shape mismatch");
    F2Matrix out = *this;
    for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] ^= rhs.bits_[i];
    return out;
  }

  /// y = this * x for a column vector x.
  F2Vector apply(const F2Vector& x) const {
    if (x.size() != cols_) fail(ErrorKind::InvalidArgument, "F2 apply length mismatch");
    F2Vector y(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      std::uint64_t acc = 0;
      const auto* row = bits_.data() + r * stride_;
      for (std::size_t w = 0; w < stride_; ++w) acc ^= row[w] & x.words()[w];
      if (std::popcount(acc) & 1) y.set(r);
    }
    return y;
  }

  bool operator==(const F2Matrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> bits_;
};

inline F2Matrix vstack(const F2Matrix& top, const F2Matrix& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  if (top.cols() != bottom.cols()) fail(ErrorKind::InvalidArgument, "vstack column mismatch");
  F2Matrix out(top.rows() + bottom.rows(), top.cols());
  for (std::size_t r = 0; r < top.rows(); ++r) std::ranges::copy(top.row_words(r), out.row_words(r).begin());
  for (std::size_t r = 0; r < bottom.rows(); ++r)
    std::ranges::copy(bottom.row_words(r), out.row_words(top.rows() + r).begin());
  return out;
}

/// Submatrix on the given row and column index lists (in the given order).
inline F2Matrix select(const F2Matrix& m, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
  F2Matrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (m.get(rows[i], cols[j])) out.set(i, j);
  return out;
}

namespace detail {

// In-place forward elimination with left-to-right pivoting. Returns pivot
// columns; rows [0, pivots.size()) hold the echelon rows afterwards. With
// `reduced` the pivot columns are also cleared above each pivot.
inline std::vector<std::size_t> eliminate(F2Matrix& m, bool reduced) {
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
    std::size_t pivot = rank;
    while (pivot < m.rows() && !m.get(pivot, c)) ++pivot;
    if (pivot == m.rows()) continue;
    m.swap_rows(rank, pivot);
    const std::size_t word = c / kWordBits;
    for (std::size_t r = reduced ? 0 : rank + 1; r < m.rows(); ++r)
      if (r != rank && m.get(r, c)) m.xor_row(r, rank, word);
    pivots.push_back(c);
    ++rank;
  }
  return pivots;
}

}  // namespace detail

inline std::size_t rank_f2(F2Matrix m) { return detail::eliminate(m, false).size(); }

/// Rows of the result form a basis of {x : m x = 0}.
inline F2Matrix kernel_basis_f2(const F2Matrix& m) {
  F2Matrix work = m;
  const auto pivots = detail::eliminate(work, true);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  F2Matrix basis(m.cols() - pivots.size(), m.cols());
  std::size_t out = 0;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    basis.set(out, free);
    for (std::size_t i = 0; i < pivots.size(); ++i)
      if (work.get(i, free)) basis.set(out, pivots[i]);
    ++out;
  }
  return basis;
}

/// dim span(space rows) / span(subspace rows).
inline std::size_t quotient_dim_f2(const F2Matrix& space, const F2Matrix& subspace) {
  if (subspace.rows() > 0 && space.cols() != subspace.cols())
    fail(ErrorKind::NotASubspace, "ambient dimensions differ");
  const std::size_t space_rank = rank_f2(space);
  const std::size_t sub_rank = rank_f2(subspace);
  if (subspace.rows() > 0 && rank_f2(vstack(space, subspace)) != space_rank)
    fail(ErrorKind::NotASubspace, "subspace rows are not in the span of the space rows");
  return space_rank - sub_rank;
}

/// Incrementally built span with coordinate tracking. Each stored row is
/// reduced against all earlier rows, so reduction in insertion order clears
/// every pivot.
class F2SpanBasis {
public:
  explicit F2SpanBasis(std::size_t ambient) : ambient_(ambient) {}

  std::size_t ambient() const noexcept { return ambient_; }
  std::size_t dim() const noexcept { return rows_.size(); }

  struct Reduction {
    F2Vector residual;
    F2Vector combination;  // over the accepted vectors, in acceptance order
  };

  Reduction reduce(const F2Vector& v) const {
    Reduction out{v, F2Vector(rows_.size())};
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (!out.residual.get(pivots_[i])) continue;
      out.residual ^= rows_[i];
      out.combination ^= widen(combos_[i], rows_.size());
    }
    return out;
  }

  bool contains(const F2Vector& v) const { return reduce(v).residual.is_zero(); }

  /// Adds v if independent; returns whether it was accepted.
  bool insert(const F2Vector& v) {
    auto red = reduce(v);
    if (red.residual.is_zero()) return false;
    F2Vector combo = widen(red.combination, rows_.size() + 1);
    combo.set(rows_.size());
    pivots_.push_back(red.residual.lowest());
    rows_.push_back(std::move(red.residual));
    combos_.push_back(std::move(combo));
    return true;
  }

private:
  static F2Vector widen(const F2Vector& v, std::size_t size) {
    F2Vector out(size);
    for (std::size_t w = 0; w < v.words().size() && w < out.words().size(); ++w) out.words()[w] = v.words()[w];
    return out;
  }

  std::size_t ambient_;
  std::vector<F2Vector> rows_;
  std::vector<F2Vector> combos_;
  std::vector<std::size_t> pivots_;
};

/// Rectangular matrix of arbitrary-precision integers.
class IntMatrix {
public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}

  static IntMatrix from_rows(std::initializer_list<std::initializer_list<long long>> rows) {
    const std::size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
    IntMatrix m(rows.size(), cols);
    std::size_t r = 0;
    for (const auto& row : rows) {
      if (row.size() != cols) fail(ErrorKind::InvalidArgument, "ragged integer matrix literal");
      std::size_t c = 0;
      for (auto v : row) m(r, c++) = v;
      ++r;
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  BigInt& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const BigInt& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  void swap_rows(std::size_t a, std::size_t b) {
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
  }
  /// row[dst] += k * row[src]
  void add_row(std::size_t dst, std::size_t src, const BigInt& k) {
    for (std::size_t c = 0; c < cols_; ++c) (*this)(dst, c) += k * (*this)(src, c);
  }
  /// col[dst] += k * col[src]
  void add_col(std::size_t dst, std::size_t src, const BigInt& k) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, dst) += k * (*this)(r, src);
  }

  bool operator==(const IntMatrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> entries_;
};

/// Diagonal of the Smith normal form: min(rows, cols) nonnegative entries
/// d1 | d2 | ..., zeros last.
inline std::vector<BigInt> smith_normal_form(IntMatrix m) {
  const std::size_t n = std::min(m.rows(), m.cols());
  std::vector<BigInt> diag;
  diag.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (;;) {
      // smallest nonzero magnitude in the trailing block becomes the pivot
      std::size_t pr = m.rows(), pc = m.cols();
      BigInt best = 0;
      for (std::size_t r = t; r < m.rows(); ++r)
        for (std::size_t c = t; c < m.cols(); ++c) {
          const BigInt mag = abs(m(r, c));
          if (mag != 0 && (best == 0 || mag < best)) {
            best = mag;
            pr = r;
            pc = c;
          }
        }
      if (best == 0) break;
      m.swap_rows(t, pr);
      m.swap_cols(t, pc);

      bool clean = true;
      for (std::size_t r = t + 1; r < m.rows(); ++r) {
        if (m(r, t) == 0) continue;
        m.add_row(r, t, -(m(r, t) / m(t, t)));
        if (m(r, t) != 0) clean = false;
      }
      for (std::size_t c = t + 1; c < m.cols(); ++c) {
        if (m(t, c) == 0) continue;
        m.add_col(c, t, -(m(t, c) / m(t, t)));
        if (m(t, c) != 0) clean = false;
      }
      if (!clean) continue;

      // divisibility: fold any offending row into the pivot row and retry
      std::size_t offender = m.rows();
      for (std::size_t r = t + 1; r < m.rows() && offender == m.rows(); ++r)
        for (std::size_t c = t + 1; c < m.cols(); ++c)
          if (m(r, c) % m(t, t) != 0) {
            offender = r;
            break;
          }
      if (offender == m.rows()) break;
      m.add_row(t, offender, 1);
    }
    diag.push_back(abs(m(t, t)));
  }
  return diag;
}

/// Exact determinant by fraction-free Bareiss elimination.
inline BigInt determinant_bareiss(IntMatrix m) {
  if (m.rows() != m.cols()) fail(ErrorKind::InvalidArgument, "determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  BigInt sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      m.swap_rows(k, swap);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

}  // namespace khoflow
