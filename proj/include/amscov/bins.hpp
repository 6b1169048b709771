// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace amscov {

/// A nonempty real interval with independently open or closed boundaries.
///
/// Written `[a:b]`, `(a:b)`, `[a:b)` or `(a:b]`. A degenerate bin `[a:a]`
/// is allowed and represents a single value (levels, individual delays).
/// Both boundaries are always finite.
class Bin {
 public:
  /// Throws InvalidArgument when the boundaries describe an empty set or
  /// are not finite.
  Bin(double lower, double upper, bool lower_closed = true, bool upper_closed = true);

  static Bin closed(double lower, double upper) { return Bin(lower, upper, true, true); }
  static Bin half_open(double lower, double upper) { return Bin(lower, upper, true, false); }
  static Bin point(double value) { return Bin(value, value, true, true); }

  /// Returns nullopt instead of throwing when the interval would be empty.
  static std::optional<Bin> make(double lower, double upper, bool lower_closed, bool upper_closed);

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  bool lower_closed() const noexcept { return lower_closed_; }
  bool upper_closed() const noexcept { return upper_closed_; }

  double width() const noexcept { return upper_ - lower_; }
  bool degenerate() const noexcept { return upper_ == lower_; }

  bool contains(double x) const noexcept;

  std::string to_string() const;

  friend bool operator==(const Bin&, const Bin&) = default;
  friend std::strong_ordering operator<=>(const Bin& a, const Bin& b) noexcept;

 private:
  double lower_;
  double upper_;
  bool lower_closed_;
  bool upper_closed_;
};

inline bool contains(const Bin& b, double x) noexcept { return b.contains(x); }

/// Overlap of two bins, if any.
std::optional<Bin> intersect(const Bin& a, const Bin& b);

/// Parses the textual bin syntax. Throws ParseError.
Bin parse_bin(std::string_view text);

/// A finite union of bins kept in canonical form: sorted, pairwise disjoint,
/// and with touching bins merged whenever the touch point belongs to one of
/// them (`[0:1) + [1:2)` becomes `[0:2)`, while `(0:1) + (1:2)` stays apart).
class BinSet {
 public:
  BinSet() = default;
  explicit BinSet(std::vector<Bin> bins);
  BinSet(std::initializer_list<Bin> bins) : BinSet(std::vector<Bin>(bins)) {}

  const std::vector<Bin>& bins() const noexcept { return bins_; }
  bool empty() const noexcept { return bins_.empty(); }
  std::size_t size() const noexcept { return bins_.size(); }

  bool contains(double x) const noexcept;

  /// Total interval length.
  double measure() const noexcept;

  void insert(const Bin& b);

  std::string to_string() const;

  friend bool operator==(const BinSet&, const BinSet&) = default;

 private:
  std::vector<Bin> bins_;
};

/// Sorts and merges an arbitrary list of bins into canonical order.
std::vector<Bin> normalize(std::vector<Bin> bins);

BinSet set_union(const BinSet& a, const BinSet& b);
BinSet set_difference(const BinSet& a, const BinSet& b);
BinSet set_intersect(const BinSet& a, const BinSet& b);

/// Parses a whitespace-separated list of bins ("[0:1) [2:3]"). Throws ParseError.
BinSet parse_bin_set(std::string_view text);

/// Regular partition of a domain into cells of width `granularity`
/// anchored at `origin`. Cells are `[lo, hi)` except the one holding the
/// domain's upper boundary, which takes the domain's upper closure. Cells
/// are clipped to the domain at both ends.
class BinGrid {
 public:
  BinGrid(double origin, double granularity, Bin domain);

  double origin() const noexcept { return origin_; }
  double granularity() const noexcept { return granularity_; }
  const Bin& domain() const noexcept { return domain_; }

  std::int64_t first_index() const noexcept { return first_; }
  std::int64_t last_index() const noexcept { return last_; }
  std::size_t cell_count() const noexcept { return static_cast<std::size_t>(last_ - first_ + 1); }

  Bin cell(std::int64_t index) const;

  /// Index of the cell holding x. Throws OutOfDomain.
  std::int64_t index_of(double x) const;

  /// The unique cell containing x. Throws OutOfDomain.
  Bin quantize(double x) const { return cell(index_of(x)); }

  /// Every cell with a nonempty overlap with `b`, ascending. Parts of `b`
  /// outside the domain are ignored.
  std::vector<Bin> cells_overlapping(const Bin& b) const;

  friend bool operator==(const BinGrid&, const BinGrid&) = default;

 private:
  // Index of the cell holding x, clamped to the grid; never throws.
  std::int64_t nearest_index(double x) const noexcept;

  double origin_;
  double granularity_;
  Bin domain_;
  std::int64_t first_;
  std::int64_t last_;
};

inline Bin quantize(const BinGrid& g, double x) { return g.quantize(x); }

}  // namespace amscov
