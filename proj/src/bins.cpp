// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include "amscov/bins.hpp"

#include <algorithm>
#include <cmath>

#include "amscov/error.hpp"
#include "amscov/text.hpp"

namespace amscov {

namespace {

bool nonempty(double lower, double upper, bool lower_closed, bool upper_closed) {
  return upper > lower || (upper == lower && lower_closed && upper_closed);
}

// Order used for canonical form: by lower boundary, closed-lower first.
bool starts_before(const Bin& a, const Bin& b) {
  if (a.lower() != b.lower()) return a.lower() < b.lower();
  if (a.lower_closed() != b.lower_closed()) return a.lower_closed();
  if (a.upper() != b.upper()) return a.upper() < b.upper();
  return !a.upper_closed() && b.upper_closed();
}

// a \ b as at most two pieces.
void subtract_into(const Bin& a, const Bin& b, std::vector<Bin>& out) {
  if (!intersect(a, b)) {
    out.push_back(a);
    return;
  }
  if (auto left = Bin::make(a.lower(), b.lower(), a.lower_closed(), !b.lower_closed())) {
    if (auto piece = intersect(*left, a)) out.push_back(*piece);
  }
  if (auto right = Bin::make(b.upper(), a.upper(), !b.upper_closed(), a.upper_closed())) {
    if (auto piece = intersect(*right, a)) out.push_back(*piece);
  }
}

}  // namespace

Bin::Bin(double lower, double upper, bool lower_closed, bool upper_closed)
    : lower_(lower), upper_(upper), lower_closed_(lower_closed), upper_closed_(upper_closed) {
  if (!std::isfinite(lower) || !std::isfinite(upper)) {
    fail(ErrorCode::InvalidArgument, "bin boundaries must be finite");
  }
  if (!nonempty(lower, upper, lower_closed, upper_closed)) {
    fail(ErrorCode::InvalidArgument, "empty bin " + to_string());
  }
}

std::optional<Bin> Bin::make(double lower, double upper, bool lower_closed, bool upper_closed) {
  if (!std::isfinite(lower) || !std::isfinite(upper)) return std::nullopt;
  if (!nonempty(lower, upper, lower_closed, upper_closed)) return std::nullopt;
  return Bin(lower, upper, lower_closed, upper_closed);
}

bool Bin::contains(double x) const noexcept {
  bool above = lower_closed_ ? x >= lower_ : x > lower_;
  bool below = upper_closed_ ? x <= upper_ : x < upper_;
  return above && below;
}

std::string Bin::to_string() const {
  std::string s;
  s += lower_closed_ ? '[' : '(';
  s += text::format_real(lower_);
  s += ':';
  s += text::format_real(upper_);
  s += upper_closed_ ? ']' : ')';
  return s;
}

std::strong_ordering operator<=>(const Bin& a, const Bin& b) noexcept {
  if (a == b) return std::strong_ordering::equal;
  return starts_before(a, b) ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::optional<Bin> intersect(const Bin& a, const Bin& b) {
  double lower = std::max(a.lower(), b.lower());
  bool lower_closed = a.lower() == b.lower() ? (a.lower_closed() && b.lower_closed())
                      : a.lower() > b.lower() ? a.lower_closed()
                                              : b.lower_closed();
  double upper = std::min(a.upper(), b.upper());
  bool upper_closed = a.upper() == b.upper() ? (a.upper_closed() && b.upper_closed())
                      : a.upper() < b.upper() ? a.upper_closed()
                                              : b.upper_closed();
  return Bin::make(lower, upper, lower_closed, upper_closed);
}

Bin parse_bin(std::string_view text) {
  auto s = text::trim(text);
  auto bad = [&](const std::string& why) -> Bin {
    fail(ErrorCode::ParseError, "bad bin '" + std::string(text) + "': " + why);
  };
  if (s.size() < 5) return bad("too short");
  char open = s.front();
  char close = s.back();
  if ((open != '[' && open != '(') || (close != ']' && close != ')')) {
    return bad("expected [ or ( ... ] or )");
  }
  auto inner = s.substr(1, s.size() - 2);
  auto parts = text::split(inner, ':');
  if (parts.size() != 2) {
    if (inner.find(',') != std::string_view::npos) return bad("use ':' between boundaries");
    return bad("expected exactly one ':'");
  }
  auto lower = text::parse_real(parts[0]);
  auto upper = text::parse_real(parts[1]);
  if (!lower || !upper) return bad("boundaries must be finite reals");
  auto b = Bin::make(*lower, *upper, open == '[', close == ']');
  if (!b) return bad("empty interval");
  return *b;
}

std::vector<Bin> normalize(std::vector<Bin> bins) {
  std::sort(bins.begin(), bins.end(), starts_before);
  std::vector<Bin> out;
  out.reserve(bins.size());
  for (const Bin& b : bins) {
    if (out.empty()) {
      out.push_back(b);
      continue;
    }
    Bin& cur = out.back();
    bool joins = b.lower() < cur.upper() ||
                 (b.lower() == cur.upper() && (cur.upper_closed() || b.lower_closed()));
    if (!joins) {
      out.push_back(b);
      continue;
    }
    double upper = cur.upper();
    bool upper_closed = cur.upper_closed();
    if (b.upper() > upper) {
      upper = b.upper();
      upper_closed = b.upper_closed();
    } else if (b.upper() == upper) {
      upper_closed = upper_closed || b.upper_closed();
    }
    cur = Bin(cur.lower(), upper, cur.lower_closed(), upper_closed);
  }
  return out;
}

BinSet::BinSet(std::vector<Bin> bins) : bins_(normalize(std::move(bins))) {}

bool BinSet::contains(double x) const noexcept {
  // First bin whose upper boundary is not below x.
  auto it = std::lower_bound(bins_.begin(), bins_.end(), x,
                             [](const Bin& b, double v) { return b.upper() < v; });
  for (; it != bins_.end() && it->lower() <= x; ++it) {
    if (it->contains(x)) return true;
  }
  return false;
}

double BinSet::measure() const noexcept {
  double total = 0.0;
  for (const Bin& b : bins_) total += b.width();
  return total;
}

void BinSet::insert(const Bin& b) {
  auto bins = bins_;
  bins.push_back(b);
  bins_ = normalize(std::move(bins));
}

std::string BinSet::to_string() const {
  if (bins_.empty()) return "{}";
  std::string s;
  for (const Bin& b : bins_) {
    if (!s.empty()) s += ' ';
    s += b.to_string();
  }
  return s;
}

BinSet set_union(const BinSet& a, const BinSet& b) {
  std::vector<Bin> all = a.bins();
  all.insert(all.end(), b.bins().begin(), b.bins().end());
  return BinSet(std::move(all));
}

BinSet set_difference(const BinSet& a, const BinSet& b) {
  std::vector<Bin> pieces = a.bins();
  for (const Bin& cut : b.bins()) {
    std::vector<Bin> next;
    for (const Bin& p : pieces) subtract_into(p, cut, next);
    pieces = std::move(next);
  }
  return BinSet(std::move(pieces));
}

BinSet set_intersect(const BinSet& a, const BinSet& b) {
  std::vector<Bin> out;
  for (const Bin& x : a.bins()) {
    for (const Bin& y : b.bins()) {
      if (y.lower() > x.upper()) break;
      if (auto o = intersect(x, y)) out.push_back(*o);
    }
  }
  return BinSet(std::move(out));
}

BinSet parse_bin_set(std::string_view text) {
  auto s = text::trim(text);
  if (s.empty() || s == "{}") return {};
  std::vector<Bin> bins;
  for (auto tok : text::split_ws(s)) bins.push_back(parse_bin(tok));
  return BinSet(std::move(bins));
}

BinGrid::BinGrid(double origin, double granularity, Bin domain)
    : origin_(origin), granularity_(granularity), domain_(domain) {
  if (!std::isfinite(origin) || !std::isfinite(granularity) || granularity <= 0.0) {
    fail(ErrorCode::InvalidArgument, "grid granularity must be a positive finite real");
  }
  if (std::abs(domain_.upper() - domain_.lower()) / granularity_ > 1e8) {
    fail(ErrorCode::InvalidArgument, "grid has too many cells");
  }
  auto start = [&](std::int64_t i) { return origin_ + static_cast<double>(i) * granularity_; };
  first_ = static_cast<std::int64_t>(std::floor((domain_.lower() - origin_) / granularity_));
  while (start(first_) > domain_.lower()) --first_;
  while (start(first_ + 1) <= domain_.lower()) ++first_;
  last_ = static_cast<std::int64_t>(std::ceil((domain_.upper() - origin_) / granularity_)) - 1;
  while (start(last_ + 1) < domain_.upper()) ++last_;
  while (last_ > first_ && start(last_) >= domain_.upper()) --last_;
  last_ = std::max(last_, first_);
}

Bin BinGrid::cell(std::int64_t index) const {
  if (index < first_ || index > last_) {
    fail(ErrorCode::OutOfDomain, "grid cell index out of range");
  }
  double lower = origin_ + static_cast<double>(index) * granularity_;
  bool lower_closed = true;
  if (index == first_) {
    lower = domain_.lower();
    lower_closed = domain_.lower_closed();
  }
  double upper = origin_ + static_cast<double>(index + 1) * granularity_;
  bool upper_closed = false;
  if (index == last_) {
    upper = domain_.upper();
    upper_closed = domain_.upper_closed();
  }
  return Bin(lower, upper, lower_closed, upper_closed);
}

std::int64_t BinGrid::index_of(double x) const {
  if (!domain_.contains(x)) {
    fail(ErrorCode::OutOfDomain,
         "value " + text::format_real(x) + " outside grid domain " + domain_.to_string());
  }
  return nearest_index(x);
}

std::int64_t BinGrid::nearest_index(double x) const noexcept {
  auto i = static_cast<std::int64_t>(std::floor((x - origin_) / granularity_));
  i = std::clamp(i, first_, last_);
  while (i > first_ && x < origin_ + static_cast<double>(i) * granularity_) --i;
  while (i < last_ && x >= origin_ + static_cast<double>(i + 1) * granularity_) ++i;
  return i;
}

std::vector<Bin> BinGrid::cells_overlapping(const Bin& b) const {
  std::vector<Bin> out;
  auto clipped = intersect(b, domain_);
  if (!clipped) return out;
  auto lo = nearest_index(clipped->lower());
  auto hi = nearest_index(clipped->upper());
  for (auto i = lo; i <= hi; ++i) {
    Bin c = cell(i);
    if (intersect(c, *clipped)) out.push_back(c);
  }
  return out;
}

}  // namespace amscov
