// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include "amscov/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amscov/error.hpp"
#include "amscov/text.hpp"

namespace amscov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sparse table answering min and max over index ranges in O(1).
class RangeExtrema {
 public:
  explicit RangeExtrema(std::span<const double> v) {
    std::size_t n = v.size();
    std::size_t levels = 1;
    while ((std::size_t{1} << levels) <= n) ++levels;
    mins_.assign(levels, {});
    maxs_.assign(levels, {});
    mins_[0].assign(v.begin(), v.end());
    maxs_[0].assign(v.begin(), v.end());
    for (std::size_t k = 1; k < levels; ++k) {
      std::size_t span = std::size_t{1} << k;
      std::size_t half = span / 2;
      mins_[k].resize(n - span + 1);
      maxs_[k].resize(n - span + 1);
      for (std::size_t i = 0; i + span <= n; ++i) {
        mins_[k][i] = std::min(mins_[k - 1][i], mins_[k - 1][i + half]);
        maxs_[k][i] = std::max(maxs_[k - 1][i], maxs_[k - 1][i + half]);
      }
    }
  }

  // Over [first, last); +inf / -inf when empty.
  double min(std::size_t first, std::size_t last) const {
    if (first >= last) return kInf;
    std::size_t k = log2(last - first);
    return std::min(mins_[k][first], mins_[k][last - (std::size_t{1} << k)]);
  }
  double max(std::size_t first, std::size_t last) const {
    if (first >= last) return -kInf;
    std::size_t k = log2(last - first);
    return std::max(maxs_[k][first], maxs_[k][last - (std::size_t{1} << k)]);
  }

 private:
  static std::size_t log2(std::size_t x) {
    std::size_t k = 0;
    while ((std::size_t{2} << k) <= x) ++k;
    return k;
  }

  std::vector<std::vector<double>> mins_;
  std::vector<std::vector<double>> maxs_;
};

void require_positive(const std::optional<double>& v, const char* name, const CoverPoint& cp) {
  if (!v) {
    fail(ErrorCode::InvalidArgument,
         "coverpoint '" + cp.id + "' (" + std::string(to_string(cp.kind)) + ") needs " + name);
  }
  if (!(*v > 0.0) || !std::isfinite(*v)) {
    fail(ErrorCode::InvalidArgument, "coverpoint '" + cp.id + "': " + name + " must be > 0");
  }
}

void forbid(bool present, const char* name, const CoverPoint& cp) {
  if (present) {
    fail(ErrorCode::InvalidArgument, "coverpoint '" + cp.id + "' (" +
                                         std::string(to_string(cp.kind)) + ") does not use " +
                                         name);
  }
}

}  // namespace

std::string_view to_string(ArtifactKind kind) noexcept {
  switch (kind) {
    case ArtifactKind::range: return "range";
    case ArtifactKind::deglitched_range: return "deglitched_range";
    case ArtifactKind::level: return "level";
    case ArtifactKind::ddt: return "ddt";
    case ArtifactKind::delay: return "delay";
    case ArtifactKind::frequency: return "frequency";
  }
  return "?";
}

ArtifactKind parse_artifact_kind(std::string_view name) {
  for (auto k : {ArtifactKind::range, ArtifactKind::deglitched_range, ArtifactKind::level,
                 ArtifactKind::ddt, ArtifactKind::delay, ArtifactKind::frequency}) {
    if (to_string(k) == name) return k;
  }
  fail(ErrorCode::ParseError, "unknown coverage kind '" + std::string(name) + "'");
}

void validate(const CoverPoint& cp) {
  if (!text::is_identifier(cp.id)) fail(ErrorCode::InvalidArgument, "bad coverpoint id '" + cp.id + "'");
  const auto& p = cp.params;
  bool uses_deglitch = cp.kind == ArtifactKind::deglitched_range || cp.kind == ArtifactKind::level;
  bool is_level = cp.kind == ArtifactKind::level;
  bool is_ddt = cp.kind == ArtifactKind::ddt;
  bool is_freq = cp.kind == ArtifactKind::frequency;
  bool is_delay = cp.kind == ArtifactKind::delay;

  if (uses_deglitch) require_positive(p.deglitch_time, "deglitch_time", cp);
  else forbid(p.deglitch_time.has_value(), "deglitch_time", cp);
  if (is_level) {
    require_positive(p.level_time, "level_time", cp);
    require_positive(p.bin_granularity, "bin_granularity", cp);
  } else {
    forbid(p.level_time.has_value(), "level_time", cp);
    forbid(p.bin_granularity.has_value(), "bin_granularity", cp);
  }
  if (is_ddt) require_positive(p.time_granularity, "time_granularity", cp);
  else forbid(p.time_granularity.has_value(), "time_granularity", cp);
  if (is_freq) {
    if (!p.reference || !std::isfinite(*p.reference)) {
      fail(ErrorCode::InvalidArgument, "coverpoint '" + cp.id + "' (frequency) needs reference");
    }
    require_positive(p.window, "window", cp);
  } else {
    forbid(p.reference.has_value(), "reference", cp);
    forbid(p.window.has_value(), "window", cp);
    forbid(p.halve_crossings, "halve_crossings", cp);
  }
  if (is_delay) {
    if (!p.events) fail(ErrorCode::InvalidArgument, "coverpoint '" + cp.id + "' (delay) needs events");
  } else {
    forbid(p.events.has_value(), "events", cp);
    if (cp.signal.empty()) fail(ErrorCode::InvalidArgument, "coverpoint '" + cp.id + "' needs a signal");
  }
}

Bin range_coverage(const Trace& t, std::string_view signal) {
  auto v = t.values(signal);
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return Bin::closed(*lo, *hi);
}

Bin deglitched_range(std::span<const double> times, std::span<const double> values,
                     double deglitch_time) {
  if (!(deglitch_time > 0.0)) fail(ErrorCode::InvalidArgument, "deglitch_time must be > 0");
  const std::size_t n = times.size();
  const double t0 = times.front();
  const double tn = times.back();
  const double s_lo = t0;
  const double s_hi = tn - deglitch_time;
  if (s_hi < s_lo) {
    fail(ErrorCode::TraceTooShort, "trace duration " + text::format_real(tn - t0) +
                                       " s is shorter than deglitch_time " +
                                       text::format_real(deglitch_time) + " s");
  }
  RangeExtrema extrema(values);
  if (s_hi == s_lo) {
    double lo = extrema.max(0, n);
    double hi = extrema.min(0, n);
    return lo <= hi ? Bin::closed(lo, hi) : Bin::point(0.5 * (lo + hi));
  }

  // Window start times at which the set of samples inside the window
  // changes. Between two consecutive breakpoints both window edges move
  // along a single linear segment of the signal.
  std::vector<double> breaks{s_lo, s_hi};
  breaks.reserve(2 * n + 2);
  for (double ti : times) {
    if (ti > s_lo && ti < s_hi) breaks.push_back(ti);
    double back = ti - deglitch_time;
    if (back > s_lo && back < s_hi) breaks.push_back(back);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto at = [&](double s) { return interpolate(times, values, std::clamp(s, t0, tn)); };
  double upper = -kInf;  // sup of window minima
  double lower = kInf;   // inf of window maxima
  double a_prev = at(breaks[0]);
  double b_prev = at(breaks[0] + deglitch_time);
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    double p = breaks[k];
    double q = breaks[k + 1];
    double a_p = a_prev, b_p = b_prev;
    double a_q = at(q);
    double b_q = at(q + deglitch_time);
    a_prev = a_q;
    b_prev = b_q;

    double mid = 0.5 * (p + q);
    auto first = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), mid) - times.begin());
    auto last = static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), mid + deglitch_time) - times.begin());
    double inner_min = extrema.min(first, last);
    double inner_max = extrema.max(first, last);

    // a(s) = value at the window start, b(s) = value at the window end;
    // both are linear on [p, q].
    double best_min = std::max(std::min(a_p, b_p), std::min(a_q, b_q));
    double best_max = std::min(std::max(a_p, b_p), std::max(a_q, b_q));
    double d_p = a_p - b_p;
    double d_q = a_q - b_q;
    if ((d_p < 0.0 && d_q > 0.0) || (d_p > 0.0 && d_q < 0.0)) {
      double frac = d_p / (d_p - d_q);
      double cross = a_p + (a_q - a_p) * frac;
      best_min = std::max(best_min, cross);
      best_max = std::min(best_max, cross);
    }
    upper = std::max(upper, std::min(inner_min, best_min));
    lower = std::min(lower, std::max(inner_max, best_max));
  }
  if (lower <= upper) return Bin::closed(lower, upper);
  return Bin::point(0.5 * (lower + upper));
}

Bin deglitched_range_coverage(const Trace& t, std::string_view signal, double deglitch_time) {
  return deglitched_range(t.times(), t.values(signal), deglitch_time);
}

std::vector<double> deglitch_signal(std::span<const double> times, std::span<const double> values,
                                    double deglitch_time) {
  Bin sustained = deglitched_range(times, values, deglitch_time);
  const std::size_t n = times.size();
  const double half = 0.5 * deglitch_time;
  std::vector<std::size_t> lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), times[i] - half) - times.begin());
    hi[i] = static_cast<std::size_t>(
        std::upper_bound(times.begin(), times.end(), times[i] + half) - times.begin());
  }
  auto erode = [&](std::span<const double> v) {
    RangeExtrema ex(v);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = ex.min(lo[i], hi[i]);
    return out;
  };
  auto dilate = [&](std::span<const double> v) {
    RangeExtrema ex(v);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = ex.max(lo[i], hi[i]);
    return out;
  };
  auto opened = dilate(erode(values));
  auto cleaned = erode(dilate(opened));
  for (double& v : cleaned) v = std::clamp(v, sustained.lower(), sustained.upper());
  return cleaned;
}

std::vector<double> level_coverage(const Trace& t, std::string_view signal, double deglitch_time,
                                   double level_time, double bin_granularity) {
  if (!(level_time > 0.0) || !(bin_granularity > 0.0)) {
    fail(ErrorCode::InvalidArgument, "level_time and bin_granularity must be > 0");
  }
  auto times = t.times();
  auto d = deglitch_signal(times, t.values(signal), deglitch_time);

  std::vector<double> found;
  std::size_t start = 0;
  double lo = d[0], hi = d[0];
  auto close_dwell = [&](std::size_t end) {
    if (times[end] - times[start] >= level_time) found.push_back(0.5 * (lo + hi));
  };
  for (std::size_t j = 1; j < d.size(); ++j) {
    double nlo = std::min(lo, d[j]);
    double nhi = std::max(hi, d[j]);
    if (nhi - nlo <= bin_granularity) {
      lo = nlo;
      hi = nhi;
      continue;
    }
    close_dwell(j - 1);
    start = j;
    lo = hi = d[j];
  }
  close_dwell(d.size() - 1);

  // Merge repeated visits to the same level.
  struct Cluster {
    double sum;
    std::size_t count;
    double mean() const { return sum / static_cast<double>(count); }
  };
  std::vector<Cluster> clusters;
  for (double level : found) {
    auto it = std::find_if(clusters.begin(), clusters.end(), [&](const Cluster& c) {
      return std::abs(c.mean() - level) <= 0.5 * bin_granularity;
    });
    if (it == clusters.end()) {
      clusters.push_back({level, 1});
    } else {
      it->sum += level;
      ++it->count;
    }
  }
  std::vector<double> levels;
  levels.reserve(clusters.size());
  for (const auto& c : clusters) levels.push_back(c.mean());
  std::sort(levels.begin(), levels.end());
  return levels;
}

Bin ddt_coverage(const Trace& t, std::string_view signal, double time_granularity) {
  if (!(time_granularity > 0.0)) fail(ErrorCode::InvalidArgument, "time_granularity must be > 0");
  auto times = t.times();
  auto v = t.values(signal);
  const double t0 = t.start_time();
  const double tn = t.end_time();
  const double slack = 1e-9 * time_granularity;
  if (t.duration() + slack < time_granularity) {
    fail(ErrorCode::TraceTooShort, "trace duration " + text::format_real(t.duration()) +
                                       " s is shorter than time_granularity " +
                                       text::format_real(time_granularity) + " s");
  }
  double lo = kInf, hi = -kInf;
  for (std::size_t j = 0;; ++j) {
    double anchor = t0 + static_cast<double>(j) * time_granularity;
    double ahead = anchor + time_granularity;
    if (ahead > tn + slack) break;
    double slope = (interpolate(times, v, std::min(ahead, tn)) - interpolate(times, v, anchor)) /
                   time_granularity;
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
  }
  return Bin::closed(lo, hi);
}

std::vector<double> delay_values(const Trace& t, const Event& first, const Event& second) {
  auto starts = event_times(t, first);
  auto ends = event_times(t, second);
  std::vector<double> delays;
  std::size_t next = 0;
  for (double s : starts) {
    while (next < ends.size() && !(ends[next] > s)) ++next;
    if (next == ends.size()) break;
    delays.push_back(ends[next] - s);
    ++next;
  }
  return delays;
}

Bin delay_coverage(const Trace& t, const Event& first, const Event& second) {
  auto d = delay_values(t, first, second);
  if (d.empty()) {
    fail(ErrorCode::NoPairs, "no " + first.signal + " -> " + second.signal + " event pairs");
  }
  auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  return Bin::closed(*lo, *hi);
}

std::vector<double> frequency_values(const Trace& t, std::string_view signal, double reference,
                                     double window, bool halve_crossings) {
  if (!(window > 0.0)) fail(ErrorCode::InvalidArgument, "window must be > 0");
  auto count = static_cast<std::size_t>(std::floor(t.duration() / window + 1e-9));
  if (count == 0) {
    fail(ErrorCode::TraceTooShort, "trace duration " + text::format_real(t.duration()) +
                                       " s is shorter than window " + text::format_real(window) +
                                       " s");
  }
  auto crossings = all_crossing_times(t.times(), t.values(signal), reference);
  std::vector<std::size_t> per_window(count, 0);
  const double t0 = t.start_time();
  for (double c : crossings) {
    auto w = static_cast<std::size_t>(std::floor((c - t0) / window));
    if (w < count) ++per_window[w];
  }
  const double span = halve_crossings ? 2.0 * window : window;
  std::vector<double> freqs;
  freqs.reserve(count);
  for (auto n : per_window) freqs.push_back(static_cast<double>(n) / span);
  return freqs;
}

Bin frequency_coverage(const Trace& t, std::string_view signal, double reference, double window,
                       bool halve_crossings) {
  auto f = frequency_values(t, signal, reference, window, halve_crossings);
  auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  return Bin::closed(*lo, *hi);
}

CoverageResult evaluate(const CoverPoint& cp, const Trace& t, const BinGrid& grid) {
  validate(cp);
  CoverageResult r;
  r.coverpoint_id = cp.id;
  r.sample_count = t.sample_count();
  const auto& p = cp.params;

  auto map_interval = [&](const Bin& out) {
    r.output = BinSet{out};
    r.cells = grid.cells_overlapping(out);
    r.untargeted = set_difference(r.output, BinSet{grid.domain()});
  };
  auto map_values = [&](std::vector<double> values) {
    std::vector<Bin> points;
    std::vector<Bin> outside;
    for (double v : values) {
      points.push_back(Bin::point(v));
      if (grid.domain().contains(v)) r.cells.push_back(grid.quantize(v));
      else outside.push_back(Bin::point(v));
    }
    std::sort(r.cells.begin(), r.cells.end());
    r.cells.erase(std::unique(r.cells.begin(), r.cells.end()), r.cells.end());
    r.output = BinSet(std::move(points));
    r.untargeted = BinSet(std::move(outside));
    r.values = std::move(values);
  };

  switch (cp.kind) {
    case ArtifactKind::range:
      map_interval(range_coverage(t, cp.signal));
      break;
    case ArtifactKind::deglitched_range:
      map_interval(deglitched_range_coverage(t, cp.signal, *p.deglitch_time));
      break;
    case ArtifactKind::ddt:
      map_interval(ddt_coverage(t, cp.signal, *p.time_granularity));
      break;
    case ArtifactKind::level: {
      auto levels = level_coverage(t, cp.signal, *p.deglitch_time, *p.level_time, *p.bin_granularity);
      if (levels.empty()) r.note = "no level sustained for level_time";
      map_values(std::move(levels));
      break;
    }
    case ArtifactKind::delay: {
      auto delays = delay_values(t, p.events->first, p.events->second);
      if (delays.empty()) r.note = "no event pairs";
      map_values(std::move(delays));
      break;
    }
    case ArtifactKind::frequency:
      map_values(frequency_values(t, cp.signal, *p.reference, *p.window, p.halve_crossings));
      break;
  }
  return r;
}

}  // namespace amscov
