// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "amscov/bins.hpp"
#include "amscov/trace.hpp"

// The six analog coverage artifacts and the dispatcher that maps an
// artifact result onto a target grid.
namespace amscov {

enum class ArtifactKind { range, deglitched_range, level, ddt, delay, frequency };

std::string_view to_string(ArtifactKind kind) noexcept;
/// Throws ParseError.
ArtifactKind parse_artifact_kind(std::string_view name);

/// Artifact parameters. Each kind requires exactly the fields it uses.
struct ArtifactParams {
  std::optional<double> deglitch_time;     ///< seconds; deglitched_range, level
  std::optional<double> level_time;        ///< seconds; level
  std::optional<double> bin_granularity;   ///< signal units; level
  std::optional<double> time_granularity;  ///< seconds; ddt
  std::optional<double> reference;         ///< signal units; frequency
  std::optional<double> window;            ///< seconds; frequency
  std::optional<std::pair<Event, Event>> events;  ///< delay
  /// Report oscillation frequency (crossings / 2) instead of crossings per
  /// second. Frequency only.
  bool halve_crossings = false;

  friend bool operator==(const ArtifactParams&, const ArtifactParams&) = default;
};

struct CoverPoint {
  std::string id;
  ArtifactKind kind = ArtifactKind::range;
  std::string signal;  ///< unused for delay, whose signals live in the events
  ArtifactParams params;

  friend bool operator==(const CoverPoint&, const CoverPoint&) = default;
};

/// Throws InvalidArgument if a required parameter is missing, a parameter
/// not used by the kind is present, or a value is not strictly positive.
void validate(const CoverPoint& cp);

/// Closed bin [min sample, max sample].
Bin range_coverage(const Trace& t, std::string_view signal);

/// Extreme levels sustained for at least `deglitch_time`: the upper bound is
/// the largest window-minimum and the lower bound the smallest
/// window-maximum over all windows [s, s + deglitch_time] inside the trace,
/// on the linearly interpolated signal. When those two cross (every
/// excursion in both directions is narrower than the window) the result
/// collapses to their midpoint. Throws TraceTooShort.
Bin deglitched_range_coverage(const Trace& t, std::string_view signal, double deglitch_time);
Bin deglitched_range(std::span<const double> times, std::span<const double> values,
                     double deglitch_time);

/// Sample-wise de-glitched copy of a signal: opening then closing with a
/// centred window of width `deglitch_time`, clamped into the de-glitched
/// range so every value is a sustained level.
std::vector<double> deglitch_signal(std::span<const double> times, std::span<const double> values,
                                    double deglitch_time);

/// Levels where the de-glitched signal stays within a floating band of
/// width `bin_granularity` for at least `level_time`. Each such dwell
/// reports the midpoint of its band; levels closer than half a band are
/// merged to their mean. Ascending, possibly empty.
std::vector<double> level_coverage(const Trace& t, std::string_view signal, double deglitch_time,
                                   double level_time, double bin_granularity);

/// [min, max] forward-difference slope sampled every `time_granularity`
/// from the first sample. Throws TraceTooShort.
Bin ddt_coverage(const Trace& t, std::string_view signal, double time_granularity);

/// Delays of FIFO-paired occurrences: each `first` occurrence takes the
/// earliest unconsumed `second` occurrence strictly after it.
std::vector<double> delay_values(const Trace& t, const Event& first, const Event& second);
/// Hull of delay_values. Throws NoPairs.
Bin delay_coverage(const Trace& t, const Event& first, const Event& second);

/// Crossings of `reference` per second in consecutive tumbling windows of
/// length `window`; the trailing partial window is dropped. Throws
/// TraceTooShort.
std::vector<double> frequency_values(const Trace& t, std::string_view signal, double reference,
                                     double window, bool halve_crossings = false);
Bin frequency_coverage(const Trace& t, std::string_view signal, double reference, double window,
                       bool halve_crossings = false);

struct CoverageResult {
  std::string coverpoint_id;
  /// Raw artifact output: one interval, or one degenerate bin per level.
  BinSet output;
  /// Individual values for the discrete artifacts (levels, delays,
  /// per-window frequencies); empty for interval artifacts.
  std::vector<double> values;
  /// Grid cells hit, ascending and distinct.
  std::vector<Bin> cells;
  /// Output outside the grid domain.
  BinSet untargeted;
  std::size_t sample_count = 0;
  /// Set when the artifact produced no outcome (no delay pairs, no level).
  std::string note;

  friend bool operator==(const CoverageResult&, const CoverageResult&) = default;
};

/// Runs the coverpoint's artifact and maps its output onto `grid`:
/// interval artifacts hit every cell they overlap, discrete artifacts hit
/// the cell holding each value. An empty outcome (no pairs, no levels)
/// gives an empty result with `note` set; other errors propagate.
CoverageResult evaluate(const CoverPoint& cp, const Trace& t, const BinGrid& grid);

}  // namespace amscov
