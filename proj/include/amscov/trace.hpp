// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace amscov {

/// Time-stamped multi-signal record of one simulation run.
///
/// Stored column-wise: one time vector and one value vector per signal.
/// Times are strictly increasing and there are at least two samples.
/// Boolean signals are carried as 0.0 / 1.0.
class Trace {
 public:
  /// Throws InvalidArgument when the invariants do not hold.
  Trace(std::vector<std::string> signal_names, std::vector<double> times,
        std::vector<std::vector<double>> columns);

  const std::vector<std::string>& signal_names() const noexcept { return names_; }
  std::span<const double> times() const noexcept { return times_; }
  std::size_t sample_count() const noexcept { return times_.size(); }
  std::size_t signal_count() const noexcept { return names_.size(); }

  double start_time() const noexcept { return times_.front(); }
  double end_time() const noexcept { return times_.back(); }
  double duration() const noexcept { return times_.back() - times_.front(); }

  bool has_signal(std::string_view name) const noexcept;
  /// Throws UnknownSignal.
  std::size_t signal_index(std::string_view name) const;
  std::span<const double> values(std::string_view name) const;
  std::span<const double> values(std::size_t index) const { return columns_.at(index); }

  /// Linear interpolation between bracketing samples, exact at sample
  /// times. Throws OutOfRange or UnknownSignal.
  double sample_at(std::string_view signal, double time) const;

  /// Samples with time in [from, to]. Throws OutOfRange if fewer than two
  /// samples fall inside.
  Trace slice(double from, double to) const;

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<double> times_;
  std::vector<std::vector<double>> columns_;
};

/// Interpolated value of a sampled waveform at `time` (which must lie
/// within the sample span).
double interpolate(std::span<const double> times, std::span<const double> values, double time);

enum class Direction { rising, falling };

/// A directed threshold crossing of one signal.
struct Event {
  std::string signal;
  double threshold = 0.0;
  Direction direction = Direction::rising;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Times at which `e` occurs, interpolated between the bracketing samples.
/// Rising: value goes from below the threshold to at-or-above it. Falling:
/// from at-or-above to below. A sample sitting exactly on the threshold is
/// counted once. Throws UnknownSignal.
std::vector<double> event_times(const Trace& t, const Event& e);

/// Crossing times for a raw sampled waveform.
std::vector<double> crossing_times(std::span<const double> times, std::span<const double> values,
                                   double threshold, Direction direction);

/// Every crossing of `threshold` in either direction, ascending.
std::vector<double> all_crossing_times(std::span<const double> times,
                                       std::span<const double> values, double threshold);

/// Trace CSV: header `time,<name>,...` then one row per sample.
/// Throws ParseError.
Trace parse_trace_csv(std::istream& in, std::string_view source = "<stream>");
/// Throws IoError or ParseError.
Trace load_trace(const std::filesystem::path& path);

void write_trace_csv(std::ostream& out, const Trace& t);
void save_trace(const std::filesystem::path& path, const Trace& t);

}  // namespace amscov
