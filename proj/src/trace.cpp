// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include "amscov/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "amscov/error.hpp"
#include "amscov/text.hpp"

namespace amscov {

Trace::Trace(std::vector<std::string> signal_names, std::vector<double> times,
             std::vector<std::vector<double>> columns)
    : names_(std::move(signal_names)), times_(std::move(times)), columns_(std::move(columns)) {
  if (names_.size() != columns_.size()) {
    fail(ErrorCode::InvalidArgument, "trace needs one column per signal");
  }
  if (times_.size() < 2) fail(ErrorCode::InvalidArgument, "trace needs at least 2 samples");
  std::set<std::string_view> seen;
  for (const auto& n : names_) {
    if (!text::is_identifier(n)) fail(ErrorCode::InvalidArgument, "bad signal name '" + n + "'");
    if (n == "time") fail(ErrorCode::InvalidArgument, "'time' is reserved");
    if (!seen.insert(n).second) fail(ErrorCode::InvalidArgument, "duplicate signal '" + n + "'");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || times_[i] < 0.0) {
      fail(ErrorCode::InvalidArgument, "trace times must be finite and >= 0");
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      fail(ErrorCode::InvalidArgument, "trace times must be strictly increasing");
    }
  }
  for (const auto& c : columns_) {
    if (c.size() != times_.size()) fail(ErrorCode::InvalidArgument, "ragged trace column");
  }
}

bool Trace::has_signal(std::string_view name) const noexcept {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t Trace::signal_index(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) fail(ErrorCode::UnknownSignal, "unknown signal '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

std::span<const double> Trace::values(std::string_view name) const {
  return columns_[signal_index(name)];
}

double interpolate(std::span<const double> times, std::span<const double> values, double time) {
  if (!(time >= times.front() && time <= times.back())) {
    fail(ErrorCode::OutOfRange, "time " + text::format_real(time) + " outside trace span [" +
                                    text::format_real(times.front()) + ", " +
                                    text::format_real(times.back()) + "]");
  }
  auto it = std::lower_bound(times.begin(), times.end(), time);
  auto i = static_cast<std::size_t>(it - times.begin());
  if (times[i] == time) return values[i];
  // times[i - 1] < time < times[i]
  double t0 = times[i - 1];
  double t1 = times[i];
  double frac = (time - t0) / (t1 - t0);
  return values[i - 1] + (values[i] - values[i - 1]) * frac;
}

double Trace::sample_at(std::string_view signal, double time) const {
  return interpolate(times_, values(signal), time);
}

Trace Trace::slice(double from, double to) const {
  auto lo = std::lower_bound(times_.begin(), times_.end(), from);
  auto hi = std::upper_bound(times_.begin(), times_.end(), to);
  if (hi - lo < 2) fail(ErrorCode::OutOfRange, "slice holds fewer than 2 samples");
  auto first = static_cast<std::size_t>(lo - times_.begin());
  auto last = static_cast<std::size_t>(hi - times_.begin());
  std::vector<double> t(lo, hi);
  std::vector<std::vector<double>> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) cols.emplace_back(c.begin() + first, c.begin() + last);
  return Trace(names_, std::move(t), std::move(cols));
}

namespace {

double crossing_point(double t0, double t1, double v0, double v1, double threshold) {
  if (v1 == threshold) return t1;
  if (v0 == threshold) return t0;
  return t0 + (threshold - v0) / (v1 - v0) * (t1 - t0);
}

}  // namespace

std::vector<double> crossing_times(std::span<const double> times, std::span<const double> values,
                                   double threshold, Direction direction) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    double v0 = values[i];
    double v1 = values[i + 1];
    bool hit = direction == Direction::rising ? (v0 < threshold && v1 >= threshold)
                                              : (v0 >= threshold && v1 < threshold);
    if (hit) out.push_back(crossing_point(times[i], times[i + 1], v0, v1, threshold));
  }
  return out;
}

std::vector<double> all_crossing_times(std::span<const double> times,
                                       std::span<const double> values, double threshold) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    bool above0 = values[i] >= threshold;
    bool above1 = values[i + 1] >= threshold;
    if (above0 != above1) {
      out.push_back(crossing_point(times[i], times[i + 1], values[i], values[i + 1], threshold));
    }
  }
  return out;
}

std::vector<double> event_times(const Trace& t, const Event& e) {
  return crossing_times(t.times(), t.values(e.signal), e.threshold, e.direction);
}

Trace parse_trace_csv(std::istream& in, std::string_view source) {
  std::string where(source);
  auto bad = [&](std::size_t line, const std::string& why) -> Trace {
    fail(ErrorCode::ParseError, where + ":" + std::to_string(line) + ": " + why);
  };
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!text::trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) return bad(line_no, "missing header");
  auto header = text::split(text::trim(line), ',');
  if (text::trim(header[0]) != "time") return bad(line_no, "header must start with 'time'");
  for (std::size_t i = 1; i < header.size(); ++i) names.emplace_back(text::trim(header[i]));

  std::vector<double> times;
  std::vector<std::vector<double>> cols(names.size());
  while (std::getline(in, line)) {
    ++line_no;
    auto row = text::trim(line);
    if (row.empty()) continue;
    auto fields = text::split(row, ',');
    if (fields.size() != names.size() + 1) {
      return bad(line_no, "ragged row: expected " + std::to_string(names.size() + 1) +
                              " fields, got " + std::to_string(fields.size()));
    }
    auto tv = text::parse_real(fields[0]);
    if (!tv) return bad(line_no, "bad time value '" + std::string(fields[0]) + "'");
    if (!times.empty() && !(*tv > times.back())) return bad(line_no, "non-increasing time");
    if (*tv < 0.0) return bad(line_no, "negative time");
    times.push_back(*tv);
    for (std::size_t c = 0; c < names.size(); ++c) {
      auto v = text::parse_real(fields[c + 1]);
      if (!v) return bad(line_no, "bad value '" + std::string(fields[c + 1]) + "'");
      cols[c].push_back(*v);
    }
  }
  try {
    return Trace(std::move(names), std::move(times), std::move(cols));
  } catch (const Error& e) {
    return bad(line_no, e.what());
  }
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open trace '" + path.string() + "'");
  return parse_trace_csv(in, path.string());
}

void write_trace_csv(std::ostream& out, const Trace& t) {
  out << "time";
  for (const auto& n : t.signal_names()) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < t.sample_count(); ++i) {
    out << text::format_real(t.times()[i]);
    for (std::size_t c = 0; c < t.signal_count(); ++c) {
      out << ',' << text::format_real(t.values(c)[i]);
    }
    out << '\n';
  }
}

void save_trace(const std::filesystem::path& path, const Trace& t) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write trace '" + path.string() + "'");
  write_trace_csv(out, t);
  if (!out) fail(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace amscov
