// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include "amscov/freq_explorer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "amscov/coverage.hpp"
#include "amscov/error.hpp"

namespace amscov {

namespace {

// Vertex of the parabola through three points, clamped to [u0, u2].
std::pair<double, double> parabola_vertex(double u0, double g0, double u1, double g1, double u2,
                                          double g2) {
  double denom = (u0 - u1) * (u0 - u2) * (u1 - u2);
  double a = (u2 * (g1 - g0) + u1 * (g0 - g2) + u0 * (g2 - g1)) / denom;
  double b = (u2 * u2 * (g0 - g1) + u1 * u1 * (g2 - g0) + u0 * u0 * (g1 - g2)) / denom;
  if (!(a < 0.0)) return {u1, g1};
  double u = std::clamp(-b / (2.0 * a), u0, u2);
  // Lagrange form keeps the value consistent with the three samples.
  double l0 = (u - u1) * (u - u2) / ((u0 - u1) * (u0 - u2));
  double l1 = (u - u0) * (u - u2) / ((u1 - u0) * (u1 - u2));
  double l2 = (u - u0) * (u - u1) / ((u2 - u0) * (u2 - u1));
  return {u, g0 * l0 + g1 * l1 + g2 * l2};
}

}  // namespace

std::vector<std::size_t> strict_local_maxima(const std::vector<double>& gain) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < gain.size(); ++i) {
    if (gain[i] > gain[i - 1] && gain[i] > gain[i + 1]) out.push_back(i);
  }
  return out;
}

PeakSet find_peaks(const BodePlot& plot) {
  const auto& f = plot.frequencies;
  const auto& g = plot.gain_db;
  if (f.size() < 3 || g.size() != f.size()) {
    fail(ErrorCode::InvalidArgument, "peak search needs at least 3 grid points");
  }
  PeakSet set;
  for (std::size_t i : strict_local_maxima(g)) {
    auto [u, gain] = parabola_vertex(std::log10(f[i - 1]), g[i - 1], std::log10(f[i]), g[i],
                                     std::log10(f[i + 1]), g[i + 1]);
    set.peaks.push_back({std::pow(10.0, u), gain, i, false});
  }
  if (set.peaks.empty()) {
    std::size_t last = f.size() - 1;
    std::size_t end = g[last] > g[0] ? last : 0;
    set.peaks.push_back({f[end], g[end], end, true});
  }
  std::stable_sort(set.peaks.begin(), set.peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.gain_db != b.gain_db) return a.gain_db > b.gain_db;
    return a.frequency < b.frequency;
  });
  return set;
}

std::pair<double, double> sweep_band(const LtiModel& m) {
  if (m.poles().empty()) return {1.0, 1e6};
  double slow = std::abs(m.poles().front());
  double fast = slow;
  for (auto p : m.poles()) {
    slow = std::min(slow, std::abs(p));
    fast = std::max(fast, std::abs(p));
  }
  return {slow / (2.0 * std::numbers::pi) / 100.0, fast / (2.0 * std::numbers::pi) * 100.0};
}

const ExplorationRow& ExplorationReport::peak_row() const {
  for (const auto& r : rows) {
    if (r.is_peak) return r;
  }
  fail(ErrorCode::InvalidArgument, "exploration report has no peak row");
}

ExplorationReport explore(const LtiModel& m, const ExploreOptions& options) {
  if (!(options.amplitude > 0.0)) fail(ErrorCode::InvalidArgument, "amplitude must be > 0");
  for (double f : options.comparison_freqs) {
    if (!(f > 0.0)) fail(ErrorCode::InvalidArgument, "comparison frequencies must be > 0");
  }

  ExplorationReport report;
  auto [f_lo, f_hi] = sweep_band(m);
  if (options.f_lo > 0.0) f_lo = options.f_lo;
  if (options.f_hi > 0.0) f_hi = options.f_hi;
  report.bode = ac_analysis(m, f_lo, f_hi, options.points_per_decade);
  report.peaks = find_peaks(report.bode);
  const double peak_freq = report.peaks.global_peak().frequency;

  std::vector<std::pair<double, bool>> freqs{{peak_freq, true}};
  for (double f : options.comparison_freqs) {
    if (f != peak_freq) freqs.emplace_back(f, false);
  }
  std::stable_sort(freqs.begin(), freqs.end());

  double decay = m.slowest_decay_rate();
  report.settle_time = decay > 0.0 ? 10.0 / decay : 0.0;
  double f_min = freqs.front().first;
  double f_max = freqs.back().first;
  report.dt = options.dt;
  if (report.dt <= 0.0) {
    report.dt = 1.0 / (200.0 * f_max);
    if (m.fastest_rate() > 0.0) report.dt = std::min(report.dt, 0.099 / m.fastest_rate());
  }
  report.duration = options.duration > 0.0 ? options.duration : report.settle_time + 5.0 / f_min;
  if (!(report.duration > report.settle_time)) {
    fail(ErrorCode::InvalidArgument, "duration must exceed the settling time of " +
                                         std::to_string(report.settle_time) + " s");
  }

  for (auto [f, is_peak] : freqs) {
    Trace t = transient(m, Sine{options.amplitude, f, 0.0, 0.0}, report.dt, report.duration);
    Trace settled = t.slice(report.settle_time, t.end_time());
    ExplorationRow row;
    row.frequency = f;
    double h = std::abs(m.response(f));
    row.gain_db = 20.0 * std::log10(std::max(h, 1e-300));
    row.expected_width = 2.0 * options.amplitude * h;
    row.output_range = range_coverage(settled, "output");
    row.range_width = row.output_range.width();
    row.is_peak = is_peak;
    report.rows.push_back(row);
    report.traces.push_back(std::move(t));
  }
  return report;
}

}  // namespace amscov
