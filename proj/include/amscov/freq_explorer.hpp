// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "amscov/bins.hpp"
#include "amscov/circuit_sim.hpp"
#include "amscov/trace.hpp"

// Bode-peak guided stimulus selection: drive the circuit at the frequency
// where its gain peaks so the output reaches its widest range.
namespace amscov {

struct Peak {
  double frequency = 0.0;  ///< Hz, refined between grid points
  double gain_db = 0.0;    ///< refined gain
  std::size_t index = 0;   ///< grid point the peak was found at
  bool endpoint = false;   ///< no interior maximum; this is the larger end
};

struct PeakSet {
  /// Sorted by gain, descending; ties go to the lower frequency.
  std::vector<Peak> peaks;

  const Peak& global_peak() const { return peaks.front(); }
  bool endpoint() const { return peaks.front().endpoint; }
};

/// Grid point i is a peak iff its gain is strictly above both neighbours.
/// Each peak is refined by a parabola through its neighbours in
/// log-frequency. Without any interior peak the larger endpoint is returned
/// with `endpoint` set. Throws InvalidArgument with fewer than 3 points.
PeakSet find_peaks(const BodePlot& plot);

/// Grid indices of strict interior maxima, from gains alone (unsorted).
std::vector<std::size_t> strict_local_maxima(const std::vector<double>& gain);

/// Two decades beyond the slowest and fastest pole magnitudes (in Hz);
/// [1 Hz, 1 MHz] for a static gain.
std::pair<double, double> sweep_band(const LtiModel& m);

struct ExploreOptions {
  double amplitude = 1.0;
  /// Extra stimulus frequencies to compare against the peak.
  std::vector<double> comparison_freqs;
  double dt = 0.0;        ///< 0: 1/200 of the shortest stimulus period, capped by the stability limit
  double duration = 0.0;  ///< 0: settling time plus 5 periods of the slowest stimulus
  double f_lo = 0.0;      ///< 0: derived from the poles
  double f_hi = 0.0;
  int points_per_decade = 200;
};

struct ExplorationRow {
  double frequency = 0.0;
  double gain_db = 0.0;         ///< |H| at this frequency
  double expected_width = 0.0;  ///< 2 A |H|, the steady-state output range width
  Bin output_range = Bin::point(0.0);
  double range_width = 0.0;
  bool is_peak = false;
};

struct ExplorationReport {
  BodePlot bode;
  PeakSet peaks;
  double settle_time = 0.0;
  double dt = 0.0;
  double duration = 0.0;
  /// Ascending frequency.
  std::vector<ExplorationRow> rows;
  /// Full transient for each row, same order.
  std::vector<Trace> traces;

  const ExplorationRow& peak_row() const;
};

/// AC sweep, peak search, then one sine transient at the peak and at every
/// comparison frequency. Output ranges are measured after ten time
/// constants of the slowest pole.
ExplorationReport explore(const LtiModel& m, const ExploreOptions& options);

}  // namespace amscov
