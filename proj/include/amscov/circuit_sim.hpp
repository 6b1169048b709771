// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "amscov/bins.hpp"
#include "amscov/trace.hpp"

// Behavioral circuit models: rational transfer functions with AC and
// transient analysis, and static input-to-observable maps.
namespace amscov {

/// Controllable canonical realization x' = A x + B u, y = C x + D u.
struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  double D = 0.0;
};

/// Proper rational transfer function H(s) = N(s) / D(s). Coefficients are
/// in ascending powers of s: {b0, b1, ..., bm} means b0 + b1 s + ... + bm s^m.
class LtiModel {
 public:
  /// Throws InvalidArgument when the leading denominator coefficient is
  /// zero or the numerator degree exceeds the denominator degree.
  LtiModel(std::vector<double> numerator, std::vector<double> denominator, std::string label = {});

  /// w0^2 / (s^2 + (w0/Q) s + w0^2) scaled by dc_gain.
  static LtiModel lowpass2(double f0_hz, double q, double dc_gain = 1.0);
  /// (w0/Q) s / (s^2 + (w0/Q) s + w0^2) scaled by peak_gain.
  static LtiModel bandpass2(double f0_hz, double q, double peak_gain = 1.0);
  /// wc / (s + wc).
  static LtiModel lowpass1(double fc_hz, double dc_gain = 1.0);
  /// dc_gain / ((1 + s/p1)(1 + s/p2)).
  static LtiModel two_pole(double dc_gain, double pole1_hz, double pole2_hz);

  const std::vector<double>& numerator() const noexcept { return num_; }
  const std::vector<double>& denominator() const noexcept { return den_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t order() const noexcept { return den_.size() - 1; }

  /// H(j 2 pi f).
  std::complex<double> response(double freq_hz) const;
  /// C (sI - A)^-1 B + D, evaluated from the state-space realization.
  std::complex<double> response_state_space(double freq_hz) const;

  const StateSpace& state_space() const noexcept { return ss_; }
  const std::vector<std::complex<double>>& poles() const noexcept { return poles_; }
  bool stable() const noexcept;
  /// Smallest |Re p| over the poles; 0 for a static gain.
  double slowest_decay_rate() const noexcept;
  /// Largest |p| over the poles; 0 for a static gain.
  double fastest_rate() const noexcept;

 private:
  std::vector<double> num_;
  std::vector<double> den_;
  std::string label_;
  StateSpace ss_;
  std::vector<std::complex<double>> poles_;
};

struct BodePlot {
  std::vector<double> frequencies;  ///< Hz, strictly ascending
  std::vector<double> gain_db;
  std::vector<double> phase_deg;
  /// Set when some pole has a nonnegative real part.
  bool unstable = false;
};

/// Log-spaced frequency sweep from f_lo to f_hi inclusive.
BodePlot ac_analysis(const LtiModel& m, double f_lo, double f_hi, int points_per_decade);

struct Sine {
  double amplitude = 1.0;
  double frequency = 1.0;  ///< Hz
  double phase = 0.0;      ///< radians
  double offset = 0.0;
};
struct Step {
  double amplitude = 1.0;  ///< jump at `delay`, added to `initial`
  double delay = 0.0;
  double initial = 0.0;
};
struct Ramp {
  double slope = 1.0;
  double delay = 0.0;
};
struct Pwl {
  std::vector<std::pair<double, double>> points;  ///< (time, value), ascending time
};
using Waveform = std::variant<Sine, Step, Ramp, Pwl>;

double waveform_value(const Waveform& w, double t);

/// Fixed-step RK4 from zero state. Columns: `input`, `output`.
/// Throws StepTooLarge if dt exceeds 0.1 / max|pole|, InvalidArgument if
/// duration <= 10 dt.
Trace transient(const LtiModel& m, const Waveform& input, double dt, double duration);

struct LdoMap {
  double nominal = 1.8;           ///< V at zero load
  double load_regulation = 0.02;  ///< V per A of load
  double knee = 0.3;              ///< A; dropout starts here
  double dropout = 0.5;           ///< V per A^2 beyond the knee
};
struct OscillatorMap {
  double nominal_frequency = 1e3;  ///< Hz at nominal supply
  double nominal_supply = 1.8;     ///< V
  double sensitivity = 500.0;      ///< Hz per V
  double curvature = 0.0;          ///< Hz per V^2
};
/// (6x - 2)^2 sin(12x - 4), the usual 1-D optimizer test function.
struct ForresterMap {};
struct TableMap {
  std::vector<double> xs;  ///< ascending
  std::vector<double> ys;
};
using StaticMap = std::variant<LdoMap, OscillatorMap, ForresterMap, TableMap>;

enum class StaticOutput {
  level,        ///< output settles at map(x)
  oscillation,  ///< output is a sine whose frequency is map(x)
};

struct StaticMapModel {
  StaticMap map;
  Bin domain = Bin::closed(0.0, 1.0);
  double time_constant = 0.0;  ///< s, first-order settling; level output only
  StaticOutput output = StaticOutput::level;
  double amplitude = 1.0;  ///< oscillation output only
  double phase = 0.0;      ///< oscillation output only, radians
  std::string label;
};

/// Throws OutOfDomain.
double eval_static(const StaticMapModel& m, double x);

/// Constant input x; output settles first-order from zero towards map(x)
/// (or oscillates at map(x) Hz). Columns: `input`, `output`.
Trace transient_static(const StaticMapModel& m, double x, double dt, double duration);

}  // namespace amscov
