// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include "amscov/circuit_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "amscov/error.hpp"
#include "amscov/text.hpp"

namespace amscov {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::complex<double> horner(const std::vector<double>& ascending, std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (auto it = ascending.rbegin(); it != ascending.rend(); ++it) acc = acc * s + *it;
  return acc;
}

void trim_leading_zeros(std::vector<double>& coeffs) {
  while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
}

}  // namespace

LtiModel::LtiModel(std::vector<double> numerator, std::vector<double> denominator, std::string label)
    : num_(std::move(numerator)), den_(std::move(denominator)), label_(std::move(label)) {
  if (num_.empty() || den_.empty()) fail(ErrorCode::InvalidArgument, "empty transfer function");
  for (double c : num_) {
    if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "non-finite numerator coefficient");
  }
  for (double c : den_) {
    if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "non-finite denominator coefficient");
  }
  trim_leading_zeros(num_);
  trim_leading_zeros(den_);
  if (den_.back() == 0.0) fail(ErrorCode::InvalidArgument, "denominator is identically zero");
  if (num_.size() > den_.size()) {
    fail(ErrorCode::InvalidArgument, "improper transfer function (numerator degree > denominator)");
  }

  const auto n = static_cast<Eigen::Index>(den_.size() - 1);
  const double lead = den_.back();
  std::vector<double> a(den_.size()), b(den_.size(), 0.0);
  for (std::size_t i = 0; i < den_.size(); ++i) a[i] = den_[i] / lead;
  for (std::size_t i = 0; i < num_.size(); ++i) b[i] = num_[i] / lead;

  ss_.D = b[static_cast<std::size_t>(n)];
  ss_.A = Eigen::MatrixXd::Zero(n, n);
  ss_.B = Eigen::VectorXd::Zero(n);
  ss_.C = Eigen::RowVectorXd::Zero(n);
  if (n > 0) {
    for (Eigen::Index i = 0; i + 1 < n; ++i) ss_.A(i, i + 1) = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      auto uj = static_cast<std::size_t>(j);
      ss_.A(n - 1, j) = -a[uj];
      ss_.C(j) = b[uj] - a[uj] * ss_.D;
    }
    ss_.B(n - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(ss_.A, false);
    const auto& ev = solver.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) poles_.push_back(ev(i));
  }
}

LtiModel LtiModel::lowpass2(double f0_hz, double q, double dc_gain) {
  if (!(f0_hz > 0.0) || !(q > 0.0)) fail(ErrorCode::InvalidArgument, "lowpass2 needs f0 > 0, Q > 0");
  double w0 = kTwoPi * f0_hz;
  return LtiModel({dc_gain * w0 * w0}, {w0 * w0, w0 / q, 1.0}, "lowpass2");
}

LtiModel LtiModel::bandpass2(double f0_hz, double q, double peak_gain) {
  if (!(f0_hz > 0.0) || !(q > 0.0)) fail(ErrorCode::InvalidArgument, "bandpass2 needs f0 > 0, Q > 0");
  double w0 = kTwoPi * f0_hz;
  return LtiModel({0.0, peak_gain * w0 / q}, {w0 * w0, w0 / q, 1.0}, "bandpass2");
}

LtiModel LtiModel::lowpass1(double fc_hz, double dc_gain) {
  if (!(fc_hz > 0.0)) fail(ErrorCode::InvalidArgument, "lowpass1 needs fc > 0");
  double wc = kTwoPi * fc_hz;
  return LtiModel({dc_gain * wc}, {wc, 1.0}, "lowpass1");
}

LtiModel LtiModel::two_pole(double dc_gain, double pole1_hz, double pole2_hz) {
  if (!(pole1_hz > 0.0) || !(pole2_hz > 0.0)) fail(ErrorCode::InvalidArgument, "two_pole needs poles > 0");
  double p1 = kTwoPi * pole1_hz;
  double p2 = kTwoPi * pole2_hz;
  // dc_gain p1 p2 / (s^2 + (p1 + p2) s + p1 p2)
  return LtiModel({dc_gain * p1 * p2}, {p1 * p2, p1 + p2, 1.0}, "two_pole");
}

std::complex<double> LtiModel::response(double freq_hz) const {
  std::complex<double> s(0.0, kTwoPi * freq_hz);
  return horner(num_, s) / horner(den_, s);
}

std::complex<double> LtiModel::response_state_space(double freq_hz) const {
  const auto n = ss_.A.rows();
  if (n == 0) return ss_.D;
  std::complex<double> s(0.0, kTwoPi * freq_hz);
  Eigen::MatrixXcd m = s * Eigen::MatrixXcd::Identity(n, n) - ss_.A.cast<std::complex<double>>();
  Eigen::VectorXcd x = m.partialPivLu().solve(ss_.B.cast<std::complex<double>>());
  return (ss_.C.cast<std::complex<double>>() * x)(0) + ss_.D;
}

bool LtiModel::stable() const noexcept {
  return std::all_of(poles_.begin(), poles_.end(), [](auto p) { return p.real() < 0.0; });
}

double LtiModel::slowest_decay_rate() const noexcept {
  if (poles_.empty()) return 0.0;
  double rate = std::abs(poles_.front().real());
  for (auto p : poles_) rate = std::min(rate, std::abs(p.real()));
  return rate;
}

double LtiModel::fastest_rate() const noexcept {
  double rate = 0.0;
  for (auto p : poles_) rate = std::max(rate, std::abs(p));
  return rate;
}

BodePlot ac_analysis(const LtiModel& m, double f_lo, double f_hi, int points_per_decade) {
  if (!(f_lo > 0.0) || !(f_hi > f_lo)) fail(ErrorCode::InvalidArgument, "AC sweep needs 0 < f_lo < f_hi");
  if (points_per_decade < 1) fail(ErrorCode::InvalidArgument, "points_per_decade must be >= 1");
  double decades = std::log10(f_hi / f_lo);
  auto intervals = std::max<long>(2, static_cast<long>(std::ceil(decades * points_per_decade - 1e-9)));
  BodePlot plot;
  plot.unstable = !m.stable();
  plot.frequencies.reserve(static_cast<std::size_t>(intervals) + 1);
  for (long i = 0; i <= intervals; ++i) {
    double f = i == intervals ? f_hi
                              : f_lo * std::pow(10.0, decades * static_cast<double>(i) /
                                                          static_cast<double>(intervals));
    auto h = m.response(f);
    plot.frequencies.push_back(f);
    plot.gain_db.push_back(20.0 * std::log10(std::max(std::abs(h), 1e-300)));
    plot.phase_deg.push_back(std::arg(h) * 180.0 / std::numbers::pi);
  }
  return plot;
}

double waveform_value(const Waveform& w, double t) {
  struct Visitor {
    double t;
    double operator()(const Sine& s) const {
      return s.offset + s.amplitude * std::sin(kTwoPi * s.frequency * t + s.phase);
    }
    double operator()(const Step& s) const { return t >= s.delay ? s.initial + s.amplitude : s.initial; }
    double operator()(const Ramp& r) const { return t >= r.delay ? r.slope * (t - r.delay) : 0.0; }
    double operator()(const Pwl& p) const {
      if (p.points.empty()) return 0.0;
      if (t <= p.points.front().first) return p.points.front().second;
      if (t >= p.points.back().first) return p.points.back().second;
      auto it = std::upper_bound(p.points.begin(), p.points.end(), t,
                                 [](double v, const auto& pt) { return v < pt.first; });
      const auto& [t1, v1] = *it;
      const auto& [t0, v0] = *(it - 1);
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
  };
  return std::visit(Visitor{t}, w);
}

Trace transient(const LtiModel& m, const Waveform& input, double dt, double duration) {
  if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "dt must be > 0");
  if (!(duration > 10.0 * dt)) fail(ErrorCode::InvalidArgument, "duration must exceed 10 dt");
  if (const auto* pwl = std::get_if<Pwl>(&input)) {
    for (std::size_t i = 1; i < pwl->points.size(); ++i) {
      if (!(pwl->points[i].first > pwl->points[i - 1].first)) {
        fail(ErrorCode::InvalidArgument, "pwl times must be strictly increasing");
      }
    }
  }
  double rate = m.fastest_rate();
  if (rate > 0.0 && dt > 0.1 / rate) {
    fail(ErrorCode::StepTooLarge, "dt " + text::format_real(dt) + " s exceeds stability limit " +
                                      text::format_real(0.1 / rate) + " s");
  }
  const auto& ss = m.state_space();
  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  std::vector<double> times(steps + 1), in(steps + 1), out(steps + 1);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(ss.A.rows());
  auto deriv = [&](const Eigen::VectorXd& state, double u) -> Eigen::VectorXd {
    return ss.A * state + ss.B * u;
  };
  for (std::size_t i = 0; i <= steps; ++i) {
    double t = static_cast<double>(i) * dt;
    double u = waveform_value(input, t);
    times[i] = t;
    in[i] = u;
    out[i] = (x.size() > 0 ? (ss.C * x).value() : 0.0) + ss.D * u;
    if (i == steps || x.size() == 0) continue;
    double u_mid = waveform_value(input, t + 0.5 * dt);
    double u_end = waveform_value(input, t + dt);
    Eigen::VectorXd k1 = deriv(x, u);
    Eigen::VectorXd k2 = deriv(x + 0.5 * dt * k1, u_mid);
    Eigen::VectorXd k3 = deriv(x + 0.5 * dt * k2, u_mid);
    Eigen::VectorXd k4 = deriv(x + dt * k3, u_end);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return Trace({"input", "output"}, std::move(times), {std::move(in), std::move(out)});
}

double eval_static(const StaticMapModel& m, double x) {
  if (!m.domain.contains(x)) {
    fail(ErrorCode::OutOfDomain, "input " + text::format_real(x) + " outside model domain " +
                                     m.domain.to_string());
  }
  struct Visitor {
    double x;
    double operator()(const LdoMap& l) const {
      double beyond = std::max(0.0, x - l.knee);
      return l.nominal - l.load_regulation * x - l.dropout * beyond * beyond;
    }
    double operator()(const OscillatorMap& o) const {
      double dv = x - o.nominal_supply;
      return o.nominal_frequency + o.sensitivity * dv + o.curvature * dv * dv;
    }
    double operator()(const ForresterMap&) const {
      double a = 6.0 * x - 2.0;
      return a * a * std::sin(12.0 * x - 4.0);
    }
    double operator()(const TableMap& t) const {
      if (t.xs.empty()) return 0.0;
      if (x <= t.xs.front()) return t.ys.front();
      if (x >= t.xs.back()) return t.ys.back();
      auto it = std::upper_bound(t.xs.begin(), t.xs.end(), x);
      auto i = static_cast<std::size_t>(it - t.xs.begin());
      return t.ys[i - 1] + (t.ys[i] - t.ys[i - 1]) * (x - t.xs[i - 1]) / (t.xs[i] - t.xs[i - 1]);
    }
  };
  return std::visit(Visitor{x}, m.map);
}

Trace transient_static(const StaticMapModel& m, double x, double dt, double duration) {
  if (!(dt > 0.0) || !(duration > 0.0)) fail(ErrorCode::InvalidArgument, "dt and duration must be > 0");
  double target = eval_static(m, x);
  const auto steps = std::max<long long>(1, std::llround(duration / dt));
  std::vector<double> times, in, out;
  times.reserve(static_cast<std::size_t>(steps) + 1);
  for (long long i = 0; i <= steps; ++i) {
    double t = static_cast<double>(i) * dt;
    double y = target;
    if (m.output == StaticOutput::oscillation) {
      y = m.amplitude * std::sin(kTwoPi * target * t + m.phase);
    } else if (m.time_constant > 0.0) {
      y = target * (1.0 - std::exp(-t / m.time_constant));
    }
    times.push_back(t);
    in.push_back(x);
    out.push_back(y);
  }
  return Trace({"input", "output"}, std::move(times), {std::move(in), std::move(out)});
}

}  // namespace amscov
