// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "amscov/error.hpp"
#include "amscov/freq_explorer.hpp"

using namespace amscov;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

double half_step(const BodePlot& b, std::size_t i) {
  return 0.5 * (b.frequencies[i + 1] - b.frequencies[i - 1]) / 2;
}

// Exhaustive reference: every strict interior maximum, refined by solving
// for the interpolating quadratic directly.
struct RefPeak {
  std::size_t index;
  double frequency;
  double gain;
};

std::vector<RefPeak> scan_peaks(const BodePlot& b) {
  std::vector<RefPeak> out;
  const auto n = b.frequencies.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    bool left = true, right = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i - 1 && !(b.gain_db[i] > b.gain_db[j])) left = false;
      if (j == i + 1 && !(b.gain_db[i] > b.gain_db[j])) right = false;
    }
    if (!(left && right)) continue;
    Eigen::Matrix3d A;
    Eigen::Vector3d y;
    for (int k = 0; k < 3; ++k) {
      double u = std::log10(b.frequencies[i - 1 + k]);
      A(k, 0) = u * u;
      A(k, 1) = u;
      A(k, 2) = 1;
      y(k) = b.gain_db[i - 1 + k];
    }
    Eigen::Vector3d c = A.fullPivLu().solve(y);
    double lo = std::log10(b.frequencies[i - 1]), hi = std::log10(b.frequencies[i + 1]);
    double u = c(0) < 0 ? std::clamp(-c(1) / (2 * c(0)), lo, hi) : std::log10(b.frequencies[i]);
    double g = c(0) < 0 ? c(0) * u * u + c(1) * u + c(2) : b.gain_db[i];
    out.push_back({i, std::pow(10.0, u), g});
  }
  return out;
}

}  // namespace

TEST_CASE("second-order low-pass peak") {
  auto lp = LtiModel::lowpass2(1000, 2);
  auto bode = ac_analysis(lp, 10, 1e5, 100);
  auto peaks = find_peaks(bode);
  const auto& p = peaks.global_peak();
  const double fr = 1000 * std::sqrt(1 - 1 / 8.0);
  CHECK_FALSE(peaks.endpoint());
  CHECK(std::abs(p.frequency - fr) <= half_step(bode, p.index));
  CHECK(p.gain_db == doctest::Approx(20 * std::log10(std::abs(lp.response(fr)))).epsilon(1e-3));
}

TEST_CASE("monotone response gives an endpoint peak") {
  auto lp1 = LtiModel::lowpass1(100);
  auto bode = ac_analysis(lp1, 1, 1e4, 20);
  auto peaks = find_peaks(bode);
  CHECK(peaks.endpoint());
  CHECK(peaks.global_peak().frequency == 1.0);
  CHECK(peaks.peaks.size() == 1);

  BodePlot tiny{{1, 2}, {0, 1}, {0, 0}, false};
  CHECK(code_of([&] { find_peaks(tiny); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("ties between equal peaks go to the lower frequency") {
  BodePlot b{{1, 2, 3, 4, 5, 6, 7}, {0, 1, 0, -1, 0, 1, 0}, {}, false};
  b.phase_deg.assign(7, 0);
  auto peaks = find_peaks(b);
  REQUIRE(peaks.peaks.size() == 2);
  CHECK(peaks.global_peak().index == 1);
}

TEST_CASE("find_peaks matches an exhaustive scan on random arrays") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 2000; ++trial) {
    std::size_t n = 3 + rng() % 98;
    BodePlot b;
    double f = 1 + u(rng) + 10;
    for (std::size_t i = 0; i < n; ++i) {
      b.frequencies.push_back(f);
      f *= 1.01 + 0.2 * std::abs(u(rng)) / 10;
      // Coarse values so plateaus and ties show up.
      b.gain_db.push_back(rng() % 3 == 0 ? std::round(u(rng)) : u(rng));
      b.phase_deg.push_back(0);
    }
    auto got = find_peaks(b);
    auto ref = scan_peaks(b);
    if (ref.empty()) {
      REQUIRE(got.peaks.size() == 1);
      CHECK(got.endpoint());
      std::size_t end = b.gain_db.back() > b.gain_db.front() ? n - 1 : 0;
      CHECK(got.global_peak().index == end);
      continue;
    }
    REQUIRE(got.peaks.size() == ref.size());
    auto best = std::max_element(ref.begin(), ref.end(), [](const RefPeak& a, const RefPeak& c) {
      return a.gain < c.gain;
    });
    CHECK(got.global_peak().gain_db == doctest::Approx(best->gain).epsilon(1e-9));
    for (const auto& p : got.peaks) {
      auto it = std::find_if(ref.begin(), ref.end(), [&](const RefPeak& r) { return r.index == p.index; });
      REQUIRE(it != ref.end());
      CHECK(p.frequency == doctest::Approx(it->frequency).epsilon(1e-9));
      CHECK(p.gain_db == doctest::Approx(it->gain).epsilon(1e-9));
    }
    for (std::size_t i = 1; i < got.peaks.size(); ++i) {
      CHECK(got.peaks[i - 1].gain_db >= got.peaks[i].gain_db);
    }
  }
}

TEST_CASE("explore drives the peak hardest") {
  auto lp = LtiModel::lowpass2(1000, 2);
  const double fr = 1000 * std::sqrt(1 - 1 / 8.0);
  ExploreOptions opt;
  opt.comparison_freqs = {0.1 * fr, 10 * fr};
  auto rep = explore(lp, opt);
  REQUIRE(rep.rows.size() == 3);
  const auto& peak = rep.peak_row();
  CHECK(std::abs(peak.frequency - fr) <= 5.0);
  for (const auto& r : rep.rows) {
    if (!r.is_peak) CHECK(r.range_width < peak.range_width);
    CHECK(std::abs(r.range_width - r.expected_width) <= 0.02 * r.expected_width);
  }
  CHECK(rep.rows.front().frequency < rep.rows.back().frequency);
  CHECK(rep.traces.size() == 3);
  CHECK(rep.settle_time == doctest::Approx(10 / lp.slowest_decay_rate()));

  opt.comparison_freqs.clear();
  auto single = explore(lp, opt);
  REQUIRE(single.rows.size() == 1);
  CHECK(single.rows[0].is_peak);

  opt.duration = 0.5 * single.settle_time;
  CHECK(code_of([&] { explore(lp, opt); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("flat gain gives identical range widths") {
  LtiModel unity({1.0}, {1.0});
  ExploreOptions opt;
  opt.comparison_freqs = {10, 100};
  opt.f_lo = 1;
  opt.f_hi = 1000;
  opt.points_per_decade = 10;
  auto rep = explore(unity, opt);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& r : rep.rows) CHECK(r.range_width == doctest::Approx(rep.rows[0].range_width).epsilon(1e-9));
  CHECK(rep.rows[0].range_width == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("sweep band follows the poles") {
  auto [lo, hi] = sweep_band(LtiModel::two_pole(10, 10, 1000));
  CHECK(lo == doctest::Approx(0.1));
  CHECK(hi == doctest::Approx(1e5));
  auto [ulo, uhi] = sweep_band(LtiModel({2.0}, {1.0}));
  CHECK(ulo == 1.0);
  CHECK(uhi == 1e6);
}
