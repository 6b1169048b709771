// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "amscov/coverage.hpp"
#include "amscov/error.hpp"
#include "oracles.hpp"

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

Trace sampled(double t0, double t1, double dt, auto&& f) {
  std::vector<double> t, v;
  const auto n = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
  for (std::size_t i = 0; i <= n; ++i) {
    t.push_back(t0 + static_cast<double>(i) * dt);
    v.push_back(f(t.back()));
  }
  return Trace({"v"}, t, {v});
}

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * (1 + std::abs(b)); }

// Trapezoidal wave with plateaus at 1.4 and -0.5, plus a spike to 1.9 on
// the high plateau and a trough to -1.1 on the low one, each 0.2 delta
// wide.
Trace fig1a(double delta) {
  std::vector<double> t, v;
  auto add = [&](double ti, double vi) {
    t.push_back(ti);
    v.push_back(vi);
  };
  add(0.0, 0.0);
  add(0.1, 1.4);
  add(0.2, 1.4);
  add(0.25, 1.4);
  add(0.25 + 0.1 * delta, 1.9);
  add(0.25 + 0.2 * delta, 1.4);
  add(0.4, 1.4);
  add(0.5, -0.5);
  add(0.65, -0.5);
  add(0.65 + 0.1 * delta, -1.1);
  add(0.65 + 0.2 * delta, -0.5);
  add(0.8, -0.5);
  add(1.0, 0.3);
  return Trace({"v"}, t, {v});
}

Trace pulses(const std::vector<double>& rising_at, double end) {
  std::vector<double> t{0.0}, v{0.0};
  for (std::size_t i = 0; i < rising_at.size(); ++i) {
    double r = rising_at[i];
    t.push_back(r - 1e-3);
    v.push_back(0.0);
    t.push_back(r + 1e-3);
    v.push_back(1.0);
    double fall = i + 1 < rising_at.size() ? 0.5 * (r + rising_at[i + 1]) : r + 0.5 * (end - r);
    t.push_back(fall - 1e-3);
    v.push_back(1.0);
    t.push_back(fall + 1e-3);
    v.push_back(0.0);
  }
  t.push_back(end);
  v.push_back(0.0);
  return Trace({"v"}, t, {v});
}

Trace pair_trace(const std::vector<double>& e1, const std::vector<double>& e2, double end) {
  Trace a = pulses(e1, end), b = pulses(e2, end);
  std::vector<double> t;
  std::merge(a.times().begin(), a.times().end(), b.times().begin(), b.times().end(),
             std::back_inserter(t));
  t.erase(std::unique(t.begin(), t.end()), t.end());
  std::vector<double> va, vb;
  for (double x : t) {
    va.push_back(a.sample_at("v", x));
    vb.push_back(b.sample_at("v", x));
  }
  return Trace({"a", "b"}, t, {va, vb});
}

const Event kA{"a", 0.5, Direction::rising};
const Event kB{"b", 0.5, Direction::rising};

}  // namespace

TEST_CASE("range_coverage") {
  CHECK(range_coverage(fig1a(0.05), "v") == Bin::closed(-1.1, 1.9));
  CHECK(range_coverage(sampled(0, 1, 0.1, [](double) { return 3.3; }), "v") == Bin::point(3.3));
  Trace t({"v"}, {0, 1, 2, 3}, {{0, -2, 5, 1}});
  CHECK(range_coverage(t, "v") == Bin::closed(-2, 5));
  CHECK(code_of([&] { range_coverage(t, "w"); }) == ErrorCode::UnknownSignal);
}

TEST_CASE("deglitched_range_coverage") {
  const double delta = 0.02;
  CHECK(deglitched_range_coverage(fig1a(delta), "v", delta) == Bin::closed(-0.5, 1.4));
  // Windows much shorter than the spikes only shave their triangular tips.
  Trace fine = fig1a(delta);
  Bin narrow = deglitched_range_coverage(fine, "v", 0.01 * delta);
  auto nref = oracle::deglitched(vec(fine.times()), vec(fine.values("v")), 0.01 * delta);
  CHECK(narrow.lower() == doctest::Approx(nref.lower).epsilon(1e-12));
  CHECK(narrow.upper() == doctest::Approx(nref.upper).epsilon(1e-12));
  CHECK(narrow.lower() > -1.1);
  CHECK(narrow.lower() < -1.0);
  CHECK(narrow.upper() < 1.9);
  CHECK(narrow.upper() > 1.8);

  // Pulse to 5.0 of width 0.4 delta on a 1.0 baseline.
  const double d = 0.1;
  Trace pulse({"v"}, {0, 0.5, 0.5 + 1e-9, 0.5 + 0.4 * d, 0.5 + 0.4 * d + 1e-9, 1.0},
              {{1, 1, 5, 5, 1, 1}});
  Bin r = deglitched_range_coverage(pulse, "v", d);
  auto ref = oracle::deglitched(vec(pulse.times()), vec(pulse.values("v")), d);
  CHECK(r == Bin::closed(1.0, 1.0));
  CHECK(r.lower() == ref.lower);
  CHECK(r.upper() == ref.upper);

  CHECK(code_of([&] { deglitched_range_coverage(pulse, "v", 2.0); }) == ErrorCode::TraceTooShort);
  CHECK(code_of([&] { deglitched_range_coverage(pulse, "v", 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("deglitched range collapses to the midpoint when every excursion is short") {
  // Square wave with 0.1 s half periods under a 0.3 s window: window minima
  // are all 0 and window maxima all 1.
  Trace sq = sampled(0, 2, 1e-3, [](double x) { return std::fmod(x, 0.2) < 0.1 ? 0.0 : 1.0; });
  Bin r = deglitched_range_coverage(sq, "v", 0.3);
  CHECK(r.degenerate());
  CHECK(r.lower() == doctest::Approx(0.5));
}

TEST_CASE("level_coverage") {
  const double dl = 0.01;
  auto constant = sampled(0, 10 * dl, 1e-4, [](double) { return 1.8; });
  auto lv = level_coverage(constant, "v", 1e-3, dl, 0.1);
  REQUIRE(lv.size() == 1);
  CHECK(lv[0] == doctest::Approx(1.8));

  auto step = sampled(0, 10 * dl, 1e-4, [&](double x) { return x < 5 * dl ? 0.0 : 1.0; });
  lv = level_coverage(step, "v", 1e-3, dl, 0.1);
  REQUIRE(lv.size() == 2);
  CHECK(lv[0] == doctest::Approx(0.0));
  CHECK(lv[1] == doctest::Approx(1.0));

  // Triangle with slope 100/s: a 0.1 band lasts 1 ms, well below level_time.
  auto tri = sampled(0, 0.2, 1e-5, [](double x) {
    double ph = std::fmod(x, 0.04);
    return ph < 0.02 ? 100 * ph : 4 - 100 * ph;
  });
  CHECK(level_coverage(tri, "v", 1e-4, dl, 0.1).empty());
  auto tv = vec(tri.times());
  CHECK(oracle::levels(tv, vec(tri.values("v")), 1e-4, dl, 0.1).empty());
}

TEST_CASE("glitches shorter than the deglitch time do not break a level") {
  const double dl = 0.01;
  auto glitchy = sampled(0, 0.1, 1e-5, [](double x) {
    return (x > 0.05 && x < 0.0502) ? 3.0 : 1.0;
  });
  auto lv = level_coverage(glitchy, "v", 1e-3, dl, 0.05);
  REQUIRE(lv.size() == 1);
  CHECK(lv[0] == doctest::Approx(1.0));
}

TEST_CASE("ddt_coverage") {
  auto ramp = sampled(0, 1, 1e-3, [](double x) { return 2 * x; });
  Bin r = ddt_coverage(ramp, "v", 0.01);
  CHECK(r.lower() == doctest::Approx(2.0));
  CHECK(r.upper() == doctest::Approx(2.0));

  const double f = 5, A = 2;
  auto sine = sampled(0, 1, 1e-5, [&](double x) { return A * std::sin(2 * M_PI * f * x); });
  Bin s = ddt_coverage(sine, "v", 1.0 / (100 * f));
  CHECK(std::abs(s.upper() - 2 * M_PI * f * A) <= 0.01 * 2 * M_PI * f * A);
  CHECK(std::abs(s.lower() + 2 * M_PI * f * A) <= 0.01 * 2 * M_PI * f * A);
  auto ref = oracle::ddt(vec(sine.times()), vec(sine.values("v")), 1.0 / (100 * f));
  CHECK(near(s.lower(), ref.first));
  CHECK(near(s.upper(), ref.second));

  auto flat = sampled(0, 1, 1e-2, [](double) { return 0.7; });
  CHECK(ddt_coverage(flat, "v", 0.1) == Bin::closed(0, 0));
  CHECK(code_of([&] { ddt_coverage(flat, "v", 2.0); }) == ErrorCode::TraceTooShort);
}

TEST_CASE("ddt of a time-reversed trace is the negated, swapped bin") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + rng() % 7;
    const std::size_t n = 1 + m * (5 + rng() % 50);
    std::vector<double> t, v, tr, vr;
    std::normal_distribution<double> g;
    for (std::size_t i = 0; i < n; ++i) {
      t.push_back(static_cast<double>(i) * 0.5);
      v.push_back(g(rng));
    }
    for (std::size_t i = 0; i < n; ++i) {
      tr.push_back(t.back() - t[n - 1 - i]);
      vr.push_back(v[n - 1 - i]);
    }
    Bin fwd = ddt_coverage(Trace({"v"}, t, {v}), "v", 0.5 * static_cast<double>(m));
    Bin rev = ddt_coverage(Trace({"v"}, tr, {vr}), "v", 0.5 * static_cast<double>(m));
    CHECK(near(rev.lower(), -fwd.upper()));
    CHECK(near(rev.upper(), -fwd.lower()));
  }
}

TEST_CASE("delay_coverage") {
  CHECK(delay_coverage(pair_trace({1.0}, {1.5}, 3), kA, kB).lower() == doctest::Approx(0.5));
  Bin d = delay_coverage(pair_trace({1, 3}, {1.2, 3.8}, 5), kA, kB);
  CHECK(d.lower() == doctest::Approx(0.2));
  CHECK(d.upper() == doctest::Approx(0.8));
  auto fifo = oracle::delays({1, 3}, {1.2, 3.8});
  REQUIRE(fifo.size() == 2);
  CHECK(d.lower() == doctest::Approx(fifo[0]));
  CHECK(d.upper() == doctest::Approx(fifo[1]));
  CHECK(code_of([] { delay_coverage(pair_trace({5}, {2}, 8), kA, kB); }) == ErrorCode::NoPairs);

  // FIFO: both starts before the first end; the second start takes the
  // second end.
  auto vals = delay_values(pair_trace({1, 2}, {3, 4}, 6), kA, kB);
  REQUIRE(vals.size() == 2);
  CHECK(vals[0] == doctest::Approx(2.0));
  CHECK(vals[1] == doctest::Approx(2.0));
}

TEST_CASE("frequency_coverage") {
  // The phase keeps zero crossings off the sample grid and window edges.
  auto s = sampled(0, 3, 1e-3, [](double x) { return std::sin(2 * M_PI * 10 * x + 0.3); });
  CHECK(frequency_coverage(s, "v", 0.0, 1.0) == Bin::closed(20, 20));
  CHECK(frequency_coverage(s, "v", 0.0, 1.0, true) == Bin::closed(10, 10));

  auto flat = sampled(0, 3, 1e-2, [](double) { return 1.0; });
  CHECK(frequency_coverage(flat, "v", 0.0, 1.0) == Bin::closed(0, 0));
  CHECK(code_of([&] { frequency_coverage(flat, "v", 0.0, 4.0); }) == ErrorCode::TraceTooShort);

  // Chirp 5 -> 15 Hz over 3 s.
  auto chirp = sampled(0, 3, 1e-4, [](double x) {
    return std::sin(2 * M_PI * (5 * x + 10.0 / 6.0 * x * x) + 0.1);
  });
  auto got = frequency_values(chirp, "v", 0.0, 1.0);
  auto ref = oracle::frequencies(vec(chirp.times()), vec(chirp.values("v")), 0.0, 1.0, false);
  CHECK(got == ref);
  Bin fb = frequency_coverage(chirp, "v", 0.0, 1.0);
  CHECK(fb.lower() == *std::min_element(ref.begin(), ref.end()));
  CHECK(fb.upper() == *std::max_element(ref.begin(), ref.end()));
  CHECK(fb.lower() < fb.upper());
}

TEST_CASE("evaluate maps outputs onto the grid") {
  BinGrid grid(0.0, 0.5, Bin::closed(0, 10));
  Trace t({"v"}, {0, 1}, {{1.2, 1.7}});
  CoverPoint range{"r", ArtifactKind::range, "v", {}};
  auto res = evaluate(range, t, grid);
  CHECK(res.cells == std::vector<Bin>{Bin::half_open(1.0, 1.5), Bin::half_open(1.5, 2.0)});
  CHECK(res.sample_count == 2);

  CoverPoint level{"l", ArtifactKind::level, "v", {}};
  level.params.deglitch_time = 1e-3;
  level.params.level_time = 0.01;
  level.params.bin_granularity = 0.1;
  auto c = sampled(0, 0.1, 1e-4, [](double) { return 1.8; });
  auto lres = evaluate(level, c, grid);
  CHECK(lres.cells == std::vector<Bin>{Bin::half_open(1.5, 2.0)});

  CoverPoint delay{"d", ArtifactKind::delay, "", {}};
  delay.params.events = std::pair{kA, kB};
  auto dres = evaluate(delay, pair_trace({5}, {2}, 8), grid);
  CHECK(dres.cells.empty());
  CHECK(dres.output.empty());
  CHECK_FALSE(dres.note.empty());

  // Output beyond the domain lands in untargeted.
  Trace wide({"v"}, {0, 1}, {{-1, 3}});
  auto wres = evaluate(range, wide, grid);
  CHECK(wres.cells.size() == 7);  // [0:0.5) through [3:3.5), closed at 3
  CHECK(wres.untargeted == BinSet{Bin(-1, 0, true, false)});
}

TEST_CASE("coverpoint validation") {
  CoverPoint cp{"x", ArtifactKind::ddt, "v", {}};
  CHECK(code_of([&] { validate(cp); }) == ErrorCode::InvalidArgument);
  cp.params.time_granularity = 1e-3;
  validate(cp);
  cp.params.window = 1.0;
  CHECK(code_of([&] { validate(cp); }) == ErrorCode::InvalidArgument);
  cp.params.window.reset();
  cp.params.time_granularity = -1.0;
  CHECK(code_of([&] { validate(cp); }) == ErrorCode::InvalidArgument);
  CHECK(parse_artifact_kind("deglitched_range") == ArtifactKind::deglitched_range);
  CHECK(code_of([] { parse_artifact_kind("slew"); }) == ErrorCode::ParseError);
}

TEST_CASE("artifacts match the brute-force oracles on random traces") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    auto r = oracle::random_trace(rng, 50 + rng() % 1500);
    Trace t({"a", "b"}, r.t, {r.a, r.b});
    const double dur = r.t.back() - r.t.front();
    const double delta = dur * (0.001 + 0.03 * u(rng));

    auto [lo, hi] = oracle::range(r.a);
    CHECK(range_coverage(t, "a") == Bin::closed(lo, hi));

    Bin dg = deglitched_range_coverage(t, "a", delta);
    auto ref = oracle::deglitched(r.t, r.a, delta);
    CHECK(near(dg.lower(), ref.lower));
    CHECK(near(dg.upper(), ref.upper));

    const double k = 0.05 + 0.3 * u(rng), dl = dur * (0.005 + 0.05 * u(rng));
    auto lv = level_coverage(t, "a", delta, dl, k);
    auto lref = oracle::levels(r.t, r.a, delta, dl, k);
    REQUIRE(lv.size() == lref.size());
    for (std::size_t i = 0; i < lv.size(); ++i) CHECK(near(lv[i], lref[i]));

    const double g = dur * (0.002 + 0.05 * u(rng));
    Bin dd = ddt_coverage(t, "a", g);
    auto dref = oracle::ddt(r.t, r.a, g);
    CHECK(near(dd.lower(), dref.first));
    CHECK(near(dd.upper(), dref.second));

    auto dv = delay_values(t, {"a", 0.2, Direction::rising}, {"b", 0.1, Direction::rising});
    auto dvref = oracle::delays(oracle::crossings(r.t, r.a, 0.2, +1), oracle::crossings(r.t, r.b, 0.1, +1));
    REQUIRE(dv.size() == dvref.size());
    for (std::size_t i = 0; i < dv.size(); ++i) CHECK(near(dv[i], dvref[i]));

    const double w = dur * (0.05 + 0.4 * u(rng));
    CHECK(frequency_values(t, "a", 0.0, w) == oracle::frequencies(r.t, r.a, 0.0, w, false));
  }
}

TEST_CASE("deglitched range invariants") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    auto r = oracle::random_trace(rng, 200 + rng() % 800);
    Trace t({"a"}, r.t, {r.a});
    Bin full = range_coverage(t, "a");
    const double dur = t.duration();
    Bin prev = full;
    for (double frac : {0.0005, 0.002, 0.01, 0.03, 0.1, 0.3}) {
      Bin dg = deglitched_range_coverage(t, "a", frac * dur);
      CHECK(dg.lower() >= full.lower());
      CHECK(dg.upper() <= full.upper());
      // Nesting holds until the window collapses the range to a midpoint.
      if (dg.width() > 0) {
        CHECK(prev.width() > 0);
        CHECK(dg.lower() >= prev.lower() - 1e-12);
        CHECK(dg.upper() <= prev.upper() + 1e-12);
        for (double l : level_coverage(t, "a", frac * dur, 0.01 * dur, 0.2)) {
          CHECK(l >= dg.lower() - 1e-12);
          CHECK(l <= dg.upper() + 1e-12);
        }
      }
      prev = dg;
    }
  }
}

TEST_CASE("frequency boundaries are nonnegative multiples of 1/W") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    auto r = oracle::random_trace(rng, 300 + rng() % 700);
    Trace t({"a"}, r.t, {r.a});
    const double w = 0.05 + 0.3 * (static_cast<double>(rng() % 1000) / 1000);
    for (double f : frequency_values(t, "a", 0.1, w)) {
      CHECK(f >= 0);
      double c = f * w;
      CHECK(std::abs(c - std::round(c)) < 1e-9);
    }
  }
}
