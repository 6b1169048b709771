// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "amscov/circuit_sim.hpp"
#include "amscov/coverage.hpp"
#include "amscov/error.hpp"

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

double gain_db_at(const LtiModel& m, double f) { return 20 * std::log10(std::abs(m.response(f))); }

}  // namespace

TEST_CASE("ac_analysis on textbook models") {
  LtiModel first({1.0}, {1.0, 1.0});
  auto b = ac_analysis(first, 1.0 / (2 * M_PI), 10.0 / (2 * M_PI), 10);
  REQUIRE(b.frequencies.front() == 1.0 / (2 * M_PI));
  CHECK(std::abs(b.gain_db[0] + 3.0103) <= 0.01);
  CHECK(b.phase_deg[0] == doctest::Approx(-45.0));

  LtiModel unity({1.0}, {1.0});
  auto u = ac_analysis(unity, 1, 1e6, 20);
  CHECK(u.frequencies.size() == 121);
  for (std::size_t i = 0; i < u.frequencies.size(); ++i) {
    CHECK(u.gain_db[i] == 0.0);
    CHECK(u.phase_deg[i] == 0.0);
  }
  CHECK_FALSE(u.unstable);

  // Q = 2 resonance: analytic peak gain Q / sqrt(1 - 1/(4Q^2)).
  auto lp = LtiModel::lowpass2(1000, 2);
  auto bode = ac_analysis(lp, 100, 10000, 2000);
  auto best = std::max_element(bode.gain_db.begin(), bode.gain_db.end()) - bode.gain_db.begin();
  const double q = 2;
  CHECK(std::abs(bode.gain_db[best] - 20 * std::log10(q / std::sqrt(1 - 1 / (4 * q * q)))) <= 0.1);
  CHECK(std::abs(bode.frequencies[best] - 1000 * std::sqrt(1 - 1 / (2 * q * q))) <= 2.0);

  // Repeated sweeps are bit-identical.
  auto again = ac_analysis(lp, 100, 10000, 2000);
  CHECK(again.gain_db == bode.gain_db);
  CHECK(again.phase_deg == bode.phase_deg);

  CHECK(code_of([&] { ac_analysis(lp, 10, 1, 10); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { ac_analysis(lp, 0, 1, 10); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("unstable models are flagged but still analysed") {
  LtiModel rhp({1.0}, {-1.0, 1.0});
  auto b = ac_analysis(rhp, 0.01, 10, 10);
  CHECK(b.unstable);
  CHECK_FALSE(rhp.stable());
  CHECK(b.gain_db.size() == b.frequencies.size());
}

TEST_CASE("model construction") {
  CHECK(code_of([] { LtiModel({1.0}, {0.0, 0.0}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { LtiModel({1.0, 1.0, 1.0}, {1.0, 1.0}); }) == ErrorCode::InvalidArgument);
  auto bp = LtiModel::bandpass2(500, 5, 2.0);
  CHECK(std::abs(bp.response(500)) == doctest::Approx(2.0));
  auto tp = LtiModel::two_pole(100, 10, 1000);
  CHECK(std::abs(tp.response(1e-3)) == doctest::Approx(100).epsilon(1e-6));
  CHECK(tp.poles().size() == 2);
  CHECK(tp.slowest_decay_rate() == doctest::Approx(2 * M_PI * 10));
  CHECK(tp.fastest_rate() == doctest::Approx(2 * M_PI * 1000));
  auto lp1 = LtiModel::lowpass1(100, 3);
  CHECK(gain_db_at(lp1, 100) == doctest::Approx(20 * std::log10(3) - 3.0103).epsilon(1e-4));
}

TEST_CASE("state-space realization reproduces H(s)") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + rng() % 5;
    std::size_t m = rng() % (n + 1);
    std::vector<double> den(n + 1), num(m + 1);
    for (auto& c : den) c = u(rng);
    for (auto& c : num) c = u(rng) - 1.5;
    LtiModel model(num, den);
    for (double f : {0.01, 0.1, 1.0, 10.0}) {
      auto a = model.response(f), b = model.response_state_space(f);
      CHECK(std::abs(a - b) <= 1e-8 * (1 + std::abs(a)));
    }
  }
}

TEST_CASE("transient analysis") {
  LtiModel unity({1.0}, {1.0});
  Trace t = transient(unity, Sine{0.7, 50, 0.2, 0.1}, 1e-4, 0.1);
  auto in = t.values("input"), out = t.values("output");
  for (std::size_t i = 0; i < in.size(); ++i) CHECK(out[i] == in[i]);

  LtiModel first({1.0}, {1.0, 1.0});
  Trace s = transient(first, Step{}, 0.01, 10);
  CHECK(std::abs(s.sample_at("output", 5.0) - (1 - std::exp(-5.0))) <= 1e-4);

  auto lp = LtiModel::lowpass2(1000, 2);
  const double fr = 1000 * std::sqrt(1 - 1 / 8.0);
  const double settle = 10 / lp.slowest_decay_rate();
  Trace r = transient(lp, Sine{1.0, fr, 0, 0}, 1e-6, settle + 5 / fr);
  Bin range = range_coverage(r.slice(settle, r.end_time()), "output");
  const double expect = std::abs(lp.response(fr));
  CHECK(std::abs(range.upper() - expect) <= 0.02 * expect);
  CHECK(std::abs(-range.lower() - expect) <= 0.02 * expect);

  CHECK(code_of([&] { transient(lp, Step{}, 1e-3, 1.0); }) == ErrorCode::StepTooLarge);
  CHECK(code_of([&] { transient(lp, Step{}, 1e-6, 5e-6); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("waveforms") {
  CHECK(waveform_value(Step{2.0, 1.0, 0.5}, 0.99) == 0.5);
  CHECK(waveform_value(Step{2.0, 1.0, 0.5}, 1.0) == 2.5);
  CHECK(waveform_value(Ramp{3.0, 1.0}, 2.0) == 3.0);
  CHECK(waveform_value(Ramp{3.0, 1.0}, 0.5) == 0.0);
  Pwl p{{{0, 0}, {1, 2}, {2, 0}}};
  CHECK(waveform_value(p, 0.5) == 1.0);
  CHECK(waveform_value(p, 3.0) == 0.0);
  CHECK(waveform_value(Sine{2.0, 1.0, 0.0, 1.0}, 0.25) == doctest::Approx(3.0));
}

TEST_CASE("RK4 error falls by about 16 when dt halves") {
  LtiModel first({1.0}, {1.0, 1.0});
  // Unit ramp from t = 0, so the input is smooth over every RK4 stage;
  // y(t) = t - 1 + e^-t.
  Ramp in{1.0, 0.0};
  auto err = [&](double dt) {
    Trace t = transient(first, in, dt, 2.0);
    return std::abs(t.values("output").back() - (1.0 + std::exp(-2.0)));
  };
  double e1 = err(0.1), e2 = err(0.05);
  CHECK(e1 / e2 >= 8.0);
  CHECK(e1 / e2 <= 32.0);
}

TEST_CASE("static maps") {
  StaticMapModel ldo{LdoMap{1.8, 0.02, 0.3, 0.5}, Bin::closed(0, 1), 0.0, StaticOutput::level, 1.0, 0.0, ""};
  CHECK(eval_static(ldo, 0.0) == 1.8);
  double prev = eval_static(ldo, 0.0);
  for (int i = 1; i <= 100; ++i) {
    double y = eval_static(ldo, i / 100.0);
    CHECK(y <= prev);
    prev = y;
  }
  CHECK(code_of([&] { eval_static(ldo, 1.5); }) == ErrorCode::OutOfDomain);

  Trace flat = transient_static(ldo, 0.5, 1e-4, 1e-2);
  for (double v : flat.values("output")) CHECK(v == eval_static(ldo, 0.5));

  ldo.time_constant = 1e-3;
  Trace settle = transient_static(ldo, 0.5, 1e-5, 1e-2);
  CHECK(settle.values("output").front() == 0.0);
  CHECK(settle.values("output").back() == doctest::Approx(eval_static(ldo, 0.5)).epsilon(1e-4));

  StaticMapModel forr{ForresterMap{}, Bin::closed(0, 1), 0.0, StaticOutput::level, 1.0, 0.0, ""};
  CHECK(eval_static(forr, 0.757249) == doctest::Approx(-6.02074).epsilon(1e-6));

  StaticMapModel tab{TableMap{{0, 1, 2}, {5, 3, 4}}, Bin::closed(0, 2), 0.0, StaticOutput::level, 1.0, 0.0, ""};
  CHECK(eval_static(tab, 0.5) == 4.0);
  CHECK(eval_static(tab, 2.0) == 4.0);

  StaticMapModel osc{OscillatorMap{1000, 1.8, 500, 0}, Bin::closed(1.6, 2.0), 0.0,
                     StaticOutput::oscillation, 1.0, 0.3, ""};
  CHECK(eval_static(osc, 1.9) == doctest::Approx(1050));
  Trace wave = transient_static(osc, 1.9, 1e-6, 0.02);
  CHECK(frequency_coverage(wave, "output", 0.0, 0.01, true) == Bin::closed(1050, 1050));
}
