// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "amscov/bayes_opt.hpp"
#include "amscov/circuit_sim.hpp"
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

double forrester(double x) { return std::pow(6 * x - 2, 2) * std::sin(12 * x - 4); }

CoverageObjective static_objective(StaticMapModel model, ObjectiveKind kind, double bound,
                                   Bin illegal, BinGrid grid) {
  CoverageObjective obj;
  obj.kind = kind;
  obj.bound = bound;
  obj.illegal = illegal;
  obj.coverpoint = CoverPoint{"out", ArtifactKind::range, "output", {}};
  obj.grid = grid;
  obj.simulate = [model](std::span<const double> x) {
    return transient_static(model, x[0], 1e-4, 1e-2);
  };
  return obj;
}

StaticMapModel forrester_model() {
  return {ForresterMap{}, Bin::closed(0, 1), 0.0, StaticOutput::level, 1.0, 0.0, ""};
}

const BinGrid kForresterGrid(-8.0, 0.5, Bin::closed(-8, 16));

}  // namespace

TEST_CASE("squared-exponential kernel") {
  GpHyperparameters hp{{2.0, 0.5}, 3.0};
  std::vector<double> a{0, 0}, b{2, 0.5};
  CHECK(sq_exp_kernel(a, a, hp) == 3.0);
  CHECK(sq_exp_kernel(a, b, hp) == doctest::Approx(3.0 * std::exp(-1.0)));
  CHECK(sq_exp_kernel(a, b, hp) == sq_exp_kernel(b, a, hp));
}

TEST_CASE("posterior matches a dense-inverse reference") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 2 + rng() % 49, k = 1 + rng() % 3;
    std::vector<std::vector<double>> X(n, std::vector<double>(k));
    std::vector<double> y(n);
    for (auto& x : X) for (auto& v : x) v = u(rng);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(5 * X[i][0]) + 0.3 * X[i].back();
    GpHyperparameters hp{std::vector<double>(k, 0.3 + 0.4 * u(rng)), 0.5 + u(rng), 1e-8, 1e-8};
    auto post = gp_fit(X, y, hp);
    CHECK(post.jitter_used() == 1e-8);
    for (int q = 0; q < 10; ++q) {
      std::vector<double> x(k);
      for (auto& v : x) v = u(rng);
      auto p = gp_predict(post, x);
      auto [m, s] = oracle::gp_dense(X, y, hp.length_scales, hp.signal_variance, 1e-8, x);
      CHECK(std::abs(p.mean - m) <= 1e-8 * (1 + std::abs(m)));
      CHECK(std::abs(p.stddev * p.stddev - s * s) <= 1e-8 * (1 + s * s));
    }
  }
}

TEST_CASE("posterior interpolates its training data") {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  for (int i = 0; i < 8; ++i) {
    X.push_back({i / 7.0});
    y.push_back(forrester(i / 7.0));
  }
  auto post = gp_fit(X, y);
  CHECK(post.hyperparameters().length_scales.size() == 1);
  for (std::size_t i = 0; i < X.size(); ++i) {
    auto p = post.predict(X[i]);
    CHECK(std::abs(p.mean - y[i]) <= 1e-6 * (1 + std::abs(y[i])));
    CHECK(p.stddev <= 1e-3 * std::sqrt(post.hyperparameters().signal_variance));
  }
  auto mid = post.predict(std::vector<double>{0.5 / 7.0});
  CHECK(mid.stddev > 0.0);
}

TEST_CASE("gp_fit input validation and singular kernels") {
  CHECK(code_of([] { gp_fit({}, {}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { gp_fit({{0.0}, {1.0, 2.0}}, {1, 2}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { gp_fit({{0.0}}, {1, 2}); }) == ErrorCode::InvalidArgument);
  GpHyperparameters exact{{1.0}, 1.0, 0.0, 0.0};
  CHECK(code_of([&] { gp_fit({{0.5}, {0.5}}, {1, 1}, exact); }) == ErrorCode::SingularKernel);
  // With jitter the duplicate is absorbed.
  GpHyperparameters jittered{{1.0}, 1.0, 1e-10, 1e-6};
  auto p = gp_fit({{0.5}, {0.5}}, {1, 1}, jittered);
  CHECK(p.jitter_used() >= 1e-10);
  auto post = gp_fit({{0.0}, {1.0}}, {0, 1}, GpHyperparameters{{0.5}, 1.0});
  CHECK(code_of([&] { post.predict(std::vector<double>{0.1, 0.2}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("expected improvement closed form") {
  CHECK(expected_improvement(1.0, 0.0, 3.0) == 2.0);
  CHECK(expected_improvement(3.0, 0.0, 1.0) == 0.0);
  CHECK(code_of([] { expected_improvement(0, -1e-3, 0); }) == ErrorCode::NegativeSigma);
  CHECK(code_of([] { expected_improvement(0, std::nan(""), 0); }) == ErrorCode::NegativeSigma);
  // At mu = f*, EI = sigma * phi(0).
  CHECK(expected_improvement(2.0, 0.5, 2.0) == doctest::Approx(0.5 / std::sqrt(2 * M_PI)));

  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  std::vector<double> draws(200000);
  for (auto& d : draws) d = z(rng);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    double mu = u(rng), sigma = 0.05 + std::abs(u(rng)), fs = u(rng);
    double sum = 0, sum2 = 0;
    for (double d : draws) {
      double imp = std::max(fs - (mu + sigma * d), 0.0);
      sum += imp;
      sum2 += imp * imp;
    }
    const double n = static_cast<double>(draws.size());
    // Exact second moment of the improvement sets the standard error, so
    // far-tail cases with no improving draw still get a finite tolerance.
    const double delta = fs - mu, zz = delta / sigma;
    const double pdf = std::exp(-0.5 * zz * zz) / std::sqrt(2 * M_PI), cdf = 0.5 * std::erfc(-zz / std::sqrt(2.0));
    const double m2 = (delta * delta + sigma * sigma) * cdf + delta * sigma * pdf;
    double mean = sum / n, se = std::sqrt(std::max(m2 - mean * mean, 0.0) / n);
    double ei = expected_improvement(mu, sigma, fs);
    CHECK(ei >= 0);
    CHECK(std::abs(ei - mean) <= 4 * se + 1e-12);
    CHECK(expected_improvement(mu, sigma, fs + 0.1) >= ei);
  }
}

TEST_CASE("latin hypercube stratifies every dimension") {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    auto pts = latin_hypercube(10, 3, seed);
    REQUIRE(pts.size() == 10);
    for (std::size_t d = 0; d < 3; ++d) {
      std::vector<int> strata(10, 0);
      for (const auto& p : pts) {
        REQUIRE(p[d] >= 0.0);
        REQUIRE(p[d] < 1.0);
        ++strata[static_cast<std::size_t>(p[d] * 10)];
      }
      for (int c : strata) CHECK(c == 1);
    }
    CHECK(latin_hypercube(10, 3, seed) == pts);
  }
  CHECK(latin_hypercube(10, 3, 1) != latin_hypercube(10, 3, 2));
}

TEST_CASE("suggest_next stays in bounds and is seeded") {
  std::vector<std::vector<double>> X{{0.1}, {0.4}, {0.9}};
  std::vector<double> y{forrester(0.1), forrester(0.4), forrester(0.9)};
  auto state = make_ei_state(gp_fit(X, y));
  CHECK(state.incumbent == *std::min_element(y.begin(), y.end()));
  CHECK(state.history.size() == 3);
  ParameterSpace space{{Bin::closed(0, 1)}};
  auto a = suggest_next(state, space, 5);
  auto b = suggest_next(state, space, 5);
  CHECK(a.x == b.x);
  CHECK(a.ei == b.ei);
  REQUIRE(a.x.size() == 1);
  CHECK(space.contains(a.x));
  CHECK(a.ei > kEiFloor);
  CHECK_FALSE(a.fallback);
  // No training point is a better EI pick than the suggestion.
  for (const auto& x : X) {
    auto p = state.posterior.predict(x);
    CHECK(expected_improvement(p.mean, p.stddev, state.incumbent) <= a.ei + 1e-12);
  }
  ParameterSpace wrong{{Bin::closed(0, 1), Bin::closed(0, 1)}};
  CHECK(code_of([&] { suggest_next(state, wrong, 1); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { validate(ParameterSpace{{Bin::point(1.0)}}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("objective values") {
  CoverageObjective obj;
  BinSet out{Bin::closed(1.0, 2.0), Bin::closed(3.0, 4.0)};
  obj.kind = ObjectiveKind::gap_lower;
  obj.bound = 1.5;
  CHECK(observed_value(obj, out) == 1.0);
  CHECK(objective_value(obj, 1.0) == -0.5);
  obj.kind = ObjectiveKind::gap_upper;
  obj.bound = 3.0;
  CHECK(observed_value(obj, out) == 4.0);
  CHECK(objective_value(obj, 4.0) == -1.0);
  obj.kind = ObjectiveKind::bug_bin;
  obj.illegal = Bin::closed(2.4, 2.8);
  CHECK(observed_value(obj, out) == 3.0);
  CHECK(objective_value(obj, 3.0) == doctest::Approx(0.4));
  obj.illegal = Bin::closed(3.2, 3.6);
  CHECK(observed_value(obj, out) == doctest::Approx(3.4));
  CHECK(code_of([&] { observed_value(obj, BinSet{}); }) == ErrorCode::SimulatorError);
  CHECK(parse_objective_kind("gap_upper") == ObjectiveKind::gap_upper);
  CHECK(code_of([] { parse_objective_kind("min"); }) == ErrorCode::ParseError);
}

TEST_CASE("optimization on the Forrester function") {
  auto obj = static_objective(forrester_model(), ObjectiveKind::gap_lower, -6.0,
                              Bin::closed(0, 1), kForresterGrid);
  ParameterSpace space{{Bin::closed(0, 1)}};
  OptimizationSettings s;
  s.budget = 20;
  s.seed = 3;
  auto h = run_optimization(obj, space, s);
  CHECK(h.evaluations.size() == 20);
  CHECK(h.settings.n_init == 2);
  CHECK(h.evaluations[0].initial);
  CHECK_FALSE(h.evaluations[2].initial);
  CHECK(h.evaluations[2].ei.has_value());
  CHECK(h.best().y == doctest::Approx(-6.020740).epsilon(0.05 / 6.02));
  double inc = h.evaluations[0].objective;
  for (const auto& e : h.evaluations) {
    CHECK(e.y == doctest::Approx(forrester(e.x[0])).epsilon(1e-12));
    inc = std::min(inc, e.objective);
    CHECK(e.incumbent == inc);
  }

  auto again = run_optimization(obj, space, s);
  std::ostringstream a, b;
  write_history_csv(h, a);
  write_history_csv(again, b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("iteration,phase,x0,y,objective,incumbent,ei\n1,init,", 0) == 0);

  std::ostringstream sum;
  write_summary(h, sum, "2026-01-01T00:00:00Z");
  CHECK(sum.str().rfind("timestamp=2026-01-01T00:00:00Z\nobjective=gap_lower\n", 0) == 0);
  CHECK(sum.str().find("bug_hit=false") != std::string::npos);
}

TEST_CASE("bug_bin stops early once the illegal bin is reached") {
  // Reachable narrow bin around the global minimum.
  auto obj = static_objective(forrester_model(), ObjectiveKind::bug_bin, 0.0,
                              Bin::closed(-6.1, -5.9), kForresterGrid);
  ParameterSpace space{{Bin::closed(0, 1)}};
  OptimizationSettings s;
  s.budget = 30;
  s.seed = 1;
  CoverageDatabase db;
  s.database = &db;
  auto h = run_optimization(obj, space, s);
  CHECK(h.bug_hit);
  CHECK(h.evaluations.back().bug);
  CHECK(h.evaluations.size() < 30);
  CHECK(db.tests().size() == h.evaluations.size());
  CHECK(db.tests().front().id == "bo-1");
  CHECK(db.tests().front().inputs.front().first == "x0");
  CHECK(h.settings.database == nullptr);
}

TEST_CASE("LDO analogue: lowest output voltage sits at full load") {
  StaticMapModel ldo{LdoMap{1.8249, 2.0, 3e-3, 25575}, Bin::closed(0, 5e-3), 0.0,
                     StaticOutput::level, 1.0, 0.0, ""};
  CHECK(eval_static(ldo, 0.0) == doctest::Approx(1.8249));
  CHECK(eval_static(ldo, 5e-3) == doctest::Approx(1.7126).epsilon(1e-4));
  auto obj = static_objective(ldo, ObjectiveKind::gap_lower, 1.716, Bin::closed(0, 1),
                              BinGrid(1.7, 0.005, Bin::closed(1.7, 1.85)));
  OptimizationSettings s;
  s.budget = 15;
  s.seed = 2;
  auto h = run_optimization(obj, ParameterSpace{{Bin::closed(0, 5e-3)}}, s);
  CHECK(h.best().x[0] == doctest::Approx(5e-3).epsilon(1e-3));
  CHECK(h.best().objective < 0.0);
}

TEST_CASE("run_optimization argument checks and error wrapping") {
  auto obj = static_objective(forrester_model(), ObjectiveKind::gap_lower, 0.0, Bin::closed(0, 1),
                              kForresterGrid);
  ParameterSpace space{{Bin::closed(0, 1)}};
  OptimizationSettings s;
  s.budget = 1;
  CHECK(code_of([&] { run_optimization(obj, space, s); }) == ErrorCode::InvalidArgument);
  s.budget = 5;
  s.n_init = 1;
  CHECK(code_of([&] { run_optimization(obj, space, s); }) == ErrorCode::InvalidArgument);
  s.n_init = 5;
  CHECK(run_optimization(obj, space, s).evaluations.size() == 5);

  s.n_init = 2;
  int calls = 0;
  auto inner = obj.simulate;
  obj.simulate = [&](std::span<const double> x) {
    if (++calls == 4) throw std::runtime_error("solver diverged");
    return inner(x);
  };
  try {
    run_optimization(obj, space, s);
    FAIL("expected OptimizationError");
  } catch (const OptimizationError& e) {
    CHECK(e.code() == ErrorCode::SimulatorError);
    CHECK(std::string(e.what()).find("evaluation 4") != std::string::npos);
    CHECK(e.history().evaluations.size() == 3);
  }
}
