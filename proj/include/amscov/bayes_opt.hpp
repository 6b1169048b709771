// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "amscov/bins.hpp"
#include "amscov/coverage.hpp"
#include "amscov/coverage_space.hpp"
#include "amscov/error.hpp"
#include "amscov/trace.hpp"

// Gaussian-process surrogate and Expected Improvement search over a box of
// input parameters.
namespace amscov {

struct ParameterSpace {
  std::vector<Bin> bounds;  ///< one per dimension, treated as closed

  std::size_t dimension() const noexcept { return bounds.size(); }
  bool contains(std::span<const double> x) const;
};

/// Throws InvalidArgument for zero dimensions or a zero-width bound.
void validate(const ParameterSpace& space);

struct GpHyperparameters {
  std::vector<double> length_scales;  ///< one per dimension
  double signal_variance = 1.0;
  /// Diagonal nugget, relative to signal_variance. Multiplied by 10 on a
  /// failed factorization until it would exceed max_jitter.
  double jitter = 1e-13;
  double max_jitter = 1e-6;
};

/// Squared-exponential kernel.
double sq_exp_kernel(std::span<const double> a, std::span<const double> b,
                     const GpHyperparameters& hp);

struct GpPrediction {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Zero-mean GP conditioned on noise-free observations. Immutable.
class GpPosterior {
 public:
  const Eigen::MatrixXd& inputs() const noexcept { return X_; }  ///< n x k
  const Eigen::VectorXd& observations() const noexcept { return y_; }
  const GpHyperparameters& hyperparameters() const noexcept { return hp_; }
  /// Relative nugget that made the factorization succeed.
  double jitter_used() const noexcept { return jitter_; }
  double log_marginal_likelihood() const noexcept { return lml_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(X_.rows()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(X_.cols()); }

  GpPrediction predict(std::span<const double> x) const;

 private:
  friend GpPosterior gp_fit(const std::vector<std::vector<double>>&, const std::vector<double>&,
                            std::optional<GpHyperparameters>);
  GpPosterior() = default;
  /// Factorizes with escalating jitter; empty if max_jitter is not enough.
  static std::optional<GpPosterior> factor(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                           const GpHyperparameters& hp);

  // The kernel matrix routinely reaches condition numbers near 1/jitter, so
  // the factorization is kept in extended precision.
  using ExtMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using ExtVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  GpHyperparameters hp_;
  double jitter_ = 0.0;
  Eigen::LLT<ExtMatrix> llt_;
  ExtVector alpha_;
  double lml_ = 0.0;
};

/// Without hyperparameters the length scales come from a log-grid search
/// of the marginal likelihood (isotropic first, then one pass per
/// dimension) and the signal variance is profiled out in closed form.
/// Throws InvalidArgument on empty or ragged input, SingularKernel if no
/// jitter up to max_jitter yields a positive definite kernel matrix.
GpPosterior gp_fit(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                   std::optional<GpHyperparameters> hp = std::nullopt);

inline GpPrediction gp_predict(const GpPosterior& p, std::span<const double> x) {
  return p.predict(x);
}

/// E[max(f_star - f, 0)] for f ~ N(mu, sigma^2). Throws NegativeSigma.
double expected_improvement(double mu, double sigma, double f_star);

struct EiStep {
  std::vector<double> x;
  double y = 0.0;
  std::optional<double> ei;  ///< empty for initial-design points
};

struct EiState {
  GpPosterior posterior;
  double incumbent = 0.0;  ///< minimum observation
  std::vector<EiStep> history;
};

/// Builds the state from a posterior; history holds its training points.
EiState make_ei_state(GpPosterior posterior);

struct Suggestion {
  std::vector<double> x;
  double ei = 0.0;
  bool fallback = false;  ///< every EI was numerically zero
};

/// Largest EI below which the search falls back to pure exploration.
inline constexpr double kEiFloor = 1e-12;

/// argmax EI: 1024 shifted Sobol candidates, the best 8 refined by compass
/// search. If no candidate has EI above kEiFloor the candidate farthest
/// from the training inputs is returned instead.
Suggestion suggest_next(const EiState& s, const ParameterSpace& space, std::uint64_t seed = 0);

enum class ObjectiveKind {
  gap_lower,  ///< minimize y - a, y the lowest output point
  gap_upper,  ///< minimize b - y, y the highest output point
  bug_bin,    ///< minimize |y - (c+d)/2|, y the output point nearest the midpoint
};

std::string_view to_string(ObjectiveKind kind) noexcept;
ObjectiveKind parse_objective_kind(std::string_view name);

struct CoverageObjective {
  ObjectiveKind kind = ObjectiveKind::gap_lower;
  double bound = 0.0;                        ///< a or b for the gap kinds
  Bin illegal = Bin::closed(0.0, 1.0);       ///< [c, d] for bug_bin
  CoverPoint coverpoint;
  BinGrid grid{0.0, 1.0, Bin::closed(0.0, 1.0)};
  std::function<Trace(std::span<const double>)> simulate;
};

/// Scalar y_C picked from a coverpoint output for this objective.
double observed_value(const CoverageObjective& obj, const BinSet& output);
double objective_value(const CoverageObjective& obj, double y);

struct Evaluation {
  std::size_t iteration = 0;  ///< 1-based
  bool initial = true;        ///< from the Latin hypercube
  std::vector<double> x;
  double y = 0.0;
  double objective = 0.0;
  double incumbent = 0.0;  ///< best objective so far, this one included
  std::optional<double> ei;
  bool bug = false;
};

struct OptimizationSettings {
  std::size_t budget = 20;
  std::size_t n_init = 0;  ///< 0: max(2, 2k)
  std::uint64_t seed = 0;
  /// Every evaluation is accumulated here when set, as test
  /// `<test_prefix>-<iteration>` with x logged as inputs.
  CoverageDatabase* database = nullptr;
  std::string test_prefix = "bo";
};

struct OptimizationHistory {
  ObjectiveKind kind = ObjectiveKind::gap_lower;
  std::string coverpoint_id;
  double bound = 0.0;
  Bin illegal = Bin::closed(0.0, 1.0);
  ParameterSpace space;
  OptimizationSettings settings;  ///< database pointer cleared
  std::vector<Evaluation> evaluations;
  bool bug_hit = false;

  /// Lowest objective; the earliest on ties. Throws InvalidArgument if empty.
  const Evaluation& best() const;
};

/// Carries whatever was evaluated before the failure.
class OptimizationError : public Error {
 public:
  OptimizationError(ErrorCode code, const std::string& what, OptimizationHistory history)
      : Error(code, what), history_(std::move(history)) {}
  const OptimizationHistory& history() const noexcept { return history_; }

 private:
  OptimizationHistory history_;
};

/// Seeded Latin hypercube of n points in the unit cube.
std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t k, std::uint64_t seed);

/// Initial Latin-hypercube design, then fit, suggest, simulate and observe
/// until the budget is spent or a bug_bin objective lands in its illegal
/// bin. The GP works on inputs scaled to the unit cube and standardized
/// objectives. Requires budget >= n_init >= 2 (InvalidArgument). Failures
/// of the simulator or the coverpoint are rethrown as OptimizationError
/// with code SimulatorError.
OptimizationHistory run_optimization(const CoverageObjective& obj, const ParameterSpace& space,
                                     const OptimizationSettings& settings);

/// Columns: iteration, phase, x0..x{k-1}, y, objective, incumbent, ei.
void write_history_csv(const OptimizationHistory& h, std::ostream& out);
/// key=value lines; the timestamp, when given, is alone on the first line.
void write_summary(const OptimizationHistory& h, std::ostream& out,
                   std::string_view timestamp = {});

}  // namespace amscov
