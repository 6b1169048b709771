// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include "amscov/bayes_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include <boost/random/sobol.hpp>

#include "amscov/text.hpp"

namespace amscov {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr int kGridPoints = 40;
constexpr std::size_t kCandidates = 1024;
constexpr std::size_t kStarts = 8;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

using ExtMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using ExtVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

ExtMatrix kernel_matrix(const Eigen::MatrixXd& X, const GpHyperparameters& hp) {
  using LD = long double;
  const auto n = X.rows();
  ExtMatrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = hp.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      LD r2 = 0.0L;
      for (Eigen::Index d = 0; d < X.cols(); ++d) {
        LD u = (static_cast<LD>(X(i, d)) - X(j, d)) / hp.length_scales[static_cast<std::size_t>(d)];
        r2 += u * u;
      }
      K(i, j) = K(j, i) = hp.signal_variance * std::exp(-r2 / 2);
    }
  }
  return K;
}

// The nugget scales with the signal variance, so an unbounded profiled
// variance lets very long length scales absorb residuals as noise and the
// posterior stops interpolating. Cap it relative to the data's mean square.
constexpr double kMaxVarianceRatio = 100.0;

// Log marginal likelihood with the signal variance profiled out, or
// nullopt if the correlation matrix cannot be factored.
std::optional<double> profiled_lml(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   GpHyperparameters hp, double* variance) {
  hp.signal_variance = 1.0;
  const ExtMatrix R = kernel_matrix(X, hp);
  const ExtVector ye = y.cast<long double>();
  const auto n = static_cast<double>(X.rows());
  const double ms = y.squaredNorm() / n;
  const double cap = kMaxVarianceRatio * (ms > 0.0 ? ms : 1.0);
  for (double j = hp.jitter; j <= hp.max_jitter * (1.0 + 1e-12) || j == hp.jitter; j *= 10.0) {
    ExtMatrix A = R;
    A.diagonal().array() += static_cast<long double>(j);
    Eigen::LLT<ExtMatrix> llt(A);
    if (llt.info() == Eigen::Success) {
      double q = static_cast<double>(ye.dot(llt.solve(ye)));
      double s2 = std::clamp(q / n, 1e-200, cap);
      long double logdet = 0.0L;
      for (Eigen::Index i = 0; i < A.rows(); ++i) logdet += std::log(llt.matrixL()(i, i));
      *variance = s2;
      return -0.5 * q / s2 - 0.5 * n * std::log(s2) - static_cast<double>(logdet) - 0.5 * n * kLog2Pi;
    }
    if (j == 0.0) break;
  }
  return std::nullopt;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) {
    g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  }
  return g;
}

void check_xy(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
  if (X.empty()) fail(ErrorCode::InvalidArgument, "gp_fit needs at least one training point");
  if (X.size() != y.size()) fail(ErrorCode::InvalidArgument, "gp_fit: X and y differ in length");
  const auto k = X.front().size();
  if (k == 0) fail(ErrorCode::InvalidArgument, "gp_fit: zero-dimensional inputs");
  for (const auto& x : X) {
    if (x.size() != k) fail(ErrorCode::InvalidArgument, "gp_fit: ragged training inputs");
    for (double v : x) {
      if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "gp_fit: non-finite input");
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "gp_fit: non-finite observation");
  }
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

bool ParameterSpace::contains(std::span<const double> x) const {
  if (x.size() != bounds.size()) return false;
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (x[d] < bounds[d].lower() || x[d] > bounds[d].upper()) return false;
  }
  return true;
}

void validate(const ParameterSpace& space) {
  if (space.bounds.empty()) fail(ErrorCode::InvalidArgument, "parameter space has no dimensions");
  for (const auto& b : space.bounds) {
    if (!(b.width() > 0.0)) {
      fail(ErrorCode::InvalidArgument, "parameter bound " + b.to_string() + " has zero width");
    }
  }
}

double sq_exp_kernel(std::span<const double> a, std::span<const double> b,
                     const GpHyperparameters& hp) {
  double r2 = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    double u = (a[d] - b[d]) / hp.length_scales[d];
    r2 += u * u;
  }
  return hp.signal_variance * std::exp(-0.5 * r2);
}

std::optional<GpPosterior> GpPosterior::factor(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                               const GpHyperparameters& hp) {
  using LD = long double;
  const auto n = X.rows();
  const ExtMatrix K = kernel_matrix(X, hp);
  const ExtVector ye = y.cast<LD>();
  for (double j = hp.jitter; j <= hp.max_jitter * (1.0 + 1e-12) || j == hp.jitter; j *= 10.0) {
    ExtMatrix A = K;
    A.diagonal().array() += static_cast<LD>(j) * hp.signal_variance;
    Eigen::LLT<ExtMatrix> llt(A);
    if (llt.info() == Eigen::Success) {
      GpPosterior p;
      p.X_ = X;
      p.y_ = y;
      p.hp_ = hp;
      p.jitter_ = j;
      p.alpha_ = llt.solve(ye);
      LD logdet = 0.0L;
      for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(llt.matrixL()(i, i));
      p.lml_ = static_cast<double>(-ye.dot(p.alpha_) / 2 - logdet) -
               0.5 * static_cast<double>(n) * kLog2Pi;
      p.llt_ = std::move(llt);
      return p;
    }
    if (j == 0.0) break;
  }
  return std::nullopt;
}

GpPosterior gp_fit(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                   std::optional<GpHyperparameters> hp) {
  check_xy(X, y);
  const auto n = static_cast<Eigen::Index>(X.size());
  const auto k = X.front().size();
  Eigen::MatrixXd Xm(n, static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < k; ++d) Xm(i, static_cast<Eigen::Index>(d)) = X[static_cast<std::size_t>(i)][d];
  }
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);

  GpHyperparameters h;
  if (hp) {
    h = *hp;
    if (h.length_scales.size() != k) {
      fail(ErrorCode::InvalidArgument, "gp_fit: need one length scale per dimension");
    }
    for (double l : h.length_scales) {
      if (!(l > 0.0)) fail(ErrorCode::InvalidArgument, "gp_fit: length scales must be > 0");
    }
    if (!(h.signal_variance > 0.0) || h.jitter < 0.0 || h.max_jitter < 0.0) {
      fail(ErrorCode::InvalidArgument, "gp_fit: invalid variance or jitter");
    }
  } else {
    std::vector<double> span(k);
    for (std::size_t d = 0; d < k; ++d) {
      auto col = Xm.col(static_cast<Eigen::Index>(d));
      span[d] = col.maxCoeff() - col.minCoeff();
      if (!(span[d] > 0.0)) span[d] = 1.0;
    }
    const auto unit = log_grid(0.01, 10.0, kGridPoints);
    double best = -std::numeric_limits<double>::infinity();
    double best_var = 1.0;
    bool found = false;
    // Descending so that ties keep the smoother prior.
    auto consider = [&](std::vector<double> ls) {
      GpHyperparameters cand = h;
      cand.length_scales = std::move(ls);
      double var = 1.0;
      auto lml = profiled_lml(Xm, yv, cand, &var);
      if (lml && *lml > best) {
        best = *lml;
        best_var = var;
        h.length_scales = cand.length_scales;
        found = true;
      }
    };
    for (auto it = unit.rbegin(); it != unit.rend(); ++it) {
      std::vector<double> ls(k);
      for (std::size_t d = 0; d < k; ++d) ls[d] = *it * span[d];
      consider(ls);
    }
    if (!found) fail(ErrorCode::SingularKernel, "kernel matrix not positive definite at any length scale");
    if (k > 1) {
      for (std::size_t d = 0; d < k; ++d) {
        for (auto it = unit.rbegin(); it != unit.rend(); ++it) {
          auto ls = h.length_scales;
          ls[d] = *it * span[d];
          consider(ls);
        }
      }
    }
    h.signal_variance = best_var;
  }

  auto p = GpPosterior::factor(Xm, yv, h);
  if (!p) {
    fail(ErrorCode::SingularKernel, "kernel matrix not positive definite with jitter up to " +
                                        text::format_real(h.max_jitter));
  }
  return *std::move(p);
}

GpPrediction GpPosterior::predict(std::span<const double> x) const {
  using LD = long double;
  if (x.size() != dimension()) fail(ErrorCode::InvalidArgument, "gp_predict: dimension mismatch");
  const auto n = X_.rows();
  ExtVector ks(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    LD r2 = 0.0L;
    for (std::size_t d = 0; d < x.size(); ++d) {
      LD u = (static_cast<LD>(x[d]) - X_(i, static_cast<Eigen::Index>(d))) / hp_.length_scales[d];
      r2 += u * u;
    }
    ks(i) = hp_.signal_variance * std::exp(-r2 / 2);
  }
  GpPrediction out;
  out.mean = static_cast<double>(ks.dot(alpha_));
  ExtVector v = llt_.matrixL().solve(ks);
  LD var = hp_.signal_variance - v.squaredNorm();
  out.stddev = std::sqrt(std::max(static_cast<double>(var), 0.0));
  return out;
}

double expected_improvement(double mu, double sigma, double f_star) {
  if (sigma < 0.0 || std::isnan(sigma)) {
    fail(ErrorCode::NegativeSigma, "expected_improvement: sigma must be >= 0");
  }
  double delta = f_star - mu;
  if (sigma == 0.0) return std::max(delta, 0.0);
  double z = delta / sigma;
  return std::max(delta * normal_cdf(z) + sigma * normal_pdf(z), 0.0);
}

EiState make_ei_state(GpPosterior posterior) {
  EiState s{std::move(posterior), 0.0, {}};
  const auto& X = s.posterior.inputs();
  const auto& y = s.posterior.observations();
  s.incumbent = y.minCoeff();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    EiStep step;
    for (Eigen::Index d = 0; d < X.cols(); ++d) step.x.push_back(X(i, d));
    step.y = y(i);
    s.history.push_back(std::move(step));
  }
  return s;
}

Suggestion suggest_next(const EiState& s, const ParameterSpace& space, std::uint64_t seed) {
  validate(space);
  const auto k = space.dimension();
  if (s.posterior.dimension() != k) {
    fail(ErrorCode::InvalidArgument, "suggest_next: posterior and space differ in dimension");
  }
  auto ei_at = [&](const std::vector<double>& x) {
    auto p = s.posterior.predict(x);
    return expected_improvement(p.mean, p.stddev, s.incumbent);
  };

  std::mt19937_64 rng(seed);
  std::vector<double> shift(k);
  for (auto& v : shift) v = uniform01(rng);
  boost::random::sobol qrng(static_cast<unsigned>(k));

  std::vector<std::vector<double>> cand(kCandidates, std::vector<double>(k));
  std::vector<double> ei(kCandidates);
  for (std::size_t i = 0; i < kCandidates; ++i) {
    for (std::size_t d = 0; d < k; ++d) {
      double u = std::ldexp(static_cast<double>(qrng()), -64) + shift[d];
      u -= std::floor(u);
      cand[i][d] = space.bounds[d].lower() + u * space.bounds[d].width();
    }
    ei[i] = ei_at(cand[i]);
  }

  std::vector<std::size_t> order(kCandidates);
  for (std::size_t i = 0; i < kCandidates; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return ei[a] > ei[b]; });

  if (ei[order.front()] <= kEiFloor) {
    const auto& X = s.posterior.inputs();
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < kCandidates; ++i) {
      double dmin = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < X.rows(); ++r) {
        double d2 = 0.0;
        for (std::size_t d = 0; d < k; ++d) {
          double u = (cand[i][d] - X(r, static_cast<Eigen::Index>(d))) / space.bounds[d].width();
          d2 += u * u;
        }
        dmin = std::min(dmin, d2);
      }
      if (dmin > best_d) {
        best_d = dmin;
        best = i;
      }
    }
    return {cand[best], ei[best], true};
  }

  Suggestion out{cand[order.front()], ei[order.front()], false};
  for (std::size_t si = 0; si < std::min(kStarts, kCandidates); ++si) {
    std::vector<double> x = cand[order[si]];
    double fx = ei[order[si]];
    std::vector<double> step(k);
    for (std::size_t d = 0; d < k; ++d) step[d] = 0.05 * space.bounds[d].width();
    for (int iter = 0; iter < 400; ++iter) {
      bool improved = false;
      for (std::size_t d = 0; d < k; ++d) {
        for (double sign : {1.0, -1.0}) {
          auto y = x;
          y[d] = std::clamp(x[d] + sign * step[d], space.bounds[d].lower(), space.bounds[d].upper());
          if (y[d] == x[d]) continue;
          double fy = ei_at(y);
          if (fy > fx) {
            x = std::move(y);
            fx = fy;
            improved = true;
            break;
          }
        }
      }
      if (!improved) {
        bool small = true;
        for (std::size_t d = 0; d < k; ++d) {
          step[d] *= 0.5;
          if (step[d] > 1e-7 * space.bounds[d].width()) small = false;
        }
        if (small) break;
      }
    }
    if (fx > out.ei) {
      out.x = std::move(x);
      out.ei = fx;
    }
  }
  return out;
}

std::string_view to_string(ObjectiveKind kind) noexcept {
  switch (kind) {
    case ObjectiveKind::gap_lower: return "gap_lower";
    case ObjectiveKind::gap_upper: return "gap_upper";
    case ObjectiveKind::bug_bin: return "bug_bin";
  }
  return "?";
}

ObjectiveKind parse_objective_kind(std::string_view name) {
  if (name == "gap_lower") return ObjectiveKind::gap_lower;
  if (name == "gap_upper") return ObjectiveKind::gap_upper;
  if (name == "bug_bin") return ObjectiveKind::bug_bin;
  fail(ErrorCode::ParseError, "unknown objective kind '" + std::string(name) + "'");
}

double observed_value(const CoverageObjective& obj, const BinSet& output) {
  const auto& bins = output.bins();
  if (bins.empty()) fail(ErrorCode::SimulatorError, "coverpoint produced no output");
  switch (obj.kind) {
    case ObjectiveKind::gap_lower: return bins.front().lower();
    case ObjectiveKind::gap_upper: return bins.back().upper();
    case ObjectiveKind::bug_bin: {
      const double mid = 0.5 * (obj.illegal.lower() + obj.illegal.upper());
      double best = bins.front().lower();
      for (const auto& b : bins) {
        double v = std::clamp(mid, b.lower(), b.upper());
        if (std::abs(v - mid) < std::abs(best - mid)) best = v;
      }
      return best;
    }
  }
  return 0.0;
}

double objective_value(const CoverageObjective& obj, double y) {
  switch (obj.kind) {
    case ObjectiveKind::gap_lower: return y - obj.bound;
    case ObjectiveKind::gap_upper: return obj.bound - y;
    case ObjectiveKind::bug_bin:
      return std::abs(y - 0.5 * (obj.illegal.lower() + obj.illegal.upper()));
  }
  return 0.0;
}

const Evaluation& OptimizationHistory::best() const {
  if (evaluations.empty()) fail(ErrorCode::InvalidArgument, "optimization history is empty");
  const Evaluation* b = &evaluations.front();
  for (const auto& e : evaluations) {
    if (e.objective < b->objective) b = &e;
  }
  return *b;
}

std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> pts(n, std::vector<double>(k));
  std::vector<std::size_t> perm(n);
  for (std::size_t d = 0; d < k; ++d) {
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(perm[i - 1], perm[j]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      pts[i][d] = (static_cast<double>(perm[i]) + uniform01(rng)) / static_cast<double>(n);
    }
  }
  return pts;
}

OptimizationHistory run_optimization(const CoverageObjective& obj, const ParameterSpace& space,
                                     const OptimizationSettings& settings) {
  validate(space);
  validate(obj.coverpoint);
  const auto k = space.dimension();
  const std::size_t n_init = settings.n_init == 0 ? std::max<std::size_t>(2, 2 * k) : settings.n_init;
  if (n_init < 2) fail(ErrorCode::InvalidArgument, "n_init must be at least 2");
  if (settings.budget < n_init) {
    fail(ErrorCode::InvalidArgument, "budget " + std::to_string(settings.budget) +
                                         " is below n_init " + std::to_string(n_init));
  }
  if (!obj.simulate) fail(ErrorCode::InvalidArgument, "objective has no simulator");
  if (obj.kind == ObjectiveKind::bug_bin && !(obj.illegal.width() > 0.0)) {
    fail(ErrorCode::InvalidArgument, "bug bin must have d > c");
  }
  if (!std::isfinite(obj.bound)) fail(ErrorCode::InvalidArgument, "objective bound must be finite");
  if (settings.database) settings.database->add_coverpoint(obj.coverpoint.id);

  OptimizationHistory h;
  h.kind = obj.kind;
  h.coverpoint_id = obj.coverpoint.id;
  h.bound = obj.bound;
  h.illegal = obj.illegal;
  h.space = space;
  h.settings = settings;
  h.settings.n_init = n_init;
  h.settings.database = nullptr;

  auto observe = [&](std::vector<double> x, bool initial, std::optional<double> ei) {
    Evaluation e;
    e.iteration = h.evaluations.size() + 1;
    e.initial = initial;
    e.x = std::move(x);
    e.ei = ei;
    try {
      Trace t = obj.simulate(e.x);
      CoverageResult r = evaluate(obj.coverpoint, t, obj.grid);
      e.y = observed_value(obj, r.output);
      if (settings.database) {
        std::vector<std::pair<std::string, std::string>> inputs;
        for (std::size_t d = 0; d < k; ++d) {
          inputs.emplace_back("x" + std::to_string(d), text::format_real(e.x[d]));
        }
        settings.database->accumulate(settings.test_prefix + "-" + std::to_string(e.iteration),
                                      {r}, {}, std::move(inputs));
      }
    } catch (const Error& err) {
      throw OptimizationError(ErrorCode::SimulatorError,
                              "evaluation " + std::to_string(e.iteration) + ": " + err.what(), h);
    } catch (const std::exception& err) {
      throw OptimizationError(ErrorCode::SimulatorError,
                              "evaluation " + std::to_string(e.iteration) + ": " + err.what(), h);
    }
    e.objective = objective_value(obj, e.y);
    e.incumbent = h.evaluations.empty() ? e.objective
                                        : std::min(h.evaluations.back().incumbent, e.objective);
    e.bug = obj.kind == ObjectiveKind::bug_bin && obj.illegal.contains(e.y);
    if (e.bug) h.bug_hit = true;
    h.evaluations.push_back(std::move(e));
    return h.bug_hit;
  };

  auto to_space = [&](const std::vector<double>& u) {
    std::vector<double> x(k);
    for (std::size_t d = 0; d < k; ++d) {
      x[d] = std::clamp(space.bounds[d].lower() + u[d] * space.bounds[d].width(),
                        space.bounds[d].lower(), space.bounds[d].upper());
    }
    return x;
  };

  for (const auto& u : latin_hypercube(n_init, k, settings.seed)) {
    if (observe(to_space(u), true, std::nullopt)) return h;
  }

  ParameterSpace unit;
  unit.bounds.assign(k, Bin::closed(0.0, 1.0));
  while (h.evaluations.size() < settings.budget) {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (const auto& e : h.evaluations) {
      std::vector<double> u(k);
      for (std::size_t d = 0; d < k; ++d) {
        u[d] = (e.x[d] - space.bounds[d].lower()) / space.bounds[d].width();
      }
      X.push_back(std::move(u));
      y.push_back(e.objective);
    }
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    double sd = std::sqrt(var / static_cast<double>(y.size()));
    if (!(sd > 0.0)) sd = 1.0;
    for (double& v : y) v = (v - mean) / sd;

    Suggestion next;
    try {
      EiState state = make_ei_state(gp_fit(X, y));
      next = suggest_next(state, unit, splitmix64(settings.seed + h.evaluations.size()));
    } catch (const Error& err) {
      throw OptimizationError(err.code(), err.what(), h);
    }
    if (observe(to_space(next.x), false, next.ei * sd)) return h;
  }
  return h;
}

void write_history_csv(const OptimizationHistory& h, std::ostream& out) {
  const auto k = h.space.dimension();
  out << "iteration,phase";
  for (std::size_t d = 0; d < k; ++d) out << ",x" << d;
  out << ",y,objective,incumbent,ei\n";
  for (const auto& e : h.evaluations) {
    out << e.iteration << ',' << (e.initial ? "init" : "ei");
    for (double v : e.x) out << ',' << text::format_real(v);
    out << ',' << text::format_real(e.y) << ',' << text::format_real(e.objective) << ','
        << text::format_real(e.incumbent) << ',';
    if (e.ei) out << text::format_real(*e.ei);
    out << '\n';
  }
}

void write_summary(const OptimizationHistory& h, std::ostream& out, std::string_view timestamp) {
  if (!timestamp.empty()) out << "timestamp=" << timestamp << '\n';
  out << "objective=" << to_string(h.kind) << '\n';
  out << "coverpoint=" << h.coverpoint_id << '\n';
  if (h.kind == ObjectiveKind::bug_bin) {
    out << "illegal=" << h.illegal.to_string() << '\n';
  } else {
    out << "bound=" << text::format_real(h.bound) << '\n';
  }
  out << "seed=" << h.settings.seed << '\n';
  out << "budget=" << h.settings.budget << '\n';
  out << "n_init=" << h.settings.n_init << '\n';
  for (std::size_t d = 0; d < h.space.dimension(); ++d) {
    out << "bounds.x" << d << '=' << h.space.bounds[d].to_string() << '\n';
  }
  out << "evaluations=" << h.evaluations.size() << '\n';
  if (!h.evaluations.empty()) {
    const auto& b = h.best();
    out << "best_iteration=" << b.iteration << '\n';
    for (std::size_t d = 0; d < b.x.size(); ++d) {
      out << "best.x" << d << '=' << text::format_real(b.x[d]) << '\n';
    }
    out << "best_y=" << text::format_real(b.y) << '\n';
    out << "best_objective=" << text::format_real(b.objective) << '\n';
  }
  out << "bug_hit=" << (h.bug_hit ? "true" : "false") << '\n';
}

}  // namespace amscov
