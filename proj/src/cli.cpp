// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include "amscov/cli.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "amscov/bayes_opt.hpp"
#include "amscov/config.hpp"
#include "amscov/coverage.hpp"
#include "amscov/coverage_space.hpp"
#include "amscov/error.hpp"
#include "amscov/freq_explorer.hpp"
#include "amscov/text.hpp"

namespace amscov::cli {

namespace fs = std::filesystem;

namespace {

// Configuration problems detected before any work starts.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Exclusive advisory lock on `<db>.lock` for the lifetime of the object.
class DatabaseLock {
 public:
  explicit DatabaseLock(const fs::path& db) {
    auto lock_path = db;
    lock_path += ".lock";
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) fail(ErrorCode::IoError, "cannot open lock file " + lock_path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      fail(ErrorCode::IoError, "cannot lock " + lock_path.string());
    }
  }
  ~DatabaseLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  DatabaseLock(const DatabaseLock&) = delete;
  DatabaseLock& operator=(const DatabaseLock&) = delete;

 private:
  int fd_ = -1;
};

CoverageDatabase restore_or_empty(const fs::path& path, std::ostream& err) {
  if (!fs::exists(path)) {
    err << "warning: database " << path.string() << " does not exist; treating it as empty\n";
    return {};
  }
  return restore(path);
}

// Loads, lets `update` add tests, and persists, all under the lock.
template <typename F>
void update_database(const fs::path& path, F&& update) {
  DatabaseLock lock(path);
  CoverageDatabase db = fs::exists(path) ? restore(path) : CoverageDatabase{};
  update(db);
  persist(db, path);
}

template <typename F>
auto load_or_usage(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw UsageError(what + ": " + e.what());
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

std::string next_test_id(const CoverageDatabase& db, const std::string& prefix) {
  for (std::size_t n = db.tests().size() + 1;; ++n) {
    std::string id = prefix + "-" + std::to_string(n);
    bool taken = std::any_of(db.tests().begin(), db.tests().end(),
                             [&](const TestRecord& t) { return t.id == id; });
    if (!taken) return id;
  }
}

struct BugHit {
  std::string coverpoint;
  BinSet bins;
};

std::vector<BugHit> bug_hits(const std::vector<CoverageResult>& results, const TargetSpec& targets) {
  std::vector<BugHit> hits;
  for (const auto& r : results) {
    auto it = targets.find(r.coverpoint_id);
    if (it == targets.end()) continue;
    BinSet hit = set_intersect(BinSet(r.cells), it->second.illegal);
    if (!hit.empty()) hits.push_back({r.coverpoint_id, hit});
  }
  return hits;
}

void write_run_report(std::ostream& out, const std::string& test_id,
                      const std::vector<CoverageResult>& results, const std::vector<BugHit>& bugs) {
  out << "test " << test_id << '\n';
  for (const auto& r : results) {
    out << "  " << r.coverpoint_id << ": ";
    if (!r.values.empty()) {
      auto [lo, hi] = std::minmax_element(r.values.begin(), r.values.end());
      out << r.values.size() << " value(s) in " << Bin::closed(*lo, *hi).to_string();
    } else {
      out << "output " << r.output.to_string();
    }
    out << ", " << r.cells.size() << " cell(s)";
    if (!r.untargeted.empty()) out << ", untargeted " << r.untargeted.to_string();
    if (!r.note.empty()) out << " (" << r.note << ')';
    out << '\n';
  }
  for (const auto& b : bugs) {
    out << "BUG " << b.coverpoint << " reached illegal bins " << b.bins.to_string() << '\n';
  }
}

std::vector<CoverageResult> evaluate_all(const CoverSpec& spec, const Trace& t) {
  std::vector<CoverageResult> results;
  for (const auto& cp : spec.coverpoints) results.push_back(evaluate(cp, t, spec.targets.at(cp.id).grid));
  return results;
}

// --- cover -----------------------------------------------------------------

struct CoverArgs {
  std::string spec, db, trace, model, out_dir, test_id;
  bool no_timestamp = false;
};

int cmd_cover(const CoverArgs& a, std::ostream& out, std::ostream& err) {
  if (a.trace.empty() == a.model.empty()) throw UsageError("cover needs exactly one of --trace or --model");
  auto spec = load_or_usage("spec", [&] { return load_cover_spec(a.spec); });
  std::optional<ModelConfig> model;
  if (!a.model.empty()) model = load_or_usage("model", [&] { return load_model_config(a.model); });
  if (!a.test_id.empty() && !text::is_identifier(a.test_id)) throw UsageError("bad test id '" + a.test_id + "'");

  Trace t = model ? simulate(*model)
                  : load_or_usage("trace", [&] { return load_trace(a.trace); });
  auto results = evaluate_all(spec, t);
  auto bugs = bug_hits(results, spec.targets);

  std::string test_id = a.test_id;
  std::vector<std::pair<std::string, std::string>> inputs;
  inputs.emplace_back("source", a.trace.empty() ? fs::path(a.model).filename().string()
                                                : fs::path(a.trace).filename().string());
  update_database(a.db, [&](CoverageDatabase& db) {
    for (const auto& cp : spec.coverpoints) db.add_coverpoint(cp.id);
    if (test_id.empty()) test_id = next_test_id(db, "run");
    db.accumulate(test_id, results, a.no_timestamp ? std::string{} : utc_now(), inputs);
  });

  write_run_report(out, test_id, results, bugs);
  if (!a.out_dir.empty()) {
    ensure_dir(a.out_dir);
    auto f = open_output(fs::path(a.out_dir) / (test_id + ".report.txt"));
    write_run_report(f, test_id, results, bugs);
  }
  (void)err;
  return bugs.empty() ? kSuccess : kBugHit;
}

// --- bode-explore ------------------------------------------------------------

struct BodeArgs {
  std::string model, out_dir, spec, db;
  double amplitude = 1.0;
  std::vector<double> compare;
  double dt = 0.0, duration = 0.0, f_lo = 0.0, f_hi = 0.0;
  int ppd = 200;
};

std::string frequency_label(double f) {
  std::string s = text::format_real(f);
  std::replace(s.begin(), s.end(), '+', 'p');
  return s;
}

int cmd_bode_explore(const BodeArgs& a, std::ostream& out, std::ostream& err) {
  auto cfg = load_or_usage("model", [&] { return load_model_config(a.model); });
  if (!cfg.lti) throw UsageError("bode-explore needs a transfer-function model");
  std::optional<CoverSpec> spec;
  if (!a.spec.empty()) spec = load_or_usage("spec", [&] { return load_cover_spec(a.spec); });
  if (spec.has_value() != !a.db.empty()) throw UsageError("--spec and --db go together");

  ExploreOptions opt;
  opt.amplitude = a.amplitude;
  opt.dt = a.dt;
  opt.duration = a.duration;
  opt.f_lo = a.f_lo;
  opt.f_hi = a.f_hi;
  opt.points_per_decade = a.ppd;
  opt.comparison_freqs = a.compare;
  if (opt.comparison_freqs.empty()) {
    // The comparisons sit a decade either side of the peak.
    auto [lo, hi] = sweep_band(*cfg.lti);
    if (opt.f_lo > 0.0) lo = opt.f_lo;
    if (opt.f_hi > 0.0) hi = opt.f_hi;
    double fp = find_peaks(ac_analysis(*cfg.lti, lo, hi, opt.points_per_decade)).global_peak().frequency;
    opt.comparison_freqs = {0.1 * fp, 10.0 * fp};
  }
  auto rep = explore(*cfg.lti, opt);

  ensure_dir(a.out_dir);
  {
    auto f = open_output(fs::path(a.out_dir) / "bode.csv");
    f << "frequency,gain_db,phase_deg\n";
    for (std::size_t i = 0; i < rep.bode.frequencies.size(); ++i) {
      f << text::format_real(rep.bode.frequencies[i]) << ',' << text::format_real(rep.bode.gain_db[i])
        << ',' << text::format_real(rep.bode.phase_deg[i]) << '\n';
    }
  }
  {
    auto f = open_output(fs::path(a.out_dir) / "exploration.csv");
    f << "frequency,gain_db,expected_width,range_lower,range_upper,range_width,peak\n";
    for (const auto& r : rep.rows) {
      f << text::format_real(r.frequency) << ',' << text::format_real(r.gain_db) << ','
        << text::format_real(r.expected_width) << ',' << text::format_real(r.output_range.lower())
        << ',' << text::format_real(r.output_range.upper()) << ',' << text::format_real(r.range_width)
        << ',' << (r.is_peak ? 1 : 0) << '\n';
    }
  }
  ensure_dir(fs::path(a.out_dir) / "traces");
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    save_trace(fs::path(a.out_dir) / "traces" / ("sine_" + frequency_label(rep.rows[i].frequency) + "Hz.csv"),
               rep.traces[i]);
  }

  out << "peak " << text::format_real(rep.peaks.global_peak().frequency) << " Hz, "
      << text::format_real(rep.peaks.global_peak().gain_db) << " dB"
      << (rep.peaks.endpoint() ? " (sweep endpoint, no interior maximum)" : "") << '\n';
  out << "settle " << text::format_real(rep.settle_time) << " s, dt " << text::format_real(rep.dt)
      << " s, duration " << text::format_real(rep.duration) << " s\n";
  auto rounded = [](double v, double scale) { return text::format_real(std::round(v * scale) / scale); };
  out << std::left << std::setw(16) << "frequency_hz" << ' ' << std::setw(12) << "gain_db" << ' '
      << std::setw(15) << "expected_width" << ' ' << std::setw(12) << "range_width" << " peak\n";
  for (const auto& r : rep.rows) {
    out << std::left << std::setw(16) << rounded(r.frequency, 1e3) << ' ' << std::setw(12)
        << rounded(r.gain_db, 1e4) << ' ' << std::setw(15) << rounded(r.expected_width, 1e6) << ' '
        << std::setw(12) << rounded(r.range_width, 1e6) << (r.is_peak ? " *" : "") << '\n';
  }

  int status = kSuccess;
  if (spec) {
    update_database(a.db, [&](CoverageDatabase& db) {
      for (const auto& cp : spec->coverpoints) db.add_coverpoint(cp.id);
      for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        auto results = evaluate_all(*spec, rep.traces[i]);
        auto bugs = bug_hits(results, spec->targets);
        std::string id = next_test_id(db, "bode");
        db.accumulate(id, results, {}, {{"frequency", text::format_real(rep.rows[i].frequency)},
                                        {"amplitude", text::format_real(a.amplitude)}});
        if (!bugs.empty()) {
          write_run_report(out, id, results, bugs);
          status = kBugHit;
        }
      }
    });
  }
  (void)err;
  return status;
}

// --- bayes-opt ---------------------------------------------------------------

struct BayesArgs {
  std::string model, spec, coverpoint, objective = "gap_lower", out_dir, db, bound, illegal;
  std::size_t budget = 20, n_init = 0;
  std::uint64_t seed = 1;
};

int cmd_bayes_opt(const BayesArgs& a, std::ostream& out, std::ostream& err) {
  auto cfg = load_or_usage("model", [&] { return load_model_config(a.model); });
  auto spec = load_or_usage("spec", [&] { return load_cover_spec(a.spec); });
  ObjectiveKind kind = load_or_usage("objective", [&] { return parse_objective_kind(a.objective); });
  if (cfg.parameters.empty()) throw UsageError("model declares no [optimize] parameters");

  std::string cp_id = a.coverpoint;
  if (cp_id.empty()) {
    if (spec.coverpoints.size() != 1) throw UsageError("--coverpoint is required when the spec has several");
    cp_id = spec.coverpoints.front().id;
  }
  auto cp_it = std::find_if(spec.coverpoints.begin(), spec.coverpoints.end(),
                            [&](const CoverPoint& c) { return c.id == cp_id; });
  if (cp_it == spec.coverpoints.end()) throw UsageError("coverpoint '" + cp_id + "' not in spec");
  const CoverTarget& target = spec.targets.at(cp_id);

  ParameterSpace space;
  for (const auto& [name, b] : cfg.parameters) space.bounds.push_back(b);
  const std::size_t n_init = a.n_init == 0 ? std::max<std::size_t>(2, 2 * space.dimension()) : a.n_init;
  if (n_init < 2) throw UsageError("--n-init must be at least 2");
  if (a.budget <= n_init) {
    throw UsageError("budget " + std::to_string(a.budget) + " must exceed n_init " + std::to_string(n_init));
  }

  CoverageObjective obj;
  obj.kind = kind;
  obj.coverpoint = *cp_it;
  obj.grid = target.grid;
  if (kind == ObjectiveKind::bug_bin) {
    if (!a.illegal.empty()) {
      obj.illegal = load_or_usage("illegal", [&] { return parse_bin(a.illegal); });
    } else if (!target.illegal.empty()) {
      obj.illegal = target.illegal.bins().front();
    } else {
      throw UsageError("bug_bin needs --illegal or an illegal bin in the spec");
    }
    if (!(obj.illegal.width() > 0.0)) throw UsageError("illegal bin must have d > c");
  } else if (!a.bound.empty()) {
    obj.bound = load_or_usage("bound", [&] { return parse_quantity(a.bound); });
  } else {
    const BinSet& legal = target.legal.empty() ? BinSet{target.grid.domain()} : target.legal;
    obj.bound = kind == ObjectiveKind::gap_lower ? legal.bins().front().lower() : legal.bins().back().upper();
  }
  if (cfg.static_model) {
    obj.simulate = [&cfg](std::span<const double> x) { return simulate_static(cfg, x[0]); };
  } else {
    obj.simulate = [&cfg](std::span<const double> x) { return simulate_sine(cfg, x); };
  }

  OptimizationSettings settings;
  settings.budget = a.budget;
  settings.n_init = n_init;
  settings.seed = a.seed;
  CoverageDatabase db_delta;
  if (!a.db.empty()) {
    settings.database = &db_delta;
    settings.test_prefix = "bo-s" + std::to_string(a.seed);
  }

  auto write_outputs = [&](const OptimizationHistory& h) {
    ensure_dir(a.out_dir);
    auto csv = open_output(fs::path(a.out_dir) / "history.csv");
    write_history_csv(h, csv);
    auto sum = open_output(fs::path(a.out_dir) / "summary.txt");
    write_summary(h, sum, utc_now());
    sum << "model=" << fs::path(a.model).filename().string() << '\n';
    sum << "spec=" << fs::path(a.spec).filename().string() << '\n';
  };

  OptimizationHistory h;
  try {
    h = run_optimization(obj, space, settings);
  } catch (const OptimizationError& e) {
    write_outputs(e.history());
    throw;
  }
  write_outputs(h);

  if (!a.db.empty()) {
    update_database(a.db, [&](CoverageDatabase& db) {
      db.add_coverpoint(cp_id);
      for (const auto& t : db_delta.tests()) {
        std::vector<CoverageResult> results;
        CoverageResult r;
        r.coverpoint_id = cp_id;
        auto hit = t.hits.find(cp_id);
        if (hit != t.hits.end()) r.cells = hit->second;
        auto un = t.untargeted.find(cp_id);
        if (un != t.untargeted.end()) r.untargeted = un->second;
        results.push_back(std::move(r));
        std::string id = t.id;
        for (int k = 2; std::any_of(db.tests().begin(), db.tests().end(),
                                    [&](const TestRecord& x) { return x.id == id; });
             ++k) {
          id = t.id + "." + std::to_string(k);
        }
        db.accumulate(id, results, t.timestamp, t.inputs);
      }
    });
  }

  const auto& best = h.best();
  out << "objective " << to_string(h.kind) << " on " << cp_id << ", " << h.evaluations.size()
      << " evaluation(s), seed " << a.seed << '\n';
  out << "best iteration " << best.iteration << ": x =";
  for (double v : best.x) out << ' ' << text::format_real(v);
  out << ", y = " << text::format_real(best.y) << ", objective = " << text::format_real(best.objective)
      << '\n';
  if (h.bug_hit) {
    out << "BUG " << cp_id << " reached illegal bin " << obj.illegal.to_string() << " at iteration "
        << h.evaluations.back().iteration << '\n';
  }
  (void)err;
  return h.bug_hit ? kBugHit : kSuccess;
}

// --- report ------------------------------------------------------------------

struct ReportArgs {
  std::string spec, db, out_dir;
  bool records = false;
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  auto spec = load_or_usage("spec", [&] { return load_cover_spec(a.spec); });
  CoverageDatabase db;
  {
    DatabaseLock lock(a.db);
    db = restore_or_empty(a.db, err);
  }
  GapReport rep = gap_report(db, spec.targets);
  if (a.records) write_report_records(out, rep);
  else write_report_text(out, rep);
  if (!a.out_dir.empty()) {
    ensure_dir(a.out_dir);
    auto f = open_output(fs::path(a.out_dir) / "report.txt");
    write_report_records(f, rep);
  }
  return rep.has_bugs() ? kBugHit : kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coverage analysis and coverage-directed stimulus for analog circuit models"};
  app.name(args.empty() ? "amscov" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);

  CoverArgs cover;
  auto* c = app.add_subcommand("cover", "Evaluate coverpoints on one trace and add it to the database");
  c->add_option("--spec", cover.spec, "Coverpoint spec")->required()->check(CLI::ExistingFile);
  c->add_option("--db", cover.db, "Coverage database (created if missing)")->required();
  c->add_option("--trace", cover.trace, "Trace CSV")->check(CLI::ExistingFile);
  c->add_option("--model", cover.model, "Model config with a [stimulus] to simulate")->check(CLI::ExistingFile);
  c->add_option("--test-id", cover.test_id, "Test id (default run-<n>)");
  c->add_option("--out", cover.out_dir, "Directory for the run report");
  c->add_flag("--no-timestamp", cover.no_timestamp, "Do not record the wall-clock time");

  BodeArgs bode;
  auto* b = app.add_subcommand("bode-explore", "Drive the model at its Bode peak and compare output ranges");
  b->add_option("--model", bode.model, "Transfer-function model config")->required()->check(CLI::ExistingFile);
  b->add_option("--out", bode.out_dir, "Output directory")->required();
  b->add_option("--amplitude", bode.amplitude, "Sine amplitude")->check(CLI::PositiveNumber);
  b->add_option("--compare", bode.compare, "Comparison frequencies in Hz (default 0.1x and 10x the peak)")
      ->delimiter(',');
  b->add_option("--dt", bode.dt, "Time step in s (default automatic)");
  b->add_option("--duration", bode.duration, "Transient length in s (default automatic)");
  b->add_option("--f-lo", bode.f_lo, "Sweep start in Hz (default from poles)");
  b->add_option("--f-hi", bode.f_hi, "Sweep stop in Hz (default from poles)");
  b->add_option("--points-per-decade", bode.ppd, "AC sweep density")->check(CLI::PositiveNumber);
  b->add_option("--spec", bode.spec, "Coverpoint spec; with --db each transient is accumulated")
      ->check(CLI::ExistingFile);
  b->add_option("--db", bode.db, "Coverage database");

  BayesArgs bo;
  auto* o = app.add_subcommand("bayes-opt", "Search model inputs with Expected Improvement");
  o->add_option("--model", bo.model, "Model config with an [optimize] section")->required()->check(CLI::ExistingFile);
  o->add_option("--spec", bo.spec, "Coverpoint spec")->required()->check(CLI::ExistingFile);
  o->add_option("--coverpoint", bo.coverpoint, "Coverpoint id (default the only one)");
  o->add_option("--objective", bo.objective, "gap_lower, gap_upper or bug_bin");
  o->add_option("--bound", bo.bound, "Gap bound a or b (default the legal set's end)");
  o->add_option("--illegal", bo.illegal, "Illegal bin [c:d] (default the first spec illegal bin)");
  o->add_option("--budget", bo.budget, "Total evaluations");
  o->add_option("--n-init", bo.n_init, "Initial design size (default max(2, 2k))");
  o->add_option("--seed", bo.seed, "Random seed");
  o->add_option("--out", bo.out_dir, "Output directory")->required();
  o->add_option("--db", bo.db, "Coverage database to grow with every evaluation");

  ReportArgs report;
  auto* r = app.add_subcommand("report", "Print coverage gaps and bug hits");
  r->add_option("--spec", report.spec, "Coverpoint spec")->required()->check(CLI::ExistingFile);
  r->add_option("--db", report.db, "Coverage database")->required();
  r->add_option("--out", report.out_dir, "Directory for report.txt");
  r->add_flag("--records", report.records, "key=value output");

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  if (argv.empty()) argv.push_back("amscov");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
  }

  try {
    if (c->parsed()) return cmd_cover(cover, out, err);
    if (b->parsed()) return cmd_bode_explore(bode, out, err);
    if (o->parsed()) return cmd_bayes_opt(bo, out, err);
    if (r->parsed()) return cmd_report(report, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

}  // namespace amscov::cli
