// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "amscov/bayes_opt.hpp"
#include "amscov/bins.hpp"
#include "amscov/circuit_sim.hpp"
#include "amscov/config.hpp"
#include "amscov/coverage.hpp"
#include "amscov/coverage_space.hpp"
#include "amscov/error.hpp"
#include "amscov/freq_explorer.hpp"
#include "amscov/trace.hpp"

namespace py = pybind11;
using namespace amscov;

namespace {

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Analog coverage artifacts, coverage database and guided stimulus search";

  py::register_exception<Error>(m, "Error");

  py::class_<Bin>(m, "Bin")
      .def(py::init<double, double, bool, bool>(), py::arg("lower"), py::arg("upper"),
           py::arg("lower_closed") = true, py::arg("upper_closed") = true)
      .def_static("point", &Bin::point)
      .def_static("parse", [](const std::string& s) { return parse_bin(s); })
      .def_property_readonly("lower", &Bin::lower)
      .def_property_readonly("upper", &Bin::upper)
      .def_property_readonly("lower_closed", &Bin::lower_closed)
      .def_property_readonly("upper_closed", &Bin::upper_closed)
      .def_property_readonly("width", &Bin::width)
      .def("__contains__", &Bin::contains)
      .def(py::self == py::self)
      .def("__lt__", [](const Bin& a, const Bin& b) { return a < b; })
      .def("__hash__", [](const Bin& b) { return py::hash(py::str(b.to_string())); })
      .def("__str__", &Bin::to_string)
      .def("__repr__", [](const Bin& b) { return "Bin(" + b.to_string() + ")"; });

  py::class_<BinSet>(m, "BinSet")
      .def(py::init<>())
      .def(py::init<std::vector<Bin>>())
      .def_static("parse", [](const std::string& s) { return parse_bin_set(s); })
      .def_property_readonly("bins", &BinSet::bins)
      .def_property_readonly("measure", &BinSet::measure)
      .def("__contains__", &BinSet::contains)
      .def("__len__", &BinSet::size)
      .def("__or__", &set_union)
      .def("__sub__", &set_difference)
      .def("__and__", &set_intersect)
      .def(py::self == py::self)
      .def("__str__", &BinSet::to_string)
      .def("__repr__", [](const BinSet& s) { return "BinSet(" + s.to_string() + ")"; });

  py::class_<BinGrid>(m, "BinGrid")
      .def(py::init<double, double, Bin>(), py::arg("origin"), py::arg("granularity"), py::arg("domain"))
      .def_property_readonly("domain", &BinGrid::domain)
      .def_property_readonly("cell_count", &BinGrid::cell_count)
      .def("quantize", &BinGrid::quantize)
      .def("cells_overlapping", &BinGrid::cells_overlapping);

  py::class_<Trace>(m, "Trace")
      .def(py::init<std::vector<std::string>, std::vector<double>, std::vector<std::vector<double>>>(),
           py::arg("names"), py::arg("times"), py::arg("columns"))
      .def_property_readonly("signal_names", &Trace::signal_names)
      .def_property_readonly("times", [](const Trace& t) { return to_vector(t.times()); })
      .def("values", [](const Trace& t, const std::string& s) { return to_vector(t.values(s)); })
      .def("sample_at", &Trace::sample_at)
      .def("slice", &Trace::slice)
      .def("__len__", &Trace::sample_count);
  m.def("load_trace", &load_trace);
  m.def("save_trace", &save_trace);

  py::enum_<ArtifactKind>(m, "ArtifactKind")
      .value("range", ArtifactKind::range)
      .value("deglitched_range", ArtifactKind::deglitched_range)
      .value("level", ArtifactKind::level)
      .value("ddt", ArtifactKind::ddt)
      .value("delay", ArtifactKind::delay)
      .value("frequency", ArtifactKind::frequency);
  py::enum_<Direction>(m, "Direction").value("rising", Direction::rising).value("falling", Direction::falling);

  py::class_<Event>(m, "Event")
      .def(py::init([](std::string s, double thr, Direction d) { return Event{std::move(s), thr, d}; }),
           py::arg("signal"), py::arg("threshold"), py::arg("direction") = Direction::rising);

  py::class_<CoverPoint>(m, "CoverPoint")
      .def(py::init([](std::string id, ArtifactKind kind, std::string signal, std::optional<double> deglitch_time,
                       std::optional<double> level_time, std::optional<double> bin_granularity,
                       std::optional<double> time_granularity, std::optional<double> reference,
                       std::optional<double> window, std::optional<std::pair<Event, Event>> events,
                       bool halve_crossings) {
             CoverPoint cp{std::move(id), kind, std::move(signal), {}};
             cp.params = {deglitch_time, level_time, bin_granularity, time_granularity, reference,
                          window,        events,     halve_crossings};
             validate(cp);
             return cp;
           }),
           py::arg("id"), py::arg("kind"), py::arg("signal") = "", py::arg("deglitch_time") = py::none(),
           py::arg("level_time") = py::none(), py::arg("bin_granularity") = py::none(),
           py::arg("time_granularity") = py::none(), py::arg("reference") = py::none(),
           py::arg("window") = py::none(), py::arg("events") = py::none(), py::arg("halve_crossings") = false)
      .def_readonly("id", &CoverPoint::id)
      .def_readonly("kind", &CoverPoint::kind)
      .def_readonly("signal", &CoverPoint::signal);

  m.def("range_coverage", &range_coverage);
  m.def("deglitched_range_coverage", &deglitched_range_coverage);
  m.def("level_coverage", &level_coverage);
  m.def("ddt_coverage", &ddt_coverage);
  m.def("delay_values", &delay_values);
  m.def("delay_coverage", &delay_coverage);
  m.def("frequency_values", &frequency_values, py::arg("trace"), py::arg("signal"), py::arg("reference"),
        py::arg("window"), py::arg("halve_crossings") = false);

  py::class_<CoverageResult>(m, "CoverageResult")
      .def_readonly("coverpoint_id", &CoverageResult::coverpoint_id)
      .def_readonly("output", &CoverageResult::output)
      .def_readonly("values", &CoverageResult::values)
      .def_readonly("cells", &CoverageResult::cells)
      .def_readonly("untargeted", &CoverageResult::untargeted)
      .def_readonly("note", &CoverageResult::note);
  m.def("evaluate", &evaluate, py::arg("coverpoint"), py::arg("trace"), py::arg("grid"));

  py::class_<CoverTarget>(m, "CoverTarget")
      .def(py::init([](BinGrid g, BinSet legal, BinSet illegal) {
             CoverTarget t{std::move(g), std::move(legal), std::move(illegal)};
             validate(t);
             return t;
           }),
           py::arg("grid"), py::arg("legal"), py::arg("illegal") = BinSet{})
      .def_readonly("grid", &CoverTarget::grid)
      .def_readonly("legal", &CoverTarget::legal)
      .def_readonly("illegal", &CoverTarget::illegal);

  py::class_<CoverageDatabase>(m, "CoverageDatabase")
      .def(py::init<>())
      .def("add_coverpoint", &CoverageDatabase::add_coverpoint)
      .def("accumulate", &CoverageDatabase::accumulate, py::arg("test_id"), py::arg("results"),
           py::arg("timestamp") = "", py::arg("inputs") = std::vector<std::pair<std::string, std::string>>{})
      .def("covered", &CoverageDatabase::covered)
      .def_property_readonly("test_ids",
                             [](const CoverageDatabase& db) {
                               std::vector<std::string> ids;
                               for (const auto& t : db.tests()) ids.push_back(t.id);
                               return ids;
                             })
      .def(py::self == py::self);
  m.def("persist", &persist);
  m.def("restore", &restore);

  py::class_<CoverPointGap>(m, "CoverPointGap")
      .def_readonly("coverpoint_id", &CoverPointGap::coverpoint_id)
      .def_readonly("gap", &CoverPointGap::gap)
      .def_readonly("gap_fraction", &CoverPointGap::gap_fraction)
      .def_readonly("bug_hits", &CoverPointGap::bug_hits)
      .def_readonly("bug_tests", &CoverPointGap::bug_tests);
  m.def("gap_report", [](const CoverageDatabase& db, const std::map<std::string, CoverTarget>& targets) {
    TargetSpec spec(targets.begin(), targets.end());
    return gap_report(db, spec).coverpoints;
  });

  py::class_<LtiModel>(m, "LtiModel")
      .def(py::init<std::vector<double>, std::vector<double>, std::string>(), py::arg("numerator"),
           py::arg("denominator"), py::arg("label") = "")
      .def_static("lowpass2", &LtiModel::lowpass2, py::arg("f0"), py::arg("q"), py::arg("dc_gain") = 1.0)
      .def_static("lowpass1", &LtiModel::lowpass1, py::arg("fc"), py::arg("dc_gain") = 1.0)
      .def("response", &LtiModel::response)
      .def_property_readonly("poles", &LtiModel::poles);

  py::class_<BodePlot>(m, "BodePlot")
      .def_readonly("frequencies", &BodePlot::frequencies)
      .def_readonly("gain_db", &BodePlot::gain_db)
      .def_readonly("phase_deg", &BodePlot::phase_deg);
  m.def("ac_analysis", &ac_analysis, py::arg("model"), py::arg("f_lo"), py::arg("f_hi"),
        py::arg("points_per_decade") = 100);
  py::class_<Sine>(m, "Sine").def(py::init([](double a, double f, double ph, double off) { return Sine{a, f, ph, off}; }),
                                  py::arg("amplitude") = 1.0, py::arg("frequency") = 1.0, py::arg("phase") = 0.0,
                                  py::arg("offset") = 0.0);
  py::class_<Step>(m, "Step").def(py::init([](double a, double d, double i) { return Step{a, d, i}; }),
                                  py::arg("amplitude") = 1.0, py::arg("delay") = 0.0, py::arg("initial") = 0.0);
  m.def("transient", [](const LtiModel& model, const Sine& s, double dt, double duration) {
    return transient(model, s, dt, duration);
  });
  m.def("transient", [](const LtiModel& model, const Step& s, double dt, double duration) {
    return transient(model, s, dt, duration);
  });

  py::class_<ExplorationRow>(m, "ExplorationRow")
      .def_readonly("frequency", &ExplorationRow::frequency)
      .def_readonly("gain_db", &ExplorationRow::gain_db)
      .def_readonly("expected_width", &ExplorationRow::expected_width)
      .def_readonly("range_width", &ExplorationRow::range_width)
      .def_readonly("is_peak", &ExplorationRow::is_peak);
  py::class_<ExplorationReport>(m, "ExplorationReport")
      .def_readonly("rows", &ExplorationReport::rows)
      .def_property_readonly("peak_frequency",
                             [](const ExplorationReport& r) { return r.peaks.global_peak().frequency; });
  m.def(
      "explore",
      [](const LtiModel& model, double amplitude, std::vector<double> compare, double dt, double duration) {
        ExploreOptions o;
        o.amplitude = amplitude;
        o.comparison_freqs = std::move(compare);
        o.dt = dt;
        o.duration = duration;
        return explore(model, o);
      },
      py::arg("model"), py::arg("amplitude") = 1.0, py::arg("comparison_freqs") = std::vector<double>{},
      py::arg("dt") = 0.0, py::arg("duration") = 0.0);

  py::class_<GpPosterior>(m, "GpPosterior")
      .def("predict",
           [](const GpPosterior& p, std::vector<double> x) {
             auto r = p.predict(x);
             return std::pair{r.mean, r.stddev};
           })
      .def_property_readonly("length_scales", [](const GpPosterior& p) { return p.hyperparameters().length_scales; })
      .def_property_readonly("log_marginal_likelihood", &GpPosterior::log_marginal_likelihood);
  m.def(
      "gp_fit",
      [](const std::vector<std::vector<double>>& X, const std::vector<double>& y,
         std::optional<std::vector<double>> length_scales, double signal_variance, double jitter) {
        std::optional<GpHyperparameters> hp;
        if (length_scales) hp = GpHyperparameters{*length_scales, signal_variance, jitter, std::max(jitter, 1e-6)};
        return gp_fit(X, y, hp);
      },
      py::arg("X"), py::arg("y"), py::arg("length_scales") = py::none(), py::arg("signal_variance") = 1.0,
      py::arg("jitter") = 1e-13);
  m.def("expected_improvement", &expected_improvement, py::arg("mu"), py::arg("sigma"), py::arg("f_star"));
  m.def("latin_hypercube", &latin_hypercube, py::arg("n"), py::arg("k"), py::arg("seed"));

  m.def(
      "optimize_static",
      [](const std::string& model_path, const std::string& spec_path, const std::string& objective, double bound,
         std::optional<Bin> illegal, std::size_t budget, std::uint64_t seed) {
        auto cfg = load_model_config(model_path);
        auto spec = load_cover_spec(spec_path);
        if (!cfg.static_model) fail(ErrorCode::InvalidArgument, "optimize_static needs a static model");
        if (spec.coverpoints.empty()) fail(ErrorCode::InvalidArgument, "spec has no coverpoints");
        CoverageObjective obj;
        obj.kind = parse_objective_kind(objective);
        obj.bound = bound;
        if (illegal) obj.illegal = *illegal;
        obj.coverpoint = spec.coverpoints.front();
        obj.grid = spec.targets.at(obj.coverpoint.id).grid;
        obj.simulate = [&cfg](std::span<const double> x) { return simulate_static(cfg, x[0]); };
        ParameterSpace space;
        for (const auto& [name, b] : cfg.parameters) space.bounds.push_back(b);
        OptimizationSettings s;
        s.budget = budget;
        s.seed = seed;
        auto h = run_optimization(obj, space, s);
        py::list rows;
        for (const auto& e : h.evaluations) {
          py::dict d;
          d["iteration"] = e.iteration;
          d["x"] = e.x;
          d["y"] = e.y;
          d["objective"] = e.objective;
          d["incumbent"] = e.incumbent;
          d["bug"] = e.bug;
          rows.append(d);
        }
        std::ostringstream csv;
        write_history_csv(h, csv);
        py::dict out;
        out["evaluations"] = rows;
        out["bug_hit"] = h.bug_hit;
        out["csv"] = csv.str();
        return out;
      },
      py::arg("model"), py::arg("spec"), py::arg("objective") = "gap_lower", py::arg("bound") = 0.0,
      py::arg("illegal") = py::none(), py::arg("budget") = 20, py::arg("seed") = 0);
}
