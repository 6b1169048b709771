// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include "amscov/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <set>

#include "amscov/error.hpp"
#include "amscov/text.hpp"

namespace amscov {

namespace {

// Submultiples divide rather than multiply so "50us" parses to the same
// double as 5e-05.
struct Unit {
  std::string_view suffix;
  double multiplier;
  double divisor;
};

// Longer suffixes first so "ms" wins over "s".
constexpr std::array<Unit, 12> kUnits{{{"kHz", 1e3, 1.0},
                                       {"MHz", 1e6, 1.0},
                                       {"Hz", 1.0, 1.0},
                                       {"ms", 1.0, 1e3},
                                       {"us", 1.0, 1e6},
                                       {"ns", 1.0, 1e9},
                                       {"mV", 1.0, 1e3},
                                       {"mA", 1.0, 1e3},
                                       {"uA", 1.0, 1e6},
                                       {"s", 1.0, 1.0},
                                       {"V", 1.0, 1.0},
                                       {"A", 1.0, 1.0}}};

[[noreturn]] void parse_fail(std::string_view source, std::size_t line, const std::string& what) {
  fail(ErrorCode::ParseError, std::string(source) + ":" + std::to_string(line) + ": " + what);
}

// Reads a section's entries with per-key line numbers, rejecting unknown
// and repeated keys.
class SectionReader {
 public:
  SectionReader(const ConfigSection& s, std::string_view source, std::set<std::string> allowed)
      : s_(s), source_(source) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
      const auto& key = s.entries[i].first;
      if (!allowed.count(key)) {
        parse_fail(source, s.entry_lines[i], "unknown key '" + key + "' in [" + s.kind + "]");
      }
      if (!seen.insert(key).second) parse_fail(source, s.entry_lines[i], "repeated key '" + key + "'");
    }
  }

  std::optional<std::string> raw(std::string_view key) const {
    for (const auto& [k, v] : s_.entries) {
      if (k == key) return v;
    }
    return std::nullopt;
  }

  std::size_t line_of(std::string_view key) const {
    for (std::size_t i = 0; i < s_.entries.size(); ++i) {
      if (s_.entries[i].first == key) return s_.entry_lines[i];
    }
    return s_.line;
  }

  std::string value_of(std::string_view key) const {
    auto v = raw(key);
    if (!v) parse_fail(source_, s_.line, "[" + s_.kind + "] needs '" + std::string(key) + "'");
    return *v;
  }

  template <typename F>
  auto wrap(std::string_view key, F&& f) const {
    try {
      return f(value_of(key));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError && std::string_view(e.what()).starts_with(source_)) throw;
      parse_fail(source_, line_of(key), std::string(key) + ": " + e.what());
    }
  }

  std::optional<double> number(std::string_view key) const {
    if (!raw(key)) return std::nullopt;
    return wrap(key, [](const std::string& v) { return parse_quantity(v); });
  }
  double number(std::string_view key, double fallback) const { return number(key).value_or(fallback); }
  double required_number(std::string_view key) const {
    return wrap(key, [](const std::string& v) { return parse_quantity(v); });
  }

  std::vector<double> numbers(std::string_view key) const {
    return wrap(key, [](const std::string& v) {
      std::vector<double> out;
      for (auto tok : text::split_ws(v)) out.push_back(parse_quantity(tok));
      return out;
    });
  }

  std::optional<Bin> bin(std::string_view key) const {
    if (!raw(key)) return std::nullopt;
    return wrap(key, [](const std::string& v) { return parse_bin(text::trim(v)); });
  }

  std::optional<BinSet> bin_set(std::string_view key) const {
    if (!raw(key)) return std::nullopt;
    return wrap(key, [](const std::string& v) { return parse_bin_set(v); });
  }

  bool flag(std::string_view key) const {
    auto v = raw(key);
    if (!v) return false;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    parse_fail(source_, line_of(key), std::string(key) + ": expected true or false");
  }

  const ConfigSection& section() const noexcept { return s_; }

 private:
  const ConfigSection& s_;
  std::string_view source_;
};

Event parse_event(std::string_view text) {
  auto parts = text::split_ws(text);
  if (parts.size() != 3) fail(ErrorCode::ParseError, "expected '<signal> rising|falling <threshold>'");
  Event e;
  e.signal = std::string(parts[0]);
  if (parts[1] == "rising") e.direction = Direction::rising;
  else if (parts[1] == "falling") e.direction = Direction::falling;
  else fail(ErrorCode::ParseError, "direction must be rising or falling");
  e.threshold = parse_quantity(parts[2]);
  return e;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<ConfigSection> parse_sections(std::istream& in, std::string_view source) {
  std::vector<ConfigSection> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto hash = line.find('#');
    std::string_view body = text::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') parse_fail(source, n, "unterminated section header");
      auto words = text::split_ws(body.substr(1, body.size() - 2));
      if (words.empty()) parse_fail(source, n, "empty section header");
      ConfigSection s;
      s.kind = std::string(words[0]);
      for (std::size_t i = 1; i < words.size(); ++i) {
        if (i > 1) s.name += ' ';
        s.name += words[i];
      }
      s.line = n;
      out.push_back(std::move(s));
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string_view::npos) parse_fail(source, n, "expected 'key = value'");
    if (out.empty()) parse_fail(source, n, "entry outside any section");
    auto key = text::trim(body.substr(0, eq));
    auto value = text::trim(body.substr(eq + 1));
    if (key.empty()) parse_fail(source, n, "empty key");
    out.back().entries.emplace_back(std::string(key), std::string(value));
    out.back().entry_lines.push_back(n);
  }
  return out;
}

double parse_quantity(std::string_view token) {
  auto t = text::trim(token);
  if (auto v = text::parse_real(t)) return *v;
  for (const auto& u : kUnits) {
    if (t.size() > u.suffix.size() && t.ends_with(u.suffix)) {
      if (auto v = text::parse_real(text::trim(t.substr(0, t.size() - u.suffix.size())))) {
        return *v * u.multiplier / u.divisor;
      }
    }
  }
  fail(ErrorCode::ParseError, "not a number: '" + std::string(t) + "'");
}

CoverSpec parse_cover_spec(std::istream& in, std::string_view source) {
  CoverSpec spec;
  for (const auto& s : parse_sections(in, source)) {
    if (s.kind != "coverpoint") parse_fail(source, s.line, "unknown section [" + s.kind + "]");
    if (!text::is_identifier(s.name)) parse_fail(source, s.line, "bad coverpoint id '" + s.name + "'");
    if (spec.targets.count(s.name)) parse_fail(source, s.line, "duplicate coverpoint '" + s.name + "'");
    SectionReader r(s, source,
                    {"kind", "signal", "deglitch_time", "level_time", "bin_granularity",
                     "time_granularity", "reference", "window", "halve_crossings", "event1",
                     "event2", "grid_origin", "grid_step", "grid_domain", "legal", "illegal"});
    CoverPoint cp;
    cp.id = s.name;
    cp.kind = r.wrap("kind", [](const std::string& v) { return parse_artifact_kind(v); });
    if (auto sig = r.raw("signal")) cp.signal = *sig;
    auto& p = cp.params;
    p.deglitch_time = r.number("deglitch_time");
    p.level_time = r.number("level_time");
    p.bin_granularity = r.number("bin_granularity");
    p.time_granularity = r.number("time_granularity");
    p.reference = r.number("reference");
    p.window = r.number("window");
    p.halve_crossings = r.flag("halve_crossings");
    if (r.raw("event1") || r.raw("event2")) {
      p.events = std::pair{r.wrap("event1", [](const std::string& v) { return parse_event(v); }),
                           r.wrap("event2", [](const std::string& v) { return parse_event(v); })};
    }
    if (cp.kind != ArtifactKind::delay && cp.signal.empty()) {
      parse_fail(source, s.line, "[coverpoint " + s.name + "] needs 'signal'");
    }
    try {
      validate(cp);
    } catch (const Error& e) {
      parse_fail(source, s.line, e.what());
    }

    Bin domain = r.wrap("grid_domain", [](const std::string& v) { return parse_bin(text::trim(v)); });
    double step = r.required_number("grid_step");
    double origin = r.number("grid_origin", domain.lower());
    std::optional<CoverTarget> target;
    try {
      BinGrid grid(origin, step, domain);
      BinSet illegal = r.bin_set("illegal").value_or(BinSet{});
      BinSet legal = r.bin_set("legal").value_or(set_difference(BinSet{domain}, illegal));
      target = CoverTarget{grid, legal, illegal};
      validate(*target, cp.id);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) throw;
      parse_fail(source, s.line, e.what());
    }
    spec.targets.emplace(cp.id, *target);
    spec.coverpoints.push_back(std::move(cp));
  }
  return spec;
}

CoverSpec load_cover_spec(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_cover_spec(in, path.string());
}

ModelConfig parse_model_config(std::istream& in, std::string_view source) {
  ModelConfig cfg;
  bool have_model = false;
  std::set<std::string> seen;
  std::vector<const ConfigSection*> optimize;
  auto sections = parse_sections(in, source);
  for (const auto& s : sections) {
    if (!s.name.empty()) parse_fail(source, s.line, "[" + s.kind + "] takes no name");
    if (!seen.insert(s.kind).second) parse_fail(source, s.line, "repeated section [" + s.kind + "]");
    if (s.kind == "model") {
      have_model = true;
      std::string kind;
      for (const auto& [k, v] : s.entries) {
        if (k == "kind") kind = v;
      }
      std::set<std::string> keys{"kind", "label"};
      auto add = [&](std::initializer_list<const char*> more) {
        for (const char* m : more) keys.insert(m);
      };
      const bool is_static = kind == "ldo" || kind == "oscillator" || kind == "forrester" || kind == "table";
      if (kind == "lti") add({"numerator", "denominator"});
      else if (kind == "lowpass2" || kind == "bandpass2") add({"f0", "q", "gain"});
      else if (kind == "lowpass1") add({"fc", "gain"});
      else if (kind == "two_pole") add({"gain", "pole1", "pole2"});
      else if (kind == "ldo") add({"nominal", "load_regulation", "knee", "dropout"});
      else if (kind == "oscillator") add({"nominal_frequency", "nominal_supply", "sensitivity", "curvature"});
      else if (kind == "table") add({"xs", "ys"});
      else if (kind != "forrester") {
        parse_fail(source, s.line, kind.empty() ? "[model] needs 'kind'" : "unknown model kind '" + kind + "'");
      }
      if (is_static) add({"domain", "time_constant", "output", "amplitude", "phase"});
      SectionReader r(s, source, keys);
      std::string label = r.raw("label").value_or(kind);
      try {
        if (kind == "lti") {
          cfg.lti = LtiModel(r.numbers("numerator"), r.numbers("denominator"), label);
        } else if (kind == "lowpass2") {
          cfg.lti = LtiModel::lowpass2(r.required_number("f0"), r.required_number("q"), r.number("gain", 1.0));
        } else if (kind == "bandpass2") {
          cfg.lti = LtiModel::bandpass2(r.required_number("f0"), r.required_number("q"), r.number("gain", 1.0));
        } else if (kind == "lowpass1") {
          cfg.lti = LtiModel::lowpass1(r.required_number("fc"), r.number("gain", 1.0));
        } else if (kind == "two_pole") {
          cfg.lti = LtiModel::two_pole(r.number("gain", 1.0), r.required_number("pole1"),
                                       r.required_number("pole2"));
        } else {
          StaticMapModel m;
          m.label = label;
          if (kind == "ldo") {
            LdoMap map;
            map.nominal = r.number("nominal", map.nominal);
            map.load_regulation = r.number("load_regulation", map.load_regulation);
            map.knee = r.number("knee", map.knee);
            map.dropout = r.number("dropout", map.dropout);
            m.map = map;
          } else if (kind == "oscillator") {
            OscillatorMap map;
            map.nominal_frequency = r.number("nominal_frequency", map.nominal_frequency);
            map.nominal_supply = r.number("nominal_supply", map.nominal_supply);
            map.sensitivity = r.number("sensitivity", map.sensitivity);
            map.curvature = r.number("curvature", map.curvature);
            m.map = map;
            m.output = StaticOutput::oscillation;
          } else if (kind == "forrester") {
            m.map = ForresterMap{};
          } else {
            TableMap map{r.numbers("xs"), r.numbers("ys")};
            m.map = map;
          }
          if (auto d = r.bin("domain")) m.domain = *d;
          m.time_constant = r.number("time_constant", 0.0);
          if (auto o = r.raw("output")) {
            if (*o == "level") m.output = StaticOutput::level;
            else if (*o == "oscillation") m.output = StaticOutput::oscillation;
            else parse_fail(source, r.line_of("output"), "output must be level or oscillation");
          }
          m.amplitude = r.number("amplitude", 1.0);
          m.phase = r.number("phase", 0.0);
          if (m.time_constant < 0.0) parse_fail(source, r.line_of("time_constant"), "time_constant must be >= 0");
          if (auto* t = std::get_if<TableMap>(&m.map)) {
            if (t->xs.size() != t->ys.size() || t->xs.size() < 2 ||
                !std::is_sorted(t->xs.begin(), t->xs.end(),
                                [](double a, double b) { return a <= b; })) {
              parse_fail(source, s.line, "table needs matching, strictly ascending xs and ys");
            }
          }
          cfg.static_model = m;
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) throw;
        parse_fail(source, s.line, e.what());
      }
    } else if (s.kind == "stimulus") {
      std::string kind;
      for (const auto& [k, v] : s.entries) {
        if (k == "kind") kind = v;
      }
      if (kind == "sine") {
        SectionReader r(s, source, {"kind", "amplitude", "frequency", "phase", "offset"});
        cfg.stimulus = Sine{r.number("amplitude", 1.0), r.required_number("frequency"),
                            r.number("phase", 0.0), r.number("offset", 0.0)};
      } else if (kind == "step") {
        SectionReader r(s, source, {"kind", "amplitude", "delay", "initial"});
        cfg.stimulus = Step{r.number("amplitude", 1.0), r.number("delay", 0.0), r.number("initial", 0.0)};
      } else if (kind == "ramp") {
        SectionReader r(s, source, {"kind", "slope", "delay"});
        cfg.stimulus = Ramp{r.number("slope", 1.0), r.number("delay", 0.0)};
      } else if (kind == "dc") {
        SectionReader r(s, source, {"kind", "value"});
        cfg.stimulus = Step{0.0, 0.0, r.required_number("value")};
      } else if (kind == "pwl") {
        SectionReader r(s, source, {"kind", "points"});
        auto v = r.numbers("points");
        if (v.size() < 2 || v.size() % 2 != 0) {
          parse_fail(source, r.line_of("points"), "points must be time/value pairs");
        }
        Pwl p;
        for (std::size_t i = 0; i < v.size(); i += 2) {
          if (!p.points.empty() && !(v[i] > p.points.back().first)) {
            parse_fail(source, r.line_of("points"), "pwl times must be strictly ascending");
          }
          p.points.emplace_back(v[i], v[i + 1]);
        }
        cfg.stimulus = p;
      } else {
        parse_fail(source, s.line, kind.empty() ? "[stimulus] needs 'kind'" : "unknown stimulus kind '" + kind + "'");
      }
    } else if (s.kind == "simulation") {
      SectionReader r(s, source, {"dt", "duration"});
      cfg.dt = r.number("dt", 0.0);
      cfg.duration = r.number("duration", 0.0);
      if (cfg.dt < 0.0 || cfg.duration < 0.0) parse_fail(source, s.line, "dt and duration must be > 0");
    } else if (s.kind == "optimize") {
      optimize.push_back(&s);
    } else {
      parse_fail(source, s.line, "unknown section [" + s.kind + "]");
    }
  }
  if (!have_model) fail(ErrorCode::ParseError, std::string(source) + ": missing [model] section");

  for (const auto* s : optimize) {
    std::set<std::string> allowed;
    if (cfg.static_model) allowed = {"x"};
    else allowed = {"amplitude", "frequency", "phase", "offset"};
    SectionReader r(*s, source, allowed);
    for (const auto& [name, value] : s->entries) {
      Bin b = *r.bin(name);
      if (!(b.width() > 0.0)) parse_fail(source, r.line_of(name), name + ": bounds need nonzero width");
      cfg.parameters.emplace_back(name, b);
    }
    if (cfg.lti && !cfg.parameters.empty() &&
        !(cfg.stimulus && std::holds_alternative<Sine>(*cfg.stimulus))) {
      parse_fail(source, s->line, "optimizing a transfer-function model needs a sine stimulus");
    }
  }
  if (cfg.static_model && cfg.parameters.empty()) cfg.parameters.emplace_back("x", cfg.static_model->domain);
  return cfg;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_model_config(in, path.string());
}

namespace {

std::pair<double, double> static_timing(const ModelConfig& cfg) {
  const auto& m = *cfg.static_model;
  double duration = cfg.duration > 0.0 ? cfg.duration : (m.time_constant > 0.0 ? 10.0 * m.time_constant : 1e-3);
  double dt = cfg.dt > 0.0 ? cfg.dt : duration / 1000.0;
  return {dt, duration};
}

}  // namespace

Trace simulate_static(const ModelConfig& cfg, double x) {
  if (!cfg.static_model) fail(ErrorCode::InvalidArgument, "model is not a static map");
  auto [dt, duration] = static_timing(cfg);
  return transient_static(*cfg.static_model, x, dt, duration);
}

Trace simulate(const ModelConfig& cfg) {
  if (!cfg.stimulus) fail(ErrorCode::InvalidArgument, "config has no [stimulus] section");
  if (cfg.static_model) return simulate_static(cfg, waveform_value(*cfg.stimulus, 0.0));
  if (!(cfg.dt > 0.0) || !(cfg.duration > 0.0)) {
    fail(ErrorCode::InvalidArgument, "[simulation] needs dt and duration for a transfer-function model");
  }
  return transient(*cfg.lti, *cfg.stimulus, cfg.dt, cfg.duration);
}

Trace simulate_sine(const ModelConfig& cfg, std::span<const double> x) {
  if (!cfg.lti) fail(ErrorCode::InvalidArgument, "model is not a transfer function");
  if (!cfg.stimulus || !std::holds_alternative<Sine>(*cfg.stimulus)) {
    fail(ErrorCode::InvalidArgument, "sine parameters need a sine stimulus");
  }
  if (x.size() != cfg.parameters.size()) fail(ErrorCode::InvalidArgument, "parameter count mismatch");
  Sine s = std::get<Sine>(*cfg.stimulus);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& name = cfg.parameters[i].first;
    if (name == "amplitude") s.amplitude = x[i];
    else if (name == "frequency") s.frequency = x[i];
    else if (name == "phase") s.phase = x[i];
    else if (name == "offset") s.offset = x[i];
  }
  if (!(cfg.dt > 0.0) || !(cfg.duration > 0.0)) {
    fail(ErrorCode::InvalidArgument, "[simulation] needs dt and duration for a transfer-function model");
  }
  return transient(*cfg.lti, s, cfg.dt, cfg.duration);
}

}  // namespace amscov
