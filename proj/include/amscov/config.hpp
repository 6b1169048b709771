// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amscov/bins.hpp"
#include "amscov/circuit_sim.hpp"
#include "amscov/coverage.hpp"
#include "amscov/coverage_space.hpp"

// Section-based text configs for coverpoint specs and circuit models.
//
//   # comment
//   [section name]
//   key = value
//
// Numbers may carry a unit suffix (s, ms, us, ns, Hz, kHz, MHz, V, mV,
// A, mA, uA). Unknown sections and keys are ParseErrors.
namespace amscov {

/// One `section` block in file order.
struct ConfigSection {
  std::string kind;  ///< first word of the header
  std::string name;  ///< rest of the header, may be empty
  std::size_t line = 0;
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<std::size_t> entry_lines;
};

/// Syntax only; values are not interpreted. Throws ParseError with
/// `source:line` in the message.
std::vector<ConfigSection> parse_sections(std::istream& in, std::string_view source);

/// Number with an optional unit suffix. Throws ParseError.
double parse_quantity(std::string_view text);

struct CoverSpec {
  std::vector<CoverPoint> coverpoints;  ///< file order
  TargetSpec targets;
};

/// `[coverpoint <id>]` sections. Keys: kind, signal, deglitch_time,
/// level_time, bin_granularity, time_granularity, reference, window,
/// halve_crossings, event1, event2 (`<signal> rising|falling <threshold>`),
/// grid_origin, grid_step, grid_domain, legal, illegal. legal defaults to
/// the grid domain minus the illegal bins.
CoverSpec parse_cover_spec(std::istream& in, std::string_view source = "<stream>");
CoverSpec load_cover_spec(const std::filesystem::path& path);


struct ModelConfig {
  std::optional<LtiModel> lti;
  std::optional<StaticMapModel> static_model;
  std::optional<Waveform> stimulus;
  double dt = 0.0;
  double duration = 0.0;
  /// `[optimize]` section: named parameters with their bounds. For static
  /// models the only parameter is `x` and defaults to the map domain.
  std::vector<std::pair<std::string, Bin>> parameters;

  bool is_lti() const noexcept { return lti.has_value(); }
};

/// Sections: `[model]` (required), `[stimulus]`, `[simulation]`,
/// `[optimize]`. See docs/formats.md for the key lists per model kind.
ModelConfig parse_model_config(std::istream& in, std::string_view source = "<stream>");
ModelConfig load_model_config(const std::filesystem::path& path);

/// Runs the configured stimulus (LTI) or input x (static) through the
/// model. Throws InvalidArgument when something needed is missing.
Trace simulate(const ModelConfig& cfg);
Trace simulate_static(const ModelConfig& cfg, double x);
/// LTI model with the named sine parameters replaced by x.
Trace simulate_sine(const ModelConfig& cfg, std::span<const double> x);

}  // namespace amscov
