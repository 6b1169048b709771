// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the file-format parsers and writers.
namespace amscov::text {

/// Shortest decimal representation that parses back to the same double.
std::string format_real(double value);

/// Parses a complete token as a finite decimal or scientific-notation real.
std::optional<double> parse_real(std::string_view token);

std::string_view trim(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

/// Splits on runs of spaces/tabs, dropping empty fields.
std::vector<std::string_view> split_ws(std::string_view s);

/// Identifiers used for signals, coverpoints and test ids:
/// [A-Za-z_][A-Za-z0-9_.\-]*
bool is_identifier(std::string_view s);

}  // namespace amscov::text
