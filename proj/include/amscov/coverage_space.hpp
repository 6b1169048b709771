// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "amscov/bins.hpp"
#include "amscov/coverage.hpp"

namespace amscov {

/// Target for one coverpoint: its grid, the legal bins the design should
/// visit and the illegal bins it must never reach.
struct CoverTarget {
  BinGrid grid;
  BinSet legal;
  BinSet illegal;

  friend bool operator==(const CoverTarget&, const CoverTarget&) = default;
};

/// Throws InvalidArgument when legal and illegal overlap or either leaves
/// the grid domain.
void validate(const CoverTarget& target, std::string_view id = {});

using TargetSpec = std::map<std::string, CoverTarget, std::less<>>;

/// One accumulated test: what it hit, per coverpoint.
struct TestRecord {
  std::string id;
  std::string timestamp;
  /// Input parameters of the run, logged verbatim.
  std::vector<std::pair<std::string, std::string>> inputs;
  std::map<std::string, std::vector<Bin>, std::less<>> hits;
  std::map<std::string, BinSet, std::less<>> untargeted;

  friend bool operator==(const TestRecord&, const TestRecord&) = default;
};

struct CoverPointRecord {
  std::map<Bin, std::int64_t> hit_counts;
  BinSet untargeted;

  BinSet covered() const;

  friend bool operator==(const CoverPointRecord&, const CoverPointRecord&) = default;
};

/// Covered cells per coverpoint accumulated over many tests.
class CoverageDatabase {
 public:
  CoverageDatabase() = default;

  /// Registers a coverpoint; no-op if already known.
  void add_coverpoint(std::string_view id);
  bool has_coverpoint(std::string_view id) const;

  /// Adds one test. Every result must name a registered coverpoint
  /// (UnknownCoverPoint otherwise), in which case the database is left
  /// untouched. Test ids must be identifiers; repeats are allowed and
  /// logged as separate records.
  void accumulate(std::string_view test_id, const std::vector<CoverageResult>& results,
                  std::string timestamp = {},
                  std::vector<std::pair<std::string, std::string>> inputs = {});

  const std::map<std::string, CoverPointRecord, std::less<>>& coverpoints() const noexcept {
    return points_;
  }
  const std::vector<TestRecord>& tests() const noexcept { return tests_; }

  /// Throws UnknownCoverPoint.
  const CoverPointRecord& record(std::string_view id) const;
  BinSet covered(std::string_view id) const { return record(id).covered(); }

  /// Rebuilds per-coverpoint state from the test log alone.
  CoverageDatabase replayed() const;

  friend bool operator==(const CoverageDatabase&, const CoverageDatabase&) = default;

 private:
  std::map<std::string, CoverPointRecord, std::less<>> points_;
  std::vector<TestRecord> tests_;
};

/// Functional form used where the database is treated as a value.
inline CoverageDatabase accumulate(CoverageDatabase db, std::string_view test_id,
                                   const std::vector<CoverageResult>& results) {
  db.accumulate(test_id, results);
  return db;
}

struct CoverPointGap {
  std::string coverpoint_id;
  BinSet legal;
  BinSet covered_legal;  ///< covered ∩ legal
  BinSet gap;            ///< legal ∖ covered
  double legal_measure = 0.0;
  double gap_measure = 0.0;
  double gap_fraction = 1.0;
  BinSet bug_hits;  ///< covered ∩ illegal
  std::vector<std::string> bug_tests;
  BinSet untargeted;
};

struct GapReport {
  std::vector<CoverPointGap> coverpoints;

  bool has_bugs() const noexcept;
};

/// Coverage gap and bug hits per target coverpoint. Coverpoints missing from
/// the database count as fully uncovered.
GapReport gap_report(const CoverageDatabase& db, const TargetSpec& spec);

/// Human-readable table.
void write_report_text(std::ostream& out, const GapReport& report);
/// One `key=value` record per line, prefixed by the coverpoint id.
void write_report_records(std::ostream& out, const GapReport& report);

/// Versioned line-oriented text with a trailing CRC-32 line.
void write_database(std::ostream& out, const CoverageDatabase& db);
/// Throws CorruptDatabase.
CoverageDatabase read_database(std::istream& in);

/// Atomic: writes to a sibling temporary file then renames. Throws IoError.
void persist(const CoverageDatabase& db, const std::filesystem::path& path);
/// Throws IoError or CorruptDatabase.
CoverageDatabase restore(const std::filesystem::path& path);

}  // namespace amscov
