// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include "amscov/coverage_space.hpp"

#include <boost/crc.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "amscov/error.hpp"
#include "amscov/text.hpp"

namespace amscov {

namespace {

constexpr std::string_view kMagic = "amscov-coverage-db 1";

std::uint32_t crc32_of(std::string_view data) {
  boost::crc_32_type crc;
  crc.process_bytes(data.data(), data.size());
  return crc.checksum();
}

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

std::string format_ratio(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

}  // namespace

void validate(const CoverTarget& target, std::string_view id) {
  std::string who = id.empty() ? std::string("target") : "target '" + std::string(id) + "'";
  if (!set_intersect(target.legal, target.illegal).empty()) {
    fail(ErrorCode::InvalidArgument, who + ": legal and illegal bins overlap");
  }
  BinSet domain{target.grid.domain()};
  if (!set_difference(target.legal, domain).empty() ||
      !set_difference(target.illegal, domain).empty()) {
    fail(ErrorCode::InvalidArgument, who + ": bins must lie inside the grid domain " +
                                         target.grid.domain().to_string());
  }
}

BinSet CoverPointRecord::covered() const {
  std::vector<Bin> cells;
  for (const auto& [cell, count] : hit_counts) {
    if (count >= 1) cells.push_back(cell);
  }
  return BinSet(std::move(cells));
}

void CoverageDatabase::add_coverpoint(std::string_view id) {
  if (!text::is_identifier(id)) {
    fail(ErrorCode::InvalidArgument, "bad coverpoint id '" + std::string(id) + "'");
  }
  points_.try_emplace(std::string(id));
}

bool CoverageDatabase::has_coverpoint(std::string_view id) const {
  return points_.find(id) != points_.end();
}

const CoverPointRecord& CoverageDatabase::record(std::string_view id) const {
  auto it = points_.find(id);
  if (it == points_.end()) {
    fail(ErrorCode::UnknownCoverPoint, "unknown coverpoint '" + std::string(id) + "'");
  }
  return it->second;
}

void CoverageDatabase::accumulate(std::string_view test_id,
                                  const std::vector<CoverageResult>& results,
                                  std::string timestamp,
                                  std::vector<std::pair<std::string, std::string>> inputs) {
  if (!text::is_identifier(test_id)) {
    fail(ErrorCode::InvalidArgument, "bad test id '" + std::string(test_id) + "'");
  }
  if (timestamp.find_first_of(" \t\r\n") != std::string::npos) {
    fail(ErrorCode::InvalidArgument, "timestamp must not contain whitespace");
  }
  for (const auto& [key, value] : inputs) {
    if (!text::is_identifier(key)) fail(ErrorCode::InvalidArgument, "bad input key '" + key + "'");
    if (value.find_first_of("\r\n") != std::string::npos) {
      fail(ErrorCode::InvalidArgument, "input value for '" + key + "' spans lines");
    }
  }
  for (const auto& r : results) {
    if (!has_coverpoint(r.coverpoint_id)) {
      fail(ErrorCode::UnknownCoverPoint, "unknown coverpoint '" + r.coverpoint_id + "'");
    }
  }

  TestRecord rec;
  rec.id = std::string(test_id);
  rec.timestamp = std::move(timestamp);
  rec.inputs = std::move(inputs);
  for (const auto& r : results) {
    auto& hits = rec.hits[r.coverpoint_id];
    hits.insert(hits.end(), r.cells.begin(), r.cells.end());
    if (!r.untargeted.empty()) {
      auto& u = rec.untargeted[r.coverpoint_id];
      u = set_union(u, r.untargeted);
    }
  }
  // Everything below only touches containers that were already validated.
  for (const auto& [cp, cells] : rec.hits) {
    auto& point = points_.find(cp)->second;
    for (const auto& c : cells) ++point.hit_counts[c];
  }
  for (const auto& [cp, extra] : rec.untargeted) {
    auto& point = points_.find(cp)->second;
    point.untargeted = set_union(point.untargeted, extra);
  }
  tests_.push_back(std::move(rec));
}

CoverageDatabase CoverageDatabase::replayed() const {
  CoverageDatabase out;
  for (const auto& [id, _] : points_) out.add_coverpoint(id);
  for (const auto& t : tests_) {
    for (const auto& [cp, cells] : t.hits) {
      auto& point = out.points_.find(cp)->second;
      for (const auto& c : cells) ++point.hit_counts[c];
    }
    for (const auto& [cp, extra] : t.untargeted) {
      auto& point = out.points_.find(cp)->second;
      point.untargeted = set_union(point.untargeted, extra);
    }
  }
  out.tests_ = tests_;
  return out;
}

bool GapReport::has_bugs() const noexcept {
  return std::any_of(coverpoints.begin(), coverpoints.end(),
                     [](const CoverPointGap& g) { return !g.bug_hits.empty(); });
}

GapReport gap_report(const CoverageDatabase& db, const TargetSpec& spec) {
  GapReport report;
  for (const auto& [id, target] : spec) {
    CoverPointGap g;
    g.coverpoint_id = id;
    g.legal = target.legal;
    BinSet covered;
    if (db.has_coverpoint(id)) {
      const auto& rec = db.record(id);
      covered = rec.covered();
      g.untargeted = rec.untargeted;
    }
    g.covered_legal = set_intersect(covered, target.legal);
    g.gap = set_difference(target.legal, covered);
    g.legal_measure = target.legal.measure();
    g.gap_measure = g.gap.measure();
    if (g.legal_measure > 0.0) {
      g.gap_fraction = g.gap_measure / g.legal_measure;
    } else {
      // Degenerate targets (single points) are either hit or not.
      g.gap_fraction = g.gap.empty() ? 0.0 : 1.0;
    }
    g.bug_hits = set_intersect(covered, target.illegal);
    if (!g.bug_hits.empty()) {
      for (const auto& t : db.tests()) {
        auto it = t.hits.find(id);
        if (it == t.hits.end()) continue;
        if (!set_intersect(BinSet(it->second), target.illegal).empty()) g.bug_tests.push_back(t.id);
      }
    }
    report.coverpoints.push_back(std::move(g));
  }
  return report;
}

void write_report_text(std::ostream& out, const GapReport& report) {
  out << std::left << std::setw(20) << "coverpoint" << std::setw(10) << "gap" << "bug hits\n";
  for (const auto& g : report.coverpoints) {
    out << std::left << std::setw(20) << g.coverpoint_id << std::setw(10)
        << format_ratio(g.gap_fraction) << (g.bug_hits.empty() ? "-" : g.bug_hits.to_string())
        << '\n';
    if (!g.gap.empty()) out << "  uncovered: " << g.gap.to_string() << '\n';
    if (!g.bug_hits.empty()) {
      out << "  BUG: illegal bins reached by";
      for (const auto& t : g.bug_tests) out << ' ' << t;
      out << '\n';
    }
    if (!g.untargeted.empty()) out << "  outside target: " << g.untargeted.to_string() << '\n';
  }
}

void write_report_records(std::ostream& out, const GapReport& report) {
  for (const auto& g : report.coverpoints) {
    const std::string p = g.coverpoint_id + '.';
    out << p << "gap_fraction=" << text::format_real(g.gap_fraction) << '\n';
    out << p << "gap_measure=" << text::format_real(g.gap_measure) << '\n';
    out << p << "legal_measure=" << text::format_real(g.legal_measure) << '\n';
    out << p << "gap=" << g.gap.to_string() << '\n';
    out << p << "bug_hits=" << g.bug_hits.to_string() << '\n';
    out << p << "bug_tests=";
    for (std::size_t i = 0; i < g.bug_tests.size(); ++i) out << (i ? "," : "") << g.bug_tests[i];
    out << '\n';
    out << p << "untargeted=" << g.untargeted.to_string() << '\n';
  }
}

void write_database(std::ostream& out, const CoverageDatabase& db) {
  std::ostringstream body;
  body << kMagic << '\n';
  for (const auto& [id, rec] : db.coverpoints()) {
    body << "coverpoint " << id << '\n';
    for (const auto& [cell, count] : rec.hit_counts) {
      body << "cell " << cell.to_string() << ' ' << count << '\n';
    }
    if (!rec.untargeted.empty()) body << "untargeted " << rec.untargeted.to_string() << '\n';
  }
  for (const auto& t : db.tests()) {
    body << "test " << t.id << ' ' << (t.timestamp.empty() ? "-" : t.timestamp) << '\n';
    for (const auto& [key, value] : t.inputs) body << "input " << key << ' ' << value << '\n';
    for (const auto& [cp, cells] : t.hits) {
      body << "hit " << cp;
      for (const auto& c : cells) body << ' ' << c.to_string();
      body << '\n';
    }
    for (const auto& [cp, extra] : t.untargeted) {
      body << "outside " << cp << ' ' << extra.to_string() << '\n';
    }
    body << "end\n";
  }
  std::string content = body.str();
  out << content << "crc32 " << hex32(crc32_of(content)) << '\n';
}

CoverageDatabase read_database(std::istream& in) {
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto corrupt = [](const std::string& why) -> CoverageDatabase {
    fail(ErrorCode::CorruptDatabase, "corrupt coverage database: " + why);
  };
  if (all.empty() || all.back() != '\n') return corrupt("truncated");
  auto tail_start = all.rfind('\n', all.size() - 2);
  if (tail_start == std::string::npos) return corrupt("truncated");
  std::string content = all.substr(0, tail_start + 1);
  std::string_view tail(all.data() + tail_start + 1, all.size() - tail_start - 2);
  if (tail.substr(0, 6) != "crc32 ") return corrupt("missing checksum");
  if (tail.substr(6) != hex32(crc32_of(content))) return corrupt("checksum mismatch");

  std::istringstream lines(content);
  std::string line;
  std::getline(lines, line);
  if (line != kMagic) return corrupt("unsupported header '" + line + "'");

  CoverageDatabase db;
  std::map<std::string, CoverPointRecord, std::less<>> stored;
  std::string current_cp;
  std::optional<TestRecord> test;
  std::vector<TestRecord> tests;
  try {
    while (std::getline(lines, line)) {
      auto sv = std::string_view(line);
      auto space = sv.find(' ');
      auto tag = sv.substr(0, space);
      auto rest = space == std::string_view::npos ? std::string_view{} : sv.substr(space + 1);
      if (tag == "end") {
        if (!test) return corrupt("'end' outside a test");
        tests.push_back(std::move(*test));
        test.reset();
        continue;
      }
      if (test) {
        if (tag == "input") {
          auto sp = rest.find(' ');
          if (sp == std::string_view::npos) return corrupt("bad input line");
          test->inputs.emplace_back(std::string(rest.substr(0, sp)), std::string(rest.substr(sp + 1)));
        } else if (tag == "hit") {
          auto f = text::split_ws(rest);
          if (f.empty()) return corrupt("bad hit line");
          auto& hits = test->hits[std::string(f[0])];
          for (std::size_t i = 1; i < f.size(); ++i) hits.push_back(parse_bin(f[i]));
        } else if (tag == "outside") {
          auto sp = rest.find(' ');
          if (sp == std::string_view::npos) return corrupt("bad outside line");
          test->untargeted[std::string(rest.substr(0, sp))] = parse_bin_set(rest.substr(sp + 1));
        } else {
          return corrupt("unexpected '" + std::string(tag) + "' inside a test");
        }
        continue;
      }
      if (tag == "coverpoint") {
        current_cp = std::string(rest);
        db.add_coverpoint(current_cp);
        stored[current_cp];
      } else if (tag == "cell") {
        auto f = text::split_ws(rest);
        if (current_cp.empty() || f.size() != 2) return corrupt("bad cell line");
        auto count = text::parse_real(f[1]);
        if (!count || *count < 0) return corrupt("bad hit count");
        stored[current_cp].hit_counts[parse_bin(f[0])] = static_cast<std::int64_t>(*count);
      } else if (tag == "untargeted") {
        if (current_cp.empty()) return corrupt("bad untargeted line");
        stored[current_cp].untargeted = parse_bin_set(rest);
      } else if (tag == "test") {
        auto f = text::split_ws(rest);
        if (f.size() != 2) return corrupt("bad test line");
        test.emplace();
        test->id = std::string(f[0]);
        test->timestamp = f[1] == "-" ? std::string{} : std::string(f[1]);
      } else {
        return corrupt("unknown record '" + std::string(tag) + "'");
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptDatabase) throw;
    return corrupt(e.what());
  }
  if (test) return corrupt("unterminated test record");

  for (auto& t : tests) {
    for (const auto& [cp, _] : t.hits) {
      if (!db.has_coverpoint(cp)) return corrupt("test references unknown coverpoint " + cp);
    }
    for (const auto& [cp, _] : t.untargeted) {
      if (!db.has_coverpoint(cp)) return corrupt("test references unknown coverpoint " + cp);
    }
  }
  // Rebuild from the log and check it matches the stored summary.
  CoverageDatabase rebuilt;
  for (const auto& [id, _] : stored) rebuilt.add_coverpoint(id);
  for (const auto& t : tests) {
    std::vector<CoverageResult> results;
    for (const auto& [cp, cells] : t.hits) {
      CoverageResult r;
      r.coverpoint_id = cp;
      r.cells = cells;
      if (auto it = t.untargeted.find(cp); it != t.untargeted.end()) r.untargeted = it->second;
      results.push_back(std::move(r));
    }
    rebuilt.accumulate(t.id, results, t.timestamp, t.inputs);
    if (!(rebuilt.tests().back() == t)) return corrupt("malformed test record " + t.id);
  }
  if (rebuilt.coverpoints() != stored) return corrupt("summary does not match the test log");
  return rebuilt;
}

void persist(const CoverageDatabase& db, const std::filesystem::path& path) {
  if (path.empty()) fail(ErrorCode::IoError, "empty database path");
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    write_database(out, db);
    out.flush();
    if (!out) fail(ErrorCode::IoError, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoError, "cannot replace '" + path.string() + "': " + ec.message());
}

CoverageDatabase restore(const std::filesystem::path& path) {
  if (path.empty()) fail(ErrorCode::IoError, "empty database path");
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open database '" + path.string() + "'");
  return read_database(in);
}

}  // namespace amscov
