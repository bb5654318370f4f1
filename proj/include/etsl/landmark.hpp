#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "etsl/common.hpp"

namespace etsl {

inline constexpr int kNumPoints = 53;

// Canonical point layout.  Slot positions are contractual; the anatomical
// identity of the face/body slots is metadata (see region docs in the README).
inline constexpr int kFaceBegin = 0, kFaceEnd = 5;        // face/lips
inline constexpr int kBodyBegin = 5, kBodyEnd = 11;       // shoulders + arms
inline constexpr int kLeftHandBegin = 11, kLeftHandEnd = 32;
inline constexpr int kRightHandBegin = 32, kRightHandEnd = 53;

// Default body slot assignment within [5, 11).
inline constexpr int kLeftShoulder = 5;
inline constexpr int kRightShoulder = 6;
inline constexpr int kLeftElbow = 7;
inline constexpr int kRightElbow = 8;
inline constexpr int kLeftWrist = 9;
inline constexpr int kRightWrist = 10;

enum class Region { face, body, left_hand, right_hand };

inline Region region_of(int point) {
  if (point < kFaceEnd) return Region::face;
  if (point < kBodyEnd) return Region::body;
  if (point < kLeftHandEnd) return Region::left_hand;
  return Region::right_hand;
}

struct Point {
  double x = 0.0, y = 0.0, z = 0.0;
  bool visible = false;

  bool operator==(const Point&) const = default;
};

struct LandmarkFrame {
  long frame_index = 0;
  std::array<Point, kNumPoints> points{};

  bool operator==(const LandmarkFrame&) const = default;
};

enum class Split { train, dev, test };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "?";
}

inline Split parse_split(const std::string& tag) {
  if (tag == "train") return Split::train;
  if (tag == "dev") return Split::dev;
  if (tag == "test") return Split::test;
  fail(Err::UnknownSplitTag, "'" + tag + "' is not one of train/dev/test");
}

struct ClipSample {
  std::string clip_id;
  std::string signer_id;
  double fps = 25.0;
  std::vector<LandmarkFrame> frames;
  std::string transcript;
  Split split = Split::train;
  bool normalized = false;  // NORM header marker on preprocessed caches

  bool operator==(const ClipSample&) const = default;
};

inline void check_frame(const LandmarkFrame& f) {
  for (int p = 0; p < kNumPoints; ++p) {
    const Point& pt = f.points[p];
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y) || !std::isfinite(pt.z)) {
      fail(Err::NonFiniteCoordinate,
           "frame " + std::to_string(f.frame_index) + " point " +
               std::to_string(p));
    }
  }
}

inline void check_clip(const ClipSample& clip) {
  if (clip.frames.empty())
    fail(Err::InvariantViolation, "clip '" + clip.clip_id + "' has no frames");
  long prev = -1;
  for (const LandmarkFrame& f : clip.frames) {
    if (f.frame_index < 0 || f.frame_index <= prev)
      fail(Err::NonMonotonicFrameIndex,
           "clip '" + clip.clip_id + "' frame index " +
               std::to_string(f.frame_index) + " after " + std::to_string(prev));
    prev = f.frame_index;
    check_frame(f);
  }
  if (!(clip.fps > 0.0))
    fail(Err::InvariantViolation, "clip '" + clip.clip_id + "' fps <= 0");
}

// ETSL-LMK v1.  Header line, then one line per point:
//   ETSL-LMK 1 <clip_id> <signer_id> <fps> [NORM]
//   <frame_index> <point_index> <x> <y> <z> <0|1>
// Points 0..52 ascending within a frame, frames in order.
inline ClipSample parse_clip(const std::string& content,
                             const std::string& clip_id) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line))
    fail(Err::MalformedHeader, clip_id + ": empty file");
  auto head = split_ws(line);
  if (head.size() < 5 || head[0] != "ETSL-LMK" || head[1] != "1")
    fail(Err::MalformedHeader, clip_id + ": bad magic/version line");

  ClipSample clip;
  clip.clip_id = head[2];
  clip.signer_id = head[3];
  {
    char* end = nullptr;
    clip.fps = std::strtod(head[4].c_str(), &end);
    if (end == head[4].c_str() || !(clip.fps > 0.0))
      fail(Err::MalformedHeader, clip_id + ": bad fps '" + head[4] + "'");
  }
  clip.normalized = head.size() > 5 && head[5] == "NORM";

  LandmarkFrame cur;
  int next_point = 0;
  bool open = false;
  long line_no = 1;

  auto close_frame = [&] {
    if (next_point != kNumPoints)
      fail(Err::BadPointCount, clip_id + ": frame " +
                                   std::to_string(cur.frame_index) + " has " +
                                   std::to_string(next_point) + " points");
    clip.frames.push_back(cur);
  };

  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 6)
      fail(Err::MalformedHeader,
           clip_id + ": line " + std::to_string(line_no) + " has " +
               std::to_string(tok.size()) + " fields, want 6");
    char* end = nullptr;
    long fidx = std::strtol(tok[0].c_str(), &end, 10);
    long pidx = std::strtol(tok[1].c_str(), &end, 10);
    if (!open || fidx != cur.frame_index) {
      if (open) close_frame();
      cur = LandmarkFrame{};
      cur.frame_index = fidx;
      next_point = 0;
      open = true;
    }
    if (pidx != next_point)
      fail(Err::BadPointCount, clip_id + ": frame " + std::to_string(fidx) +
                                   " point " + tok[1] + ", expected " +
                                   std::to_string(next_point));
    Point p;
    p.x = std::strtod(tok[2].c_str(), &end);
    p.y = std::strtod(tok[3].c_str(), &end);
    p.z = std::strtod(tok[4].c_str(), &end);
    p.visible = tok[5] == "1";
    if (tok[5] != "0" && tok[5] != "1")
      fail(Err::MalformedHeader,
           clip_id + ": line " + std::to_string(line_no) + " bad visibility");
    cur.points[next_point++] = p;
  }
  if (open) close_frame();

  clip.clip_id = clip_id.empty() ? clip.clip_id : clip_id;
  check_clip(clip);
  return clip;
}

inline std::string write_clip(const ClipSample& clip) {
  check_clip(clip);
  std::string out;
  out.reserve(64 + clip.frames.size() * kNumPoints * 48);
  out += "ETSL-LMK 1 " + clip.clip_id + " " + clip.signer_id + " " +
         format_g9(clip.fps);
  if (clip.normalized) out += " NORM";
  out += "\n";
  for (const LandmarkFrame& f : clip.frames) {
    for (int p = 0; p < kNumPoints; ++p) {
      const Point& pt = f.points[p];
      out += std::to_string(f.frame_index);
      out += ' ';
      out += std::to_string(p);
      out += ' ';
      out += format_g9(pt.x);
      out += ' ';
      out += format_g9(pt.y);
      out += ' ';
      out += format_g9(pt.z);
      out += pt.visible ? " 1\n" : " 0\n";
    }
  }
  return out;
}

inline ClipSample load_clip_file(const std::filesystem::path& path,
                                 const std::string& clip_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_clip(ss.str(), clip_id);
}

inline void save_clip_file(const std::filesystem::path& path,
                           const ClipSample& clip) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::IoError, "cannot write " + path.string());
  out << write_clip(clip);
}

struct ManifestEntry {
  std::string clip_id;
  std::string landmark_path;
  std::string transcript;
  Split split = Split::train;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::vector<const ManifestEntry*> split_entries(Split s) const {
    std::vector<const ManifestEntry*> out;
    for (const auto& e : entries)
      if (e.split == s) out.push_back(&e);
    return out;
  }

  std::map<Split, std::size_t> split_counts() const {
    std::map<Split, std::size_t> c{{Split::train, 0}, {Split::dev, 0},
                                   {Split::test, 0}};
    for (const auto& e : entries) ++c[e.split];
    return c;
  }
};

// Manifest: UTF-8 tab-separated `clip_id  landmark_path  split  transcript`,
// '#' comment lines ignored.  Relative landmark paths resolve against the
// manifest's directory.
inline DatasetManifest parse_manifest(const std::string& content) {
  DatasetManifest m;
  std::set<std::string> seen;
  std::istringstream in(content);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto cols = split_char(line, '\t');
    if (cols.size() < 4)
      fail(Err::MalformedHeader, "manifest line " + std::to_string(line_no) +
                                     ": want 4 tab-separated columns");
    ManifestEntry e;
    e.clip_id = trim(cols[0]);
    e.landmark_path = trim(cols[1]);
    e.split = parse_split(trim(cols[2]));
    e.transcript = trim(cols[3]);
    if (e.clip_id.empty())
      fail(Err::MalformedHeader,
           "manifest line " + std::to_string(line_no) + ": empty clip_id");
    if (!seen.insert(e.clip_id).second)
      fail(Err::DuplicateClipId, e.clip_id);
    if (e.transcript.empty())
      fail(Err::InvariantViolation,
           "clip '" + e.clip_id + "' has an empty transcript");
    m.entries.push_back(std::move(e));
  }
  return m;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path,
                                     bool validate_files = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  DatasetManifest m = parse_manifest(ss.str());
  for (auto& e : m.entries) {
    std::filesystem::path p(e.landmark_path);
    if (p.is_relative()) p = path.parent_path() / p;
    e.landmark_path = p.string();
    if (validate_files && !std::filesystem::exists(p))
      fail(Err::MissingLandmarkFile, e.clip_id + ": " + p.string());
  }
  return m;
}

inline std::string write_manifest(const DatasetManifest& m) {
  std::string out = "# clip_id\tlandmark_path\tsplit\ttranscript\n";
  for (const auto& e : m.entries) {
    out += e.clip_id + "\t" + e.landmark_path + "\t" + split_name(e.split) +
           "\t" + e.transcript + "\n";
  }
  return out;
}

}  // namespace etsl
