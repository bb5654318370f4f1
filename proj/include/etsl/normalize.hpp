#pragma once

#include <cmath>
#include <vector>

#include "etsl/landmark.hpp"

namespace etsl {

struct NormalizedFrame {
  std::array<Point, kNumPoints> points{};  // visible flag doubles as the mask
  long frame_index = 0;

  bool mask(int p) const { return points[p].visible; }
};

enum class DegeneratePolicy { strict, carry_forward };

struct NormalizeOptions {
  int coord_count = 3;  // 2: shoulder distance measured in x-y only
  DegeneratePolicy policy = DegeneratePolicy::strict;
  int left_shoulder = kLeftShoulder;
  int right_shoulder = kRightShoulder;
  double epsilon = 1e-6;  // minimum shoulder distance in raw units
};

namespace detail {

struct FrameTransform {
  double mx, my, mz;  // shoulder midpoint
  double scale;       // shoulder distance
};

inline FrameTransform shoulder_transform(const LandmarkFrame& f,
                                         const NormalizeOptions& opt) {
  const Point& ls = f.points[opt.left_shoulder];
  const Point& rs = f.points[opt.right_shoulder];
  if (!ls.visible || !rs.visible)
    fail(Err::ShouldersNotVisible,
         "frame " + std::to_string(f.frame_index));
  double dx = ls.x - rs.x, dy = ls.y - rs.y, dz = ls.z - rs.z;
  double d = opt.coord_count == 2 ? std::hypot(dx, dy)
                                  : std::sqrt(dx * dx + dy * dy + dz * dz);
  if (d <= opt.epsilon)
    fail(Err::DegenerateFrame, "frame " + std::to_string(f.frame_index) +
                                   ": shoulder distance " + format_g9(d));
  return {(ls.x + rs.x) / 2.0, (ls.y + rs.y) / 2.0, (ls.z + rs.z) / 2.0, d};
}

inline NormalizedFrame apply_transform(const LandmarkFrame& f,
                                       const FrameTransform& t) {
  NormalizedFrame out;
  out.frame_index = f.frame_index;
  for (int p = 0; p < kNumPoints; ++p) {
    const Point& in = f.points[p];
    out.points[p].x = (in.x - t.mx) / t.scale;
    out.points[p].y = (in.y - t.my) / t.scale;
    out.points[p].z = (in.z - t.mz) / t.scale;
    out.points[p].visible = in.visible;
  }
  return out;
}

}  // namespace detail

// Per-frame translation to the shoulder midpoint and scaling by the shoulder
// distance.  Orientation is preserved.
inline NormalizedFrame normalize_frame(const LandmarkFrame& frame,
                                       const NormalizeOptions& opt = {}) {
  return detail::apply_transform(frame, detail::shoulder_transform(frame, opt));
}

inline NormalizedFrame normalize_frame(const LandmarkFrame& frame,
                                       int left_shoulder, int right_shoulder) {
  NormalizeOptions opt;
  opt.left_shoulder = left_shoulder;
  opt.right_shoulder = right_shoulder;
  return normalize_frame(frame, opt);
}

// Frame-wise normalization of a whole clip.  Under carry_forward a frame with
// unusable shoulders reuses the previous frame's midpoint and scale; the first
// frame has no predecessor, so it still fails.
inline std::vector<NormalizedFrame> normalize_clip(
    const ClipSample& clip, const NormalizeOptions& opt = {}) {
  check_clip(clip);
  std::vector<NormalizedFrame> out;
  out.reserve(clip.frames.size());
  bool have_prev = false;
  detail::FrameTransform prev{};
  for (const LandmarkFrame& f : clip.frames) {
    if (opt.policy == DegeneratePolicy::carry_forward) {
      try {
        prev = detail::shoulder_transform(f, opt);
        have_prev = true;
      } catch (const EtslError&) {
        if (!have_prev) throw;
      }
      out.push_back(detail::apply_transform(f, prev));
    } else {
      out.push_back(normalize_frame(f, opt));
    }
  }
  return out;
}

// Canonical-order flattening: (x, y[, z]) per point, masked points zeroed.
inline std::vector<double> flatten_features(const NormalizedFrame& frame,
                                            int coord_count = 3) {
  if (coord_count != 2 && coord_count != 3)
    fail(Err::DimensionMismatch,
         "coord_count must be 2 or 3, got " + std::to_string(coord_count));
  std::vector<double> v(static_cast<std::size_t>(kNumPoints) * coord_count,
                        0.0);
  for (int p = 0; p < kNumPoints; ++p) {
    if (!frame.points[p].visible) continue;
    v[p * coord_count + 0] = frame.points[p].x;
    v[p * coord_count + 1] = frame.points[p].y;
    if (coord_count == 3) v[p * coord_count + 2] = frame.points[p].z;
  }
  return v;
}

// Normalized clip written back in the wire format with the NORM marker.
inline ClipSample normalized_to_clip(const ClipSample& src,
                                     const std::vector<NormalizedFrame>& frames) {
  ClipSample out = src;
  out.normalized = true;
  out.frames.clear();
  out.frames.reserve(frames.size());
  for (const NormalizedFrame& nf : frames) {
    LandmarkFrame f;
    f.frame_index = nf.frame_index;
    f.points = nf.points;
    out.frames.push_back(f);
  }
  return out;
}

}  // namespace etsl
