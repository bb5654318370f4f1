#pragma once

#include <cstdlib>
#include <string>
#include <vector>

#include "etsl/etsl.hpp"

namespace testutil {

// round to the 9-significant-digit wire format so file round-trips are exact
inline double q9(double v) {
  return std::strtod(etsl::format_g9(v).c_str(), nullptr);
}

inline etsl::LandmarkFrame random_frame(etsl::Rng& rng, long index) {
  etsl::LandmarkFrame f;
  f.frame_index = index;
  for (int p = 0; p < etsl::kNumPoints; ++p) {
    auto& pt = f.points[p];
    pt.x = q9(rng.uniform(-2.0, 2.0));
    pt.y = q9(rng.uniform(-2.0, 2.0));
    pt.z = q9(rng.uniform(-2.0, 2.0));
    pt.visible = rng.uniform() > 0.1;
  }
  // keep the anchors usable
  f.points[etsl::kLeftShoulder].visible = true;
  f.points[etsl::kRightShoulder].visible = true;
  if (std::abs(f.points[etsl::kLeftShoulder].x -
               f.points[etsl::kRightShoulder].x) < 0.1)
    f.points[etsl::kRightShoulder].x =
        q9(f.points[etsl::kLeftShoulder].x + 0.5);
  return f;
}

inline etsl::ClipSample random_clip(etsl::Rng& rng, int frames) {
  etsl::ClipSample clip;
  clip.clip_id = "clip" + std::to_string(rng.index(100000));
  clip.signer_id = "signer" + std::to_string(rng.index(10));
  clip.fps = 25.0;
  long index = 0;
  for (int i = 0; i < frames; ++i) {
    index += 1 + static_cast<long>(rng.index(3));  // gaps allowed
    clip.frames.push_back(random_frame(rng, index));
  }
  clip.transcript = "test transcript";
  return clip;
}

inline std::vector<std::string> toks(std::initializer_list<const char*> words) {
  std::vector<std::string> out;
  for (const char* w : words) out.emplace_back(w);
  return out;
}

}  // namespace testutil
