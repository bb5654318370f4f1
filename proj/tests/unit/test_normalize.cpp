#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace etsl;

namespace {

LandmarkFrame frame_with_shoulders(double lx, double ly, double lz, double rx,
                                   double ry, double rz) {
  LandmarkFrame f;
  for (int p = 0; p < kNumPoints; ++p) f.points[p] = {0, 0, 0, true};
  f.points[kLeftShoulder] = {lx, ly, lz, true};
  f.points[kRightShoulder] = {rx, ry, rz, true};
  return f;
}

}  // namespace

TEST_CASE("normalization maps the worked example exactly") {
  LandmarkFrame f = frame_with_shoulders(0.2, 0.5, 0.0, 0.6, 0.5, 0.0);
  f.points[0] = {0.4, 0.9, 0.0, true};
  NormalizedFrame n = normalize_frame(f);
  CHECK(n.points[0].x == Catch::Approx(0.0).margin(1e-12));
  CHECK(n.points[0].y == Catch::Approx(1.0).margin(1e-12));
  CHECK(n.points[0].z == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("shoulders land at +-1/2 on their axis") {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    LandmarkFrame f = testutil::random_frame(rng, t);
    NormalizedFrame n = normalize_frame(f);
    const Point& ls = n.points[kLeftShoulder];
    const Point& rs = n.points[kRightShoulder];
    // midpoint at the origin
    CHECK(std::abs(ls.x + rs.x) < 1e-9);
    CHECK(std::abs(ls.y + rs.y) < 1e-9);
    CHECK(std::abs(ls.z + rs.z) < 1e-9);
    // distance one
    double dx = ls.x - rs.x, dy = ls.y - rs.y, dz = ls.z - rs.z;
    CHECK(std::sqrt(dx * dx + dy * dy + dz * dz) == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("normalization is invariant to translation and uniform scaling") {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    LandmarkFrame f = testutil::random_frame(rng, t);
    double tx = rng.uniform(-5, 5), ty = rng.uniform(-5, 5),
           tz = rng.uniform(-5, 5);
    double s = rng.uniform(0.1, 10.0);
    LandmarkFrame g = f;
    for (int p = 0; p < kNumPoints; ++p) {
      g.points[p].x = s * f.points[p].x + tx;
      g.points[p].y = s * f.points[p].y + ty;
      g.points[p].z = s * f.points[p].z + tz;
    }
    NormalizedFrame nf = normalize_frame(f);
    NormalizedFrame ng = normalize_frame(g);
    for (int p = 0; p < kNumPoints; ++p) {
      CHECK(std::abs(nf.points[p].x - ng.points[p].x) < 1e-9);
      CHECK(std::abs(nf.points[p].y - ng.points[p].y) < 1e-9);
      CHECK(std::abs(nf.points[p].z - ng.points[p].z) < 1e-9);
      CHECK(nf.points[p].visible == ng.points[p].visible);
    }
  }
}

TEST_CASE("degenerate shoulders fail under the strict policy") {
  LandmarkFrame f = frame_with_shoulders(0.3, 0.3, 0.0, 0.3, 0.3, 0.0);
  try {
    normalize_frame(f);
    FAIL("expected DegenerateFrame");
  } catch (const EtslError& e) {
    CHECK(e.code() == Err::DegenerateFrame);
  }

  LandmarkFrame g = frame_with_shoulders(0.2, 0.5, 0.0, 0.6, 0.5, 0.0);
  g.points[kLeftShoulder].visible = false;
  try {
    normalize_frame(g);
    FAIL("expected ShouldersNotVisible");
  } catch (const EtslError& e) {
    CHECK(e.code() == Err::ShouldersNotVisible);
  }
}

TEST_CASE("carry_forward reuses the previous usable transform") {
  ClipSample clip;
  clip.clip_id = "cf";
  clip.signer_id = "s";
  for (long i = 0; i < 6; ++i) {
    LandmarkFrame f = frame_with_shoulders(0.2, 0.5, 0.0, 0.6, 0.5, 0.0);
    f.frame_index = i;
    f.points[0] = {0.4, 0.9, 0.0, true};
    clip.frames.push_back(f);
  }
  // frame 5 loses its shoulders
  clip.frames[5].points[kLeftShoulder] = {0.1, 0.1, 0.0, true};
  clip.frames[5].points[kRightShoulder] = {0.1, 0.1, 0.0, true};
  clip.frames[5].points[0] = {0.8, 0.5, 0.0, true};

  NormalizeOptions opt;
  opt.policy = DegeneratePolicy::carry_forward;
  auto frames = normalize_clip(clip, opt);
  REQUIRE(frames.size() == 6);
  // frame 4's transform: midpoint (0.4, 0.5, 0), scale 0.4
  CHECK(frames[5].points[0].x == Catch::Approx((0.8 - 0.4) / 0.4).margin(1e-12));
  CHECK(frames[5].points[0].y == Catch::Approx(0.0).margin(1e-12));

  // strict mode refuses the same clip
  try {
    normalize_clip(clip);
    FAIL("expected DegenerateFrame");
  } catch (const EtslError& e) {
    CHECK(e.code() == Err::DegenerateFrame);
  }
}

TEST_CASE("carry_forward cannot rescue a degenerate first frame") {
  ClipSample clip;
  clip.clip_id = "cf0";
  clip.signer_id = "s";
  LandmarkFrame bad = frame_with_shoulders(0.3, 0.3, 0.0, 0.3, 0.3, 0.0);
  bad.frame_index = 0;
  LandmarkFrame good = frame_with_shoulders(0.2, 0.5, 0.0, 0.6, 0.5, 0.0);
  good.frame_index = 1;
  clip.frames = {bad, good};
  NormalizeOptions opt;
  opt.policy = DegeneratePolicy::carry_forward;
  try {
    normalize_clip(clip, opt);
    FAIL("expected DegenerateFrame");
  } catch (const EtslError& e) {
    CHECK(e.code() == Err::DegenerateFrame);
  }
}

TEST_CASE("carry_forward recovers once shoulders return") {
  ClipSample clip;
  clip.clip_id = "cf2";
  clip.signer_id = "s";
  LandmarkFrame a = frame_with_shoulders(0.2, 0.5, 0.0, 0.6, 0.5, 0.0);
  a.frame_index = 0;
  LandmarkFrame b = a;
  b.frame_index = 1;
  b.points[kLeftShoulder].visible = false;
  LandmarkFrame c = frame_with_shoulders(-0.5, 0.0, 0.0, 0.5, 0.0, 0.0);
  c.frame_index = 2;
  c.points[0] = {0.5, 1.0, 0.0, true};
  clip.frames = {a, b, c};
  NormalizeOptions opt;
  opt.policy = DegeneratePolicy::carry_forward;
  auto frames = normalize_clip(clip, opt);
  // frame 2 uses its own (fresh) transform: midpoint origin, scale 1
  CHECK(frames[2].points[0].x == Catch::Approx(0.5).margin(1e-12));
  CHECK(frames[2].points[0].y == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("two-coordinate mode measures shoulder distance in the plane") {
  LandmarkFrame f = frame_with_shoulders(0.2, 0.5, 0.7, 0.6, 0.5, -0.3);
  NormalizeOptions opt;
  opt.coord_count = 2;
  NormalizedFrame n = normalize_frame(f, opt);
  // planar distance 0.4 even though shoulders differ in z by 1.0
  const Point& ls = n.points[kLeftShoulder];
  const Point& rs = n.points[kRightShoulder];
  CHECK(std::hypot(ls.x - rs.x, ls.y - rs.y) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("flattening yields the contracted widths and zeroes masked points") {
  Rng rng(3);
  LandmarkFrame f = testutil::random_frame(rng, 0);
  f.points[20].visible = false;
  NormalizedFrame n = normalize_frame(f);
  auto v3 = flatten_features(n, 3);
  auto v2 = flatten_features(n, 2);
  REQUIRE(v3.size() == 159);
  REQUIRE(v2.size() == 106);
  CHECK(v3[20 * 3 + 0] == 0.0);
  CHECK(v3[20 * 3 + 1] == 0.0);
  CHECK(v3[20 * 3 + 2] == 0.0);
  CHECK(v2[20 * 2 + 0] == 0.0);
  // a visible point keeps its coordinates in canonical order
  CHECK(v3[0] == n.points[0].x);
  CHECK(v3[1] == n.points[0].y);
  CHECK(v3[2] == n.points[0].z);
  CHECK(v2[2] == n.points[1].x);
  CHECK_THROWS_AS(flatten_features(n, 4), EtslError);
}

TEST_CASE("normalized clips round-trip through the wire format") {
  Rng rng(23);
  ClipSample clip = testutil::random_clip(rng, 4);
  auto frames = normalize_clip(clip);
  ClipSample norm = normalized_to_clip(clip, frames);
  CHECK(norm.normalized);
  ClipSample back = parse_clip(write_clip(norm), norm.clip_id);
  CHECK(back.normalized);
  REQUIRE(back.frames.size() == frames.size());
  // 9-significant-digit wire precision
  for (std::size_t i = 0; i < frames.size(); ++i)
    for (int p = 0; p < kNumPoints; ++p) {
      CHECK(back.frames[i].points[p].x ==
            Catch::Approx(frames[i].points[p].x).margin(1e-7).epsilon(1e-8));
      CHECK(back.frames[i].points[p].visible == frames[i].points[p].visible);
    }
}
