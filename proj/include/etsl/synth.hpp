#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "etsl/landmark.hpp"

namespace etsl {

namespace detail {

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a + 0x9e3779b97f4a7c15ull * (b + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

}  // namespace detail

// Fixed-width base-26 spellings keep token words stable across vocab
// sizes.  The spelling space allows 676 words; configs accept far fewer
// because each token needs a visually distinct pose template.
inline constexpr int kMaxSynthVocab = 26 * 26;
inline constexpr int kMaxSynthConfigVocab = 50;

inline std::string synth_word(int index) {
  if (index < 0 || index >= kMaxSynthVocab)
    fail(Err::VocabTooLarge, "synthetic vocab index " + std::to_string(index));
  std::string w = "w";
  w.push_back(static_cast<char>('a' + index / 26));
  w.push_back(static_cast<char>('a' + index % 26));
  return w;
}

struct SynthConfig {
  std::uint64_t seed = 1;
  int clip_count = 50;
  int vocab_size = 12;
  int min_tokens = 3;
  int max_tokens = 5;
  int frames_per_token = 6;
  double noise_std = 0.01;
  double fps = 25.0;

  void validate() const {
    if (clip_count < 1) fail(Err::ConfigError, "clip_count must be >= 1");
    if (vocab_size < 1) fail(Err::ConfigError, "vocab_size must be >= 1");
    if (vocab_size > kMaxSynthConfigVocab)
      fail(Err::VocabTooLarge, std::to_string(vocab_size) + " > " +
                                   std::to_string(kMaxSynthConfigVocab));
    if (min_tokens < 1 || max_tokens < min_tokens)
      fail(Err::ConfigError, "token count range invalid");
    if (frames_per_token < 1)
      fail(Err::ConfigError, "frames_per_token must be >= 1");
    if (!(noise_std >= 0.0)) fail(Err::ConfigError, "noise_std must be >= 0");
    if (!(fps > 0.0)) fail(Err::ConfigError, "fps must be positive");
  }
};

// Noise-free pose template for one token at motion phase j.  Shoulders sit
// a unit apart on the x axis so normalization is exact; every other point
// is a seeded draw plus a linear per-phase drift, and the left wrist
// carries a token-indexed offset that keeps distinct tokens distinct.
inline LandmarkFrame synth_template_frame(std::uint64_t seed, int token,
                                          int phase) {
  LandmarkFrame f;
  for (int p = 0; p < kNumPoints; ++p) {
    Point& pt = f.points[p];
    pt.visible = true;
    if (p == kLeftShoulder) {
      pt.x = -0.5;
      pt.y = 0.0;
      pt.z = 0.0;
      continue;
    }
    if (p == kRightShoulder) {
      pt.x = 0.5;
      pt.y = 0.0;
      pt.z = 0.0;
      continue;
    }
    Rng r(detail::mix64(detail::mix64(seed, 0x5e5du),
                        static_cast<std::uint64_t>(token) * 64u +
                            static_cast<std::uint64_t>(p)));
    pt.x = r.uniform(-0.4, 0.4);
    pt.y = r.uniform(-0.2, 1.0);
    pt.z = r.uniform(-0.3, 0.3);
    double drift = 0.01 * phase;
    pt.x += drift * r.uniform(-1.0, 1.0);
    pt.y += drift * r.uniform(-1.0, 1.0);
    pt.z += drift * r.uniform(-1.0, 1.0);
    if (p == kLeftWrist) pt.x += 0.001 * (token + 1);
  }
  return f;
}

struct SynthDataset {
  std::vector<ClipSample> clips;
  std::vector<std::string> words;  // token index -> spelling
};

inline SynthDataset generate_synth(const SynthConfig& cfg) {
  cfg.validate();
  SynthDataset ds;
  for (int i = 0; i < cfg.vocab_size; ++i) ds.words.push_back(synth_word(i));

  // 75/10/15 split by seeded shuffle; clip contents never depend on the
  // assignment, so the proportions are exact for any clip count.
  const long n_train = std::lround(0.75 * cfg.clip_count);
  const long n_dev = std::lround(0.10 * cfg.clip_count);
  std::vector<std::size_t> order(static_cast<std::size_t>(cfg.clip_count));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng split_rng(detail::mix64(cfg.seed, 0x51edu));
  split_rng.shuffle(order);
  std::vector<Split> splits(order.size(), Split::test);
  for (long rank = 0; rank < static_cast<long>(order.size()); ++rank)
    splits[order[static_cast<std::size_t>(rank)]] =
        rank < n_train ? Split::train
                       : (rank < n_train + n_dev ? Split::dev : Split::test);

  for (int c = 0; c < cfg.clip_count; ++c) {
    Rng rng(detail::mix64(cfg.seed, static_cast<std::uint64_t>(c)));
    int n_tokens = cfg.min_tokens +
                   static_cast<int>(rng.index(
                       static_cast<std::size_t>(cfg.max_tokens - cfg.min_tokens + 1)));
    ClipSample clip;
    char id[32];
    std::snprintf(id, sizeof id, "synth%04d", c);
    clip.clip_id = id;
    clip.signer_id = "synth";
    clip.fps = cfg.fps;
    clip.split = splits[static_cast<std::size_t>(c)];
    long frame_index = 0;
    std::string transcript;
    for (int t = 0; t < n_tokens; ++t) {
      int token = static_cast<int>(rng.index(
          static_cast<std::size_t>(cfg.vocab_size)));
      if (t) transcript.push_back(' ');
      transcript += ds.words[static_cast<std::size_t>(token)];
      for (int j = 0; j < cfg.frames_per_token; ++j) {
        LandmarkFrame f = synth_template_frame(cfg.seed, token, j);
        f.frame_index = frame_index++;
        if (cfg.noise_std > 0.0)
          for (auto& pt : f.points) {
            pt.x += cfg.noise_std * rng.normal();
            pt.y += cfg.noise_std * rng.normal();
            pt.z += cfg.noise_std * rng.normal();
          }
        clip.frames.push_back(std::move(f));
      }
    }
    clip.transcript = transcript;
    check_clip(clip);
    ds.clips.push_back(std::move(clip));
  }
  return ds;
}

// Writes clips/<id>.lmk plus manifest.tsv under dir.
inline std::filesystem::path write_synth_dataset(
    const std::filesystem::path& dir, const SynthDataset& ds) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "clips", ec);
  if (ec) fail(Err::IoError, "cannot create " + (dir / "clips").string());
  DatasetManifest manifest;
  for (const ClipSample& clip : ds.clips) {
    std::string rel = "clips/" + clip.clip_id + ".lmk";
    save_clip_file(dir / rel, clip);
    manifest.entries.push_back(
        {clip.clip_id, rel, clip.transcript, clip.split});
  }
  std::filesystem::path manifest_path = dir / "manifest.tsv";
  std::ofstream out(manifest_path);
  if (!out) fail(Err::IoError, "cannot write " + manifest_path.string());
  out << write_manifest(manifest);
  return manifest_path;
}

}  // namespace etsl
