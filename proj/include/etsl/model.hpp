#pragma once

#include <string>
#include <utility>
#include <vector>

#include "etsl/graph.hpp"
#include "etsl/normalize.hpp"
#include "etsl/topology.hpp"
#include "etsl/transformer.hpp"

namespace etsl {

enum class Variant { p2t, gnn };

inline const char* variant_name(Variant v) {
  return v == Variant::p2t ? "p2t" : "gnn";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "p2t" || s == "p2t-t") return Variant::p2t;
  if (s == "gnn" || s == "gnn-t") return Variant::gnn;
  fail(Err::ConfigError,
       "unknown variant '" + s + "' (expected p2t-t or gnn-t)");
}

// Pose-sequence to text model.  The p2t variant projects raw flattened
// landmark frames straight into the encoder; the gnn variant first pools
// frames over a fixed window, runs one mean-aggregation graph convolution
// over the skeleton, and projects the flattened node states.
class TranslationModel {
 public:
  Variant variant = Variant::p2t;
  ModelConfig cfg;
  int coord_count = 3;
  int pool_window = 3;
  int gnn_dim = 16;
  SkeletonTopology topo;
  Linear src_proj;
  GraphConvLayer conv;
  TransformerCore core;

  TranslationModel() = default;

  TranslationModel(Variant v, const ModelConfig& mc, int coord_count_ = 3,
                   int pool_window_ = 3, int gnn_dim_ = 16,
                   SkeletonTopology topo_ = {})
      : variant(v),
        cfg(mc),
        coord_count(coord_count_),
        pool_window(pool_window_),
        gnn_dim(gnn_dim_),
        topo(std::move(topo_)),
        core(mc) {
    if (coord_count != 2 && coord_count != 3)
      fail(Err::ConfigError, "coord_count must be 2 or 3");
    if (variant == Variant::gnn) {
      if (pool_window < 1) fail(Err::ConfigError, "pool_window must be >= 1");
      if (gnn_dim < 1) fail(Err::ConfigError, "gnn_dim must be >= 1");
      // a structureless default instance means "use the built-in skeleton"
      if (topo.node_count != kNumPoints ||
          topo.neighbors.size() != static_cast<std::size_t>(kNumPoints))
        topo = build_topology(default_topology_config());
      conv = GraphConvLayer("gnn_conv", coord_count, gnn_dim);
    }
    src_proj = Linear("src_proj", source_flat_dim(), cfg.d_model);
  }

  Eigen::Index source_flat_dim() const {
    return static_cast<Eigen::Index>(kNumPoints) *
           (variant == Variant::p2t ? coord_count : gnn_dim);
  }

  // frames the pipeline may feed before encode() would reject the clip
  std::size_t max_input_frames() const {
    auto cap = static_cast<std::size_t>(cfg.max_source_len);
    return variant == Variant::p2t ? cap
                                   : cap * static_cast<std::size_t>(pool_window);
  }

  std::size_t source_positions(std::size_t frame_count) const {
    if (variant == Variant::p2t) return frame_count;
    auto w = static_cast<std::size_t>(pool_window);
    return (frame_count + w - 1) / w;
  }

  void init_params(std::uint64_t seed) {
    Rng init_rng(seed);
    src_proj.init(init_rng);
    if (variant == Variant::gnn) conv.init(init_rng);
    core.init_params(init_rng);
    drop_rng_ = Rng(seed ^ 0x9e3779b97f4a7c15ull);
  }

  ParamRefs params() {
    ParamRefs out;
    src_proj.collect(out);
    if (variant == Variant::gnn) conv.collect(out);
    core.collect(out);
    return out;
  }

  void zero_grad() {
    for (Param* p : params()) p->g.setZero();
  }

  Mat embed_source(const std::vector<NormalizedFrame>& frames) {
    if (frames.empty()) fail(Err::InvariantViolation, "clip has no frames");
    if (variant == Variant::p2t) {
      Mat feats(static_cast<Eigen::Index>(frames.size()), source_flat_dim());
      for (std::size_t t = 0; t < frames.size(); ++t) {
        std::vector<double> row = flatten_features(frames[t], coord_count);
        for (std::size_t j = 0; j < row.size(); ++j)
          feats(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) =
              row[j];
      }
      return src_proj.forward(feats);
    }
    std::vector<Mat> per_frame;
    per_frame.reserve(frames.size());
    for (const auto& f : frames) per_frame.push_back(node_features(f, coord_count));
    std::vector<Mat> pooled = temporal_pool(per_frame, pool_window);
    std::vector<Mat> states = conv.forward(pooled, topo.neighbors);
    Mat flat(static_cast<Eigen::Index>(states.size()), source_flat_dim());
    for (std::size_t s = 0; s < states.size(); ++s)
      for (Eigen::Index i = 0; i < states[s].rows(); ++i)
        flat.block(static_cast<Eigen::Index>(s), i * gnn_dim, 1, gnn_dim) =
            states[s].row(i);
    return src_proj.forward(flat);
  }

  // Teacher-forced pass: prefix starts with BOS, logits row t scores the
  // token that follows prefix[t].
  Mat forward(const std::vector<NormalizedFrame>& frames,
              const std::vector<int>& prefix, bool train) {
    Mat src = embed_source(frames);
    memory_ = core.encode(src, nullptr, train, &drop_rng_);
    return core.decode_logits(memory_, prefix, train, &drop_rng_);
  }

  // Accumulates gradients for the call chain of the last forward().
  void backward(const Mat& dlogits) {
    Mat d_src = core.backward(dlogits);
    Mat d_flat = src_proj.backward(d_src);
    if (variant == Variant::p2t) return;
    std::vector<Mat> d_states(static_cast<std::size_t>(d_flat.rows()));
    for (Eigen::Index s = 0; s < d_flat.rows(); ++s) {
      Mat d(kNumPoints, gnn_dim);
      for (int i = 0; i < kNumPoints; ++i)
        d.row(i) = d_flat.block(s, static_cast<Eigen::Index>(i) * gnn_dim, 1,
                                gnn_dim);
      d_states[static_cast<std::size_t>(s)] = std::move(d);
    }
    conv.backward(d_states, topo.neighbors);
  }

  std::vector<int> translate(const std::vector<NormalizedFrame>& frames) {
    Mat src = embed_source(frames);
    Mat memory = core.encode(src, nullptr, false, nullptr);
    auto step = [&](const std::vector<int>& prefix) -> Vec {
      Mat logits = core.decode_logits(memory, prefix, false, nullptr);
      return logits.row(logits.rows() - 1).transpose();
    };
    return greedy_decode_steps(step, cfg.max_target_len - 1);
  }

  Rng& dropout_rng() { return drop_rng_; }

 private:
  Mat memory_;
  Rng drop_rng_{0};
};

}  // namespace etsl
