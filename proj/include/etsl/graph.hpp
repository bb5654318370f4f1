#pragma once

#include <vector>

#include "etsl/nn.hpp"
#include "etsl/normalize.hpp"
#include "etsl/topology.hpp"

namespace etsl {

// Node feature matrix for one normalized frame: 53 x coord_count, masked
// points zeroed.
inline Mat node_features(const NormalizedFrame& frame, int coord_count = 3) {
  Mat x = Mat::Zero(kNumPoints, coord_count);
  for (int p = 0; p < kNumPoints; ++p) {
    if (!frame.points[p].visible) continue;
    x(p, 0) = frame.points[p].x;
    x(p, 1) = frame.points[p].y;
    if (coord_count == 3) x(p, 2) = frame.points[p].z;
  }
  return x;
}

// Elementwise mean over consecutive windows; the final partial window is
// averaged over its actual length.  window=1 is the identity.
inline std::vector<Mat> temporal_pool(const std::vector<Mat>& frames,
                                      int window = 3) {
  if (window < 1)
    fail(Err::DimensionMismatch, "pool window must be >= 1");
  if (frames.empty()) fail(Err::EmptyCorpus, "temporal_pool: no frames");
  std::vector<Mat> out;
  const std::size_t T = frames.size();
  out.reserve((T + window - 1) / window);
  for (std::size_t start = 0; start < T; start += window) {
    std::size_t end = std::min(start + window, T);
    Mat sum = frames[start];
    for (std::size_t t = start + 1; t < end; ++t) sum += frames[t];
    out.push_back(sum / static_cast<double>(end - start));
  }
  return out;
}

// Gradient of temporal_pool: each input frame receives its window's gradient
// divided by the window's actual length.
inline std::vector<Mat> temporal_pool_backward(const std::vector<Mat>& dpooled,
                                               std::size_t T, int window) {
  std::vector<Mat> dx(T);
  std::size_t k = 0;
  for (std::size_t start = 0; start < T; start += window, ++k) {
    std::size_t end = std::min(start + static_cast<std::size_t>(window), T);
    Mat share = dpooled[k] / static_cast<double>(end - start);
    for (std::size_t t = start; t < end; ++t) dx[t] = share;
  }
  return dx;
}

struct GraphConvWeights {
  Mat weight;  // (d_in, d_out)
  Vec bias;    // (d_out)
};

enum class Activation { relu, none };

// Row-normalized neighborhood average; neighbor sums run in ascending node
// order.  An isolated node with include_self=false aggregates to zero.
inline Mat mean_aggregate(const Mat& x,
                          const std::vector<std::vector<int>>& neighbors,
                          bool include_self) {
  const Eigen::Index n = x.rows();
  if (static_cast<Eigen::Index>(neighbors.size()) != n)
    fail(Err::DimensionMismatch, "mean_aggregate: adjacency covers " +
                                     std::to_string(neighbors.size()) +
                                     " nodes, features " + std::to_string(n));
  Mat agg = Mat::Zero(n, x.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    RowVec sum = RowVec::Zero(x.cols());
    std::size_t count = 0;
    bool self_added = !include_self;
    for (int j : neighbors[i]) {
      if (!self_added && j > i) {
        sum += x.row(i);
        ++count;
        self_added = true;
      }
      sum += x.row(j);
      ++count;
    }
    if (!self_added) {
      sum += x.row(i);
      ++count;
    }
    if (count > 0) agg.row(i) = sum / static_cast<double>(count);
  }
  return agg;
}

// out[i] = act( mean over N(i) (plus self) of x, times weight, plus bias )
inline Mat graph_convolve(const Mat& x,
                          const std::vector<std::vector<int>>& neighbors,
                          const GraphConvWeights& w, bool include_self = true,
                          Activation act = Activation::relu) {
  if (x.cols() != w.weight.rows())
    fail(Err::DimensionMismatch,
         "graph_convolve: features " + std::to_string(x.cols()) +
             " vs weight rows " + std::to_string(w.weight.rows()));
  if (w.bias.size() != w.weight.cols())
    fail(Err::DimensionMismatch, "graph_convolve: bias size");
  Mat h = mean_aggregate(x, neighbors, include_self) * w.weight;
  h.rowwise() += w.bias.transpose();
  return act == Activation::relu ? relu(h) : h;
}

inline Mat graph_convolve(const Mat& x, const SkeletonTopology& topology,
                          const GraphConvWeights& w, bool include_self = true,
                          Activation act = Activation::relu) {
  if (x.rows() != topology.node_count)
    fail(Err::DimensionMismatch, "graph_convolve: node count");
  return graph_convolve(x, topology.neighbors, w, include_self, act);
}

// Trainable single graph-convolution layer, shared across time steps.
struct GraphConvLayer {
  Param W;  // (d_in, d_out)
  Param b;  // (1, d_out)
  bool include_self = true;
  Activation act = Activation::relu;
  std::vector<Mat> agg_;  // per-step aggregated inputs
  std::vector<Mat> pre_;  // per-step pre-activations

  GraphConvLayer() = default;
  GraphConvLayer(const std::string& name, Eigen::Index d_in, Eigen::Index d_out)
      : W(name + ".w", d_in, d_out), b(name + ".b", 1, d_out) {}

  void init(Rng& rng) {
    W.init_uniform(rng, static_cast<double>(W.w.rows()));
    b.init_uniform(rng, static_cast<double>(W.w.rows()));
  }

  void collect(ParamRefs& out) {
    out.push_back(&W);
    out.push_back(&b);
  }

  GraphConvWeights weights() const { return {W.w, b.w.row(0).transpose()}; }

  std::vector<Mat> forward(const std::vector<Mat>& steps,
                           const std::vector<std::vector<int>>& neighbors) {
    agg_.clear();
    pre_.clear();
    std::vector<Mat> out;
    out.reserve(steps.size());
    for (const Mat& x : steps) {
      Mat a = mean_aggregate(x, neighbors, include_self);
      Mat h = a * W.w;
      h.rowwise() += b.w.row(0);
      agg_.push_back(std::move(a));
      pre_.push_back(h);
      out.push_back(act == Activation::relu ? relu(h) : h);
    }
    return out;
  }

  std::vector<Mat> backward(const std::vector<Mat>& dout,
                            const std::vector<std::vector<int>>& neighbors) {
    std::vector<Mat> dx(dout.size());
    for (std::size_t s = 0; s < dout.size(); ++s) {
      Mat dh = act == Activation::relu ? relu_backward(pre_[s], dout[s])
                                       : dout[s];
      W.g.noalias() += agg_[s].transpose() * dh;
      b.g.row(0) += dh.colwise().sum();
      Mat dagg = dh * W.w.transpose();
      // transpose of mean aggregation: scatter each row's share back
      Mat d = Mat::Zero(dagg.rows(), dagg.cols());
      for (Eigen::Index i = 0; i < dagg.rows(); ++i) {
        std::size_t count = neighbors[i].size() + (include_self ? 1 : 0);
        if (count == 0) continue;
        RowVec share = dagg.row(i) / static_cast<double>(count);
        if (include_self) d.row(i) += share;
        for (int j : neighbors[i]) d.row(j) += share;
      }
      dx[s] = std::move(d);
    }
    return dx;
  }
};

// The full GNN-T source pathway on one clip: per-frame node features ->
// 3-frame pooling -> one graph convolution -> flatten -> linear projection.
inline std::vector<Vec> assemble_gnn_sequence(
    const std::vector<NormalizedFrame>& clip_frames,
    const SkeletonTopology& topology, const GraphConvWeights& w,
    const Mat& projection_weight, const Vec& projection_bias,
    int coord_count = 3, int window = 3, bool include_self = true,
    Activation act = Activation::relu) {
  std::vector<Mat> frames;
  frames.reserve(clip_frames.size());
  for (const auto& f : clip_frames) frames.push_back(node_features(f, coord_count));
  std::vector<Mat> pooled = temporal_pool(frames, window);
  const Eigen::Index flat = static_cast<Eigen::Index>(kNumPoints) * w.weight.cols();
  if (projection_weight.rows() != flat)
    fail(Err::DimensionMismatch,
         "assemble_gnn_sequence: projection expects " +
             std::to_string(projection_weight.rows()) + " inputs, got " +
             std::to_string(flat));
  std::vector<Vec> out;
  out.reserve(pooled.size());
  for (const Mat& step : pooled) {
    Mat conv = graph_convolve(step, topology, w, include_self, act);
    // row-major flatten: node 0 features first
    Vec v(flat);
    for (Eigen::Index i = 0; i < conv.rows(); ++i)
      v.segment(i * conv.cols(), conv.cols()) = conv.row(i).transpose();
    out.push_back(projection_weight.transpose() * v + projection_bias);
  }
  return out;
}

}  // namespace etsl
