#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "etsl/common.hpp"

namespace etsl {

using Mat = Eigen::MatrixXd;  // rows = time/nodes, cols = features
using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;

// A named tensor with its gradient accumulator.
struct Param {
  std::string name;
  Mat w;
  Mat g;

  Param() = default;
  Param(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), w(Mat::Zero(rows, cols)), g(Mat::Zero(rows, cols)) {}

  void init_uniform(Rng& rng, double fan_in) {
    double bound = 1.0 / std::sqrt(fan_in > 0 ? fan_in : 1.0);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        w(i, j) = rng.uniform(-bound, bound);
  }
};

using ParamRefs = std::vector<Param*>;

inline Mat softmax_rows(const Mat& scores) {
  Mat p(scores.rows(), scores.cols());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    double mx = scores.row(r).maxCoeff();
    RowVec e = (scores.row(r).array() - mx).exp();
    p.row(r) = e / e.sum();
  }
  return p;
}

// d(scores) given d(probs), with probs from softmax_rows
inline Mat softmax_rows_backward(const Mat& probs, const Mat& dprobs) {
  Mat ds(probs.rows(), probs.cols());
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    double dot = probs.row(r).dot(dprobs.row(r));
    ds.row(r) = probs.row(r).cwiseProduct(
        (dprobs.row(r).array() - dot).matrix());
  }
  return ds;
}

struct Linear {
  Param W;  // (in, out)
  Param b;  // (1, out)
  Mat x_;

  Linear() = default;
  Linear(const std::string& name, Eigen::Index in, Eigen::Index out)
      : W(name + ".w", in, out), b(name + ".b", 1, out) {}

  void init(Rng& rng) {
    W.init_uniform(rng, static_cast<double>(W.w.rows()));
    b.init_uniform(rng, static_cast<double>(W.w.rows()));
  }

  void collect(ParamRefs& out) {
    out.push_back(&W);
    out.push_back(&b);
  }

  Mat forward(const Mat& x) {
    if (x.cols() != W.w.rows())
      fail(Err::DimensionMismatch, W.name + ": input has " +
                                       std::to_string(x.cols()) + " features, want " +
                                       std::to_string(W.w.rows()));
    x_ = x;
    Mat y = x * W.w;
    y.rowwise() += b.w.row(0);
    return y;
  }

  Mat backward(const Mat& dy) {
    W.g.noalias() += x_.transpose() * dy;
    b.g.row(0) += dy.colwise().sum();
    return dy * W.w.transpose();
  }
};

struct LayerNorm {
  Param gamma;  // (1, d)
  Param beta;   // (1, d)
  double eps = 1e-5;
  Mat xhat_;
  Vec inv_std_;

  LayerNorm() = default;
  LayerNorm(const std::string& name, Eigen::Index d)
      : gamma(name + ".gamma", 1, d), beta(name + ".beta", 1, d) {
    gamma.w.setOnes();
  }

  void collect(ParamRefs& out) {
    out.push_back(&gamma);
    out.push_back(&beta);
  }

  Mat forward(const Mat& x) {
    const double d = static_cast<double>(x.cols());
    xhat_.resize(x.rows(), x.cols());
    inv_std_.resize(x.rows());
    Mat y(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      double mu = x.row(r).mean();
      RowVec c = x.row(r).array() - mu;
      double var = c.squaredNorm() / d;
      double inv = 1.0 / std::sqrt(var + eps);
      inv_std_(r) = inv;
      xhat_.row(r) = c * inv;
      y.row(r) =
          xhat_.row(r).cwiseProduct(gamma.w.row(0)) + beta.w.row(0);
    }
    return y;
  }

  Mat backward(const Mat& dy) {
    Mat dx(dy.rows(), dy.cols());
    for (Eigen::Index r = 0; r < dy.rows(); ++r) {
      RowVec dxhat = dy.row(r).cwiseProduct(gamma.w.row(0));
      double m1 = dxhat.mean();
      double m2 = dxhat.cwiseProduct(xhat_.row(r)).mean();
      dx.row(r) =
          (dxhat.array() - m1 - xhat_.row(r).array() * m2) * inv_std_(r);
      gamma.g.row(0) += dy.row(r).cwiseProduct(xhat_.row(r));
      beta.g.row(0) += dy.row(r);
    }
    return dx;
  }
};

// Inverted dropout; the kept mask already carries the 1/(1-p) scale.
struct Dropout {
  double p = 0.0;
  Mat mask_;
  bool active_ = false;

  Mat forward(const Mat& x, bool train, Rng& rng) {
    active_ = train && p > 0.0;
    if (!active_) return x;
    double keep = 1.0 - p;
    mask_.resize(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        mask_(i, j) = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
    return x.cwiseProduct(mask_);
  }

  Mat backward(const Mat& dy) const {
    return active_ ? dy.cwiseProduct(mask_).eval() : dy;
  }
};

inline Mat relu(const Mat& x) { return x.cwiseMax(0.0); }

inline Mat relu_backward(const Mat& pre, const Mat& dy) {
  return (pre.array() > 0.0).cast<double>().matrix().cwiseProduct(dy);
}

// Fixed sinusoidal positional encoding, rows are positions.
inline Mat sinusoidal_positions(Eigen::Index len, Eigen::Index d_model) {
  Mat pe(len, d_model);
  for (Eigen::Index t = 0; t < len; ++t) {
    for (Eigen::Index i = 0; i < d_model; i += 2) {
      double angle =
          static_cast<double>(t) /
          std::pow(10000.0, static_cast<double>(i) / static_cast<double>(d_model));
      pe(t, i) = std::sin(angle);
      if (i + 1 < d_model) pe(t, i + 1) = std::cos(angle);
    }
  }
  return pe;
}

}  // namespace etsl
