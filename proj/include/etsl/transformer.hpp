#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "etsl/nn.hpp"
#include "etsl/vocab.hpp"

namespace etsl {

struct ModelConfig {
  int d_model = 1024;
  int heads = 8;
  int encoder_layers = 6;
  int decoder_layers = 6;
  int ff_dim = 2048;
  double dropout = 0.1;
  int max_source_len = 1600;
  int max_target_len = 256;
  int vocab_size = 0;

  void validate() const {
    if (d_model < 1 || heads < 1 || encoder_layers < 1 || decoder_layers < 1 ||
        ff_dim < 1 || max_source_len < 1 || max_target_len < 1 ||
        vocab_size < Vocabulary::kNumReserved)
      fail(Err::ConfigError, "model dimensions must be positive");
    if (d_model % heads != 0)
      fail(Err::ConfigError, "d_model " + std::to_string(d_model) +
                                 " not divisible by heads " +
                                 std::to_string(heads));
    if (!(dropout >= 0.0 && dropout < 1.0))
      fail(Err::ConfigError, "dropout must be in [0, 1)");
  }
};

inline constexpr double kMaskedScore = -1e30;

// Additive attention mask.  causal limits queries to keys <= query index;
// key_pad (when given) removes individual key positions.
inline Mat attention_mask(Eigen::Index tq, Eigen::Index tk, bool causal,
                          const std::vector<bool>* key_valid) {
  Mat m = Mat::Zero(tq, tk);
  for (Eigen::Index q = 0; q < tq; ++q)
    for (Eigen::Index k = 0; k < tk; ++k) {
      bool block = (causal && k > q) ||
                   (key_valid && !(*key_valid)[static_cast<std::size_t>(k)]);
      if (block) m(q, k) = kMaskedScore;
    }
  return m;
}

struct MultiHeadAttention {
  int d_model = 0, heads = 0, dh = 0;
  Linear wq, wk, wv, wo;
  std::vector<Mat> probs_;  // per head, rows sum to 1
  Mat q_, k_, v_;

  MultiHeadAttention() = default;
  MultiHeadAttention(const std::string& name, int d_model_, int heads_)
      : d_model(d_model_),
        heads(heads_),
        dh(d_model_ / heads_),
        wq(name + ".wq", d_model_, d_model_),
        wk(name + ".wk", d_model_, d_model_),
        wv(name + ".wv", d_model_, d_model_),
        wo(name + ".wo", d_model_, d_model_) {}

  void init(Rng& rng) {
    wq.init(rng);
    wk.init(rng);
    wv.init(rng);
    wo.init(rng);
  }

  void collect(ParamRefs& out) {
    wq.collect(out);
    wk.collect(out);
    wv.collect(out);
    wo.collect(out);
  }

  Mat forward(const Mat& q_in, const Mat& kv_in, const Mat* add_mask) {
    q_ = wq.forward(q_in);
    k_ = wk.forward(kv_in);
    v_ = wv.forward(kv_in);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    probs_.assign(heads, {});
    Mat concat(q_.rows(), d_model);
    for (int h = 0; h < heads; ++h) {
      auto qh = q_.middleCols(h * dh, dh);
      auto kh = k_.middleCols(h * dh, dh);
      Mat scores = qh * kh.transpose() * scale;
      if (add_mask) scores += *add_mask;
      probs_[h] = softmax_rows(scores);
      concat.middleCols(h * dh, dh) = probs_[h] * v_.middleCols(h * dh, dh);
    }
    return wo.forward(concat);
  }

  // returns (d_q_in, d_kv_in)
  std::pair<Mat, Mat> backward(const Mat& dy) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    Mat dconcat = wo.backward(dy);
    Mat dq = Mat::Zero(q_.rows(), d_model);
    Mat dk = Mat::Zero(k_.rows(), d_model);
    Mat dv = Mat::Zero(v_.rows(), d_model);
    for (int h = 0; h < heads; ++h) {
      auto vh = v_.middleCols(h * dh, dh);
      auto dctx = dconcat.middleCols(h * dh, dh);
      Mat da = dctx * vh.transpose();
      dv.middleCols(h * dh, dh) = probs_[h].transpose() * dctx;
      Mat ds = softmax_rows_backward(probs_[h], da) * scale;
      dq.middleCols(h * dh, dh) = ds * k_.middleCols(h * dh, dh);
      dk.middleCols(h * dh, dh) = ds.transpose() * q_.middleCols(h * dh, dh);
    }
    Mat d_q_in = wq.backward(dq);
    Mat d_kv_in = wk.backward(dk) + wv.backward(dv);
    return {std::move(d_q_in), std::move(d_kv_in)};
  }
};

struct FeedForward {
  Linear lin1, lin2;
  Mat pre_;

  FeedForward() = default;
  FeedForward(const std::string& name, int d_model, int ff_dim)
      : lin1(name + ".lin1", d_model, ff_dim),
        lin2(name + ".lin2", ff_dim, d_model) {}

  void init(Rng& rng) {
    lin1.init(rng);
    lin2.init(rng);
  }
  void collect(ParamRefs& out) {
    lin1.collect(out);
    lin2.collect(out);
  }

  Mat forward(const Mat& x) {
    pre_ = lin1.forward(x);
    return lin2.forward(relu(pre_));
  }

  Mat backward(const Mat& dy) {
    Mat dh = lin2.backward(dy);
    return lin1.backward(relu_backward(pre_, dh));
  }
};

// Post-norm residual block pair: x = LN(x + drop(SelfAttn(x))) then
// x = LN(x + drop(FF(x))).
struct EncoderLayer {
  MultiHeadAttention attn;
  FeedForward ff;
  LayerNorm ln1, ln2;
  Dropout drop1, drop2;

  EncoderLayer() = default;
  EncoderLayer(const std::string& name, const ModelConfig& cfg)
      : attn(name + ".attn", cfg.d_model, cfg.heads),
        ff(name + ".ff", cfg.d_model, cfg.ff_dim),
        ln1(name + ".ln1", cfg.d_model),
        ln2(name + ".ln2", cfg.d_model) {
    drop1.p = drop2.p = cfg.dropout;
  }

  void init(Rng& rng) {
    attn.init(rng);
    ff.init(rng);
  }
  void collect(ParamRefs& out) {
    attn.collect(out);
    ff.collect(out);
    ln1.collect(out);
    ln2.collect(out);
  }

  Mat forward(const Mat& x, const Mat* src_mask, bool train, Rng& rng) {
    Mat a = attn.forward(x, x, src_mask);
    Mat h = ln1.forward(x + drop1.forward(a, train, rng));
    Mat f = ff.forward(h);
    return ln2.forward(h + drop2.forward(f, train, rng));
  }

  Mat backward(const Mat& dy) {
    Mat d1 = ln2.backward(dy);
    Mat dh = d1 + ff.backward(drop2.backward(d1));
    Mat dx1 = ln1.backward(dh);
    auto [dq, dkv] = attn.backward(drop1.backward(dx1));
    return dx1 + dq + dkv;
  }
};

struct DecoderLayer {
  MultiHeadAttention self_attn, cross_attn;
  FeedForward ff;
  LayerNorm ln1, ln2, ln3;
  Dropout drop1, drop2, drop3;

  DecoderLayer() = default;
  DecoderLayer(const std::string& name, const ModelConfig& cfg)
      : self_attn(name + ".self", cfg.d_model, cfg.heads),
        cross_attn(name + ".cross", cfg.d_model, cfg.heads),
        ff(name + ".ff", cfg.d_model, cfg.ff_dim),
        ln1(name + ".ln1", cfg.d_model),
        ln2(name + ".ln2", cfg.d_model),
        ln3(name + ".ln3", cfg.d_model) {
    drop1.p = drop2.p = drop3.p = cfg.dropout;
  }

  void init(Rng& rng) {
    self_attn.init(rng);
    cross_attn.init(rng);
    ff.init(rng);
  }
  void collect(ParamRefs& out) {
    self_attn.collect(out);
    cross_attn.collect(out);
    ff.collect(out);
    ln1.collect(out);
    ln2.collect(out);
    ln3.collect(out);
  }

  Mat forward(const Mat& x, const Mat& memory, const Mat* causal_mask,
              const Mat* cross_mask, bool train, Rng& rng) {
    Mat a = self_attn.forward(x, x, causal_mask);
    Mat h1 = ln1.forward(x + drop1.forward(a, train, rng));
    Mat c = cross_attn.forward(h1, memory, cross_mask);
    Mat h2 = ln2.forward(h1 + drop2.forward(c, train, rng));
    Mat f = ff.forward(h2);
    return ln3.forward(h2 + drop3.forward(f, train, rng));
  }

  // returns (dx, d_memory)
  std::pair<Mat, Mat> backward(const Mat& dy) {
    Mat d2 = ln3.backward(dy);
    Mat dh2 = d2 + ff.backward(drop3.backward(d2));
    Mat d1 = ln2.backward(dh2);
    auto [dq_c, dmem] = cross_attn.backward(drop2.backward(d1));
    Mat dh1 = d1 + dq_c;
    Mat dx1 = ln1.backward(dh1);
    auto [dq_s, dkv_s] = self_attn.backward(drop1.backward(dx1));
    return {dx1 + dq_s + dkv_s, std::move(dmem)};
  }
};

// Encoder-decoder over pre-embedded source vectors; target tokens are
// embedded internally.  Positional encoding is fixed sinusoidal on both
// sides, an embedding scale of sqrt(d_model) applies to target tokens.
class TransformerCore {
 public:
  ModelConfig cfg;
  Param tgt_embed;  // (vocab, d_model)
  Linear out_proj;  // d_model -> vocab

  TransformerCore() = default;

  explicit TransformerCore(const ModelConfig& config) : cfg(config) {
    cfg.validate();
    tgt_embed = Param("tgt_embed", cfg.vocab_size, cfg.d_model);
    out_proj = Linear("out_proj", cfg.d_model, cfg.vocab_size);
    for (int l = 0; l < cfg.encoder_layers; ++l)
      enc_.emplace_back("enc." + std::to_string(l), cfg);
    for (int l = 0; l < cfg.decoder_layers; ++l)
      dec_.emplace_back("dec." + std::to_string(l), cfg);
    src_drop_.p = tgt_drop_.p = cfg.dropout;
  }

  void init_params(Rng& rng) {
    tgt_embed.init_uniform(rng, cfg.d_model);
    out_proj.init(rng);
    for (auto& l : enc_) l.init(rng);
    for (auto& l : dec_) l.init(rng);
  }

  void collect(ParamRefs& out) {
    out.push_back(&tgt_embed);
    out_proj.collect(out);
    for (auto& l : enc_) l.collect(out);
    for (auto& l : dec_) l.collect(out);
  }

  std::vector<EncoderLayer>& encoder_layers() { return enc_; }
  std::vector<DecoderLayer>& decoder_layers() { return dec_; }

  // src: (T, d_model) pre-embedded feature vectors.
  Mat encode(const Mat& src, const std::vector<bool>* src_valid = nullptr,
             bool train = false, Rng* rng = nullptr) {
    if (src.rows() > cfg.max_source_len)
      fail(Err::SourceTooLong, std::to_string(src.rows()) + " > max " +
                                   std::to_string(cfg.max_source_len));
    if (src.cols() != cfg.d_model)
      fail(Err::DimensionMismatch, "source feature width " +
                                       std::to_string(src.cols()) + " != d_model");
    Rng dummy(0);
    Rng& r = rng ? *rng : dummy;
    src_valid_ = src_valid ? *src_valid : std::vector<bool>(src.rows(), true);
    src_mask_ = attention_mask(src.rows(), src.rows(), false, &src_valid_);
    Mat x = src + sinusoidal_positions(src.rows(), cfg.d_model);
    x = src_drop_.forward(x, train, r);
    for (auto& l : enc_) x = l.forward(x, &src_mask_, train, r);
    return x;
  }

  // prefix starts with BOS; logits row t scores the token at target
  // position t (inputs 0..t attended, so row t never sees later ids).
  Mat decode_logits(const Mat& memory, const std::vector<int>& prefix,
                    bool train = false, Rng* rng = nullptr) {
    if (static_cast<int>(prefix.size()) > cfg.max_target_len)
      fail(Err::TargetTooLong, std::to_string(prefix.size()) + " > max " +
                                   std::to_string(cfg.max_target_len));
    if (prefix.empty())
      fail(Err::InvariantViolation, "decoder prefix must start with BOS");
    Rng dummy(0);
    Rng& r = rng ? *rng : dummy;
    const Eigen::Index tt = static_cast<Eigen::Index>(prefix.size());
    prefix_ = prefix;
    std::vector<bool> tgt_valid(prefix.size());
    for (std::size_t i = 0; i < prefix.size(); ++i)
      tgt_valid[i] = prefix[i] != Vocabulary::kPad;
    causal_mask_ = attention_mask(tt, tt, true, &tgt_valid);
    if (src_valid_.size() != static_cast<std::size_t>(memory.rows()))
      src_valid_.assign(static_cast<std::size_t>(memory.rows()), true);
    cross_mask_ = attention_mask(tt, memory.rows(), false, &src_valid_);

    const double emb_scale = std::sqrt(static_cast<double>(cfg.d_model));
    Mat x(tt, cfg.d_model);
    for (Eigen::Index t = 0; t < tt; ++t) {
      int id = prefix[static_cast<std::size_t>(t)];
      if (id < 0 || id >= cfg.vocab_size)
        fail(Err::InvariantViolation, "token id out of range");
      x.row(t) = tgt_embed.w.row(id) * emb_scale;
    }
    x += sinusoidal_positions(tt, cfg.d_model);
    x = tgt_drop_.forward(x, train, r);
    for (auto& l : dec_) x = l.forward(x, memory, &causal_mask_, &cross_mask_,
                                       train, r);
    return out_proj.forward(x);
  }

  // dlogits from the loss; returns gradient w.r.t. the pre-embedded source.
  // Must follow one encode + one decode_logits pair on the same inputs.
  Mat backward(const Mat& dlogits) {
    Mat dx = out_proj.backward(dlogits);
    Mat dmem = Mat::Zero(src_mask_.rows(), cfg.d_model);
    for (auto it = dec_.rbegin(); it != dec_.rend(); ++it) {
      auto [dxl, dmeml] = it->backward(dx);
      dx = std::move(dxl);
      dmem += dmeml;
    }
    dx = tgt_drop_.backward(dx);
    const double emb_scale = std::sqrt(static_cast<double>(cfg.d_model));
    for (Eigen::Index t = 0; t < dx.rows(); ++t)
      tgt_embed.g.row(prefix_[static_cast<std::size_t>(t)]) +=
          dx.row(t) * emb_scale;

    for (auto it = enc_.rbegin(); it != enc_.rend(); ++it)
      dmem = it->backward(dmem);
    return src_drop_.backward(dmem);
  }

 private:
  std::vector<EncoderLayer> enc_;
  std::vector<DecoderLayer> dec_;
  Dropout src_drop_, tgt_drop_;
  std::vector<bool> src_valid_;
  Mat src_mask_, causal_mask_, cross_mask_;
  std::vector<int> prefix_;
};

// Greedy autoregressive decoding over any step function mapping a BOS-led
// prefix to next-token logits.  Ties break toward the lowest id; reserved
// tokens never appear in the output.
template <typename StepFn>
std::vector<int> greedy_decode_steps(StepFn&& next_logits, int max_target_len) {
  std::vector<int> prefix{Vocabulary::kBos};
  std::vector<int> out;
  for (int step = 0; step < max_target_len; ++step) {
    Vec logits = next_logits(prefix);
    int best = 0;
    for (int i = 1; i < logits.size(); ++i)
      if (logits(i) > logits(best)) best = i;
    if (best == Vocabulary::kEos) break;
    prefix.push_back(best);
    if (best != Vocabulary::kPad && best != Vocabulary::kBos)
      out.push_back(best);
  }
  return out;
}

}  // namespace etsl
