#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "etsl/metrics.hpp"
#include "etsl/model.hpp"

namespace etsl {

struct TrainSample {
  std::string clip_id;
  std::vector<NormalizedFrame> frames;
  std::vector<int> target;       // content token ids, no BOS/EOS
  TokenSeq reference;            // tokenized transcript for scoring
};

struct CeStats {
  double sum = 0.0;   // total negative log-likelihood over scored tokens
  long tokens = 0;    // positions where gold != PAD
};

// Token-level cross entropy against gold ids; PAD gold positions are
// excluded from both the sum and the gradient.  dlogits (when asked for)
// receives dscale * (softmax - onehot) at scored rows, zero elsewhere.
inline CeStats cross_entropy(const Mat& logits, const std::vector<int>& gold,
                             Mat* dlogits = nullptr, double dscale = 1.0) {
  if (static_cast<std::size_t>(logits.rows()) != gold.size())
    fail(Err::DimensionMismatch,
         "logit rows " + std::to_string(logits.rows()) + " vs gold length " +
             std::to_string(gold.size()));
  if (dlogits) *dlogits = Mat::Zero(logits.rows(), logits.cols());
  CeStats st;
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    int g = gold[static_cast<std::size_t>(t)];
    if (g == Vocabulary::kPad) continue;
    if (g < 0 || g >= logits.cols())
      fail(Err::InvariantViolation, "gold id out of vocabulary");
    RowVec row = logits.row(t);
    double mx = row.maxCoeff();
    RowVec ex = (row.array() - mx).exp();
    double z = ex.sum();
    st.sum += std::log(z) + mx - row(g);
    ++st.tokens;
    if (dlogits) {
      dlogits->row(t) = (ex / z) * dscale;
      (*dlogits)(t, g) -= dscale;
    }
  }
  if (!std::isfinite(st.sum)) fail(Err::NonFiniteLoss, "cross entropy diverged");
  return st;
}

// mean per-token loss; errors when every position is PAD
inline double cross_entropy_loss(const Mat& logits,
                                 const std::vector<int>& gold,
                                 Mat* dlogits = nullptr) {
  CeStats st = cross_entropy(logits, gold, dlogits,
                             1.0);
  if (st.tokens == 0) fail(Err::AllPositionsPadded, "no scored positions");
  if (dlogits) *dlogits /= static_cast<double>(st.tokens);
  return st.sum / static_cast<double>(st.tokens);
}

struct PlateauConfig {
  double factor = 0.7;
  int patience = 7;
  double min_lr = 1e-6;
  bool maximize = true;
};

struct PlateauState {
  double lr = 0.0;
  double best = 0.0;
  int bad = 0;
  bool stopped = false;

  PlateauState() = default;
  PlateauState(double lr0, bool maximize)
      : lr(lr0),
        best(maximize ? -std::numeric_limits<double>::infinity()
                      : std::numeric_limits<double>::infinity()) {}
};

// Strict improvement resets the streak; a streak of `patience` epochs
// decays lr once.  A decay landing below min_lr keeps the decayed value
// and raises the stop flag.
inline bool plateau_step(PlateauState& st, double metric,
                         const PlateauConfig& c) {
  bool improved = c.maximize ? metric > st.best : metric < st.best;
  if (improved) {
    st.best = metric;
    st.bad = 0;
    return true;
  }
  if (++st.bad >= c.patience) {
    st.bad = 0;
    st.lr *= c.factor;
    if (st.lr < c.min_lr) st.stopped = true;
  }
  return false;
}

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-8;
};

// Bias-corrected Adam over a fixed parameter list; gradients are read
// from each Param's g buffer.
class Adam {
 public:
  Adam() = default;
  explicit Adam(ParamRefs params, AdamConfig cfg = {})
      : params_(std::move(params)), cfg_(cfg) {
    for (Param* p : params_) {
      m_.push_back(Mat::Zero(p->w.rows(), p->w.cols()));
      v_.push_back(Mat::Zero(p->w.rows(), p->w.cols()));
    }
  }

  void step(double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      const Mat& g = params_[i]->g;
      m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
      v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
      Mat mhat = m_[i] / bc1;
      Mat vhat = v_[i] / bc2;
      params_[i]->w.array() -=
          lr * mhat.array() / (vhat.array().sqrt() + cfg_.eps);
    }
  }

  long steps() const { return t_; }

 private:
  ParamRefs params_;
  AdamConfig cfg_;
  std::vector<Mat> m_, v_;
  long t_ = 0;
};

struct TrainConfig {
  int batch_size = 4;
  int max_epochs = 300;
  std::uint64_t seed = 1;
  double lr = 5e-5;
  AdamConfig adam;
  PlateauConfig plateau;
  std::string dev_metric = "bleu4";  // or "dev_loss"

  void validate() const {
    if (batch_size < 1) fail(Err::ConfigError, "batch_size must be >= 1");
    if (max_epochs < 1) fail(Err::ConfigError, "max_epochs must be >= 1");
    if (lr <= 0.0) fail(Err::ConfigError, "lr must be positive");
    if (!(plateau.factor > 0.0 && plateau.factor < 1.0))
      fail(Err::ConfigError, "plateau factor must be in (0, 1)");
    if (!(plateau.min_lr < lr))
      fail(Err::ConfigError, "min_lr must be below the initial lr");
    if (plateau.patience < 1) fail(Err::ConfigError, "patience must be >= 1");
    if (dev_metric != "bleu4" && dev_metric != "dev_loss")
      fail(Err::ConfigError,
           "dev_metric must be bleu4 or dev_loss, got '" + dev_metric + "'");
  }
};

struct EpochInfo {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_score = 0.0;
  double lr = 0.0;         // rate used during this epoch
  bool improved = false;
};

struct TrainResult {
  std::vector<EpochInfo> history;
  int best_epoch = 0;
  double best_dev = 0.0;
  bool early_stopped = false;   // scheduler floor reached
};

inline std::vector<int> teacher_prefix(const std::vector<int>& target) {
  std::vector<int> prefix;
  prefix.reserve(target.size() + 1);
  prefix.push_back(Vocabulary::kBos);
  prefix.insert(prefix.end(), target.begin(), target.end());
  return prefix;
}

inline std::vector<int> gold_with_eos(const std::vector<int>& target) {
  std::vector<int> gold = target;
  gold.push_back(Vocabulary::kEos);
  return gold;
}

inline double dev_teacher_loss(TranslationModel& model,
                               const std::vector<TrainSample>& dev) {
  double sum = 0.0;
  long tokens = 0;
  for (const auto& s : dev) {
    Mat logits = model.forward(s.frames, teacher_prefix(s.target), false);
    CeStats st = cross_entropy(logits, gold_with_eos(s.target));
    sum += st.sum;
    tokens += st.tokens;
  }
  return tokens > 0 ? sum / static_cast<double>(tokens) : 0.0;
}

inline double dev_bleu4(TranslationModel& model, const Vocabulary& vocab,
                        const std::vector<TrainSample>& dev) {
  std::vector<TokenSeq> refs, hyps;
  refs.reserve(dev.size());
  hyps.reserve(dev.size());
  for (const auto& s : dev) {
    refs.push_back(s.reference);
    std::vector<int> ids = model.translate(s.frames);
    TokenSeq hyp;
    hyp.reserve(ids.size());
    for (int id : ids) hyp.push_back(vocab.token_of(id));
    hyps.push_back(std::move(hyp));
  }
  return corpus_bleu_scores(refs, hyps)[3];
}

// Called after each epoch's dev evaluation; returning true stops training.
using EpochCallback = std::function<bool(const EpochInfo&, TranslationModel&)>;
// Called whenever the dev metric strictly improves.
using BestCallback = std::function<void(const EpochInfo&, TranslationModel&)>;

inline TrainResult train(TranslationModel& model, const Vocabulary& vocab,
                         const std::vector<TrainSample>& train_set,
                         const std::vector<TrainSample>& dev_set,
                         const TrainConfig& tc,
                         const EpochCallback& on_epoch = {},
                         const BestCallback& on_best = {}) {
  tc.validate();
  if (train_set.empty()) fail(Err::EmptySplit, "train split has no clips");
  if (dev_set.empty()) fail(Err::EmptySplit, "dev split has no clips");

  const bool maximize = tc.dev_metric == "bleu4";
  PlateauConfig pc = tc.plateau;
  pc.maximize = maximize;
  PlateauState sched(tc.lr, maximize);
  Adam adam(model.params(), tc.adam);

  TrainResult result;
  result.best_dev = maximize ? -std::numeric_limits<double>::infinity()
                             : std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    // fresh shuffle stream per epoch so run order depends only on
    // (seed, epoch), not on how many draws earlier epochs consumed
    Rng shuffle_rng(tc.seed * 0x9e3779b97f4a7c15ull +
                    static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);

    double epoch_sum = 0.0;
    long epoch_tokens = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(tc.batch_size)) {
      std::size_t end = std::min(order.size(),
                                 start + static_cast<std::size_t>(tc.batch_size));
      long batch_tokens = 0;
      for (std::size_t i = start; i < end; ++i)
        batch_tokens +=
            static_cast<long>(train_set[order[i]].target.size()) + 1;
      model.zero_grad();
      for (std::size_t i = start; i < end; ++i) {
        const TrainSample& s = train_set[order[i]];
        Mat logits = model.forward(s.frames, teacher_prefix(s.target), true);
        Mat dlogits;
        CeStats st = cross_entropy(logits, gold_with_eos(s.target), &dlogits,
                                   1.0 / static_cast<double>(batch_tokens));
        model.backward(dlogits);
        epoch_sum += st.sum;
        epoch_tokens += st.tokens;
      }
      adam.step(sched.lr);
    }

    EpochInfo info;
    info.epoch = epoch;
    info.train_loss =
        epoch_tokens > 0 ? epoch_sum / static_cast<double>(epoch_tokens) : 0.0;
    if (!std::isfinite(info.train_loss))
      fail(Err::NonFiniteLoss, "train loss diverged at epoch " +
                                   std::to_string(epoch));
    info.lr = sched.lr;
    info.dev_score = maximize ? dev_bleu4(model, vocab, dev_set)
                              : dev_teacher_loss(model, dev_set);
    info.improved = plateau_step(sched, info.dev_score, pc);
    if (info.improved) {
      result.best_epoch = epoch;
      result.best_dev = info.dev_score;
      if (on_best) on_best(info, model);
    }
    result.history.push_back(info);
    if (on_epoch && on_epoch(info, model)) break;
    if (sched.stopped) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

}  // namespace etsl
