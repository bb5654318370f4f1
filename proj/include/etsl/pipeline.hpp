#pragma once

#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "etsl/checkpoint.hpp"
#include "etsl/runconfig.hpp"
#include "etsl/synth.hpp"
#include "etsl/train.hpp"

namespace etsl {

struct PipelineConfig {
  Variant variant = Variant::p2t;
  ModelConfig model;
  TokenizerOptions tok;
  bool normalize = true;
  NormalizeOptions norm;
  int coord_count = 3;
  int pool_window = 3;
  int gnn_dim = 16;
  std::string topology_file;  // empty: built-in skeleton
  std::size_t max_vocab = 0;  // 0: unbounded
  TrainConfig train;
};

inline const std::set<std::string>& pipeline_config_keys() {
  static const std::set<std::string> keys{
      "variant", "d_model", "heads", "encoder_layers", "decoder_layers",
      "ff_dim", "dropout", "max_source_len", "max_target_len", "coord_count",
      "pool_window", "gnn_dim", "topology_file", "lowercase", "turkish",
      "strip_punctuation", "normalize", "degenerate_policy", "max_vocab",
      "batch_size", "max_epochs", "seed", "lr", "beta1", "beta2", "adam_eps",
      "plateau_factor", "patience", "min_lr", "dev_metric"};
  return keys;
}

inline PipelineConfig parse_pipeline_config(const RunConfig& rc) {
  rc.check_known(pipeline_config_keys());
  PipelineConfig pc;
  pc.variant = parse_variant(rc.get_string("variant", "p2t"));
  const bool gnn = pc.variant == Variant::gnn;

  pc.model.d_model = static_cast<int>(rc.get_int("d_model", 1024));
  pc.model.heads = static_cast<int>(rc.get_int("heads", 8));
  pc.model.encoder_layers = static_cast<int>(rc.get_int("encoder_layers", 6));
  pc.model.decoder_layers = static_cast<int>(rc.get_int("decoder_layers", 6));
  pc.model.ff_dim = static_cast<int>(rc.get_int("ff_dim", 2048));
  pc.model.dropout = rc.get_double("dropout", 0.1);
  // raw frames for p2t; pooled steps for gnn, so a third of the frames
  pc.model.max_source_len =
      static_cast<int>(rc.get_int("max_source_len", gnn ? 540 : 1600));
  pc.model.max_target_len =
      static_cast<int>(rc.get_int("max_target_len", 256));

  pc.coord_count = static_cast<int>(rc.get_int("coord_count", 3));
  pc.pool_window = static_cast<int>(rc.get_int("pool_window", 3));
  pc.gnn_dim = static_cast<int>(rc.get_int("gnn_dim", 16));
  pc.topology_file = rc.get_string("topology_file", "");

  pc.tok.lowercase = rc.get_bool("lowercase", true);
  pc.tok.turkish = rc.get_bool("turkish", true);
  pc.tok.strip_punctuation = rc.get_bool("strip_punctuation", false);

  pc.normalize = rc.get_bool("normalize", true);
  std::string dp = rc.get_string("degenerate_policy", "strict");
  if (dp == "strict")
    pc.norm.policy = DegeneratePolicy::strict;
  else if (dp == "carry_forward")
    pc.norm.policy = DegeneratePolicy::carry_forward;
  else
    fail(Err::ConfigError, "degenerate_policy must be strict or carry_forward");
  pc.norm.coord_count = pc.coord_count;

  long mv = rc.get_int("max_vocab", 0);
  if (mv < 0) fail(Err::ConfigError, "max_vocab must be >= 0");
  pc.max_vocab = static_cast<std::size_t>(mv);

  pc.train.batch_size = static_cast<int>(rc.get_int("batch_size", gnn ? 16 : 4));
  pc.train.max_epochs = static_cast<int>(rc.get_int("max_epochs", 300));
  pc.train.seed = static_cast<std::uint64_t>(rc.get_int("seed", 1));
  pc.train.lr = rc.get_double("lr", 5e-5);
  pc.train.adam.beta1 = rc.get_double("beta1", 0.9);
  pc.train.adam.beta2 = rc.get_double("beta2", 0.98);
  pc.train.adam.eps = rc.get_double("adam_eps", 1e-8);
  pc.train.plateau.factor = rc.get_double("plateau_factor", 0.7);
  pc.train.plateau.patience = static_cast<int>(rc.get_int("patience", 7));
  pc.train.plateau.min_lr = rc.get_double("min_lr", 1e-6);
  pc.train.dev_metric = rc.get_string("dev_metric", "bleu4");
  return pc;
}

// echo of every effective setting, including defaulted ones
inline RunConfig resolved_config(const PipelineConfig& pc) {
  RunConfig rc;
  auto put_int = [&](const char* k, long v) { rc.set(k, std::to_string(v)); };
  auto put_double = [&](const char* k, double v) { rc.set(k, format_g9(v)); };
  auto put_bool = [&](const char* k, bool v) { rc.set(k, v ? "true" : "false"); };
  rc.set("variant", variant_name(pc.variant));
  put_int("d_model", pc.model.d_model);
  put_int("heads", pc.model.heads);
  put_int("encoder_layers", pc.model.encoder_layers);
  put_int("decoder_layers", pc.model.decoder_layers);
  put_int("ff_dim", pc.model.ff_dim);
  put_double("dropout", pc.model.dropout);
  put_int("max_source_len", pc.model.max_source_len);
  put_int("max_target_len", pc.model.max_target_len);
  put_int("coord_count", pc.coord_count);
  put_int("pool_window", pc.pool_window);
  put_int("gnn_dim", pc.gnn_dim);
  if (!pc.topology_file.empty()) rc.set("topology_file", pc.topology_file);
  put_bool("lowercase", pc.tok.lowercase);
  put_bool("turkish", pc.tok.turkish);
  put_bool("strip_punctuation", pc.tok.strip_punctuation);
  put_bool("normalize", pc.normalize);
  rc.set("degenerate_policy",
         pc.norm.policy == DegeneratePolicy::strict ? "strict"
                                                    : "carry_forward");
  put_int("max_vocab", static_cast<long>(pc.max_vocab));
  put_int("batch_size", pc.train.batch_size);
  put_int("max_epochs", pc.train.max_epochs);
  put_int("seed", static_cast<long>(pc.train.seed));
  put_double("lr", pc.train.lr);
  put_double("beta1", pc.train.adam.beta1);
  put_double("beta2", pc.train.adam.beta2);
  put_double("adam_eps", pc.train.adam.eps);
  put_double("plateau_factor", pc.train.plateau.factor);
  put_int("patience", pc.train.plateau.patience);
  put_double("min_lr", pc.train.plateau.min_lr);
  rc.set("dev_metric", pc.train.dev_metric);
  return rc;
}

inline SkeletonTopology pipeline_topology(const PipelineConfig& pc) {
  if (pc.topology_file.empty())
    return build_topology(default_topology_config());
  std::ifstream in(pc.topology_file, std::ios::binary);
  if (!in) fail(Err::IoError, "cannot open " + pc.topology_file);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_topology(ss.str());
}

inline TranslationModel build_model(const PipelineConfig& pc, int vocab_size) {
  ModelConfig mc = pc.model;
  mc.vocab_size = vocab_size;
  SkeletonTopology topo;
  if (pc.variant == Variant::gnn) topo = pipeline_topology(pc);
  return TranslationModel(pc.variant, mc, pc.coord_count, pc.pool_window,
                          pc.gnn_dim, std::move(topo));
}

// Raw wrap without normalization; used for NORM caches and normalize=false.
inline std::vector<NormalizedFrame> raw_frames(const ClipSample& clip) {
  std::vector<NormalizedFrame> out;
  out.reserve(clip.frames.size());
  for (const LandmarkFrame& f : clip.frames) {
    NormalizedFrame nf;
    nf.frame_index = f.frame_index;
    nf.points = f.points;
    out.push_back(nf);
  }
  return out;
}

inline std::vector<NormalizedFrame> clip_to_frames(const ClipSample& clip,
                                                   bool normalize,
                                                   const NormalizeOptions& nopt) {
  if (clip.normalized || !normalize) return raw_frames(clip);
  return normalize_clip(clip, nopt);
}

inline TrainSample make_sample(const ClipSample& clip, const Vocabulary& vocab,
                               const TokenizerOptions& tok, bool normalize,
                               const NormalizeOptions& nopt,
                               std::size_t max_frames, std::ostream* warn) {
  TrainSample s;
  s.clip_id = clip.clip_id;
  s.frames = clip_to_frames(clip, normalize, nopt);
  if (max_frames > 0 && s.frames.size() > max_frames) {
    if (warn)
      *warn << "warning: clip '" << clip.clip_id << "' truncated from "
            << s.frames.size() << " to " << max_frames << " frames\n";
    s.frames.resize(max_frames);
  }
  s.target = vocab.encode(clip.transcript, tok);
  s.reference = tokenize_words(clip.transcript, tok);
  return s;
}

struct LoadedData {
  Vocabulary vocab;
  std::vector<TrainSample> train, dev, test;
};

// Split clips into samples, building the vocabulary from the train split
// only.  max_frames of 0 disables truncation.
inline LoadedData dataset_from_clips(const std::vector<ClipSample>& clips,
                                     const PipelineConfig& pc,
                                     std::size_t max_frames,
                                     std::ostream* warn = nullptr) {
  LoadedData data;
  std::vector<std::string> train_texts;
  for (const ClipSample& c : clips)
    if (c.split == Split::train) train_texts.push_back(c.transcript);
  if (train_texts.empty()) fail(Err::EmptySplit, "train split has no clips");
  data.vocab = Vocabulary::build(train_texts, pc.tok, pc.max_vocab);
  for (const ClipSample& c : clips) {
    TrainSample s = make_sample(c, data.vocab, pc.tok, pc.normalize, pc.norm,
                                max_frames, warn);
    (c.split == Split::train ? data.train
                             : c.split == Split::dev ? data.dev : data.test)
        .push_back(std::move(s));
  }
  return data;
}

inline std::vector<ClipSample> load_manifest_clips(const DatasetManifest& m) {
  std::vector<ClipSample> clips;
  clips.reserve(m.entries.size());
  for (const ManifestEntry& e : m.entries) {
    ClipSample c = load_clip_file(e.landmark_path, e.clip_id);
    c.transcript = e.transcript;
    c.split = e.split;
    clips.push_back(std::move(c));
  }
  return clips;
}

struct TrainRunResult {
  TrainResult train;
  std::filesystem::path best_checkpoint;
  std::filesystem::path history;
  int vocab_size = 0;
};

// Full training run with on-disk artifacts: config.resolved, history.tsv
// appended per epoch, best.ckpt refreshed on every dev improvement.
inline TrainRunResult run_training(const PipelineConfig& pc, LoadedData& data,
                                   const std::filesystem::path& out_dir,
                                   const EpochCallback& extra_cb = {},
                                   std::ostream* log = nullptr) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(Err::IoError, "cannot create " + out_dir.string());

  {
    std::ofstream cfg(out_dir / "config.resolved", std::ios::binary);
    if (!cfg) fail(Err::IoError, "cannot write config.resolved");
    cfg << resolved_config(pc).resolved();
  }

  TranslationModel model = build_model(pc, static_cast<int>(data.vocab.size()));
  model.init_params(pc.train.seed);

  TrainRunResult out;
  out.vocab_size = static_cast<int>(data.vocab.size());
  out.best_checkpoint = out_dir / "best.ckpt";
  out.history = out_dir / "history.tsv";

  std::ofstream hist(out.history, std::ios::binary);
  if (!hist) fail(Err::IoError, "cannot write history.tsv");
  hist << "# epoch\ttrain_loss\tdev_score\tlr\n";

  char buf[160];
  auto on_epoch = [&](const EpochInfo& info, TranslationModel& m) -> bool {
    std::snprintf(buf, sizeof buf, "%d\t%.17g\t%.17g\t%.17g\n", info.epoch,
                  info.train_loss, info.dev_score, info.lr);
    hist << buf;
    hist.flush();
    if (log) {
      std::snprintf(buf, sizeof buf,
                    "epoch %d  loss %.4f  dev %.4f  lr %.3g%s\n", info.epoch,
                    info.train_loss, info.dev_score, info.lr,
                    info.improved ? "  *" : "");
      *log << buf;
    }
    return extra_cb ? extra_cb(info, m) : false;
  };
  auto on_best = [&](const EpochInfo& info, TranslationModel& m) {
    TrainState st;
    st.epoch = info.epoch;
    st.lr = info.lr;
    st.best_dev = info.dev_score;
    save_checkpoint(out.best_checkpoint.string(), m, data.vocab, pc.tok,
                    pc.normalize, st);
  };

  out.train = train(model, data.vocab, data.train, data.dev, pc.train,
                    on_epoch, on_best);
  return out;
}

inline TokenSeq hypothesis_tokens(const Vocabulary& vocab,
                                  const std::vector<int>& ids) {
  TokenSeq toks;
  toks.reserve(ids.size());
  for (int id : ids) toks.push_back(vocab.token_of(id));
  return toks;
}

// clip_id -> decoded text for one split
inline std::vector<std::pair<std::string, std::string>> translate_split(
    Checkpoint& ck, const std::vector<ClipSample>& clips, Split split,
    std::ostream* warn = nullptr) {
  NormalizeOptions nopt;
  nopt.coord_count = ck.model.coord_count;
  std::vector<std::pair<std::string, std::string>> out;
  for (const ClipSample& c : clips) {
    if (c.split != split) continue;
    TrainSample s = make_sample(c, ck.vocab, ck.tokenizer, ck.normalize_input,
                                nopt, ck.model.max_input_frames(), warn);
    std::vector<int> ids = ck.model.translate(s.frames);
    out.emplace_back(c.clip_id, ck.vocab.decode(ids));
  }
  return out;
}

// Hypothesis files: `clip_id<TAB>text`, one line per clip.
inline std::string write_hypotheses(
    const std::vector<std::pair<std::string, std::string>>& hyps) {
  std::string out;
  for (const auto& [id, text] : hyps) out += id + "\t" + text + "\n";
  return out;
}

inline std::map<std::string, std::string> parse_hypotheses(
    const std::string& content) {
  std::map<std::string, std::string> out;
  std::istringstream in(content);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      fail(Err::MalformedHeader, "hypothesis line " + std::to_string(line_no) +
                                     ": expected clip_id<TAB>text");
    std::string id = trim(line.substr(0, tab));
    if (out.count(id)) fail(Err::DuplicateClipId, id);
    out[id] = trim(line.substr(tab + 1));
  }
  return out;
}

// Scores hypotheses against the references of one manifest split; every
// split clip must have a hypothesis line.
inline EvaluationReport evaluate_hypotheses(
    const DatasetManifest& manifest, Split split,
    const std::map<std::string, std::string>& hyps, const TokenizerOptions& tok,
    bool smooth = false) {
  std::vector<TokenSeq> refs, cands;
  std::vector<std::string> ids;
  for (const ManifestEntry& e : manifest.entries) {
    if (e.split != split) continue;
    auto it = hyps.find(e.clip_id);
    if (it == hyps.end()) fail(Err::MissingHypothesis, e.clip_id);
    refs.push_back(tokenize_words(e.transcript, tok));
    cands.push_back(tokenize_words(it->second, tok));
    ids.push_back(e.clip_id);
  }
  if (refs.empty()) fail(Err::EmptySplit, split_name(split));
  return evaluate_corpus(refs, cands, smooth, &ids);
}

}  // namespace etsl
