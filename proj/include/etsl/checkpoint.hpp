#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "etsl/model.hpp"
#include "etsl/vocab.hpp"

namespace etsl {

// Binary model container: magic line, little-endian u64 header length,
// JSON header (config, vocab, tensor directory), then each tensor's
// values as row-major little-endian doubles.  Round-trips bit exactly.
inline constexpr const char* kCheckpointMagic = "ETSLCKPT1\n";

struct TrainState {
  int epoch = 0;
  double lr = 0.0;
  double best_dev = 0.0;
  int bad_epochs = 0;
};

struct Checkpoint {
  TranslationModel model;
  Vocabulary vocab;
  TokenizerOptions tokenizer;
  bool normalize_input = true;
  TrainState state;
};

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

inline void put_double(std::string& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64(out, bits);
}

inline double get_double(const unsigned char* p) {
  std::uint64_t bits = get_u64(p);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

}  // namespace detail

inline std::string serialize_checkpoint(TranslationModel& model,
                                        const Vocabulary& vocab,
                                        const TokenizerOptions& tok,
                                        bool normalize_input,
                                        const TrainState& state) {
  nlohmann::json h;
  h["format"] = 1;
  h["variant"] = variant_name(model.variant);
  h["model"] = {{"d_model", model.cfg.d_model},
                {"heads", model.cfg.heads},
                {"encoder_layers", model.cfg.encoder_layers},
                {"decoder_layers", model.cfg.decoder_layers},
                {"ff_dim", model.cfg.ff_dim},
                {"dropout", model.cfg.dropout},
                {"max_source_len", model.cfg.max_source_len},
                {"max_target_len", model.cfg.max_target_len},
                {"vocab_size", model.cfg.vocab_size}};
  h["frontend"] = {{"coord_count", model.coord_count},
                   {"pool_window", model.pool_window},
                   {"gnn_dim", model.gnn_dim}};
  h["tokenizer"] = {{"lowercase", tok.lowercase},
                    {"turkish", tok.turkish},
                    {"strip_punctuation", tok.strip_punctuation}};
  h["normalize_input"] = normalize_input;
  if (model.variant == Variant::gnn) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [i, j] : model.topo.edges) edges.push_back({i, j});
    h["topology"] = edges;
  }
  h["vocab"] = vocab.tokens();
  h["train_state"] = {{"epoch", state.epoch},
                      {"lr", state.lr},
                      {"best_dev", state.best_dev},
                      {"bad_epochs", state.bad_epochs}};
  nlohmann::json dir = nlohmann::json::array();
  ParamRefs params = model.params();
  for (const Param* p : params)
    dir.push_back({{"name", p->name},
                   {"rows", p->w.rows()},
                   {"cols", p->w.cols()}});
  h["tensors"] = dir;

  std::string header = h.dump();
  std::string out = kCheckpointMagic;
  detail::put_u64(out, header.size());
  out += header;
  for (const Param* p : params)
    for (Eigen::Index r = 0; r < p->w.rows(); ++r)
      for (Eigen::Index c = 0; c < p->w.cols(); ++c)
        detail::put_double(out, p->w(r, c));
  return out;
}

inline Checkpoint deserialize_checkpoint(const std::string& bytes) {
  const std::size_t magic_len = std::strlen(kCheckpointMagic);
  if (bytes.size() < magic_len + 8 ||
      bytes.compare(0, magic_len, kCheckpointMagic) != 0)
    fail(Err::MalformedHeader, "not a model checkpoint");
  const auto* base = reinterpret_cast<const unsigned char*>(bytes.data());
  std::uint64_t hlen = detail::get_u64(base + magic_len);
  std::size_t body = magic_len + 8;
  if (bytes.size() < body + hlen)
    fail(Err::MalformedHeader, "checkpoint header truncated");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(bytes.substr(body, hlen));
  } catch (const nlohmann::json::exception& e) {
    fail(Err::MalformedHeader, std::string("checkpoint header: ") + e.what());
  }

  Checkpoint ck;
  try {
    ModelConfig mc;
    const auto& m = h.at("model");
    mc.d_model = m.at("d_model").get<int>();
    mc.heads = m.at("heads").get<int>();
    mc.encoder_layers = m.at("encoder_layers").get<int>();
    mc.decoder_layers = m.at("decoder_layers").get<int>();
    mc.ff_dim = m.at("ff_dim").get<int>();
    mc.dropout = m.at("dropout").get<double>();
    mc.max_source_len = m.at("max_source_len").get<int>();
    mc.max_target_len = m.at("max_target_len").get<int>();
    mc.vocab_size = m.at("vocab_size").get<int>();

    Variant variant = parse_variant(h.at("variant").get<std::string>());
    const auto& f = h.at("frontend");
    SkeletonTopology topo;
    if (variant == Variant::gnn) {
      TopologyConfig tc;
      for (const auto& e : h.at("topology"))
        tc.inter_region_edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
      topo = build_topology(tc);
    }
    ck.model = TranslationModel(variant, mc, f.at("coord_count").get<int>(),
                                f.at("pool_window").get<int>(),
                                f.at("gnn_dim").get<int>(), std::move(topo));

    const auto& t = h.at("tokenizer");
    ck.tokenizer.lowercase = t.at("lowercase").get<bool>();
    ck.tokenizer.turkish = t.at("turkish").get<bool>();
    ck.tokenizer.strip_punctuation = t.at("strip_punctuation").get<bool>();
    ck.normalize_input = h.at("normalize_input").get<bool>();

    ck.vocab = Vocabulary::from_tokens(
        h.at("vocab").get<std::vector<std::string>>());
    if (ck.vocab.size() != static_cast<std::size_t>(mc.vocab_size))
      fail(Err::MalformedHeader, "vocab size disagrees with model config");

    const auto& s = h.at("train_state");
    ck.state.epoch = s.at("epoch").get<int>();
    ck.state.lr = s.at("lr").get<double>();
    ck.state.best_dev = s.at("best_dev").get<double>();
    ck.state.bad_epochs = s.at("bad_epochs").get<int>();

    ParamRefs params = ck.model.params();
    const auto& dir = h.at("tensors");
    if (dir.size() != params.size())
      fail(Err::MalformedHeader, "tensor directory size mismatch");
    std::size_t off = body + hlen;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& d = dir.at(i);
      if (d.at("name").get<std::string>() != params[i]->name)
        fail(Err::MalformedHeader, "tensor order mismatch at " + params[i]->name);
      auto rows = d.at("rows").get<Eigen::Index>();
      auto cols = d.at("cols").get<Eigen::Index>();
      if (rows != params[i]->w.rows() || cols != params[i]->w.cols())
        fail(Err::MalformedHeader, "tensor shape mismatch at " + params[i]->name);
      std::size_t need = static_cast<std::size_t>(rows) *
                         static_cast<std::size_t>(cols) * 8;
      if (bytes.size() < off + need)
        fail(Err::MalformedHeader, "checkpoint payload truncated");
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
          params[i]->w(r, c) = detail::get_double(base + off);
          off += 8;
        }
    }
    if (off != bytes.size())
      fail(Err::MalformedHeader, "trailing bytes after tensor payload");
  } catch (const nlohmann::json::exception& e) {
    fail(Err::MalformedHeader, std::string("checkpoint header: ") + e.what());
  }
  return ck;
}

inline void save_checkpoint(const std::string& path, TranslationModel& model,
                            const Vocabulary& vocab, const TokenizerOptions& tok,
                            bool normalize_input, const TrainState& state) {
  std::string bytes = serialize_checkpoint(model, vocab, tok, normalize_input,
                                           state);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::IoError, "cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(Err::IoError, "short write to " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::IoError, "cannot read " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace etsl
