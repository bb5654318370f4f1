// Command-line front end: dataset statistics, preprocessing, training,
// translation, evaluation, and synthetic data generation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "etsl/etsl.hpp"

namespace fs = std::filesystem;

namespace {

etsl::RunConfig load_run_config(const std::string& config_path,
                                const std::vector<std::string>& overrides) {
  etsl::RunConfig rc;
  if (!config_path.empty()) rc = etsl::RunConfig::load(config_path);
  for (const std::string& kv : overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      etsl::fail(etsl::Err::ConfigError, "--set expects key=value, got '" + kv + "'");
    rc.set(etsl::trim(kv.substr(0, eq)), etsl::trim(kv.substr(eq + 1)));
  }
  return rc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) etsl::fail(etsl::Err::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) etsl::fail(etsl::Err::IoError, "cannot write " + path.string());
  out << content;
}

int cmd_stats(const std::string& manifest_path, const etsl::RunConfig& rc) {
  rc.check_known({"lowercase", "turkish", "strip_punctuation", "rare_threshold",
                  "bin_width"});
  etsl::TokenizerOptions tok;
  tok.lowercase = rc.get_bool("lowercase", true);
  tok.turkish = rc.get_bool("turkish", true);
  tok.strip_punctuation = rc.get_bool("strip_punctuation", false);
  auto manifest = etsl::load_manifest(manifest_path);
  std::vector<std::string> texts;
  for (const auto& e : manifest.entries) texts.push_back(e.transcript);
  auto st = etsl::compute_stats(texts, tok,
                                static_cast<int>(rc.get_int("rare_threshold", 5)));
  auto hist = etsl::value_histogram(st.tokens_per_transcript,
                                    rc.get_double("bin_width", 5.0));
  auto counts = manifest.split_counts();
  std::cout << "clips            " << manifest.entries.size() << " (train "
            << counts[etsl::Split::train] << ", dev "
            << counts[etsl::Split::dev] << ", test "
            << counts[etsl::Split::test] << ")\n"
            << etsl::format_stats(st, hist);
  return 0;
}

int cmd_preprocess(const std::string& manifest_path, const std::string& out_dir,
                   const etsl::RunConfig& rc) {
  rc.check_known({"coord_count", "degenerate_policy"});
  etsl::NormalizeOptions nopt;
  nopt.coord_count = static_cast<int>(rc.get_int("coord_count", 3));
  std::string dp = rc.get_string("degenerate_policy", "strict");
  if (dp == "carry_forward")
    nopt.policy = etsl::DegeneratePolicy::carry_forward;
  else if (dp != "strict")
    etsl::fail(etsl::Err::ConfigError,
               "degenerate_policy must be strict or carry_forward");

  auto manifest = etsl::load_manifest(manifest_path, true);
  fs::create_directories(fs::path(out_dir) / "clips");
  etsl::DatasetManifest out_manifest;
  for (const auto& e : manifest.entries) {
    etsl::ClipSample clip = etsl::load_clip_file(e.landmark_path, e.clip_id);
    clip.transcript = e.transcript;
    clip.split = e.split;
    etsl::ClipSample cooked =
        clip.normalized
            ? clip
            : etsl::normalized_to_clip(clip, etsl::normalize_clip(clip, nopt));
    std::string rel = "clips/" + e.clip_id + ".lmk";
    etsl::save_clip_file(fs::path(out_dir) / rel, cooked);
    out_manifest.entries.push_back({e.clip_id, rel, e.transcript, e.split});
  }
  write_file(fs::path(out_dir) / "manifest.tsv",
             etsl::write_manifest(out_manifest));
  std::cout << "wrote " << out_manifest.entries.size() << " normalized clips to "
            << out_dir << "\n";
  return 0;
}

int cmd_train(const std::string& manifest_path, const std::string& out_dir,
              etsl::RunConfig rc, const std::string& variant,
              long seed_flag) {
  if (!variant.empty()) rc.set("variant", variant);
  if (seed_flag >= 0) rc.set("seed", std::to_string(seed_flag));
  etsl::PipelineConfig pc = etsl::parse_pipeline_config(rc);
  auto manifest = etsl::load_manifest(manifest_path, true);
  auto clips = etsl::load_manifest_clips(manifest);
  etsl::TranslationModel probe = etsl::build_model(pc, etsl::Vocabulary::kNumReserved);
  etsl::LoadedData data = etsl::dataset_from_clips(
      clips, pc, probe.max_input_frames(), &std::cerr);
  if (data.dev.empty()) etsl::fail(etsl::Err::EmptySplit, "dev");
  auto run = etsl::run_training(pc, data, out_dir, {}, &std::cout);
  std::cout << "best epoch " << run.train.best_epoch << "  dev "
            << run.train.best_dev << "\n"
            << "checkpoint: " << run.best_checkpoint.string() << "\n";
  return 0;
}

int cmd_translate(const std::string& ckpt_path, const std::string& manifest_path,
                  const std::string& split_name, const std::string& out_path) {
  etsl::Checkpoint ck = etsl::load_checkpoint(ckpt_path);
  etsl::Split split = etsl::parse_split(split_name);
  auto manifest = etsl::load_manifest(manifest_path, true);
  auto clips = etsl::load_manifest_clips(manifest);
  auto hyps = etsl::translate_split(ck, clips, split, &std::cerr);
  std::string text = etsl::write_hypotheses(hyps);
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    write_file(out_path, text);
  return 0;
}

int cmd_evaluate(const std::string& manifest_path, const std::string& split_name,
                 const std::string& hyp_path, const std::string& report_path,
                 const etsl::RunConfig& rc) {
  rc.check_known({"lowercase", "turkish", "strip_punctuation", "smooth"});
  etsl::TokenizerOptions tok;
  tok.lowercase = rc.get_bool("lowercase", true);
  tok.turkish = rc.get_bool("turkish", true);
  tok.strip_punctuation = rc.get_bool("strip_punctuation", false);
  auto manifest = etsl::load_manifest(manifest_path);
  auto hyps = etsl::parse_hypotheses(read_file(hyp_path));
  auto report = etsl::evaluate_hypotheses(manifest, etsl::parse_split(split_name),
                                          hyps, tok, rc.get_bool("smooth", false));
  std::string text = report.format();
  std::cout << text;
  if (!report_path.empty()) write_file(report_path, text);
  return 0;
}

int cmd_synth(const std::string& out_dir, const etsl::RunConfig& rc,
              long seed_flag) {
  rc.check_known({"clip_count", "vocab_size", "min_tokens", "max_tokens",
                  "frames_per_token", "noise_std", "fps", "seed"});
  etsl::SynthConfig sc;
  sc.seed = static_cast<std::uint64_t>(
      seed_flag >= 0 ? seed_flag : rc.get_int("seed", 1));
  sc.clip_count = static_cast<int>(rc.get_int("clip_count", 50));
  sc.vocab_size = static_cast<int>(rc.get_int("vocab_size", 12));
  sc.min_tokens = static_cast<int>(rc.get_int("min_tokens", 3));
  sc.max_tokens = static_cast<int>(rc.get_int("max_tokens", 5));
  sc.frames_per_token = static_cast<int>(rc.get_int("frames_per_token", 6));
  sc.noise_std = rc.get_double("noise_std", 0.01);
  sc.fps = rc.get_double("fps", 25.0);
  etsl::SynthDataset ds = etsl::generate_synth(sc);
  fs::path manifest = etsl::write_synth_dataset(out_dir, ds);
  std::cout << "wrote " << ds.clips.size() << " clips, manifest "
            << manifest.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous sign language translation toolkit"};
  app.require_subcommand(1);

  std::string manifest, config_path, variant, split = "test", out, ckpt,
              hyp_path, report_path, device = "cpu";
  long seed = -1;
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* sub, bool with_config = true) {
    if (with_config)
      sub->add_option("--config", config_path, "key = value config file");
    sub->add_option("--set", overrides,
                    "override a config entry, key=value (repeatable)");
    sub->add_option("--device", device, "compute device (only cpu)");
  };

  auto* stats = app.add_subcommand("stats", "corpus statistics for a manifest");
  stats->add_option("--manifest", manifest, "dataset manifest")->required();
  add_common(stats);

  auto* preprocess =
      app.add_subcommand("preprocess", "write normalized landmark caches");
  preprocess->add_option("--manifest", manifest, "dataset manifest")->required();
  preprocess->add_option("--out", out, "output directory")->required();
  add_common(preprocess);

  auto* train = app.add_subcommand("train", "train a translation model");
  train->add_option("--manifest", manifest, "dataset manifest")->required();
  train->add_option("--out", out, "run directory")->required();
  train->add_option("--variant", variant, "model variant: p2t or gnn");
  train->add_option("--seed", seed, "random seed");
  add_common(train);

  auto* translate =
      app.add_subcommand("translate", "decode one split with a checkpoint");
  translate->add_option("--checkpoint", ckpt, "model checkpoint")->required();
  translate->add_option("--manifest", manifest, "dataset manifest")->required();
  translate->add_option("--split", split, "train, dev or test");
  translate->add_option("--out", out, "hypothesis file ('-' for stdout)");
  add_common(translate, false);

  auto* evaluate =
      app.add_subcommand("evaluate", "score a hypothesis file against a split");
  evaluate->add_option("--manifest", manifest, "dataset manifest")->required();
  evaluate->add_option("--split", split, "train, dev or test");
  evaluate->add_option("--hypotheses", hyp_path, "clip_id<TAB>text file")
      ->required();
  evaluate->add_option("--report", report_path, "also write the report here");
  add_common(evaluate);

  auto* synth =
      app.add_subcommand("synth", "generate a synthetic landmark dataset");
  synth->add_option("--out", out, "output directory")->required();
  synth->add_option("--seed", seed, "random seed");
  add_common(synth);

  CLI11_PARSE(app, argc, argv);

  try {
    if (device != "cpu")
      etsl::fail(etsl::Err::ConfigError, "only --device cpu is supported");
    etsl::RunConfig rc = load_run_config(config_path, overrides);
    if (stats->parsed()) return cmd_stats(manifest, rc);
    if (preprocess->parsed()) return cmd_preprocess(manifest, out, rc);
    if (train->parsed()) return cmd_train(manifest, out, rc, variant, seed);
    if (translate->parsed()) return cmd_translate(ckpt, manifest, split, out);
    if (evaluate->parsed())
      return cmd_evaluate(manifest, split, hyp_path, report_path, rc);
    if (synth->parsed()) return cmd_synth(out, rc, seed);
  } catch (const etsl::EtslError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
