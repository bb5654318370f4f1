#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <functional>

#include "helpers.hpp"

using namespace etsl;

namespace {

Err code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const EtslError& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Err::IoError;
}

}  // namespace

TEST_CASE("run config parses key value lines") {
  RunConfig c = RunConfig::parse(
      "# a comment\n"
      "\n"
      "d_model = 64\n"
      "  lr=3e-4\r\n"
      "name = two words here\n");
  CHECK(c.has("d_model"));
  CHECK(c.get_int("d_model", 0) == 64);
  CHECK(c.get_double("lr", 0.0) == 3e-4);
  CHECK(c.get_string("name", "") == "two words here");
  CHECK_FALSE(c.has("missing"));
  CHECK(c.get_int("missing", 7) == 7);
  CHECK(c.get_string("missing", "x") == "x");
}

TEST_CASE("run config rejects malformed lines") {
  CHECK(code_of([] { RunConfig::parse("just a line\n"); }) == Err::ConfigError);
  CHECK(code_of([] { RunConfig::parse("= value\n"); }) == Err::ConfigError);
  CHECK(code_of([] { RunConfig::parse("a = 1\na = 2\n"); }) ==
        Err::ConfigError);
}

TEST_CASE("set overrides parsed values") {
  RunConfig c = RunConfig::parse("lr = 1e-3\n");
  c.set("lr", "5e-4");
  c.set("extra", "1");
  CHECK(c.get_double("lr", 0.0) == 5e-4);
  CHECK(c.get_int("extra", 0) == 1);
}

TEST_CASE("typed getters validate their input") {
  RunConfig c = RunConfig::parse(
      "n = 12\nf = 2.5\nt1 = true\nt2 = 1\nf1 = false\nf2 = 0\n"
      "bad_int = 3.5\nbad_num = abc\nbad_bool = yes\n");
  CHECK(c.get_int("n", 0) == 12);
  CHECK(c.get_double("n", 0.0) == 12.0);
  CHECK(c.get_double("f", 0.0) == 2.5);
  CHECK(c.get_bool("t1", false));
  CHECK(c.get_bool("t2", false));
  CHECK_FALSE(c.get_bool("f1", true));
  CHECK_FALSE(c.get_bool("f2", true));
  CHECK(code_of([&] { c.get_int("bad_int", 0); }) == Err::ConfigError);
  CHECK(code_of([&] { c.get_int("bad_num", 0); }) == Err::ConfigError);
  CHECK(code_of([&] { c.get_double("bad_num", 0.0); }) == Err::ConfigError);
  CHECK(code_of([&] { c.get_bool("bad_bool", false); }) == Err::ConfigError);
}

TEST_CASE("unknown keys are caught by the allowed set") {
  RunConfig c = RunConfig::parse("d_model = 8\ndmodel = 8\n");
  CHECK(code_of([&] { c.check_known({"d_model"}); }) == Err::ConfigError);
  CHECK_NOTHROW(c.check_known({"d_model", "dmodel"}));
}

TEST_CASE("resolved echo is sorted and canonical") {
  RunConfig c = RunConfig::parse("b = 2\na = 1\nc = 3\n");
  CHECK(c.resolved() == "a = 1\nb = 2\nc = 3\n");
}

TEST_CASE("run config loads from disk") {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / "etsl_runconfig_test.cfg";
  {
    std::ofstream out(p);
    out << "seed = 9\n";
  }
  RunConfig c = RunConfig::load(p.string());
  CHECK(c.get_int("seed", 0) == 9);
  fs::remove(p);
  CHECK(code_of([&] { RunConfig::load(p.string()); }) == Err::IoError);
}

TEST_CASE("pipeline config defaults depend on the variant") {
  PipelineConfig p2t = parse_pipeline_config(RunConfig::parse(""));
  CHECK(p2t.variant == Variant::p2t);
  CHECK(p2t.model.d_model == 1024);
  CHECK(p2t.model.heads == 8);
  CHECK(p2t.model.max_source_len == 1600);
  CHECK(p2t.train.batch_size == 4);
  CHECK(p2t.train.lr == 5e-5);
  CHECK(p2t.train.plateau.factor == 0.7);
  CHECK(p2t.train.plateau.patience == 7);
  CHECK(p2t.train.plateau.min_lr == 1e-6);
  CHECK(p2t.train.dev_metric == "bleu4");
  CHECK(p2t.normalize);
  CHECK(p2t.tok.lowercase);
  CHECK(p2t.tok.turkish);

  PipelineConfig gnn =
      parse_pipeline_config(RunConfig::parse("variant = gnn\n"));
  CHECK(gnn.variant == Variant::gnn);
  // pooled steps cover a third of the frame budget
  CHECK(gnn.model.max_source_len == 540);
  CHECK(gnn.train.batch_size == 16);
  CHECK(gnn.pool_window == 3);
  CHECK(gnn.gnn_dim == 16);
}

TEST_CASE("pipeline config applies overrides and validates") {
  RunConfig rc = RunConfig::parse(
      "variant = gnn\nd_model = 64\nheads = 4\ndropout = 0.2\n"
      "degenerate_policy = carry_forward\nmax_vocab = 100\nbatch_size = 2\n");
  PipelineConfig pc = parse_pipeline_config(rc);
  CHECK(pc.model.d_model == 64);
  CHECK(pc.model.heads == 4);
  CHECK(pc.model.dropout == 0.2);
  CHECK(pc.norm.policy == DegeneratePolicy::carry_forward);
  CHECK(pc.max_vocab == 100);
  CHECK(pc.train.batch_size == 2);

  SECTION("unknown key") {
    CHECK(code_of([] {
            parse_pipeline_config(RunConfig::parse("dmodel = 64\n"));
          }) == Err::ConfigError);
  }
  SECTION("bad variant") {
    CHECK_THROWS_AS(
        parse_pipeline_config(RunConfig::parse("variant = rnn\n")), EtslError);
  }
  SECTION("bad degenerate policy") {
    CHECK(code_of([] {
            parse_pipeline_config(
                RunConfig::parse("degenerate_policy = skip\n"));
          }) == Err::ConfigError);
  }
  SECTION("negative max_vocab") {
    CHECK(code_of([] {
            parse_pipeline_config(RunConfig::parse("max_vocab = -1\n"));
          }) == Err::ConfigError);
  }
}

TEST_CASE("resolved pipeline config round-trips") {
  RunConfig rc = RunConfig::parse(
      "variant = gnn\nd_model = 32\nheads = 2\nlr = 0.0003\nseed = 11\n"
      "strip_punctuation = true\n");
  PipelineConfig pc = parse_pipeline_config(rc);
  RunConfig echo = resolved_config(pc);
  // every key in the echo is a known key, and parsing it back reproduces
  // the effective settings
  PipelineConfig back = parse_pipeline_config(echo);
  CHECK(back.variant == pc.variant);
  CHECK(back.model.d_model == 32);
  CHECK(back.model.heads == 2);
  CHECK(back.model.max_source_len == pc.model.max_source_len);
  CHECK(back.train.lr == 0.0003);
  CHECK(back.train.seed == 11);
  CHECK(back.tok.strip_punctuation);
  CHECK(back.pool_window == pc.pool_window);
  // empty topology_file stays out of the echo
  CHECK_FALSE(echo.has("topology_file"));
}

TEST_CASE("hypothesis files round-trip") {
  std::vector<std::pair<std::string, std::string>> hyps{
      {"c1", "okula gitti"}, {"c2", ""}, {"c3", "bir iki üç"}};
  std::string text = write_hypotheses(hyps);
  CHECK(text == "c1\tokula gitti\nc2\t\nc3\tbir iki üç\n");
  auto parsed = parse_hypotheses("# header\n" + text);
  REQUIRE(parsed.size() == 3);
  CHECK(parsed["c1"] == "okula gitti");
  CHECK(parsed["c2"].empty());
  CHECK(parsed["c3"] == "bir iki üç");
}

TEST_CASE("hypothesis parsing rejects bad lines") {
  CHECK(code_of([] { parse_hypotheses("no tab here\n"); }) ==
        Err::MalformedHeader);
  CHECK(code_of([] { parse_hypotheses("c1\ta\nc1\tb\n"); }) ==
        Err::DuplicateClipId);
}

TEST_CASE("split evaluation pairs hypotheses with references") {
  DatasetManifest m;
  m.entries.push_back({"c1", "c1.lmk", "okula gitti", Split::test});
  m.entries.push_back({"c2", "c2.lmk", "eve geldi", Split::test});
  m.entries.push_back({"c3", "c3.lmk", "başka", Split::train});
  TokenizerOptions tok;

  std::map<std::string, std::string> hyps{{"c1", "okula gitti"},
                                          {"c2", "eve gitti"}};
  EvaluationReport rep = evaluate_hypotheses(m, Split::test, hyps, tok);
  CHECK(rep.pair_count == 2);
  CHECK(rep.bleu[0] == Catch::Approx(0.75).margin(1e-12));

  SECTION("missing hypothesis") {
    hyps.erase("c2");
    CHECK(code_of([&] { evaluate_hypotheses(m, Split::test, hyps, tok); }) ==
          Err::MissingHypothesis);
  }
  SECTION("empty split") {
    CHECK(code_of([&] { evaluate_hypotheses(m, Split::dev, hyps, tok); }) ==
          Err::EmptySplit);
  }
  SECTION("train clips are ignored for the test split") {
    // no hypothesis for c3, yet the test split evaluates fine
    EvaluationReport r2 = evaluate_hypotheses(m, Split::test, hyps, tok);
    CHECK(r2.pair_count == 2);
  }
}
