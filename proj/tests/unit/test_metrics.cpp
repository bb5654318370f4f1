#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "helpers.hpp"

using namespace etsl;
using testutil::toks;

namespace {

// exponential-time reference: longest subsequence of a that is also a
// subsequence of b
std::size_t lcs_brute(const TokenSeq& a, const TokenSeq& b) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
    TokenSeq sub;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (mask & (1u << i)) sub.push_back(a[i]);
    std::size_t j = 0;
    for (const std::string& w : b)
      if (j < sub.size() && w == sub[j]) ++j;
    if (j == sub.size()) best = std::max(best, sub.size());
  }
  return best;
}

TokenSeq random_seq(Rng& rng, std::size_t max_len) {
  static const char* alphabet[] = {"a", "b", "c"};
  TokenSeq s;
  std::size_t len = rng.index(max_len + 1);
  for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng.index(3)]);
  return s;
}

std::string oracle_path() {
  return std::string(ETSL_TEST_DATA_DIR) + "/metric_oracle.tsv";
}

}  // namespace

TEST_CASE("clipped n-gram counting matches the worked examples") {
  auto [m1, t1] = clipped_ngram_stats(toks({"a", "b", "c", "e"}),
                                      toks({"a", "b", "c", "d"}), 1);
  CHECK(m1 == 3);
  CHECK(t1 == 4);
  auto [m2, t2] = clipped_ngram_stats(toks({"the", "cat"}),
                                      toks({"the", "the", "the"}), 1);
  CHECK(m2 == 1);
  CHECK(t2 == 3);
  // hypothesis shorter than the order contributes nothing
  auto [m3, t3] = clipped_ngram_stats(toks({"a", "b", "c"}), toks({"a"}), 2);
  CHECK(m3 == 0);
  CHECK(t3 == 0);
}

TEST_CASE("brevity penalty follows the closed form") {
  CHECK(brevity_penalty(6, 3) == Catch::Approx(std::exp(-1.0)).margin(1e-15));
  CHECK(brevity_penalty(4, 4) == 1.0);
  CHECK(brevity_penalty(3, 7) == 1.0);
  CHECK(brevity_penalty(5, 0) == 0.0);
}

TEST_CASE("bleu hand examples") {
  TokenSeq ref = toks({"a", "b", "c", "e"});
  TokenSeq hyp = toks({"a", "b", "c", "d"});
  CHECK(sentence_bleu(ref, hyp, 1) == Catch::Approx(0.75).margin(1e-12));
  CHECK(sentence_bleu(ref, hyp, 2) ==
        Catch::Approx(std::sqrt(0.75 * 2.0 / 3.0)).margin(1e-12));
  CHECK(sentence_bleu(ref, hyp, 4) == 0.0);
  // perfect short pair: no 4-grams exist, so BLEU-4 stays zero
  TokenSeq three = toks({"x", "y", "z"});
  CHECK(sentence_bleu(three, three, 3) == 1.0);
  CHECK(sentence_bleu(three, three, 4) == 0.0);
}

TEST_CASE("smoothing only lifts orders above one") {
  TokenSeq three = toks({"x", "y", "z"});
  CHECK(sentence_bleu(three, three, 4, true) == 1.0);
  TokenSeq ref = toks({"a", "b", "c", "e"});
  TokenSeq hyp = toks({"a", "b", "c", "d"});
  double smoothed = sentence_bleu(ref, hyp, 4, true);
  CHECK(smoothed > 0.0);
  CHECK(smoothed < 1.0);
  // order 1 is left untouched
  CHECK(sentence_bleu(ref, hyp, 1, true) ==
        Catch::Approx(0.75).margin(1e-12));
}

TEST_CASE("lcs and rouge hand examples") {
  TokenSeq ref = toks({"a", "b", "c", "d"});
  TokenSeq hyp = toks({"a", "c", "b", "d"});
  CHECK(lcs_length(ref, hyp) == 3);
  RougeScore s = rouge_l_pair(ref, hyp);
  CHECK(s.precision == Catch::Approx(0.75).margin(1e-12));
  CHECK(s.recall == Catch::Approx(0.75).margin(1e-12));
  CHECK(s.f1 == Catch::Approx(0.75).margin(1e-12));

  RougeScore empty = rouge_l_pair(ref, {});
  CHECK(empty.precision == 0.0);
  CHECK(empty.recall == 0.0);
  CHECK(empty.f1 == 0.0);
  RougeScore empty2 = rouge_l_pair({}, hyp);
  CHECK(empty2.f1 == 0.0);
}

TEST_CASE("lcs table agrees with the exponential reference") {
  Rng rng(97);
  for (int trial = 0; trial < 100; ++trial) {
    TokenSeq a = random_seq(rng, 8);
    TokenSeq b = random_seq(rng, 8);
    std::size_t dp = lcs_length(a, b);
    CHECK(dp == lcs_brute(a, b));
    CHECK(dp == lcs_length(b, a));
    CHECK(dp <= std::min(a.size(), b.size()));
    CHECK(lcs_length(a, a) == a.size());
  }
}

TEST_CASE("scores live in the unit interval") {
  Rng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    TokenSeq ref = random_seq(rng, 10);
    TokenSeq hyp = random_seq(rng, 10);
    if (ref.empty()) ref = toks({"a"});
    for (int k = 1; k <= 4; ++k) {
      double b = sentence_bleu(ref, hyp, k);
      CHECK(b >= 0.0);
      CHECK(b <= 1.0 + 1e-12);
    }
    RougeScore s = rouge_l_pair(ref, hyp);
    CHECK(s.f1 >= 0.0);
    CHECK(s.f1 <= 1.0 + 1e-12);
  }
}

TEST_CASE("appending a wrong token to a perfect hypothesis never helps") {
  Rng rng(103);
  for (int trial = 0; trial < 30; ++trial) {
    TokenSeq ref = random_seq(rng, 8);
    if (ref.size() < 2) ref = toks({"a", "b"});
    TokenSeq worse = ref;
    worse.push_back("zzz");
    for (int k = 1; k <= 4; ++k)
      CHECK(sentence_bleu(ref, worse, k) <= sentence_bleu(ref, ref, k) + 1e-12);
  }
}

TEST_CASE("corpus inputs are validated") {
  std::vector<TokenSeq> one{toks({"a"})};
  std::vector<TokenSeq> two{toks({"a"}), toks({"b"})};
  try {
    corpus_bleu_scores(one, two);
    FAIL("expected LengthMismatch");
  } catch (const EtslError& e) {
    CHECK(e.code() == Err::LengthMismatch);
  }
  try {
    corpus_bleu_scores({}, {});
    FAIL("expected EmptyCorpus");
  } catch (const EtslError& e) {
    CHECK(e.code() == Err::EmptyCorpus);
  }
  CHECK_THROWS_AS(rouge_l_corpus(one, two), EtslError);
  CHECK_THROWS_AS(rouge_l_corpus({}, {}), EtslError);
}

TEST_CASE("frozen oracle file replays to high precision") {
  std::ifstream in(oracle_path());
  REQUIRE(in.good());
  std::string line;
  std::vector<TokenSeq> refs, hyps;
  std::size_t pair_rows = 0;
  bool saw_corpus = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_char(line, '\t');
    REQUIRE(cols.size() == 10);
    if (cols[0] == "CORPUS") {
      saw_corpus = true;
      auto bleu = corpus_bleu_scores(refs, hyps);
      for (int k = 0; k < 4; ++k)
        CHECK(bleu[k] == Catch::Approx(std::stod(cols[3 + k])).margin(1e-9));
      CHECK(rouge_l_corpus(refs, hyps).f1 ==
            Catch::Approx(std::stod(cols[9])).margin(1e-9));
      continue;
    }
    ++pair_rows;
    TokenSeq hyp = tokenize_words(cols[1]);
    TokenSeq ref = tokenize_words(cols[2]);
    refs.push_back(ref);
    hyps.push_back(hyp);
    for (int k = 1; k <= 4; ++k) {
      INFO(cols[0] << " bleu" << k);
      CHECK(sentence_bleu(ref, hyp, k) ==
            Catch::Approx(std::stod(cols[2 + k])).margin(1e-9));
    }
    RougeScore s = rouge_l_pair(ref, hyp);
    INFO(cols[0] << " rouge");
    CHECK(s.precision == Catch::Approx(std::stod(cols[7])).margin(1e-9));
    CHECK(s.recall == Catch::Approx(std::stod(cols[8])).margin(1e-9));
    CHECK(s.f1 == Catch::Approx(std::stod(cols[9])).margin(1e-9));
  }
  CHECK(pair_rows >= 20);
  CHECK(saw_corpus);
}

TEST_CASE("evaluation report aggregates and formats") {
  std::vector<TokenSeq> refs{toks({"a", "b", "c", "d"})};
  std::vector<TokenSeq> hyps{toks({"a", "b", "c", "e"})};
  std::vector<std::string> ids{"c1"};
  EvaluationReport r = evaluate_corpus(refs, hyps, false, &ids);
  CHECK(r.pair_count == 1);
  CHECK(r.ref_token_total == 4);
  CHECK(r.hyp_token_total == 4);
  REQUIRE(r.per_clip.size() == 1);
  CHECK(r.per_clip[0].clip_id == "c1");
  CHECK(r.per_clip[0].rouge_f1 == Catch::Approx(0.75).margin(1e-12));

  std::string text = r.format();
  CHECK(text.find("ROUGE-L 75.00\n") != std::string::npos);
  CHECK(text.find("BLEU-1  75.00\n") != std::string::npos);
  CHECK(text.find("BLEU-2  70.71\n") != std::string::npos);
  CHECK(text.find("BLEU-3  63.00\n") != std::string::npos);
  CHECK(text.find("BLEU-4  0.00\n") != std::string::npos);
  CHECK(text.find("pairs   1\n") != std::string::npos);
  CHECK(text.find("c1\t0.7500\t0.7500\t0.7071\t0.6300\t0.0000\n") !=
        std::string::npos);

  // without ids the per-clip table is omitted
  EvaluationReport bare = evaluate_corpus(refs, hyps);
  CHECK(bare.per_clip.empty());
  std::vector<std::string> bad{"a", "b"};
  CHECK_THROWS_AS(evaluate_corpus(refs, hyps, false, &bad), EtslError);
}

TEST_CASE("corpus bleu pools statistics rather than averaging scores") {
  // pair 1 is perfect, pair 2 is empty: pooled unigram precision 2/2 but
  // brevity penalty from pooled lengths 2:4 drags the score down
  std::vector<TokenSeq> refs{toks({"a", "b"}), toks({"c", "d"})};
  std::vector<TokenSeq> hyps{toks({"a", "b"}), {}};
  auto bleu = corpus_bleu_scores(refs, hyps);
  CHECK(bleu[0] == Catch::Approx(std::exp(1.0 - 4.0 / 2.0)).margin(1e-12));
}
