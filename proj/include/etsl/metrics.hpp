#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "etsl/common.hpp"

namespace etsl {

using TokenSeq = std::vector<std::string>;

namespace detail {

// n-gram multiset keyed by tokens joined on an unprintable separator
inline std::map<std::string, int> ngram_counts(const TokenSeq& toks, int n) {
  std::map<std::string, int> counts;
  if (static_cast<int>(toks.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::string key = toks[i];
    for (int j = 1; j < n; ++j) {
      key.push_back('\x1f');
      key += toks[i + j];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace detail

// clipped n-gram matches and candidate n-gram total for one pair
inline std::pair<long, long> clipped_ngram_stats(const TokenSeq& ref,
                                                 const TokenSeq& hyp, int n) {
  if (n < 1) fail(Err::ConfigError, "ngram order must be >= 1");
  auto ref_counts = detail::ngram_counts(ref, n);
  auto hyp_counts = detail::ngram_counts(hyp, n);
  long matched = 0, total = 0;
  for (const auto& [key, count] : hyp_counts) {
    total += count;
    auto it = ref_counts.find(key);
    if (it != ref_counts.end()) matched += std::min(count, it->second);
  }
  return {matched, total};
}

inline double brevity_penalty(long ref_len, long hyp_len) {
  if (hyp_len == 0) return 0.0;
  if (hyp_len >= ref_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_len) /
                            static_cast<double>(hyp_len));
}

// Corpus-level BLEU-1..4: n-gram statistics and lengths pool over all
// pairs before the geometric mean.  A zero pooled precision at any order
// <= k zeroes BLEU-k unless smoothing bumps orders above 1.
inline std::array<double, 4> corpus_bleu_scores(
    const std::vector<TokenSeq>& refs, const std::vector<TokenSeq>& hyps,
    bool smooth = false) {
  if (refs.size() != hyps.size())
    fail(Err::LengthMismatch, std::to_string(refs.size()) + " references vs " +
                                  std::to_string(hyps.size()) + " hypotheses");
  if (refs.empty()) fail(Err::EmptyCorpus, "no reference/hypothesis pairs");
  long ref_len = 0, hyp_len = 0;
  std::array<long, 4> matched{}, total{};
  for (std::size_t i = 0; i < refs.size(); ++i) {
    ref_len += static_cast<long>(refs[i].size());
    hyp_len += static_cast<long>(hyps[i].size());
    for (int n = 1; n <= 4; ++n) {
      auto [m, t] = clipped_ngram_stats(refs[i], hyps[i], n);
      matched[n - 1] += m;
      total[n - 1] += t;
    }
  }
  const double bp = brevity_penalty(ref_len, hyp_len);
  std::array<double, 4> precision{};
  for (int n = 1; n <= 4; ++n) {
    long m = matched[n - 1], t = total[n - 1];
    if (smooth && n > 1) {
      m += 1;
      t += 1;
    }
    precision[n - 1] = t > 0 ? static_cast<double>(m) / static_cast<double>(t)
                             : 0.0;
  }
  std::array<double, 4> bleu{};
  for (int k = 1; k <= 4; ++k) {
    double log_sum = 0.0;
    bool zero = false;
    for (int n = 1; n <= k; ++n) {
      if (precision[n - 1] <= 0.0) {
        zero = true;
        break;
      }
      log_sum += std::log(precision[n - 1]);
    }
    bleu[k - 1] = zero ? 0.0 : bp * std::exp(log_sum / k);
  }
  return bleu;
}

inline double sentence_bleu(const TokenSeq& ref, const TokenSeq& hyp, int k = 4,
                            bool smooth = false) {
  if (k < 1 || k > 4) fail(Err::ConfigError, "BLEU order must be 1..4");
  return corpus_bleu_scores({ref}, {hyp}, smooth)[k - 1];
}

// longest common subsequence length, classic O(nm) table
inline std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[m];
}

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline RougeScore rouge_l_pair(const TokenSeq& ref, const TokenSeq& hyp) {
  RougeScore s;
  if (ref.empty() || hyp.empty()) return s;
  const double lcs = static_cast<double>(lcs_length(ref, hyp));
  s.precision = lcs / static_cast<double>(hyp.size());
  s.recall = lcs / static_cast<double>(ref.size());
  if (s.precision + s.recall > 0.0)
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

// corpus value is the unweighted mean of per-pair scores
inline RougeScore rouge_l_corpus(const std::vector<TokenSeq>& refs,
                                 const std::vector<TokenSeq>& hyps) {
  if (refs.size() != hyps.size())
    fail(Err::LengthMismatch, std::to_string(refs.size()) + " references vs " +
                                  std::to_string(hyps.size()) + " hypotheses");
  if (refs.empty()) fail(Err::EmptyCorpus, "no reference/hypothesis pairs");
  RougeScore sum;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    RougeScore s = rouge_l_pair(refs[i], hyps[i]);
    sum.precision += s.precision;
    sum.recall += s.recall;
    sum.f1 += s.f1;
  }
  const double n = static_cast<double>(refs.size());
  return {sum.precision / n, sum.recall / n, sum.f1 / n};
}

struct ClipScore {
  std::string clip_id;
  double rouge_f1 = 0.0;
  std::array<double, 4> bleu{};
};

struct EvaluationReport {
  std::array<double, 4> bleu{};
  RougeScore rouge;
  std::size_t pair_count = 0;
  long ref_token_total = 0;
  long hyp_token_total = 0;
  std::vector<ClipScore> per_clip;

  // corpus block as percentages with two decimals, then per-clip rows
  std::string format() const {
    char buf[160];
    std::string out;
    std::snprintf(buf, sizeof buf, "ROUGE-L %.2f\n", rouge.f1 * 100.0);
    out += buf;
    for (int k = 1; k <= 4; ++k) {
      std::snprintf(buf, sizeof buf, "BLEU-%d  %.2f\n", k, bleu[k - 1] * 100.0);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "pairs   %zu\nref tokens %ld\nhyp tokens %ld\n",
                  pair_count, ref_token_total, hyp_token_total);
    out += buf;
    for (const ClipScore& c : per_clip) {
      std::snprintf(buf, sizeof buf, "%s\t%.4f\t%.4f\t%.4f\t%.4f\t%.4f\n",
                    c.clip_id.c_str(), c.rouge_f1, c.bleu[0], c.bleu[1],
                    c.bleu[2], c.bleu[3]);
      out += buf;
    }
    return out;
  }
};

inline EvaluationReport evaluate_corpus(const std::vector<TokenSeq>& refs,
                                        const std::vector<TokenSeq>& hyps,
                                        bool smooth = false,
                                        const std::vector<std::string>* ids =
                                            nullptr) {
  if (ids && ids->size() != refs.size())
    fail(Err::LengthMismatch, "clip id list does not match pair count");
  EvaluationReport r;
  r.bleu = corpus_bleu_scores(refs, hyps, smooth);
  r.rouge = rouge_l_corpus(refs, hyps);
  r.pair_count = refs.size();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    r.ref_token_total += static_cast<long>(refs[i].size());
    r.hyp_token_total += static_cast<long>(hyps[i].size());
    if (ids) {
      ClipScore c;
      c.clip_id = (*ids)[i];
      c.rouge_f1 = rouge_l_pair(refs[i], hyps[i]).f1;
      c.bleu = corpus_bleu_scores({refs[i]}, {hyps[i]}, smooth);
      r.per_clip.push_back(std::move(c));
    }
  }
  return r;
}

}  // namespace etsl
