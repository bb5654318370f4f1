#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "etsl/vocab.hpp"

namespace etsl {

struct CorpusStats {
  long transcript_count = 0;
  long total_tokens = 0;
  long vocab_size = 0;
  long singletons = 0;           // frequency exactly 1
  long rare = 0;                 // frequency below rare_threshold
  int rare_threshold = 5;
  std::map<std::string, long> counts;
  std::vector<long> tokens_per_transcript;

  // shares of the vocabulary, matching how such tables are quoted
  double singleton_pct() const {
    return vocab_size ? 100.0 * static_cast<double>(singletons) /
                            static_cast<double>(vocab_size)
                      : 0.0;
  }
  double rare_pct() const {
    return vocab_size ? 100.0 * static_cast<double>(rare) /
                            static_cast<double>(vocab_size)
                      : 0.0;
  }
};

inline CorpusStats compute_stats(const std::vector<std::string>& transcripts,
                                 const TokenizerOptions& opt = {},
                                 int rare_threshold = 5) {
  if (rare_threshold < 1) fail(Err::ConfigError, "rare threshold must be >= 1");
  CorpusStats st;
  st.rare_threshold = rare_threshold;
  for (const auto& text : transcripts) {
    std::vector<std::string> toks = tokenize_words(text, opt);
    st.tokens_per_transcript.push_back(static_cast<long>(toks.size()));
    for (auto& t : toks) ++st.counts[t];
    st.total_tokens += static_cast<long>(toks.size());
  }
  st.transcript_count = static_cast<long>(transcripts.size());
  if (st.total_tokens == 0) fail(Err::EmptyCorpus, "corpus has no tokens");
  st.vocab_size = static_cast<long>(st.counts.size());
  for (const auto& [_, c] : st.counts) {
    if (c == 1) ++st.singletons;
    if (c < rare_threshold) ++st.rare;
  }
  return st;
}

struct Histogram {
  double min_edge = 0.0;
  double bin_width = 1.0;
  std::vector<long> bins;   // bin k covers [min_edge + k*w, min_edge + (k+1)*w)
  double mean = 0.0;
  double stddev = 0.0;      // population
  long count = 0;
};

inline Histogram value_histogram(const std::vector<long>& values,
                                 double bin_width,
                                 std::optional<double> min_edge = {}) {
  if (bin_width <= 0.0) fail(Err::ConfigError, "bin width must be positive");
  if (values.empty()) fail(Err::EmptyCorpus, "histogram over no values");
  Histogram h;
  h.bin_width = bin_width;
  h.count = static_cast<long>(values.size());
  long lo = values[0], hi = values[0];
  double sum = 0.0;
  for (long v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += static_cast<double>(v);
  }
  h.min_edge = min_edge.value_or(static_cast<double>(lo));
  if (static_cast<double>(lo) < h.min_edge)
    fail(Err::ConfigError, "histogram min edge above smallest value");
  h.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (long v : values) {
    double d = static_cast<double>(v) - h.mean;
    sq += d * d;
  }
  h.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  auto nbins = static_cast<std::size_t>(
                   std::floor((static_cast<double>(hi) - h.min_edge) /
                              bin_width)) +
               1;
  h.bins.assign(nbins, 0);
  for (long v : values) {
    auto k = static_cast<std::size_t>(
        std::floor((static_cast<double>(v) - h.min_edge) / bin_width));
    ++h.bins[k];
  }
  return h;
}

inline std::string format_stats(const CorpusStats& st, const Histogram& h) {
  char buf[128];
  std::string out;
  std::snprintf(buf, sizeof buf, "transcripts      %ld\n", st.transcript_count);
  out += buf;
  std::snprintf(buf, sizeof buf, "total words      %ld\n", st.total_tokens);
  out += buf;
  std::snprintf(buf, sizeof buf, "vocabulary       %ld\n", st.vocab_size);
  out += buf;
  std::snprintf(buf, sizeof buf, "singletons       %ld (%.1f%%)\n",
                st.singletons, st.singleton_pct());
  out += buf;
  std::snprintf(buf, sizeof buf, "rare (<%d)        %ld (%.1f%%)\n",
                st.rare_threshold, st.rare, st.rare_pct());
  out += buf;
  std::snprintf(buf, sizeof buf, "words/transcript mean %.2f stddev %.2f\n",
                h.mean, h.stddev);
  out += buf;
  out += "histogram:\n";
  for (std::size_t k = 0; k < h.bins.size(); ++k) {
    double lo = h.min_edge + static_cast<double>(k) * h.bin_width;
    std::snprintf(buf, sizeof buf, "  [%g, %g)  %ld\n", lo, lo + h.bin_width,
                  h.bins[k]);
    out += buf;
  }
  return out;
}

}  // namespace etsl
