#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "etsl/common.hpp"

namespace etsl {

namespace utf8 {

// Decodes one codepoint starting at s[i]; advances i.  Malformed bytes decode
// as themselves so tokenization never throws on dirty text.
inline std::uint32_t decode(const std::string& s, std::size_t& i) {
  unsigned char c = s[i];
  if (c < 0x80) {
    ++i;
    return c;
  }
  int extra = (c >= 0xF0) ? 3 : (c >= 0xE0) ? 2 : (c >= 0xC0) ? 1 : 0;
  if (extra == 0 || i + extra >= s.size()) {
    ++i;
    return c;
  }
  std::uint32_t cp = c & (0x3F >> extra);
  for (int k = 1; k <= extra; ++k) {
    unsigned char cc = s[i + k];
    if ((cc & 0xC0) != 0x80) {
      ++i;
      return c;
    }
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += extra + 1;
  return cp;
}

inline void encode(std::uint32_t cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

}  // namespace utf8

// Lowercases one codepoint.  Covers ASCII, Latin-1 and Latin Extended-A,
// which spans the Turkish alphabet.  With turkish=true the dotted/dotless
// I rules apply: U+0049 'I' -> U+0131 'ı', U+0130 'İ' -> 'i'.
inline std::uint32_t lowercase_codepoint(std::uint32_t cp, bool turkish) {
  if (cp == 0x49) return turkish ? 0x131 : 0x69;  // I
  if (cp == 0x130) return 0x69;                   // İ
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // Latin-1
  if (cp >= 0x100 && cp <= 0x137 && cp % 2 == 0) return cp + 1;
  if (cp >= 0x139 && cp <= 0x147 && cp % 2 == 1) return cp + 1;
  if (cp >= 0x14A && cp <= 0x176 && cp % 2 == 0) return cp + 1;
  if (cp == 0x178) return 0xFF;  // Ÿ
  if (cp >= 0x179 && cp <= 0x17D && cp % 2 == 1) return cp + 1;
  return cp;
}

inline bool is_punct_codepoint(std::uint32_t cp) {
  if (cp < 0x80)
    return std::ispunct(static_cast<int>(cp)) != 0;
  switch (cp) {
    case 0x2018: case 0x2019: case 0x201C: case 0x201D:  // curly quotes
    case 0x2013: case 0x2014:                            // dashes
    case 0x2026:                                         // ellipsis
    case 0xAB: case 0xBB:                                // guillemets
      return true;
    default:
      return false;
  }
}

struct TokenizerOptions {
  bool lowercase = true;
  bool turkish = true;           // Turkish I/İ casing rules
  bool strip_punctuation = false;

  bool operator==(const TokenizerOptions&) const = default;
};

inline std::string lowercase_utf8(const std::string& s, bool turkish) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size())
    utf8::encode(lowercase_codepoint(utf8::decode(s, i), turkish), out);
  return out;
}

// Whitespace-split word tokenizer shared by the model and the corpus
// statistics.
inline std::vector<std::string> tokenize_words(
    const std::string& text, const TokenizerOptions& opt = {}) {
  std::vector<std::string> out;
  for (std::string word : split_ws(text)) {
    if (opt.lowercase) word = lowercase_utf8(word, opt.turkish);
    if (opt.strip_punctuation) {
      std::string kept;
      std::size_t i = 0;
      while (i < word.size()) {
        std::size_t at = i;
        std::uint32_t cp = utf8::decode(word, i);
        if (!is_punct_codepoint(cp)) kept.append(word, at, i - at);
      }
      word = std::move(kept);
    }
    if (!word.empty()) out.push_back(std::move(word));
  }
  return out;
}

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kNumReserved = 4;

  Vocabulary() {
    tokens_ = {"<pad>", "<bos>", "<eos>", "<unk>"};
    for (int i = 0; i < kNumReserved; ++i) index_[tokens_[i]] = i;
  }

  // Builds from training transcripts: frequency-descending, ties broken
  // lexicographically.  Words colliding with reserved token spellings are
  // dropped (they map to UNK at encode time).
  static Vocabulary build(const std::vector<std::string>& transcripts,
                          const TokenizerOptions& opt = {},
                          std::size_t max_size = 0) {
    std::map<std::string, long> freq;
    for (const auto& t : transcripts)
      for (auto& w : tokenize_words(t, opt)) ++freq[w];
    std::vector<std::pair<std::string, long>> items;
    Vocabulary v;
    for (auto& [w, c] : freq)
      if (v.index_.find(w) == v.index_.end()) items.emplace_back(w, c);
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    for (auto& [w, c] : items) {
      if (max_size && v.size() >= max_size) break;
      v.add(w);
    }
    return v;
  }

  // Reconstruction from an id-ordered token list (checkpoint load).
  static Vocabulary from_tokens(const std::vector<std::string>& ordered) {
    Vocabulary v;
    if (ordered.size() < kNumReserved ||
        !std::equal(v.tokens_.begin(), v.tokens_.end(), ordered.begin()))
      fail(Err::InvariantViolation, "vocabulary: reserved prefix mismatch");
    for (std::size_t i = kNumReserved; i < ordered.size(); ++i)
      v.add(ordered[i]);
    return v;
  }

  int add(const std::string& token) {
    auto it = index_.find(token);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(tokens_.size());
    tokens_.push_back(token);
    index_[token] = id;
    return id;
  }

  int id_of(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
  }

  const std::string& token_of(int id) const {
    if (id < 0 || id >= static_cast<int>(tokens_.size()))
      fail(Err::InvariantViolation, "token id " + std::to_string(id) +
                                        " outside vocabulary of " +
                                        std::to_string(tokens_.size()));
    return tokens_[id];
  }

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<int> encode(const std::string& text,
                          const TokenizerOptions& opt = {}) const {
    std::vector<int> ids;
    for (auto& w : tokenize_words(text, opt)) {
      int id = id_of(w);
      ids.push_back(id < kNumReserved ? kUnk : id);
    }
    return ids;
  }

  std::string decode(const std::vector<int>& ids) const {
    std::string out;
    for (int id : ids) {
      if (id == kPad || id == kBos || id == kEos) continue;
      if (!out.empty()) out += ' ';
      out += token_of(id);
    }
    return out;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace etsl
