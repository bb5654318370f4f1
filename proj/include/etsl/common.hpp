#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace etsl {

// Every failure mode raised by the toolkit.  The enum name is part of the
// CLI contract: errors print as "error: <name>: <detail>" on stderr.
enum class Err {
  MalformedHeader,
  BadPointCount,
  NonFiniteCoordinate,
  NonMonotonicFrameIndex,
  InvariantViolation,
  DuplicateClipId,
  UnknownSplitTag,
  MissingLandmarkFile,
  DegenerateFrame,
  ShouldersNotVisible,
  DisconnectedGraph,
  DimensionMismatch,
  SourceTooLong,
  TargetTooLong,
  AllPositionsPadded,
  EmptySplit,
  NonFiniteLoss,
  LengthMismatch,
  EmptyCorpus,
  VocabTooLarge,
  MissingHypothesis,
  ConfigError,
  IoError,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::MalformedHeader: return "MalformedHeader";
    case Err::BadPointCount: return "BadPointCount";
    case Err::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case Err::NonMonotonicFrameIndex: return "NonMonotonicFrameIndex";
    case Err::InvariantViolation: return "InvariantViolation";
    case Err::DuplicateClipId: return "DuplicateClipId";
    case Err::UnknownSplitTag: return "UnknownSplitTag";
    case Err::MissingLandmarkFile: return "MissingLandmarkFile";
    case Err::DegenerateFrame: return "DegenerateFrame";
    case Err::ShouldersNotVisible: return "ShouldersNotVisible";
    case Err::DisconnectedGraph: return "DisconnectedGraph";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::SourceTooLong: return "SourceTooLong";
    case Err::TargetTooLong: return "TargetTooLong";
    case Err::AllPositionsPadded: return "AllPositionsPadded";
    case Err::EmptySplit: return "EmptySplit";
    case Err::NonFiniteLoss: return "NonFiniteLoss";
    case Err::LengthMismatch: return "LengthMismatch";
    case Err::EmptyCorpus: return "EmptyCorpus";
    case Err::VocabTooLarge: return "VocabTooLarge";
    case Err::MissingHypothesis: return "MissingHypothesis";
    case Err::ConfigError: return "ConfigError";
    case Err::IoError: return "IoError";
  }
  return "Unknown";
}

class EtslError : public std::runtime_error {
 public:
  EtslError(Err code, const std::string& detail)
      : std::runtime_error(std::string(err_name(code)) + ": " + detail),
        code_(code) {}
  Err code() const noexcept { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& detail) {
  throw EtslError(code, detail);
}

// Deterministic RNG wrapper.  std::uniform_* distributions are
// implementation-defined, so the draw algorithms live here: identical seeds
// give identical streams on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform() {
    return (gen_() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

  // standard normal via Box-Muller; pairs are drawn eagerly
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    double u2 = uniform();
    double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double std) { return mean + std * normal(); }

  bool bernoulli(double p_true) { return uniform() < p_true; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Decimal text with 9 significant digits, the coordinate wire format.
inline std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string> split_char(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

}  // namespace etsl
