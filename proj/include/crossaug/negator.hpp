/**
 * @file negator.hpp
 * @brief Negative claim generation: the generator interface, the built-in
 * rule-based generator and its antonym lexicon.
 *
 * The rule generator tries, in order, and stops at the first rule that fires:
 *
 *  1. insert "not" after the first auxiliary or copula that is not already
 *     followed by "not";
 *  2. replace the first token found in the antonym lexicon, keeping an
 *     initial capital;
 *  3. give up (UNCHANGED).
 */
#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "crossaug/tokenizer.hpp"

namespace crossaug {

enum class GenerationStatus { kOk, kUnchanged, kFailed };

inline constexpr std::string_view to_string(GenerationStatus s) {
  switch (s) {
  case GenerationStatus::kOk: return "OK";
  case GenerationStatus::kUnchanged: return "UNCHANGED";
  case GenerationStatus::kFailed: return "FAILED";
  }
  return "?";
}

struct GenerationResult {
  std::string negative_claim;
  GenerationStatus status = GenerationStatus::kFailed;
  std::string detail;

  static GenerationResult from_candidate(std::string_view claim, std::string candidate) {
    auto status = candidate == claim ? GenerationStatus::kUnchanged : GenerationStatus::kOk;
    return {std::move(candidate), status, {}};
  }
  static GenerationResult failed(std::string detail) {
    return {{}, GenerationStatus::kFailed, std::move(detail)};
  }
};

/// Produces exactly one negative claim per call. Implementations must be
/// safe to call concurrently from several threads.
class Generator {
public:
  virtual ~Generator() = default;
  virtual GenerationResult generate(std::string_view id, std::string_view claim) const = 0;
};

class LexiconError : public std::runtime_error {
public:
  LexiconError(std::size_t line, const std::string& message)
      : std::runtime_error("lexicon line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Directional word -> antonym table with case-insensitive lookup. Both
/// sides of every entry must be a single token.
class Lexicon {
public:
  Lexicon() = default;

  static Lexicon parse(std::istream& in) {
    Lexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;

      auto tab = line.find('\t');
      if (tab == std::string::npos) throw LexiconError(lineno, "expected word<TAB>antonym");
      auto word = tokenize(std::string_view(line).substr(0, tab));
      auto antonym = tokenize(std::string_view(line).substr(tab + 1));
      if (word.size() != 1 || antonym.size() != 1)
        throw LexiconError(lineno, "both columns must be a single token");
      auto key = ascii_lower(word[0].text);
      if (!lex.entries_.emplace(key, antonym[0].text).second)
        throw LexiconError(lineno, "duplicate entry for \"" + key + "\"");
    }
    return lex;
  }

  static Lexicon parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse(in);
  }

  /// Antonym for `word` (any case), or nullptr.
  const std::string* find(std::string_view word) const {
    auto it = entries_.find(ascii_lower(word));
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  void add(std::string_view word, std::string_view antonym) {
    entries_.insert_or_assign(ascii_lower(word), std::string(antonym));
  }

private:
  std::unordered_map<std::string, std::string> entries_;
};

class RuleGenerator final : public Generator {
public:
  explicit RuleGenerator(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

  GenerationResult generate(std::string_view /*id*/, std::string_view claim) const override {
    return GenerationResult::from_candidate(claim, negate(claim));
  }

  /// The rewritten claim, or `claim` itself when no rule applies.
  std::string negate(std::string_view claim) const {
    const TokenSeq seq = tokenize(claim);

    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (!is_auxiliary(seq[i].text)) continue;
      if (i + 1 < seq.size() && iequals(seq[i + 1].text, "not")) continue;
      return splice_bytes(claim, seq[i].end, seq[i].end, " not");
    }

    for (std::size_t i = 0; i < seq.size(); ++i) {
      const std::string* antonym = lexicon_.find(seq[i].text);
      if (!antonym) continue;
      std::string replacement = *antonym;
      char lead = seq[i].text.front();
      if (lead >= 'A' && lead <= 'Z' && replacement.front() >= 'a' && replacement.front() <= 'z')
        replacement.front() = static_cast<char>(replacement.front() - 'a' + 'A');
      return splice(seq, {i, i + 1}, replacement);
    }
    return std::string(claim);
  }

  const Lexicon& lexicon() const { return lexicon_; }

private:
  static bool is_auxiliary(std::string_view token) {
    static constexpr std::array<std::string_view, 17> kAuxiliaries = {
        "is",  "are",   "was",   "were", "has",  "have",  "had",  "can", "could",
        "will", "would", "must", "may",  "might", "does", "do",  "did"};
    for (auto aux : kAuxiliaries)
      if (token == aux) return true;
    return false;
  }

  Lexicon lexicon_;
};

enum class GeneratorKind { kRule, kRemote };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kRule;
  std::string endpoint;                           // kRemote only
  std::chrono::milliseconds timeout{30'000};      // kRemote only
  std::size_t max_in_flight = 8;                  // kRemote only
};

} // namespace crossaug
