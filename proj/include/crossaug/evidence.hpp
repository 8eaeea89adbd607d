/**
 * @file evidence.hpp
 * @brief Evidence modification: find the claim's replaced words in the
 * evidence and substitute the negative claim's words for them.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crossaug/spandiff.hpp"
#include "crossaug/tokenizer.hpp"

namespace crossaug {

struct EvidenceOptions {
  bool match_case = false;  ///< compare tokens exactly instead of ASCII-case-insensitively
  bool replace_all = false; ///< edit every non-overlapping occurrence, not just the leftmost
};

/// One planned substitution in the evidence.
struct EvidenceEdit {
  TokenRange match;
  std::string replacement;
};

namespace detail {

inline bool tokens_match(std::span<const Token> evidence, std::size_t at,
                         std::span<const std::string> needle, bool match_case) {
  for (std::size_t k = 0; k < needle.size(); ++k) {
    const auto& text = evidence[at + k].text;
    if (match_case ? text != needle[k] : !iequals(text, needle[k])) return false;
  }
  return true;
}

} // namespace detail

/// Leftmost occurrence of `needle` in the evidence tokens. `needle` must be
/// non-empty.
inline std::optional<TokenRange> find_span(const TokenSeq& evidence,
                                           std::span<const std::string> needle,
                                           bool match_case = false) {
  if (needle.empty()) throw std::invalid_argument("find_span: empty search span");
  if (needle.size() > evidence.size()) return std::nullopt;
  std::span<const Token> tokens(evidence.tokens);
  for (std::size_t at = 0; at + needle.size() <= tokens.size(); ++at) {
    if (detail::tokens_match(tokens, at, needle, match_case))
      return TokenRange{at, at + needle.size()};
  }
  return std::nullopt;
}

/// Every non-overlapping occurrence, scanning left to right.
inline std::vector<TokenRange> find_all_spans(const TokenSeq& evidence,
                                              std::span<const std::string> needle,
                                              bool match_case = false) {
  if (needle.empty()) throw std::invalid_argument("find_all_spans: empty search span");
  std::vector<TokenRange> found;
  std::span<const Token> tokens(evidence.tokens);
  for (std::size_t at = 0; at + needle.size() <= tokens.size();) {
    if (detail::tokens_match(tokens, at, needle, match_case)) {
      found.push_back({at, at + needle.size()});
      at += needle.size();
    } else {
      ++at;
    }
  }
  return found;
}

/// Applies `edits` (sorted, non-overlapping) to the evidence source.
inline std::string apply_edits(const TokenSeq& evidence, std::span<const EvidenceEdit> edits) {
  std::string out = evidence.source;
  // Right to left so earlier byte offsets stay valid.
  for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
    const auto& range = it->match;
    out = splice_bytes(out, evidence[range.first].start, evidence[range.last - 1].end,
                       it->replacement);
  }
  return out;
}

/// Plans the substitutions implied by `diff` without touching the text.
inline std::vector<EvidenceEdit> plan_evidence_edits(const TokenSeq& evidence, const SpanDiff& diff,
                                                     const TokenSeq& pos, const TokenSeq& neg,
                                                     const EvidenceOptions& options = {}) {
  if (diff.source.empty())
    throw std::invalid_argument("evidence modification needs a non-empty source span");
  const auto needle = pos.texts(diff.source.first, diff.source.last);
  std::string replacement(neg.raw(diff.target.first, diff.target.last));

  std::vector<EvidenceEdit> edits;
  if (options.replace_all) {
    for (auto range : find_all_spans(evidence, needle, options.match_case))
      edits.push_back({range, replacement});
  } else if (auto range = find_span(evidence, needle, options.match_case)) {
    edits.push_back({*range, std::move(replacement)});
  }
  return edits;
}

/// The modified evidence, or nullopt when the replaced words do not occur in
/// it. The result may equal the input when the replacement text matches the
/// evidence bytes it overwrites.
inline std::optional<std::string> modify_evidence(std::string_view evidence_text, const SpanDiff& diff,
                                                  const TokenSeq& pos, const TokenSeq& neg,
                                                  const EvidenceOptions& options = {}) {
  const TokenSeq evidence = tokenize(evidence_text);
  const auto edits = plan_evidence_edits(evidence, diff, pos, neg, options);
  if (edits.empty()) return std::nullopt;
  return apply_edits(evidence, edits);
}

} // namespace crossaug
