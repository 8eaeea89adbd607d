/**
 * @file spandiff.hpp
 * @brief Single contiguous span replacement between two token sequences,
 * and the size gate applied before evidence modification.
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "crossaug/tokenizer.hpp"

namespace crossaug {

/// `source` in the first sequence is replaced by `target` in the second. Both
/// ranges start at the same index (the shared prefix length).
struct SpanDiff {
  TokenRange source;
  TokenRange target;

  friend bool operator==(const SpanDiff&, const SpanDiff&) = default;
};

/// Which span sizes count against the threshold.
enum class ThresholdStrategy { kMax, kSourceOnly, kTargetOnly };

inline std::optional<ThresholdStrategy> parse_threshold_strategy(std::string_view s) {
  if (s == "max") return ThresholdStrategy::kMax;
  if (s == "src") return ThresholdStrategy::kSourceOnly;
  if (s == "tgt") return ThresholdStrategy::kTargetOnly;
  return std::nullopt;
}

/// Longest common prefix, then the longest common suffix capped so the two
/// never overlap. Returns nullopt iff the sequences are equal.
inline std::optional<SpanDiff> span_diff(std::span<const std::string> pos,
                                         std::span<const std::string> neg) {
  const std::size_t shorter = std::min(pos.size(), neg.size());
  std::size_t prefix = 0;
  while (prefix < shorter && pos[prefix] == neg[prefix]) ++prefix;
  if (prefix == pos.size() && prefix == neg.size()) return std::nullopt;

  std::size_t suffix = 0;
  while (prefix + suffix < shorter &&
         pos[pos.size() - 1 - suffix] == neg[neg.size() - 1 - suffix])
    ++suffix;

  return SpanDiff{{prefix, pos.size() - suffix}, {prefix, neg.size() - suffix}};
}

inline std::optional<SpanDiff> span_diff(const TokenSeq& pos, const TokenSeq& neg) {
  const auto a = pos.texts();
  const auto b = neg.texts();
  return span_diff(std::span<const std::string>(a), std::span<const std::string>(b));
}

inline bool within_threshold(const SpanDiff& diff, std::size_t tau,
                             ThresholdStrategy strategy = ThresholdStrategy::kMax) {
  switch (strategy) {
  case ThresholdStrategy::kSourceOnly: return diff.source.size() <= tau;
  case ThresholdStrategy::kTargetOnly: return diff.target.size() <= tau;
  case ThresholdStrategy::kMax: break;
  }
  return std::max(diff.source.size(), diff.target.size()) <= tau;
}

} // namespace crossaug
