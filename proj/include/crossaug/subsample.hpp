/**
 * @file subsample.hpp
 * @brief Class-balanced random subsampling.
 *
 * Each label class independently keeps round_half_up(fraction * class_size)
 * samples, drawn uniformly without replacement. The draw for a class depends
 * only on (seed, label), and the output keeps the input order.
 */
#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crossaug/corpus.hpp"

namespace crossaug {

/// Exact rational in (0, 1].
struct Fraction {
  std::uint64_t num = 1;
  std::uint64_t den = 1;

  bool valid() const { return den != 0 && num != 0 && num <= den; }

  /// round_half_up(num/den * count), exactly.
  std::uint64_t scale(std::uint64_t count) const {
    // num <= den <= 10^9 and count < 2^32 keep this in range.
    return (2 * num * count + den) / (2 * den);
  }
};

/// Parses "0.01", "1", "1.0" or "1/100". At most nine decimal places.
inline std::optional<Fraction> parse_fraction(std::string_view text) {
  auto to_u64 = [](std::string_view s) -> std::optional<std::uint64_t> {
    std::uint64_t v = 0;
    if (s.empty()) return std::nullopt;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
  };
  Fraction f;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto n = to_u64(text.substr(0, slash));
    auto d = to_u64(text.substr(slash + 1));
    if (!n || !d || *d == 0 || *d > 1'000'000'000) return std::nullopt;
    f = {*n, *d};
  } else {
    auto dot = text.find('.');
    std::string_view whole = text.substr(0, dot);
    std::string_view decimals = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (decimals.size() > 9 || (whole.empty() && decimals.empty())) return std::nullopt;
    if (dot != std::string_view::npos && decimals.empty()) return std::nullopt;
    auto w = whole.empty() ? std::optional<std::uint64_t>(0) : to_u64(whole);
    auto d = decimals.empty() ? std::optional<std::uint64_t>(0) : to_u64(decimals);
    if (!w || !d || *w > 1) return std::nullopt;
    std::uint64_t den = 1;
    for (std::size_t i = 0; i < decimals.size(); ++i) den *= 10;
    f = {*w * den + *d, den};
  }
  if (!f.valid()) return std::nullopt;
  auto g = std::gcd(f.num, f.den);
  return Fraction{f.num / g, f.den / g};
}

struct SubsampleConfig {
  Fraction fraction;
  std::uint64_t seed = 0;
};

struct SubsampleResult {
  Dataset dataset;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Uniform in [0, bound) by rejection; portable across standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t x = rng();
    if (x >= threshold) return x % bound;
  }
}

} // namespace detail

/// A uniform `count`-subset of `members`, sorted ascending.
inline std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t> members,
                                                         std::size_t count, std::mt19937_64& rng) {
  count = std::min(count, members.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + detail::uniform_below(rng, members.size() - i);
    std::swap(members[i], members[j]);
  }
  members.resize(count);
  std::sort(members.begin(), members.end());
  return members;
}

inline SubsampleResult class_balanced_subsample(const Dataset& dataset, const SubsampleConfig& config) {
  if (!config.fraction.valid()) throw std::invalid_argument("fraction must be in (0, 1]");
  if (dataset.empty()) throw std::invalid_argument("cannot subsample an empty dataset");

  constexpr std::array kLabels = {Label::kSup, Label::kRef, Label::kNei};
  SubsampleResult result;
  std::vector<std::uint8_t> keep(dataset.size(), 0);
  for (std::size_t li = 0; li < kLabels.size(); ++li) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < dataset.size(); ++i)
      if (dataset.samples[i].label == kLabels[li]) members.push_back(i);
    if (members.empty()) continue;

    const auto count = static_cast<std::size_t>(config.fraction.scale(members.size()));
    if (count == 0) {
      result.warnings.push_back("class " + std::string(to_string(kLabels[li])) + " (" +
                                std::to_string(members.size()) + " samples) rounds to 0");
      continue;
    }
    std::mt19937_64 rng(detail::splitmix64(config.seed ^ detail::splitmix64(li + 1)));
    for (std::size_t i : draw_without_replacement(std::move(members), count, rng)) keep[i] = 1;
  }

  for (std::size_t i = 0; i < dataset.size(); ++i)
    if (keep[i]) result.dataset.samples.push_back(dataset.samples[i]);
  return result;
}

} // namespace crossaug
