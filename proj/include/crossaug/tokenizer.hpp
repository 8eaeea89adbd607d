/**
 * @file tokenizer.hpp
 * @brief Word-level tokenization with byte offsets, plus splicing of token
 * ranges back into the source string.
 *
 * A token is either a maximal run of word characters or a single standalone
 * punctuation mark from `. , ; : ! ? " ' ( ) [ ]`. A punctuation mark with a
 * word character on both sides is word-internal ("don't", "3.5", "U.S").
 * Whitespace is any Unicode White_Space code point.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crossaug {

struct Token {
  std::string text;
  std::size_t start = 0; ///< byte offset, inclusive
  std::size_t end = 0;   ///< byte offset, exclusive

  friend bool operator==(const Token&, const Token&) = default;
};

struct TokenSeq {
  std::string source;
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  const Token& operator[](std::size_t i) const { return tokens[i]; }

  std::vector<std::string> texts(std::size_t first, std::size_t last) const {
    std::vector<std::string> out;
    for (std::size_t i = first; i < last; ++i) out.push_back(tokens[i].text);
    return out;
  }
  std::vector<std::string> texts() const { return texts(0, tokens.size()); }

  /// Raw source bytes covered by tokens [first, last); empty for an empty range.
  std::string_view raw(std::size_t first, std::size_t last) const {
    if (first >= last) return {};
    return std::string_view(source).substr(tokens[first].start,
                                           tokens[last - 1].end - tokens[first].start);
  }

  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
};

/// Half-open token index range [first, last).
struct TokenRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first; }
  bool empty() const { return first == last; }
  friend bool operator==(const TokenRange&, const TokenRange&) = default;
};

namespace detail {

/// Decodes one code point at `pos`; invalid bytes decode as themselves with
/// length 1 so every byte is covered.
inline char32_t decode_utf8(std::string_view s, std::size_t pos, std::size_t& len) {
  auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t k) {
    return pos + k < s.size() &&
           (static_cast<unsigned char>(s[pos + k]) & 0xC0) == 0x80;
  };
  auto byte = [&](std::size_t k) {
    return static_cast<char32_t>(static_cast<unsigned char>(s[pos + k]) & 0x3F);
  };
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    len = 2;
    return (static_cast<char32_t>(b0 & 0x1F) << 6) | byte(1);
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    len = 3;
    return (static_cast<char32_t>(b0 & 0x0F) << 12) | (byte(1) << 6) | byte(2);
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    len = 4;
    return (static_cast<char32_t>(b0 & 0x07) << 18) | (byte(1) << 12) |
           (byte(2) << 6) | byte(3);
  }
  len = 1;
  return 0xFFFD;
}

inline constexpr bool is_unicode_space(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 ||
         cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 ||
         cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

inline constexpr bool is_punct(char32_t cp) {
  switch (cp) {
  case '.': case ',': case ';': case ':': case '!': case '?':
  case '"': case '\'': case '(': case ')': case '[': case ']':
    return true;
  default:
    return false;
  }
}

inline constexpr bool is_ascii_blank(char ch) { return ch == ' ' || ch == '\t'; }

} // namespace detail

inline TokenSeq tokenize(std::string_view text) {
  enum class Kind : std::uint8_t { kSpace, kPunct, kWord };
  struct Unit {
    std::size_t start, end;
    char32_t cp;
  };

  std::vector<Unit> units;
  for (std::size_t pos = 0; pos < text.size();) {
    std::size_t len = 1;
    char32_t cp = detail::decode_utf8(text, pos, len);
    units.push_back({pos, pos + len, cp});
    pos += len;
  }

  auto is_word = [&](std::size_t k) {
    return !detail::is_unicode_space(units[k].cp) && !detail::is_punct(units[k].cp);
  };
  std::vector<Kind> kinds(units.size());
  for (std::size_t k = 0; k < units.size(); ++k) {
    char32_t cp = units[k].cp;
    if (detail::is_unicode_space(cp)) {
      kinds[k] = Kind::kSpace;
    } else if (detail::is_punct(cp)) {
      bool internal = k > 0 && k + 1 < units.size() && is_word(k - 1) && is_word(k + 1);
      kinds[k] = internal ? Kind::kWord : Kind::kPunct;
    } else {
      kinds[k] = Kind::kWord;
    }
  }

  TokenSeq seq{std::string(text), {}};
  auto emit = [&](std::size_t start, std::size_t end) {
    seq.tokens.push_back({std::string(text.substr(start, end - start)), start, end});
  };
  for (std::size_t k = 0; k < units.size();) {
    if (kinds[k] == Kind::kSpace) {
      ++k;
    } else if (kinds[k] == Kind::kPunct) {
      emit(units[k].start, units[k].end);
      ++k;
    } else {
      std::size_t first = k;
      while (k < units.size() && kinds[k] == Kind::kWord) ++k;
      emit(units[first].start, units[k - 1].end);
    }
  }
  return seq;
}

/// Replaces bytes [begin, end) of `source`. When the replacement deletes a
/// non-empty byte range, the blanks meeting at the seam are collapsed so no
/// doubled space is left, and blanks left at either edge of the string are
/// trimmed.
inline std::string splice_bytes(std::string_view source, std::size_t begin,
                                std::size_t end, std::string_view replacement) {
  if (begin > end || end > source.size()) throw std::out_of_range("splice: bad byte range");
  std::string out;
  out.reserve(source.size() - (end - begin) + replacement.size());
  out.append(source.substr(0, begin)).append(replacement).append(source.substr(end));
  if (!replacement.empty() || begin == end) return out;

  std::size_t seam = begin;
  std::size_t left = seam;
  while (left > 0 && detail::is_ascii_blank(out[left - 1])) --left;
  std::size_t right = seam;
  while (right < out.size() && detail::is_ascii_blank(out[right])) ++right;

  bool blanks_before = left < seam;
  bool blanks_after = right > seam;
  if (left == 0 && blanks_after) {
    out.erase(seam, right - seam);
  } else if (right == out.size() && blanks_before) {
    out.erase(left, seam - left);
  } else if (blanks_before && blanks_after) {
    out.erase(seam, right - seam);
  }
  return out;
}

/// Replaces the bytes covered by tokens [range.first, range.last) with
/// `replacement`. An empty range inserts before token `range.first`, or at
/// the end of the string when it equals the token count.
inline std::string splice(const TokenSeq& seq, TokenRange range, std::string_view replacement) {
  if (range.first > range.last || range.last > seq.size())
    throw std::out_of_range("splice: token range out of bounds");
  if (range.empty()) {
    std::size_t at = range.first < seq.size() ? seq[range.first].start : seq.source.size();
    return splice_bytes(seq.source, at, at, replacement);
  }
  return splice_bytes(seq.source, seq[range.first].start, seq[range.last - 1].end,
                      replacement);
}

/// ASCII case fold; non-ASCII bytes compare exactly.
inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto fold = [](char c) {
      return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    };
    if (fold(a[i]) != fold(b[i])) return false;
  }
  return true;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

} // namespace crossaug
