/**
 * @file corpus.hpp
 * @brief Claim/evidence records: data model, line-delimited JSON I/O and
 * structural validation.
 *
 * One record per line, each a flat object:
 *
 *     {"id":"s1","claim":"...","evidence":"...","label":"SUP",
 *      "provenance":"ORIGINAL","origin_id":"s1"}
 *
 * `provenance` and `origin_id` are optional on input and always written.
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace crossaug {

enum class Label { kSup, kRef, kNei };

/// Which cross-wise pair a sample represents.
enum class Provenance {
  kOriginal,            ///< (c, e)
  kNegClaim,            ///< (c', e)
  kPosClaimNegEvidence, ///< (c, e')
  kNegClaimNegEvidence  ///< (c', e')
};

inline constexpr std::string_view to_string(Label label) {
  switch (label) {
  case Label::kSup: return "SUP";
  case Label::kRef: return "REF";
  case Label::kNei: return "NEI";
  }
  return "?";
}

inline constexpr std::string_view to_string(Provenance p) {
  switch (p) {
  case Provenance::kOriginal: return "ORIGINAL";
  case Provenance::kNegClaim: return "NEG_CLAIM";
  case Provenance::kPosClaimNegEvidence: return "POS_CLAIM_NEG_EVIDENCE";
  case Provenance::kNegClaimNegEvidence: return "NEG_CLAIM_NEG_EVIDENCE";
  }
  return "?";
}

/// Accepts the short forms and the FEVER long forms.
inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "SUP" || s == "SUPPORTS") return Label::kSup;
  if (s == "REF" || s == "REFUTES") return Label::kRef;
  if (s == "NEI" || s == "NOT ENOUGH INFO") return Label::kNei;
  return std::nullopt;
}

inline std::optional<Provenance> parse_provenance(std::string_view s) {
  for (auto p : {Provenance::kOriginal, Provenance::kNegClaim,
                 Provenance::kPosClaimNegEvidence,
                 Provenance::kNegClaimNegEvidence}) {
    if (s == to_string(p)) return p;
  }
  return std::nullopt;
}

/// The label every augmented sample of a given provenance must carry.
inline constexpr std::optional<Label> required_label(Provenance p) {
  switch (p) {
  case Provenance::kNegClaim:
  case Provenance::kPosClaimNegEvidence: return Label::kRef;
  case Provenance::kNegClaimNegEvidence: return Label::kSup;
  case Provenance::kOriginal: break;
  }
  return std::nullopt;
}

struct Sample {
  std::string id;
  std::string claim;
  std::string evidence;
  Label label = Label::kNei;
  Provenance provenance = Provenance::kOriginal;
  std::string origin_id;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Ordered sample list. Ids are unique once it comes out of parse_records.
struct Dataset {
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Parse or data error tied to a 1-based input line (0 when not line-bound).
class CorpusError : public std::runtime_error {
public:
  CorpusError(std::size_t line, const std::string& message)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message
                                : message),
        line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Replaces every run of CR/LF characters with a single space.
inline std::string normalize_newlines(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_run = false;
  for (char ch : text) {
    if (ch == '\n' || ch == '\r') {
      if (!in_run) out.push_back(' ');
      in_run = true;
    } else {
      out.push_back(ch);
      in_run = false;
    }
  }
  return out;
}

enum class ParseMode { kStrict, kLenient };

struct Rejection {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  Dataset dataset;
  std::vector<Rejection> rejections;
};

namespace detail {

inline std::string require_text(const nlohmann::json& obj, const char* key,
                                bool allow_single_list = false) {
  auto it = obj.find(key);
  if (it == obj.end()) throw std::invalid_argument(std::string("missing key \"") + key + "\"");
  const nlohmann::json* value = &*it;
  if (allow_single_list && value->is_array()) {
    if (value->size() != 1)
      throw std::invalid_argument(
          "multi-evidence records are not supported (got " +
          std::to_string(value->size()) + " evidences)");
    value = &(*value)[0];
  }
  if (!value->is_string())
    throw std::invalid_argument(std::string("key \"") + key + "\" must be a string");
  std::string text = normalize_newlines(value->get<std::string>());
  if (text.empty())
    throw std::invalid_argument(std::string("key \"") + key + "\" is empty");
  return text;
}

inline Sample sample_from_json(const nlohmann::json& obj) {
  if (!obj.is_object()) throw std::invalid_argument("record is not a JSON object");
  Sample s;
  auto id = obj.find("id");
  if (id == obj.end()) throw std::invalid_argument("missing key \"id\"");
  if (id->is_number_integer()) {
    s.id = id->dump();
  } else {
    s.id = require_text(obj, "id");
  }
  s.claim = require_text(obj, "claim");
  s.evidence = require_text(obj, "evidence", true);

  std::string label = require_text(obj, "label");
  auto parsed = parse_label(label);
  if (!parsed) throw std::invalid_argument("unknown label \"" + label + "\"");
  s.label = *parsed;

  if (obj.contains("provenance")) {
    std::string p = require_text(obj, "provenance");
    auto prov = parse_provenance(p);
    if (!prov) throw std::invalid_argument("unknown provenance \"" + p + "\"");
    s.provenance = *prov;
  }
  s.origin_id = obj.contains("origin_id") ? require_text(obj, "origin_id") : s.id;

  if ((s.provenance == Provenance::kOriginal) != (s.origin_id == s.id))
    throw std::invalid_argument(
        "origin_id must equal id exactly when provenance is ORIGINAL");
  return s;
}

inline bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r';
  });
}

} // namespace detail

/// Reads one record per line. Blank lines are skipped. In strict mode the
/// first bad line throws CorpusError; in lenient mode bad lines are collected
/// as rejections. Duplicate ids are rejected in both modes.
inline ParseResult parse_records(std::istream& in, ParseMode mode = ParseMode::kStrict) {
  ParseResult result;
  std::unordered_map<std::string, std::size_t> seen; // id -> line
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::blank(line)) continue;
    std::string error;
    try {
      Sample s = detail::sample_from_json(nlohmann::json::parse(line));
      auto [it, inserted] = seen.emplace(s.id, lineno);
      if (inserted) {
        result.dataset.samples.push_back(std::move(s));
        continue;
      }
      error = "duplicate id \"" + s.id + "\" (first seen on line " +
              std::to_string(it->second) + ")";
    } catch (const nlohmann::json::exception& e) {
      error = std::string("malformed record: ") + e.what();
    } catch (const std::invalid_argument& e) {
      error = e.what();
    }
    if (mode == ParseMode::kStrict) throw CorpusError(lineno, error);
    result.rejections.push_back({lineno, std::move(error)});
  }
  return result;
}

inline ParseResult parse_records(std::string_view text, ParseMode mode = ParseMode::kStrict) {
  std::istringstream in{std::string(text)};
  return parse_records(in, mode);
}

inline nlohmann::ordered_json to_json(const Sample& s) {
  nlohmann::ordered_json obj;
  obj["id"] = s.id;
  obj["claim"] = s.claim;
  obj["evidence"] = s.evidence;
  obj["label"] = to_string(s.label);
  obj["provenance"] = to_string(s.provenance);
  obj["origin_id"] = s.origin_id;
  return obj;
}

inline void write_records(const Dataset& dataset, std::ostream& out) {
  for (const auto& s : dataset.samples) {
    out << to_json(s).dump() << '\n';
    if (!out) throw CorpusError(0, "write failed");
  }
}

inline std::string to_records(const Dataset& dataset) {
  std::ostringstream out;
  write_records(dataset, out);
  return out.str();
}

struct Violation {
  std::string id;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool clean() const { return violations.empty(); }
};

struct ValidateOptions {
  /// Report origin_ids that do not resolve inside the dataset itself.
  bool require_origins = true;
};

/// Checks what parse_records cannot see per line: duplicates, provenance
/// closure and the label each augmented provenance must carry.
inline ValidationReport validate(const Dataset& dataset, ValidateOptions options = {}) {
  ValidationReport report;
  auto add = [&](const Sample& s, std::string msg) {
    report.violations.push_back({s.id, std::move(msg)});
  };

  std::unordered_map<std::string_view, const Sample*> by_id;
  for (const auto& s : dataset.samples) {
    if (!by_id.emplace(s.id, &s).second) add(s, "duplicate id");
  }

  for (const auto& s : dataset.samples) {
    if (s.id.empty()) add(s, "empty id");
    if (s.claim.empty()) add(s, "empty claim");
    if (s.evidence.empty()) add(s, "empty evidence");
    auto has_newline = [](const std::string& t) {
      return t.find_first_of("\r\n") != std::string::npos;
    };
    if (has_newline(s.claim) || has_newline(s.evidence))
      add(s, "text contains a record delimiter");

    if (s.provenance == Provenance::kOriginal) {
      if (s.origin_id != s.id) add(s, "original sample must be its own origin");
      continue;
    }
    if (s.origin_id == s.id) add(s, "augmented sample cannot be its own origin");

    switch (s.provenance) {
    case Provenance::kNegClaim:
      if (s.label != Label::kRef) add(s, "augmented claim-only sample must be REF");
      break;
    case Provenance::kPosClaimNegEvidence:
      if (s.label != Label::kRef)
        add(s, "positive claim with modified evidence must be REF");
      break;
    case Provenance::kNegClaimNegEvidence:
      if (s.label != Label::kSup)
        add(s, "negative claim with modified evidence must be SUP");
      break;
    case Provenance::kOriginal: break;
    }

    if (!options.require_origins) continue;
    auto origin = by_id.find(s.origin_id);
    if (origin == by_id.end()) {
      add(s, "dangling origin \"" + s.origin_id + "\"");
    } else if (origin->second->provenance != Provenance::kOriginal) {
      add(s, "origin \"" + s.origin_id + "\" is not an original sample");
    } else if (origin->second->label != Label::kSup) {
      add(s, "origin \"" + s.origin_id + "\" is not SUP");
    }
  }
  return report;
}

} // namespace crossaug
