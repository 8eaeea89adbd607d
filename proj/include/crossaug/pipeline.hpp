/**
 * @file pipeline.hpp
 * @brief Two-stage contrastive augmentation of SUP claim/evidence pairs.
 *
 * For a positive pair (c, e, SUP) the generator yields c'. Then:
 *
 *   - c' == c, or generation failed: nothing is emitted;
 *   - otherwise (c', e, REF) is emitted;
 *   - when c -> c' is one span replacement within the size threshold, and
 *     the replaced words occur in e, the same substitution turns e into e'
 *     and (c, e', REF), (c', e', SUP) are emitted as well.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "crossaug/corpus.hpp"
#include "crossaug/evidence.hpp"
#include "crossaug/negator.hpp"
#include "crossaug/spandiff.hpp"
#include "crossaug/tokenizer.hpp"

namespace crossaug {

struct PipelineConfig {
  std::size_t tau = 3;
  ThresholdStrategy threshold_strategy = ThresholdStrategy::kMax;
  EvidenceOptions evidence;
  bool keep_originals = true;
  std::size_t concurrency = 1;
  /// Abort when more than this fraction of generator calls fail.
  double max_failure_rate = 0.10;
};

enum class OutcomeKind { kSkippedUnchanged, kSkippedFailed, kSkippedNotSup, kClaimOnly, kFull };

inline constexpr std::string_view to_string(OutcomeKind k) {
  switch (k) {
  case OutcomeKind::kSkippedUnchanged: return "skipped_unchanged";
  case OutcomeKind::kSkippedFailed: return "skipped_failed";
  case OutcomeKind::kSkippedNotSup: return "skipped_not_sup";
  case OutcomeKind::kClaimOnly: return "claim_only";
  case OutcomeKind::kFull: return "full";
  }
  return "?";
}

struct AugmentationOutcome {
  OutcomeKind kind = OutcomeKind::kSkippedNotSup;
  std::vector<Sample> emitted; ///< empty, {A}, or {A, B, C}
  std::string detail;          ///< generator failure reason, if any
};

/// Suffixes appended to the original id for each emitted sample.
inline constexpr std::string_view kNegClaimSuffix = "#nc";
inline constexpr std::string_view kNegEvidencePosSuffix = "#ne-pos";
inline constexpr std::string_view kNegEvidenceNegSuffix = "#ne-neg";

/// augmented / originals rounded half-up to two decimals; "0.00" when
/// there are no originals.
inline std::string format_ratio(std::uint64_t augmented, std::uint64_t originals) {
  if (originals == 0) return "0.00";
  const std::uint64_t hundredths = (200 * augmented + originals) / (2 * originals);
  std::string frac = std::to_string(hundredths % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return std::to_string(hundredths / 100) + "." + frac;
}

struct PipelineStats {
  std::size_t originals = 0;
  std::size_t sup_originals = 0;
  std::size_t skipped_unchanged = 0;
  std::size_t skipped_failed = 0;
  std::size_t skipped_not_sup = 0;
  std::size_t claim_only = 0;
  std::size_t full = 0;

  std::size_t augmented_total() const { return claim_only + 3 * full; }
  std::size_t generator_calls() const {
    return skipped_unchanged + skipped_failed + claim_only + full;
  }

  void count(OutcomeKind kind) {
    switch (kind) {
    case OutcomeKind::kSkippedUnchanged: ++skipped_unchanged; break;
    case OutcomeKind::kSkippedFailed: ++skipped_failed; break;
    case OutcomeKind::kSkippedNotSup: ++skipped_not_sup; break;
    case OutcomeKind::kClaimOnly: ++claim_only; break;
    case OutcomeKind::kFull: ++full; break;
    }
  }

  std::string ratio_string() const { return format_ratio(augmented_total(), originals); }

  friend bool operator==(const PipelineStats&, const PipelineStats&) = default;
};

/// Flat `key=value` report, one key per line, fixed order.
inline std::string format_report(const PipelineStats& s) {
  std::ostringstream out;
  out << "originals=" << s.originals << '\n'
      << "sup_originals=" << s.sup_originals << '\n'
      << "skipped_unchanged=" << s.skipped_unchanged << '\n'
      << "skipped_failed=" << s.skipped_failed << '\n'
      << "skipped_not_sup=" << s.skipped_not_sup << '\n'
      << "claim_only=" << s.claim_only << '\n'
      << "full=" << s.full << '\n'
      << "augmented_total=" << s.augmented_total() << '\n'
      << "ratio=" << s.ratio_string() << '\n';
  return out.str();
}

/// Too many generator calls failed. Carries the counts gathered so far.
class GeneratorAbort : public std::runtime_error {
public:
  explicit GeneratorAbort(PipelineStats partial)
      : std::runtime_error("generator failure rate exceeded the abort threshold"),
        partial_(partial) {}
  const PipelineStats& partial() const { return partial_; }

private:
  PipelineStats partial_;
};

namespace detail {

inline Sample derived(const Sample& original, std::string_view suffix, std::string claim,
                      std::string evidence, Label label, Provenance provenance) {
  return {original.id + std::string(suffix), std::move(claim), std::move(evidence), label,
          provenance, original.id};
}

} // namespace detail

inline AugmentationOutcome augment_sample(const Sample& sample, const PipelineConfig& config,
                                          const Generator& generator) {
  AugmentationOutcome outcome;
  if (sample.label != Label::kSup) return outcome;

  GenerationResult generated = generator.generate(sample.id, sample.claim);
  if (generated.status == GenerationStatus::kOk && generated.negative_claim.empty())
    generated = GenerationResult::failed("generator returned an empty claim");
  if (generated.status == GenerationStatus::kFailed) {
    outcome.kind = OutcomeKind::kSkippedFailed;
    outcome.detail = std::move(generated.detail);
    return outcome;
  }
  if (generated.status == GenerationStatus::kUnchanged || generated.negative_claim == sample.claim) {
    outcome.kind = OutcomeKind::kSkippedUnchanged;
    return outcome;
  }
  const std::string& negative = generated.negative_claim;

  outcome.kind = OutcomeKind::kClaimOnly;
  outcome.emitted.push_back(detail::derived(sample, kNegClaimSuffix, negative, sample.evidence,
                                            Label::kRef, Provenance::kNegClaim));

  const TokenSeq pos = tokenize(sample.claim);
  const TokenSeq neg = tokenize(negative);
  const auto diff = span_diff(pos, neg);
  if (!diff || diff->source.empty() || !within_threshold(*diff, config.tau, config.threshold_strategy))
    return outcome;

  auto modified = modify_evidence(sample.evidence, *diff, pos, neg, config.evidence);
  if (!modified || *modified == sample.evidence || modified->empty()) return outcome;

  outcome.kind = OutcomeKind::kFull;
  outcome.emitted.push_back(detail::derived(sample, kNegEvidencePosSuffix, sample.claim, *modified,
                                            Label::kRef, Provenance::kPosClaimNegEvidence));
  outcome.emitted.push_back(detail::derived(sample, kNegEvidenceNegSuffix, negative,
                                            std::move(*modified), Label::kSup,
                                            Provenance::kNegClaimNegEvidence));
  return outcome;
}

struct AugmentResult {
  Dataset dataset;
  PipelineStats stats;
};

/// Augments every original sample. Output order follows the input, each
/// original (when kept) immediately followed by its emitted samples, and
/// does not depend on `config.concurrency`.
///
/// Throws GeneratorAbort when the failure rate exceeds
/// `config.max_failure_rate`, and CorpusError for already-augmented input or
/// id collisions.
inline AugmentResult augment_dataset(const Dataset& dataset, const PipelineConfig& config,
                                     const Generator& generator) {
  for (const auto& s : dataset.samples) {
    if (s.provenance != Provenance::kOriginal)
      throw CorpusError(0, "sample \"" + s.id + "\" is already augmented; input must be ORIGINAL samples");
  }

  PipelineStats stats;
  stats.originals = dataset.size();
  for (const auto& s : dataset.samples) stats.sup_originals += s.label == Label::kSup;

  // Failures beyond this count guarantee the final rate is over threshold.
  const auto failure_budget = static_cast<std::size_t>(config.max_failure_rate *
                                                       static_cast<double>(stats.sup_originals));
  std::vector<AugmentationOutcome> outcomes(dataset.size());
  std::vector<std::uint8_t> processed(dataset.size(), 0);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failures{0};
  std::atomic<bool> aborted{false};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < dataset.size() && !aborted.load();
         i = next.fetch_add(1)) {
      outcomes[i] = augment_sample(dataset.samples[i], config, generator);
      processed[i] = 1;
      if (outcomes[i].kind == OutcomeKind::kSkippedFailed && failures.fetch_add(1) + 1 > failure_budget)
        aborted.store(true);
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(config.concurrency, 1, std::max<std::size_t>(dataset.size(), 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  if (aborted.load()) {
    PipelineStats partial = stats;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (processed[i]) partial.count(outcomes[i].kind);
    }
    throw GeneratorAbort(partial);
  }

  AugmentResult result;
  result.stats = stats;
  std::unordered_set<std::string> ids;
  auto append = [&](const Sample& s) {
    if (!ids.insert(s.id).second)
      throw CorpusError(0, "augmented id \"" + s.id + "\" collides with an existing id");
    result.dataset.samples.push_back(s);
  };
  if (!config.keep_originals) {
    for (const auto& s : dataset.samples) ids.insert(s.id);
  }
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    result.stats.count(outcomes[i].kind);
    if (config.keep_originals) append(dataset.samples[i]);
    for (const auto& s : outcomes[i].emitted) append(s);
  }
  return result;
}

} // namespace crossaug
