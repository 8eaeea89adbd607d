/**
 * @file cli.hpp
 * @brief The `crossaug` command line: augment, subsample, validate, stats.
 *
 * Exit codes: 0 success, 1 data or validation error, 2 usage error,
 * 3 remote generator abort.
 */
#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "crossaug/bundled_lexicon.hpp"
#include "crossaug/corpus.hpp"
#include "crossaug/negator.hpp"
#include "crossaug/pipeline.hpp"
#include "crossaug/remote_generator.hpp"
#include "crossaug/subsample.hpp"

namespace crossaug::cli {

enum ExitCode : int { kOk = 0, kDataError = 1, kUsageError = 2, kRemoteAbort = 3 };

inline constexpr const char* kGeneratorUrlEnv = "CROSSAUG_GENERATOR_URL";

struct Context {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  /// Value of CROSSAUG_GENERATOR_URL, if set.
  std::optional<std::string> generator_url;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Dataset read_input(const std::string& path, Context& ctx) {
  if (path == "-") return parse_records(ctx.in).dataset;
  std::ifstream file(path, std::ios::binary);
  if (!file) throw CorpusError(0, "cannot open " + path);
  return parse_records(file).dataset;
}

/// Writes through a temporary file so a failed run never leaves partial output.
inline void write_output(const std::string& path, const std::string& content, Context& ctx) {
  if (path == "-") {
    ctx.out << content;
    ctx.out.flush();
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw CorpusError(0, "cannot write " + path);
    file << content;
    if (!file.flush()) throw CorpusError(0, "cannot write " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CorpusError(0, "cannot write " + path + ": " + ec.message());
}

inline Lexicon load_lexicon(const std::string& path) {
  if (path.empty()) return Lexicon::parse(kBundledLexicon);
  std::ifstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot open lexicon " + path);
  return Lexicon::parse(file);
}

struct AugmentArgs {
  std::string in, out, report, lexicon;
  std::string generator;
  std::string strategy = "max";
  std::size_t tau = 3;
  std::size_t concurrency = 1;
  std::size_t max_in_flight = 0;
  std::size_t timeout_ms = 30'000;
  double abort_threshold = 0.10;
  bool match_case = false;
  bool replace_all = false;
  bool no_keep_originals = false;
};

inline int run_augment(const AugmentArgs& args, Context& ctx) {
  PipelineConfig config;
  config.tau = args.tau;
  config.concurrency = args.concurrency;
  config.keep_originals = !args.no_keep_originals;
  config.evidence = {args.match_case, args.replace_all};
  config.max_failure_rate = args.abort_threshold;
  auto strategy = parse_threshold_strategy(args.strategy);
  if (!strategy) throw UsageError("--threshold-strategy must be max, src or tgt");
  config.threshold_strategy = *strategy;

  GeneratorSpec spec;
  std::string generator = args.generator;
  if (generator.empty() && ctx.generator_url) generator = *ctx.generator_url;
  if (!generator.empty() && generator != "rule") {
    spec.kind = GeneratorKind::kRemote;
    spec.endpoint = generator;
    spec.timeout = std::chrono::milliseconds(args.timeout_ms);
    spec.max_in_flight = args.max_in_flight ? args.max_in_flight : args.concurrency;
    try {
      check_spec(spec);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  auto lexicon = spec.kind == GeneratorKind::kRule ? load_lexicon(args.lexicon) : Lexicon{};
  auto gen = make_generator(spec, std::move(lexicon));

  Dataset input = read_input(args.in, ctx);
  AugmentResult result;
  try {
    result = augment_dataset(input, config, *gen);
  } catch (const GeneratorAbort& abort) {
    ctx.err << "crossaug: " << abort.what() << " (" << config.max_failure_rate
            << "); no output written\n"
            << format_report(abort.partial());
    return kRemoteAbort;
  }
  write_output(args.out, to_records(result.dataset), ctx);

  const std::string report = format_report(result.stats);
  if (args.report.empty()) {
    ctx.err << report;
  } else {
    std::ofstream file(args.report, std::ios::binary | std::ios::trunc);
    if (!(file << report)) throw CorpusError(0, "cannot write " + args.report);
  }
  ctx.err << "augmentation ratio (original:augmented) 1:" << result.stats.ratio_string() << '\n';
  return kOk;
}

inline int run_subsample(const std::string& in, const std::string& out, const std::string& fraction,
                         std::uint64_t seed, Context& ctx) {
  auto f = parse_fraction(fraction);
  if (!f) throw UsageError("--fraction must be a decimal or a/b in (0, 1]");
  Dataset input = read_input(in, ctx);
  if (input.empty()) throw CorpusError(0, "cannot subsample an empty dataset");
  auto result = class_balanced_subsample(input, {*f, seed});
  for (const auto& w : result.warnings) ctx.err << "crossaug: warning: " << w << '\n';
  write_output(out, to_records(result.dataset), ctx);
  return kOk;
}

inline int run_validate(const std::string& in, Context& ctx) {
  ParseResult parsed;
  if (in == "-") {
    parsed = parse_records(ctx.in, ParseMode::kLenient);
  } else {
    std::ifstream file(in, std::ios::binary);
    if (!file) throw CorpusError(0, "cannot open " + in);
    parsed = parse_records(file, ParseMode::kLenient);
  }
  auto report = validate(parsed.dataset);
  for (const auto& r : parsed.rejections) ctx.out << "line " << r.line << ": " << r.message << '\n';
  for (const auto& v : report.violations) ctx.out << v.id << ": " << v.message << '\n';
  const bool clean = parsed.rejections.empty() && report.clean();
  if (clean) ctx.out << "ok: " << parsed.dataset.size() << " samples\n";
  return clean ? kOk : kDataError;
}

inline int run_stats(const std::string& in, Context& ctx) {
  Dataset data = read_input(in, ctx);
  std::map<std::string_view, std::size_t> labels{{"SUP", 0}, {"REF", 0}, {"NEI", 0}};
  std::map<std::string, std::size_t> derived_per_origin;
  std::size_t originals = 0, sup_originals = 0, augmented = 0;
  std::size_t provenance[4] = {0, 0, 0, 0};
  for (const auto& s : data.samples) {
    ++labels[to_string(s.label)];
    ++provenance[static_cast<int>(s.provenance)];
    if (s.provenance == Provenance::kOriginal) {
      ++originals;
      sup_originals += s.label == Label::kSup;
    } else {
      ++augmented;
      ++derived_per_origin[s.origin_id];
    }
  }
  std::size_t claim_only = 0, full = 0;
  for (const auto& [origin, n] : derived_per_origin) {
    claim_only += n == 1;
    full += n == 3;
  }

  auto& out = ctx.out;
  out << "samples=" << data.size() << '\n'
      << "label_sup=" << labels["SUP"] << '\n'
      << "label_ref=" << labels["REF"] << '\n'
      << "label_nei=" << labels["NEI"] << '\n';
  for (auto p : {Provenance::kOriginal, Provenance::kNegClaim, Provenance::kPosClaimNegEvidence,
                 Provenance::kNegClaimNegEvidence}) {
    std::string key(to_string(p));
    for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out << "provenance_" << key << '=' << provenance[static_cast<int>(p)] << '\n';
  }
  out << "originals=" << originals << '\n'
      << "sup_originals=" << sup_originals << '\n'
      << "claim_only=" << claim_only << '\n'
      << "full=" << full << '\n'
      << "augmented_total=" << augmented << '\n'
      << "ratio=" << (originals ? format_ratio(augmented, originals) : std::string("n/a")) << '\n';
  return kOk;
}

} // namespace detail

/// Runs one command. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, Context ctx) {
  CLI::App app{"Contrastive augmentation toolkit for claim/evidence datasets", "crossaug"};
  app.require_subcommand(1);

  detail::AugmentArgs aug;
  auto* augment = app.add_subcommand("augment", "Generate contrastive samples for SUP pairs");
  augment->add_option("--in", aug.in, "Input records (- for stdin)")->required();
  augment->add_option("--out", aug.out, "Output records (- for stdout)")->required();
  augment->add_option("--tau", aug.tau, "Maximum replaced span size for evidence edits")
      ->capture_default_str();
  augment->add_option("--generator", aug.generator,
                      "rule, or the base URL of a generator service (default: $" +
                          std::string(kGeneratorUrlEnv) + " or rule)");
  augment->add_option("--lexicon", aug.lexicon, "Antonym lexicon (word<TAB>antonym)");
  augment->add_option("--threshold-strategy", aug.strategy, "max | src | tgt")
      ->check(CLI::IsMember({"max", "src", "tgt"}))
      ->capture_default_str();
  augment->add_flag("--match-case", aug.match_case, "Match evidence words case-sensitively");
  augment->add_flag("--replace-all", aug.replace_all, "Edit every occurrence in the evidence");
  augment->add_flag("--no-keep-originals", aug.no_keep_originals, "Emit only augmented samples");
  augment->add_option("--concurrency", aug.concurrency, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  augment->add_option("--max-in-flight", aug.max_in_flight,
                      "Concurrent generator requests (default: --concurrency)")
      ->check(CLI::PositiveNumber);
  augment->add_option("--timeout-ms", aug.timeout_ms, "Generator request timeout")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  augment->add_option("--abort-threshold", aug.abort_threshold,
                      "Abort when more than this fraction of generator calls fail")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  augment->add_option("--report", aug.report, "Write the stats report here instead of stderr");

  std::string sub_in, sub_out, fraction;
  std::uint64_t seed = 0;
  auto* subsample = app.add_subcommand("subsample", "Class-balanced random subset");
  subsample->add_option("--in", sub_in, "Input records (- for stdin)")->required();
  subsample->add_option("--out", sub_out, "Output records (- for stdout)")->required();
  subsample->add_option("--fraction", fraction, "Fraction per class, in (0, 1]")->required();
  subsample->add_option("--seed", seed, "Random seed")->required();

  std::string validate_in;
  auto* validate_cmd = app.add_subcommand("validate", "Check records and label rules");
  validate_cmd->add_option("--in", validate_in, "Input records (- for stdin)")->required();

  std::string stats_in;
  auto* stats = app.add_subcommand("stats", "Label, provenance and ratio counts");
  stats->add_option("--in", stats_in, "Input records (- for stdin)")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    ctx.out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    ctx.out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    ctx.err << "crossaug: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (*augment) return detail::run_augment(aug, ctx);
    if (*subsample) return detail::run_subsample(sub_in, sub_out, fraction, seed, ctx);
    if (*validate_cmd) return detail::run_validate(validate_in, ctx);
    if (*stats) return detail::run_stats(stats_in, ctx);
  } catch (const UsageError& e) {
    ctx.err << "crossaug: " << e.what() << '\n';
    return kUsageError;
  } catch (const LexiconError& e) {
    ctx.err << "crossaug: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    ctx.err << "crossaug: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

} // namespace crossaug::cli
