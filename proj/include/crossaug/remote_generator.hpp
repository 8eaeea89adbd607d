/**
 * @file remote_generator.hpp
 * @brief Client for an external negative-claim service.
 *
 * Protocol: `POST <endpoint>/negate` with `{"id": ..., "claim": ...}`; a
 * success is status 200 with `{"id": <same id>, "negative_claim": ...}`.
 * Anything else yields a FAILED result carrying the reason.
 */
#pragma once

#include <charconv>
#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <string_view>

#include <httplib.h>
#include <json.hpp>

#include "crossaug/corpus.hpp"
#include "crossaug/negator.hpp"

namespace crossaug {

struct HttpEndpoint {
  std::string host;
  int port = 80;
  std::string base_path; ///< without trailing slash; may be empty

  std::string negate_path() const { return base_path + "/negate"; }
};

/// Accepts `http://host[:port][/path]`. Only plain HTTP is supported.
inline std::optional<HttpEndpoint> parse_endpoint(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (url.substr(0, kScheme.size()) != kScheme) return std::nullopt;
  url.remove_prefix(kScheme.size());

  auto slash = url.find('/');
  std::string_view authority = url.substr(0, slash);
  std::string_view path = slash == std::string_view::npos ? std::string_view{} : url.substr(slash);
  while (!path.empty() && path.back() == '/') path.remove_suffix(1);

  HttpEndpoint ep;
  auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    auto digits = authority.substr(colon + 1);
    int port = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() ||
        port < 1 || port > 65535)
      return std::nullopt;
    ep.port = port;
    authority = authority.substr(0, colon);
  }
  if (authority.empty() || authority.find_first_of(" @?#") != std::string_view::npos)
    return std::nullopt;
  ep.host = std::string(authority);
  ep.base_path = std::string(path);
  return ep;
}

/// Throws std::invalid_argument when a REMOTE spec is unusable.
inline void check_spec(const GeneratorSpec& spec) {
  if (spec.kind != GeneratorKind::kRemote) return;
  if (!parse_endpoint(spec.endpoint))
    throw std::invalid_argument("invalid generator endpoint \"" + spec.endpoint +
                                "\" (expected http://host[:port][/path])");
  if (spec.timeout.count() <= 0) throw std::invalid_argument("generator timeout must be positive");
  if (spec.max_in_flight == 0) throw std::invalid_argument("max_in_flight must be positive");
}

class RemoteGenerator final : public Generator {
public:
  explicit RemoteGenerator(GeneratorSpec spec)
      : spec_((check_spec(spec), std::move(spec))),
        endpoint_(*parse_endpoint(spec_.endpoint)),
        slots_(static_cast<std::ptrdiff_t>(spec_.max_in_flight)) {}

  GenerationResult generate(std::string_view id, std::string_view claim) const override {
    slots_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{slots_};

    httplib::Client client(endpoint_.host, endpoint_.port);
    const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(spec_.timeout).count();
    client.set_connection_timeout(usec / 1'000'000, usec % 1'000'000);
    client.set_read_timeout(usec / 1'000'000, usec % 1'000'000);
    client.set_write_timeout(usec / 1'000'000, usec % 1'000'000);

    nlohmann::json request = {{"id", std::string(id)}, {"claim", std::string(claim)}};
    auto response = client.Post(endpoint_.negate_path(), request.dump(), "application/json");
    if (!response) return GenerationResult::failed("request failed: " + httplib::to_string(response.error()));
    if (response->status != 200)
      return GenerationResult::failed("HTTP status " + std::to_string(response->status));

    nlohmann::json body = nlohmann::json::parse(response->body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) return GenerationResult::failed("response is not a JSON object");
    auto rid = body.find("id");
    auto negative = body.find("negative_claim");
    if (rid == body.end() || !rid->is_string() || negative == body.end() || !negative->is_string())
      return GenerationResult::failed("response does not match the protocol schema");
    if (rid->get<std::string>() != id) return GenerationResult::failed("response id does not match request id");

    std::string text = trim(normalize_newlines(negative->get<std::string>()));
    if (text.empty()) return GenerationResult::failed("empty negative_claim");
    return GenerationResult::from_candidate(claim, std::move(text));
  }

  const GeneratorSpec& spec() const { return spec_; }

private:
  static std::string trim(std::string_view s) {
    constexpr std::string_view kBlank = " \t\r\n\f\v";
    auto first = s.find_first_not_of(kBlank);
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(kBlank);
    return std::string(s.substr(first, last - first + 1));
  }

  GeneratorSpec spec_;
  HttpEndpoint endpoint_;
  mutable std::counting_semaphore<> slots_;
};

/// Builds the generator a spec describes. `lexicon` is used by kRule only.
inline std::unique_ptr<Generator> make_generator(const GeneratorSpec& spec, Lexicon lexicon) {
  if (spec.kind == GeneratorKind::kRemote) return std::make_unique<RemoteGenerator>(spec);
  return std::make_unique<RuleGenerator>(std::move(lexicon));
}

} // namespace crossaug
