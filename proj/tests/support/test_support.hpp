#pragma once

#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "crossaug/corpus.hpp"
#include "crossaug/negator.hpp"

namespace crossaug::testing {

inline std::string data_path(std::string_view name) {
  return std::string(CROSSAUG_TEST_DATA) + "/" + std::string(name);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Dataset load(std::string_view name) {
  return parse_records(read_file(data_path(name))).dataset;
}

inline Sample original(std::string id, std::string claim, std::string evidence,
                       Label label = Label::kSup) {
  Sample s{std::move(id), std::move(claim), std::move(evidence), label,
           Provenance::kOriginal, {}};
  s.origin_id = s.id;
  return s;
}

/// Returns a fixed negative claim per input claim; unknown claims fail.
class TableGenerator final : public Generator {
public:
  TableGenerator& on(std::string claim, std::string negative) {
    table_[std::move(claim)] = std::move(negative);
    return *this;
  }

  GenerationResult generate(std::string_view, std::string_view claim) const override {
    auto it = table_.find(std::string(claim));
    if (it == table_.end()) return GenerationResult::failed("no entry");
    return GenerationResult::from_candidate(claim, it->second);
  }

private:
  std::map<std::string, std::string> table_;
};

} // namespace crossaug::testing
