#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bugchat/json_util.hpp"
#include "bugchat/model/execution_model.hpp"

namespace bugchat::ingest {

struct ValidationIssue {
  std::string file;
  std::optional<long long> event_sequence;
  std::string message;

  bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
  bool ok = false;
  std::string app_id;
  std::string app_name;
  std::string app_version;
  std::size_t trace_count = 0;
  std::size_t event_count = 0;
  std::vector<ValidationIssue> errors;
  // Non-fatal findings, e.g. screenshots referenced but not shipped.
  std::vector<std::string> warnings;
};

Json to_json(const ValidationReport& report);

/// Everything extracted from an upload. `model` is set only when the
/// report is ok; nothing is persisted here.
struct PackageContents {
  ValidationReport report;
  std::shared_ptr<const model::AppExecutionModel> model;
  std::map<std::string, std::string> screenshots;  // relative path -> bytes
  std::optional<std::string> icon;
};

/// Extracts `traces/*.json`, `screenshots/**` and `icon.png` from a ZIP,
/// validates every trace and builds the model. An explicit `icon` takes
/// precedence over the archive's icon.png.
PackageContents analyze_package(std::string_view zip_bytes,
                                std::optional<std::string> icon,
                                const std::string& built_at,
                                const text::Lexicon& lexicon = text::Lexicon::builtin());

}  // namespace bugchat::ingest
