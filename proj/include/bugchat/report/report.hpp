#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bugchat/json_util.hpp"
#include "bugchat/model/execution_model.hpp"

namespace bugchat::report {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::size_t kTitleLimit = 100;

struct ObservedBehavior {
  std::string text;
  std::optional<std::string> fingerprint;
  std::optional<std::string> screenshot;
  bool operator==(const ObservedBehavior&) const = default;
};

struct ExpectedBehavior {
  std::string text;
  bool operator==(const ExpectedBehavior&) const = default;
};

struct ReportStep {
  int index = 0;
  std::string text;
  std::optional<std::string> action;
  std::optional<std::string> component_text;
  std::optional<std::string> screenshot;
  std::optional<model::Bounds> highlight_bounds;
  bool inferred = false;
  bool matched = false;
  std::string source = "typed";  // typed, suggested or edited
  bool operator==(const ReportStep&) const = default;
};

struct Quality {
  bool ob_matched = false;
  bool eb_matched = false;
  std::vector<int> unmatched_step_indices;
  bool operator==(const Quality&) const = default;
};

struct BugReport {
  std::string app_name;
  std::string app_version;
  std::string created_at;
  std::string title;
  ObservedBehavior observed_behavior;
  ExpectedBehavior expected_behavior;
  std::vector<ReportStep> steps;
  Quality quality;
  bool draft = false;
  bool operator==(const BugReport&) const = default;
};

/// What a conversation collected, independent of how it was collected.
struct CollectedStep {
  std::string text;
  std::optional<model::EdgeId> edge;
  bool inferred = false;
  std::string source = "typed";
};

struct CollectedReport {
  std::string ob_text;
  std::optional<model::Fingerprint> ob_fingerprint;
  bool ob_matched = false;
  std::string eb_text;
  bool eb_matched = false;
  std::vector<CollectedStep> steps;
  bool draft = false;
};

/// First sentence of the OB text, cut to 100 characters (code points).
/// Falls back to "Untitled bug report".
std::string report_title(std::string_view ob_text);

/// Inferred steps get the edge caption as their text; everything else is
/// copied verbatim.
BugReport generate_report(const model::AppExecutionModel& model,
                          const CollectedReport& collected, std::string created_at);

Json to_json(const ReportStep& step);
Json to_json(const BugReport& report);
/// Throws ValidationError on schema violations.
BugReport report_from_json(const Json& j);

enum class Format { kStructured, kMarkdown };

std::string render(const BugReport& report, Format format);
std::string render_structured(const BugReport& report);
std::string render_markdown(const BugReport& report);

struct AssetCheck {
  BugReport report;
  std::vector<std::string> warnings;
};

/// Drops screenshot references `exists` rejects, so they render as
/// caption-only, and lists each one as a warning.
AssetCheck check_assets(BugReport report,
                        const std::function<bool(const std::string&)>& exists);

}  // namespace bugchat::report
