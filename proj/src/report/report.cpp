#include "bugchat/report/report.hpp"

#include <sstream>

#include "bugchat/errors.hpp"
#include "bugchat/model/model_io.hpp"
#include "bugchat/predict/predictor.hpp"
#include "bugchat/text/parser.hpp"

namespace bugchat::report {
namespace {

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

// Byte length of the first `limit` UTF-8 code points.
std::size_t utf8_prefix(std::string_view s, std::size_t limit) {
  std::size_t i = 0;
  std::size_t count = 0;
  while (i < s.size() && count < limit) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t width = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
    i += width;
    ++count;
  }
  return std::min(i, s.size());
}

std::string component_text(const model::ComponentSignature& c) {
  if (!c.text.empty()) return c.text;
  if (!c.content_description.empty()) return c.content_description;
  return std::string(model::display_name(c.kind));
}

template <typename T>
void put_optional(Json& j, const char* key, const std::optional<T>& value) {
  j[key] = value ? Json(*value) : Json(nullptr);
}

std::optional<std::string> opt_string(const Json& j, const char* key, const std::string& path) {
  return optional_string(j, key, path);
}

bool require_bool(const Json& j, const char* key, const std::string& path) {
  const auto& v = require_field(j, key, path);
  if (!v.is_boolean()) throw ValidationError("expected a boolean", join_path(path, key));
  return v.get<bool>();
}

}  // namespace

std::string report_title(std::string_view ob_text) {
  auto sentences = text::split_sentences(ob_text);
  std::string first = sentences.empty() ? std::string() : trim(sentences.front());
  if (first.empty()) return "Untitled bug report";
  return first.substr(0, utf8_prefix(first, kTitleLimit));
}

BugReport generate_report(const model::AppExecutionModel& model,
                          const CollectedReport& collected, std::string created_at) {
  BugReport report;
  report.app_name = model.app_name();
  report.app_version = model.app_version();
  report.created_at = std::move(created_at);
  report.title = report_title(collected.ob_text);
  report.draft = collected.draft;

  report.observed_behavior.text = collected.ob_text;
  if (collected.ob_fingerprint && model.contains(*collected.ob_fingerprint)) {
    report.observed_behavior.fingerprint = collected.ob_fingerprint->str();
    report.observed_behavior.screenshot = model.screen(*collected.ob_fingerprint).screenshot;
  }
  report.expected_behavior.text = collected.eb_text;
  report.quality.ob_matched = collected.ob_matched;
  report.quality.eb_matched = collected.eb_matched;

  int index = 0;
  for (const auto& s : collected.steps) {
    ReportStep step;
    step.index = ++index;
    step.text = s.text;
    step.inferred = s.inferred;
    step.source = s.source;
    if (s.edge) {
      const auto& e = model.edge(*s.edge);
      step.matched = true;
      step.action = std::string(model::to_string(e.action));
      if (e.target_component) step.component_text = component_text(*e.target_component);
      step.screenshot = e.screenshot;
      step.highlight_bounds = e.highlight_bounds;
      if (s.inferred) step.text = predict::caption_edge(e);
    }
    if (!step.matched) report.quality.unmatched_step_indices.push_back(step.index);
    report.steps.push_back(std::move(step));
  }
  return report;
}

Json to_json(const ReportStep& step) {
  Json j = Json::object();
  j["index"] = step.index;
  j["text"] = step.text;
  put_optional(j, "action", step.action);
  put_optional(j, "component_text", step.component_text);
  put_optional(j, "screenshot", step.screenshot);
  j["highlight_bounds"] = step.highlight_bounds ? model::to_json(*step.highlight_bounds) : Json(nullptr);
  j["inferred"] = step.inferred;
  j["matched"] = step.matched;
  j["source"] = step.source;
  return j;
}

Json to_json(const BugReport& report) {
  Json j = Json::object();
  j["schema_version"] = kReportSchemaVersion;
  j["app"] = {{"name", report.app_name}, {"version", report.app_version}};
  j["created_at"] = report.created_at;
  j["draft"] = report.draft;
  j["title"] = report.title;
  Json ob = Json::object();
  ob["text"] = report.observed_behavior.text;
  put_optional(ob, "fingerprint", report.observed_behavior.fingerprint);
  put_optional(ob, "screenshot", report.observed_behavior.screenshot);
  j["observed_behavior"] = std::move(ob);
  j["expected_behavior"] = {{"text", report.expected_behavior.text}};
  j["steps"] = Json::array();
  for (const auto& s : report.steps) j["steps"].push_back(to_json(s));
  j["quality"] = {{"ob_matched", report.quality.ob_matched},
                  {"eb_matched", report.quality.eb_matched},
                  {"unmatched_step_indices", report.quality.unmatched_step_indices}};
  return j;
}

BugReport report_from_json(const Json& j) {
  require_object(j, "report");
  if (require_integer(j, "schema_version", "report") != kReportSchemaVersion) {
    throw ValidationError("unsupported schema_version", "report.schema_version");
  }
  BugReport report;
  const auto& app = require_field(j, "app", "report");
  require_object(app, "report.app");
  report.app_name = require_string(app, "name", "report.app");
  report.app_version = require_string(app, "version", "report.app");
  report.created_at = require_string(j, "created_at", "report");
  report.draft = require_bool(j, "draft", "report");
  report.title = require_string(j, "title", "report");
  if (report.title.empty()) throw ValidationError("empty title", "report.title");

  const auto& ob = require_field(j, "observed_behavior", "report");
  require_object(ob, "report.observed_behavior");
  report.observed_behavior.text = require_string(ob, "text", "report.observed_behavior");
  report.observed_behavior.fingerprint = opt_string(ob, "fingerprint", "report.observed_behavior");
  report.observed_behavior.screenshot = opt_string(ob, "screenshot", "report.observed_behavior");
  const auto& eb = require_field(j, "expected_behavior", "report");
  require_object(eb, "report.expected_behavior");
  report.expected_behavior.text = require_string(eb, "text", "report.expected_behavior");

  const auto& steps = require_field(j, "steps", "report");
  if (!steps.is_array()) throw ValidationError("expected an array", "report.steps");
  std::vector<int> unmatched;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::string path = "report.steps[" + std::to_string(i) + "]";
    const auto& s = steps[i];
    require_object(s, path);
    ReportStep step;
    step.index = static_cast<int>(require_integer(s, "index", path));
    if (step.index != static_cast<int>(i) + 1) {
      throw ValidationError("step indices must be contiguous from 1", join_path(path, "index"));
    }
    step.text = require_string(s, "text", path);
    step.action = opt_string(s, "action", path);
    step.component_text = opt_string(s, "component_text", path);
    step.screenshot = opt_string(s, "screenshot", path);
    if (s.contains("highlight_bounds") && !s["highlight_bounds"].is_null()) {
      step.highlight_bounds = model::bounds_from_json(s["highlight_bounds"], join_path(path, "highlight_bounds"));
    }
    step.inferred = require_bool(s, "inferred", path);
    step.matched = require_bool(s, "matched", path);
    step.source = require_string(s, "source", path);
    if (step.source != "typed" && step.source != "suggested" && step.source != "edited") {
      throw ValidationError("unknown step source", join_path(path, "source"));
    }
    if (!step.matched) unmatched.push_back(step.index);
    report.steps.push_back(std::move(step));
  }

  const auto& q = require_field(j, "quality", "report");
  require_object(q, "report.quality");
  report.quality.ob_matched = require_bool(q, "ob_matched", "report.quality");
  report.quality.eb_matched = require_bool(q, "eb_matched", "report.quality");
  const auto& u = require_field(q, "unmatched_step_indices", "report.quality");
  if (!u.is_array()) throw ValidationError("expected an array", "report.quality.unmatched_step_indices");
  for (const auto& v : u) {
    if (!v.is_number_integer()) {
      throw ValidationError("expected integers", "report.quality.unmatched_step_indices");
    }
    report.quality.unmatched_step_indices.push_back(v.get<int>());
  }
  if (report.quality.unmatched_step_indices != unmatched) {
    throw ValidationError("unmatched_step_indices disagree with steps",
                          "report.quality.unmatched_step_indices");
  }
  return report;
}

std::string render_structured(const BugReport& report) { return to_json(report).dump(2) + "\n"; }

std::string render_markdown(const BugReport& report) {
  std::ostringstream out;
  out << "# " << report.title << "\n\n";
  if (report.draft) out << "_Draft: the conversation is still in progress._\n\n";
  out << "- App: " << report.app_name << " " << report.app_version << "\n";
  out << "- Created: " << report.created_at << "\n\n";

  out << "## Observed Behavior\n\n";
  out << (report.observed_behavior.text.empty() ? "_Not provided._" : report.observed_behavior.text)
      << "\n\n";
  if (report.observed_behavior.screenshot) {
    out << "![Observed behavior](" << *report.observed_behavior.screenshot << ")\n\n";
  }
  if (!report.quality.ob_matched) out << "_Not matched to an app screen._\n\n";

  out << "## Expected Behavior\n\n";
  out << (report.expected_behavior.text.empty() ? "_Not provided._" : report.expected_behavior.text)
      << "\n\n";
  if (!report.quality.eb_matched) out << "_Not verified against the app._\n\n";

  out << "## Steps to Reproduce\n\n";
  for (const auto& s : report.steps) {
    out << s.index << ". " << s.text;
    if (s.inferred) out << " (inferred)";
    if (!s.matched) out << " (unverified)";
    out << "\n";
    if (s.screenshot) out << "   ![Step " << s.index << "](" << *s.screenshot << ")\n";
  }
  return out.str();
}

std::string render(const BugReport& report, Format format) {
  return format == Format::kMarkdown ? render_markdown(report) : render_structured(report);
}

AssetCheck check_assets(BugReport report,
                        const std::function<bool(const std::string&)>& exists) {
  AssetCheck result;
  auto check = [&](std::optional<std::string>& path, const std::string& where) {
    if (path && !exists(*path)) {
      result.warnings.push_back(where + ": missing screenshot " + *path);
      path.reset();
    }
  };
  check(report.observed_behavior.screenshot, "observed behavior");
  for (auto& s : report.steps) check(s.screenshot, "step " + std::to_string(s.index));
  result.report = std::move(report);
  return result;
}

}  // namespace bugchat::report
