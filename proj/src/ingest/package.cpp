#include "bugchat/ingest/package.hpp"

#include <set>

#include "bugchat/errors.hpp"
#include "bugchat/ingest/trace.hpp"
#include "bugchat/ingest/zip.hpp"

namespace bugchat::ingest {
namespace {

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

void fail(ValidationReport& report, std::string file, std::string message,
          std::optional<long long> sequence = std::nullopt) {
  report.errors.push_back({std::move(file), sequence, std::move(message)});
}

}  // namespace

Json to_json(const ValidationReport& r) {
  Json errors = Json::array();
  for (const auto& e : r.errors) {
    Json j{{"file", e.file}, {"message", e.message}};
    j["event_sequence"] = e.event_sequence ? Json(*e.event_sequence) : Json(nullptr);
    errors.push_back(std::move(j));
  }
  return {{"ok", r.ok},
          {"app_id", r.app_id},
          {"app_name", r.app_name},
          {"app_version", r.app_version},
          {"trace_count", r.trace_count},
          {"event_count", r.event_count},
          {"errors", std::move(errors)},
          {"warnings", r.warnings}};
}

PackageContents analyze_package(std::string_view zip_bytes,
                                std::optional<std::string> icon,
                                const std::string& built_at,
                                const text::Lexicon& lexicon) {
  PackageContents out;
  auto& report = out.report;

  std::vector<ZipEntry> entries;
  try {
    entries = read_zip(zip_bytes);
  } catch (const Error& e) {
    fail(report, "<package>", e.what());
    return out;
  }

  std::vector<TraceFile> traces;
  for (auto& entry : entries) {
    if (starts_with(entry.name, "traces/") && ends_with(entry.name, ".json")) {
      try {
        traces.push_back(parse_trace(entry.data));
        report.event_count += traces.back().events.size();
      } catch (const ValidationError& e) {
        fail(report, entry.name, e.what(), e.event_sequence());
      } catch (const ParseError& e) {
        fail(report, entry.name, e.what());
      }
      ++report.trace_count;
    } else if (starts_with(entry.name, "screenshots/")) {
      out.screenshots.emplace(entry.name, std::move(entry.data));
    } else if (entry.name == "icon.png") {
      if (!icon) icon = std::move(entry.data);
    }
  }
  out.icon = std::move(icon);

  if (report.trace_count == 0) {
    fail(report, "<package>", "no traces found");
    return out;
  }
  if (!traces.empty()) {
    report.app_name = traces.front().app.name;
    report.app_version = traces.front().app.version;
    report.app_id = app_slug(report.app_name, report.app_version);
  }
  if (!report.errors.empty()) return out;

  std::set<std::string> ids;
  for (const auto& t : traces) {
    if (!ids.insert(t.trace_id).second) {
      fail(report, "<package>", "duplicate trace_id " + t.trace_id);
    }
  }
  if (!report.errors.empty()) return out;

  try {
    out.model = build_model(traces, report.app_id, built_at, lexicon);
  } catch (const Error& e) {
    fail(report, "<package>", e.what());
    return out;
  }

  std::set<std::string> missing;
  for (const auto& [fp, screen] : out.model->nodes()) {
    if (screen.screenshot && !out.screenshots.count(*screen.screenshot)) {
      missing.insert(*screen.screenshot);
    }
  }
  for (const auto& path : missing) {
    report.warnings.push_back("screenshot not in package: " + path);
  }
  report.ok = true;
  return out;
}

}  // namespace bugchat::ingest
