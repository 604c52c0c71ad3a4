#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bugchat/json_util.hpp"
#include "bugchat/model/execution_model.hpp"

namespace bugchat::ingest {

inline constexpr int kTraceSchemaVersion = 1;

struct AppInfo {
  std::string name;
  std::string version;
  std::string package;

  bool operator==(const AppInfo&) const = default;
};

struct TraceEvent {
  long long sequence = 0;
  model::Action action = model::Action::kLaunch;
  std::optional<model::GuiComponent> target;
  std::optional<std::string> input_text;
  std::optional<model::SwipeDirection> swipe_direction;
  model::Screen result_screen;

  bool operator==(const TraceEvent&) const = default;
};

struct TraceFile {
  AppInfo app;
  model::TraceSource source = model::TraceSource::kAutomated;
  std::string trace_id;
  std::vector<TraceEvent> events;

  bool operator==(const TraceFile&) const = default;
};

/// Parses and validates one trace file. Malformed JSON raises ParseError
/// (with byte offset); schema violations raise ValidationError naming the
/// field and, where applicable, the event sequence number.
TraceFile parse_trace(std::string_view bytes);

Json to_json(const TraceFile& trace);
std::string serialize_trace(const TraceFile& trace);

/// "DemoPad", "1.0" -> "demopad-1-0".
std::string app_slug(std::string_view name, std::string_view version);

/// Builds a model from validated traces of one app version. Trace order
/// does not matter. Mixed versions raise ValidationError listing the
/// trace ids that differ from the majority version.
std::shared_ptr<const model::AppExecutionModel> build_model(
    std::vector<TraceFile> traces, const std::string& app_id,
    const std::string& built_at,
    const text::Lexicon& lexicon = text::Lexicon::builtin());

}  // namespace bugchat::ingest
