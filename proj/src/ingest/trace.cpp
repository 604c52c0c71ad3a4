#include "bugchat/ingest/trace.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "bugchat/errors.hpp"
#include "bugchat/model/model_io.hpp"

namespace bugchat::ingest {
namespace {

using model::Action;

std::string event_path(std::size_t i) {
  return "events[" + std::to_string(i) + "]";
}

TraceEvent parse_event(const Json& j, std::size_t index) {
  auto path = event_path(index);
  require_object(j, path);
  TraceEvent e;
  e.sequence = require_integer(j, "sequence", path);
  auto seq = e.sequence;

  auto action = require_string(j, "action", path, seq);
  auto parsed = model::parse_action(action);
  if (!parsed) {
    throw ValidationError("unknown action '" + action + "' at event " +
                              std::to_string(seq),
                          join_path(path, "action"), seq);
  }
  e.action = *parsed;

  bool has_target = j.contains("target") && !j["target"].is_null();
  if (model::requires_component(e.action) && !has_target) {
    throw ValidationError(action + " event " + std::to_string(seq) +
                              " requires a target",
                          join_path(path, "target"), seq);
  }
  if (has_target) {
    if (e.action == Action::kLaunch || e.action == Action::kBack ||
        e.action == Action::kRotate) {
      throw ValidationError(action + " event " + std::to_string(seq) +
                                " must not carry a target",
                            join_path(path, "target"), seq);
    }
    e.target = model::component_from_json(j["target"], join_path(path, "target"), seq);
  }

  e.input_text = optional_string(j, "input_text", path, seq);
  if (e.action == Action::kType && !e.input_text) {
    throw ValidationError("TYPE event " + std::to_string(seq) +
                              " requires input_text",
                          join_path(path, "input_text"), seq);
  }
  if (e.action != Action::kType) e.input_text.reset();

  if (auto dir = optional_string(j, "swipe_direction", path, seq)) {
    auto d = model::parse_swipe_direction(*dir);
    if (!d) {
      throw ValidationError("unknown swipe_direction '" + *dir + "'",
                            join_path(path, "swipe_direction"), seq);
    }
    if (e.action == Action::kSwipe) e.swipe_direction = d;
  }
  if (e.action == Action::kSwipe && !e.swipe_direction) {
    throw ValidationError("SWIPE event " + std::to_string(seq) +
                              " requires swipe_direction",
                          join_path(path, "swipe_direction"), seq);
  }

  e.result_screen = model::screen_from_json(
      require_field(j, "result_screen", path, seq),
      join_path(path, "result_screen"), seq);
  return e;
}

}  // namespace

TraceFile parse_trace(std::string_view bytes) {
  Json j = parse_json(bytes);
  require_object(j, "");
  auto version = require_integer(j, "schema_version", "");
  if (version != kTraceSchemaVersion) {
    throw ValidationError("unsupported schema_version " + std::to_string(version),
                          "schema_version");
  }
  TraceFile t;
  const auto& app = require_field(j, "app", "");
  t.app.name = require_string(app, "name", "app");
  t.app.version = require_string(app, "version", "app");
  t.app.package = optional_string(app, "package", "app").value_or("");
  if (t.app.name.empty()) throw ValidationError("app.name must be nonempty", "app.name");

  auto source = require_string(j, "source", "");
  auto parsed_source = model::parse_trace_source(source);
  if (!parsed_source) {
    throw ValidationError("source must be \"automated\" or \"manual\"", "source");
  }
  t.source = *parsed_source;
  t.trace_id = require_string(j, "trace_id", "");
  if (t.trace_id.empty()) throw ValidationError("trace_id must be nonempty", "trace_id");

  const auto& events = require_field(j, "events", "");
  if (!events.is_array()) throw ValidationError("events must be an array", "events");
  if (events.empty()) throw ValidationError("events must be nonempty", "events");

  for (std::size_t i = 0; i < events.size(); ++i) {
    auto event = parse_event(events[i], i);
    if (i == 0) {
      if (event.sequence != 1) {
        throw ValidationError("sequence must start at 1", "events[0].sequence",
                              event.sequence);
      }
      if (event.action != Action::kLaunch) {
        throw ValidationError("first event must be LAUNCH", "events[0].action",
                              event.sequence);
      }
    } else {
      if (event.sequence <= t.events.back().sequence) {
        throw ValidationError(
            "non-increasing sequence at event " + std::to_string(i + 1),
            event_path(i) + ".sequence", event.sequence);
      }
      if (event.action == Action::kLaunch) {
        throw ValidationError("LAUNCH is only allowed as the first event",
                              event_path(i) + ".action", event.sequence);
      }
    }
    t.events.push_back(std::move(event));
  }
  return t;
}

Json to_json(const TraceFile& t) {
  Json j{{"schema_version", kTraceSchemaVersion},
         {"app", {{"name", t.app.name}, {"version", t.app.version}, {"package", t.app.package}}},
         {"source", model::to_string(t.source)},
         {"trace_id", t.trace_id}};
  j["events"] = Json::array();
  for (const auto& e : t.events) {
    Json ej{{"sequence", e.sequence}, {"action", model::to_string(e.action)}};
    if (e.target) ej["target"] = model::to_json(*e.target);
    if (e.input_text) ej["input_text"] = *e.input_text;
    if (e.swipe_direction) ej["swipe_direction"] = model::to_string(*e.swipe_direction);
    ej["result_screen"] = model::to_json(e.result_screen, false);
    j["events"].push_back(std::move(ej));
  }
  return j;
}

std::string serialize_trace(const TraceFile& trace) {
  return to_json(trace).dump(2) + "\n";
}

std::string app_slug(std::string_view name, std::string_view version) {
  std::string out;
  auto append = [&out](std::string_view part) {
    for (unsigned char c : part) {
      if (std::isalnum(c)) {
        out += static_cast<char>(std::tolower(c));
      } else if (!out.empty() && out.back() != '-') {
        out += '-';
      }
    }
    if (!out.empty() && out.back() != '-') out += '-';
  };
  append(name);
  append(version);
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "app" : out;
}

std::shared_ptr<const model::AppExecutionModel> build_model(
    std::vector<TraceFile> traces, const std::string& app_id,
    const std::string& built_at, const text::Lexicon& lexicon) {
  if (traces.empty()) throw ValidationError("no traces found", "traces");

  std::map<std::pair<std::string, std::string>, std::size_t> versions;
  for (const auto& t : traces) ++versions[{t.app.name, t.app.version}];
  auto majority = std::max_element(
      versions.begin(), versions.end(),
      [](const auto& a, const auto& b) { return a.second < b.second; });
  if (versions.size() > 1) {
    std::vector<std::string> offending;
    for (const auto& t : traces) {
      if (std::pair(t.app.name, t.app.version) != majority->first) {
        offending.push_back(t.trace_id);
      }
    }
    std::sort(offending.begin(), offending.end());
    std::string list;
    for (const auto& id : offending) list += (list.empty() ? "" : ", ") + id;
    throw ValidationError("mixed app versions; traces differing from " +
                              majority->first.first + " " +
                              majority->first.second + ": " + list,
                          "app.version");
  }

  // Canonical order makes "first registration wins" independent of input order.
  std::vector<std::pair<std::string, const TraceFile*>> ordered;
  for (const auto& t : traces) ordered.emplace_back(serialize_trace(t), &t);
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return std::tie(a.second->trace_id, a.second->source, a.first) <
           std::tie(b.second->trace_id, b.second->source, b.first);
  });

  const auto& app = traces.front().app;
  model::ModelBuilder builder({app_id, app.name, app.version, built_at}, lexicon);
  for (const auto& [text, trace] : ordered) {
    model::Fingerprint previous = model::start_fingerprint();
    for (const auto& event : trace->events) {
      auto target = builder.register_screen(event.result_screen);
      builder.upsert_transition(
          previous, {event.action, event.target, event.swipe_direction}, target,
          trace->source);
      previous = target;
    }
  }
  return builder.publish();
}

}  // namespace bugchat::ingest
