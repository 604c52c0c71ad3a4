#include "bugchat/ingest/fixture.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "bugchat/errors.hpp"
#include "bugchat/ingest/zip.hpp"
#include "bugchat/model/model_io.hpp"

namespace bugchat::ingest {
namespace {

using model::Action;
constexpr std::string_view kStart = "START";

ValidationError reject(const std::string& message, const std::string& field) {
  return ValidationError(message, field);
}

struct Resolved {
  std::map<std::string, std::size_t> screen_index;

  const model::Screen& screen(const FixtureSpec& spec, const std::string& id) const {
    return spec.screens[screen_index.at(id)].screen;
  }
  std::optional<model::GuiComponent> component(const FixtureSpec& spec,
                                               const FixtureEdge& e) const {
    if (!e.component) return std::nullopt;
    for (const auto& c : screen(spec, e.from).components) {
      if (c.uid == *e.component) return c;
    }
    return std::nullopt;
  }
};

// Structural checks shared by generate_fixture and fixture_model.
Resolved resolve(const FixtureSpec& spec) {
  Resolved r;
  std::set<std::string> fingerprints;
  for (std::size_t i = 0; i < spec.screens.size(); ++i) {
    const auto& s = spec.screens[i];
    auto field = "screens[" + std::to_string(i) + "]";
    if (s.id.empty() || s.id == kStart) throw reject("invalid screen id", field + ".id");
    if (!r.screen_index.emplace(s.id, i).second) {
      throw reject("duplicate screen id " + s.id, field + ".id");
    }
    auto fp = model::fingerprint_screen(s.screen.activity, s.screen.window,
                                        s.screen.components);
    if (!fingerprints.insert(fp).second) {
      throw reject("screen " + s.id + " has the same fingerprint as another screen",
                   field);
    }
  }

  std::set<std::tuple<std::string, Action, std::optional<model::ComponentSignature>,
                      std::optional<model::SwipeDirection>, std::string>>
      keys;
  for (std::size_t i = 0; i < spec.edges.size(); ++i) {
    const auto& e = spec.edges[i];
    auto field = "edges[" + std::to_string(i) + "]";
    bool from_start = e.from == kStart;
    if (!from_start && !r.screen_index.count(e.from)) {
      throw reject("unknown screen " + e.from, field + ".from");
    }
    if (!r.screen_index.count(e.to)) throw reject("unknown screen " + e.to, field + ".to");
    if (from_start != (e.action == Action::kLaunch)) {
      throw reject("LAUNCH edges must start at START and only there", field + ".action");
    }
    if (model::requires_component(e.action) && !e.component) {
      throw reject(std::string(model::to_string(e.action)) + " edge needs a component",
                   field + ".component");
    }
    if (e.component && (from_start || !r.component(spec, e))) {
      throw reject("component " + *e.component + " not on screen " + e.from,
                   field + ".component");
    }
    if (e.action == Action::kSwipe && !e.direction) {
      throw reject("SWIPE edge needs a direction", field + ".direction");
    }
    if (e.weight <= 0) throw reject("weight must be positive", field + ".weight");
    if (e.manual < 0 || 3 * e.manual > e.weight) {
      throw reject("manual traversals exceed the weight", field + ".manual");
    }
    auto comp = r.component(spec, e);
    std::optional<model::ComponentSignature> sig;
    if (comp) sig = comp->signature();
    if (!keys.emplace(e.from, e.action, sig, e.direction, e.to).second) {
      throw reject("duplicate edge", field);
    }
  }

  std::set<std::string> reached;
  std::vector<std::string> frontier{std::string(kStart)};
  while (!frontier.empty()) {
    auto v = frontier.back();
    frontier.pop_back();
    for (const auto& e : spec.edges) {
      if (e.from == v && reached.insert(e.to).second) frontier.push_back(e.to);
    }
  }
  for (const auto& s : spec.screens) {
    if (!reached.count(s.id)) throw reject("unreachable screen " + s.id, "screens");
  }
  return r;
}

model::SwipeDirection parse_direction(const std::string& s, const std::string& field) {
  auto d = model::parse_swipe_direction(s);
  if (!d) throw reject("unknown direction " + s, field);
  return *d;
}

// Splits per-edge traversal counts into walks from START (Hierholzer over
// the graph closed by virtual v->START edges for every surplus end).
std::vector<std::vector<std::size_t>> decompose(const FixtureSpec& spec,
                                                const std::vector<std::int64_t>& count,
                                                std::string_view source_name) {
  std::map<std::string, std::int64_t> balance;  // in - out
  std::int64_t total = 0;
  for (std::size_t i = 0; i < spec.edges.size(); ++i) {
    balance[spec.edges[i].to] += count[i];
    balance[spec.edges[i].from] -= count[i];
    total += count[i];
  }
  if (total == 0) return {};
  for (const auto& [v, b] : balance) {
    if (v != kStart && b < 0) {
      throw reject("weights are not realizable by " + std::string(source_name) +
                       " traces: screen " + v + " is left more often than entered",
                   "edges");
    }
  }

  // Adjacency with remaining multiplicity; virtual edges use index npos.
  constexpr std::size_t kVirtual = static_cast<std::size_t>(-1);
  std::map<std::string, std::vector<std::pair<std::size_t, std::int64_t>>> adj;
  for (std::size_t i = 0; i < spec.edges.size(); ++i) {
    if (count[i] > 0) adj[spec.edges[i].from].push_back({i, count[i]});
  }
  for (const auto& [v, b] : balance) {
    if (v != kStart && b > 0) adj[v].push_back({kVirtual, b});
  }
  std::map<std::string, std::size_t> cursor;

  // Iterative Hierholzer; the circuit is collected in reverse.
  std::vector<std::pair<std::string, std::size_t>> stack{{std::string(kStart), kVirtual}};
  std::vector<std::size_t> circuit;
  while (!stack.empty()) {
    const auto v = stack.back().first;
    auto& edges = adj[v];
    auto& pos = cursor[v];
    while (pos < edges.size() && edges[pos].second == 0) ++pos;
    if (pos == edges.size()) {
      circuit.push_back(stack.back().second);
      stack.pop_back();
      continue;
    }
    auto& [edge, remaining] = edges[pos];
    --remaining;
    std::string next = edge == kVirtual ? std::string(kStart) : spec.edges[edge].to;
    stack.push_back({next, edge});
  }
  circuit.pop_back();  // the sentinel for the initial START
  std::reverse(circuit.begin(), circuit.end());

  std::size_t used = std::count_if(circuit.begin(), circuit.end(),
                                   [](std::size_t e) { return e != kVirtual; });
  if (static_cast<std::int64_t>(used) != total) {
    throw reject("weights are not realizable by " + std::string(source_name) +
                     " traces: some traversals are unreachable from START",
                 "edges");
  }

  std::vector<std::vector<std::size_t>> walks;
  for (auto e : circuit) {
    if (e == kVirtual) continue;
    if (spec.edges[e].from == kStart) walks.emplace_back();
    walks.back().push_back(e);
  }
  return walks;
}

}  // namespace

FixtureSpec parse_fixture_spec(std::string_view text) {
  Json j = parse_json(text);
  require_object(j, "");
  FixtureSpec spec;
  const auto& app = require_field(j, "app", "");
  spec.app.name = require_string(app, "name", "app");
  spec.app.version = require_string(app, "version", "app");
  spec.app.package = optional_string(app, "package", "app").value_or("");

  const auto& screens = require_field(j, "screens", "");
  if (!screens.is_array()) throw reject("screens must be an array", "screens");
  for (std::size_t i = 0; i < screens.size(); ++i) {
    auto path = "screens[" + std::to_string(i) + "]";
    FixtureScreen s;
    s.id = require_string(screens[i], "id", path);
    s.screen = model::screen_from_json(screens[i], path);
    spec.screens.push_back(std::move(s));
  }

  const auto& edges = require_field(j, "edges", "");
  if (!edges.is_array()) throw reject("edges must be an array", "edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto path = "edges[" + std::to_string(i) + "]";
    const auto& ej = edges[i];
    FixtureEdge e;
    e.from = require_string(ej, "from", path);
    e.to = require_string(ej, "to", path);
    auto action = require_string(ej, "action", path);
    auto parsed = model::parse_action(action);
    if (!parsed) throw reject("unknown action " + action, path + ".action");
    e.action = *parsed;
    e.component = optional_string(ej, "component", path);
    if (auto dir = optional_string(ej, "direction", path)) {
      e.direction = parse_direction(*dir, path + ".direction");
    }
    e.text = optional_string(ej, "text", path).value_or("text");
    if (ej.contains("weight")) e.weight = require_integer(ej, "weight", path);
    if (ej.contains("manual")) {
      if (ej["manual"].is_boolean()) {
        e.manual = ej["manual"].get<bool>() ? e.weight / 3 : 0;
      } else {
        e.manual = require_integer(ej, "manual", path);
      }
    }
    spec.edges.push_back(std::move(e));
  }
  return spec;
}

Json to_json(const FixtureSpec& spec) {
  Json j{{"app",
          {{"name", spec.app.name}, {"version", spec.app.version}, {"package", spec.app.package}}}};
  j["screens"] = Json::array();
  for (const auto& s : spec.screens) {
    Json sj = model::to_json(s.screen, false);
    sj["id"] = s.id;
    j["screens"].push_back(std::move(sj));
  }
  j["edges"] = Json::array();
  for (const auto& e : spec.edges) {
    Json ej{{"from", e.from},
            {"to", e.to},
            {"action", model::to_string(e.action)},
            {"weight", e.weight},
            {"manual", e.manual}};
    if (e.component) ej["component"] = *e.component;
    if (e.direction) ej["direction"] = model::to_string(*e.direction);
    if (e.action == Action::kType) ej["text"] = e.text;
    j["edges"].push_back(std::move(ej));
  }
  return j;
}

std::vector<TraceFile> generate_fixture(const FixtureSpec& spec) {
  auto resolved = resolve(spec);
  std::vector<TraceFile> traces;
  for (auto source : {model::TraceSource::kAutomated, model::TraceSource::kManual}) {
    bool manual = source == model::TraceSource::kManual;
    std::vector<std::int64_t> count;
    for (const auto& e : spec.edges) {
      count.push_back(manual ? e.manual : e.weight - 3 * e.manual);
    }
    auto walks = decompose(spec, count, model::to_string(source));
    for (std::size_t w = 0; w < walks.size(); ++w) {
      TraceFile t;
      t.app = spec.app;
      t.source = source;
      char id[32];
      std::snprintf(id, sizeof id, "%s-%03zu", manual ? "manual" : "auto", w + 1);
      t.trace_id = id;
      long long sequence = 0;
      for (auto index : walks[w]) {
        const auto& e = spec.edges[index];
        TraceEvent event;
        event.sequence = ++sequence;
        event.action = e.action;
        event.target = resolved.component(spec, e);
        if (e.action == Action::kType) event.input_text = e.text;
        event.swipe_direction = e.direction;
        event.result_screen = resolved.screen(spec, e.to);
        event.result_screen.fingerprint = {};
        t.events.push_back(std::move(event));
      }
      traces.push_back(std::move(t));
    }
  }
  return traces;
}

std::shared_ptr<const model::AppExecutionModel> fixture_model(
    const FixtureSpec& spec, const std::string& built_at,
    const text::Lexicon& lexicon) {
  auto resolved = resolve(spec);
  model::ModelBuilder builder(
      {app_slug(spec.app.name, spec.app.version), spec.app.name, spec.app.version, built_at},
      lexicon);
  std::map<std::string, model::Fingerprint> fps{{std::string(kStart), model::start_fingerprint()}};
  for (const auto& s : spec.screens) {
    auto screen = s.screen;
    screen.fingerprint = {};
    fps[s.id] = builder.register_screen(std::move(screen));
  }
  for (const auto& e : spec.edges) {
    model::Interaction edge;
    edge.source = fps.at(e.from);
    edge.target = fps.at(e.to);
    edge.action = e.action;
    if (auto comp = resolved.component(spec, e)) {
      edge.target_component = comp->signature();
      edge.highlight_bounds = comp->bounds;
    }
    edge.swipe_direction = e.direction;
    edge.weight = e.weight;
    if (e.from != kStart) edge.screenshot = resolved.screen(spec, e.from).screenshot;
    builder.add_edge(std::move(edge));
  }
  return builder.publish();
}

std::string fixture_package(const FixtureSpec& spec,
                            const std::filesystem::path& asset_dir) {
  auto read = [](const std::filesystem::path& path) -> std::optional<std::string> {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };
  std::vector<ZipEntry> entries;
  for (const auto& trace : generate_fixture(spec)) {
    entries.push_back({"traces/" + trace.trace_id + ".json", serialize_trace(trace)});
  }
  std::set<std::string> shots;
  for (const auto& s : spec.screens) {
    if (s.screen.screenshot && is_safe_entry_name(*s.screen.screenshot)) {
      shots.insert(*s.screen.screenshot);
    }
  }
  for (const auto& path : shots) {
    if (auto bytes = read(asset_dir / path)) entries.push_back({path, std::move(*bytes)});
  }
  if (auto icon = read(asset_dir / "icon.png")) entries.push_back({"icon.png", std::move(*icon)});
  return write_zip(entries);
}

}  // namespace bugchat::ingest
