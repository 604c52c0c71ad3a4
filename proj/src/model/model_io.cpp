#include "bugchat/model/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "bugchat/errors.hpp"

namespace bugchat::model {
namespace {

std::string index_path(const std::string& path, std::string_view key,
                       std::size_t i) {
  return join_path(path, key) + "[" + std::to_string(i) + "]";
}

ComponentKind kind_from_json(const Json& j, const std::string& path,
                             std::optional<long long> sequence) {
  auto name = require_string(j, "kind", path, sequence);
  auto kind = parse_component_kind(name);
  if (!kind) {
    throw ValidationError("unknown component kind '" + name + "'",
                          join_path(path, "kind"), sequence);
  }
  return *kind;
}

ComponentSignature signature_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  ComponentSignature s;
  s.kind = kind_from_json(j, path, std::nullopt);
  s.text = optional_string(j, "text", path).value_or("");
  s.content_description = optional_string(j, "content_description", path).value_or("");
  return s;
}

Interaction edge_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  Interaction e;
  e.source = Fingerprint{require_string(j, "source", path)};
  e.target = Fingerprint{require_string(j, "target", path)};
  auto action = require_string(j, "action", path);
  auto parsed = parse_action(action);
  if (!parsed) {
    throw ValidationError("unknown action '" + action + "'",
                          join_path(path, "action"));
  }
  e.action = *parsed;
  if (j.contains("target_component") && !j["target_component"].is_null()) {
    e.target_component =
        signature_from_json(j["target_component"], join_path(path, "target_component"));
  }
  if (auto dir = optional_string(j, "swipe_direction", path)) {
    auto d = parse_swipe_direction(*dir);
    if (!d) {
      throw ValidationError("unknown swipe direction '" + *dir + "'",
                            join_path(path, "swipe_direction"));
    }
    e.swipe_direction = d;
  }
  e.weight = require_integer(j, "weight", path);
  e.screenshot = optional_string(j, "screenshot", path);
  if (j.contains("highlight_bounds") && !j["highlight_bounds"].is_null()) {
    e.highlight_bounds =
        bounds_from_json(j["highlight_bounds"], join_path(path, "highlight_bounds"));
  }
  return e;
}

}  // namespace

Json to_json(const Bounds& b) { return Json::array({b.x1, b.y1, b.x2, b.y2}); }

Json to_json(const GuiComponent& c) {
  Json j{{"uid", c.uid},
         {"kind", to_string(c.kind)},
         {"text", c.text},
         {"content_description", c.content_description},
         {"bounds", to_json(c.bounds)}};
  if (c.parent) j["parent"] = *c.parent;
  return j;
}

Json to_json(const ComponentSignature& s) {
  return {{"kind", to_string(s.kind)},
          {"text", s.text},
          {"content_description", s.content_description}};
}

Json to_json(const Screen& s, bool with_fingerprint) {
  Json j = Json::object();
  if (with_fingerprint) j["fingerprint"] = s.fingerprint.str();
  j["activity"] = s.activity;
  if (s.window) j["window"] = *s.window;
  if (s.screenshot) j["screenshot"] = *s.screenshot;
  j["components"] = Json::array();
  for (const auto& c : s.components) j["components"].push_back(to_json(c));
  return j;
}

Json to_json(const Interaction& e) {
  Json j{{"source", e.source.str()},
         {"target", e.target.str()},
         {"action", to_string(e.action)},
         {"weight", e.weight}};
  if (e.target_component) j["target_component"] = to_json(*e.target_component);
  if (e.swipe_direction) j["swipe_direction"] = to_string(*e.swipe_direction);
  if (e.screenshot) j["screenshot"] = *e.screenshot;
  if (e.highlight_bounds) j["highlight_bounds"] = to_json(*e.highlight_bounds);
  return j;
}

Bounds bounds_from_json(const Json& j, const std::string& path,
                        std::optional<long long> sequence) {
  if (!j.is_array() || j.size() != 4 ||
      !std::all_of(j.begin(), j.end(), [](const Json& v) { return v.is_number_integer(); })) {
    throw ValidationError(path + " must be four integers", path, sequence);
  }
  Bounds b{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
  if (!b.well_formed()) {
    throw ValidationError(path + " is not well-formed (x1<=x2, y1<=y2)", path,
                          sequence);
  }
  return b;
}

GuiComponent component_from_json(const Json& j, const std::string& path,
                                 std::optional<long long> sequence) {
  require_object(j, path, sequence);
  GuiComponent c;
  c.uid = require_string(j, "uid", path, sequence);
  if (c.uid.empty()) {
    throw ValidationError(join_path(path, "uid") + " must be nonempty",
                          join_path(path, "uid"), sequence);
  }
  c.kind = kind_from_json(j, path, sequence);
  c.text = optional_string(j, "text", path, sequence).value_or("");
  c.content_description =
      optional_string(j, "content_description", path, sequence).value_or("");
  c.bounds = bounds_from_json(require_field(j, "bounds", path, sequence),
                              join_path(path, "bounds"), sequence);
  c.parent = optional_string(j, "parent", path, sequence);
  return c;
}

Screen screen_from_json(const Json& j, const std::string& path,
                        std::optional<long long> sequence) {
  require_object(j, path, sequence);
  Screen s;
  if (auto fp = optional_string(j, "fingerprint", path, sequence)) {
    s.fingerprint = Fingerprint{*fp};
  }
  s.activity = require_string(j, "activity", path, sequence);
  s.window = optional_string(j, "window", path, sequence);
  s.screenshot = optional_string(j, "screenshot", path, sequence);
  if (j.contains("components")) {
    const auto& comps = j["components"];
    if (!comps.is_array()) {
      throw ValidationError(join_path(path, "components") + " must be an array",
                            join_path(path, "components"), sequence);
    }
    for (std::size_t i = 0; i < comps.size(); ++i) {
      s.components.push_back(
          component_from_json(comps[i], index_path(path, "components", i), sequence));
    }
  }
  std::set<std::string> uids;
  for (const auto& c : s.components) {
    if (!uids.insert(c.uid).second) {
      throw ValidationError("duplicate component uid '" + c.uid + "'",
                            join_path(path, "components"), sequence);
    }
  }
  for (std::size_t i = 0; i < s.components.size(); ++i) {
    const auto& c = s.components[i];
    if (c.parent && !uids.count(*c.parent)) {
      auto field = index_path(path, "components", i) + ".parent";
      throw ValidationError("parent '" + *c.parent + "' does not resolve", field,
                            sequence);
    }
  }
  return s;
}

std::string save_model(const AppExecutionModel& model) {
  Json j{{"schema_version", kModelSchemaVersion},
         {"app_id", model.app_id()},
         {"app_name", model.app_name()},
         {"app_version", model.app_version()},
         {"built_at", model.built_at()}};
  j["nodes"] = Json::array();
  for (const auto& [fp, screen] : model.nodes()) {
    if (fp == start_fingerprint()) continue;
    j["nodes"].push_back(to_json(screen));
  }
  j["edges"] = Json::array();
  for (const auto& e : model.edges()) j["edges"].push_back(to_json(e));
  return j.dump(2) + "\n";
}

std::shared_ptr<const AppExecutionModel> load_model(std::string_view text,
                                                    const text::Lexicon& lexicon) {
  Json j = parse_json(text);
  require_object(j, "");
  auto version = require_integer(j, "schema_version", "");
  if (version != kModelSchemaVersion) {
    throw ValidationError("unsupported schema_version " + std::to_string(version),
                          "schema_version");
  }
  ModelInfo info{require_string(j, "app_id", ""), require_string(j, "app_name", ""),
                 require_string(j, "app_version", ""),
                 optional_string(j, "built_at", "").value_or("")};
  ModelBuilder builder(std::move(info), lexicon);
  const auto& nodes = require_field(j, "nodes", "");
  const auto& edges = require_field(j, "edges", "");
  if (!nodes.is_array() || !edges.is_array()) {
    throw ValidationError("nodes and edges must be arrays", "nodes");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto path = index_path("", "nodes", i);
    auto screen = screen_from_json(nodes[i], path);
    if (screen.fingerprint.empty()) {
      throw ValidationError("missing field " + path + ".fingerprint",
                            path + ".fingerprint");
    }
    builder.register_screen(std::move(screen));
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    builder.add_edge(edge_from_json(edges[i], index_path("", "edges", i)));
  }
  return builder.publish();
}

void save_model_file(const AppExecutionModel& model,
                     const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    out << save_model(model);
    if (!out.flush()) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::shared_ptr<const AppExecutionModel> load_model_file(
    const std::filesystem::path& path, const text::Lexicon& lexicon) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot read model file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_model(buffer.str(), lexicon);
}

}  // namespace bugchat::model
