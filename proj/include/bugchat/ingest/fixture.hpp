#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bugchat/ingest/trace.hpp"
#include "bugchat/json_util.hpp"

namespace bugchat::ingest {

struct FixtureScreen {
  std::string id;
  model::Screen screen;
};

struct FixtureEdge {
  std::string from;  // screen id or "START"
  std::string to;
  model::Action action = model::Action::kTap;
  std::optional<std::string> component;  // uid on the `from` screen
  std::optional<model::SwipeDirection> direction;
  std::string text;  // typed text for TYPE edges
  std::int64_t weight = 1;
  std::int64_t manual = 0;  // traversals contributed by manual traces
};

/// Declarative description of an app's execution graph:
/// `{app:{name,version,package}, screens:[{id, activity, window?, screenshot?,
/// components:[...]}], edges:[{from, to, action, component?, direction?, text?,
/// weight?, manual?}]}`. `manual` is a traversal count, or `true` for as
/// many manual traversals as the weight allows.
struct FixtureSpec {
  AppInfo app;
  std::vector<FixtureScreen> screens;
  std::vector<FixtureEdge> edges;
};

FixtureSpec parse_fixture_spec(std::string_view text);
Json to_json(const FixtureSpec& spec);

/// Emits traces whose ingestion reproduces the spec's nodes, edges and
/// weights. Rejects (ValidationError) unreachable screens, duplicate
/// fingerprints or edges, and weights no set of traces can produce.
std::vector<TraceFile> generate_fixture(const FixtureSpec& spec);

/// The model the spec describes, built directly without traces.
std::shared_ptr<const model::AppExecutionModel> fixture_model(
    const FixtureSpec& spec, const std::string& built_at,
    const text::Lexicon& lexicon = text::Lexicon::builtin());

/// Upload-ready ZIP: `traces/<trace_id>.json` plus every referenced
/// screenshot and `icon.png` found under `asset_dir`.
std::string fixture_package(const FixtureSpec& spec,
                            const std::filesystem::path& asset_dir);

}  // namespace bugchat::ingest
