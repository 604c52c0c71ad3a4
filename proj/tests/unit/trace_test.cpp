#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "bugchat/errors.hpp"
#include "bugchat/ingest/trace.hpp"
#include "bugchat/model/model_io.hpp"

using namespace bugchat;
using namespace bugchat::ingest;
using model::Action;

namespace {

Json screen_json(const std::string& activity, const std::string& label) {
  return {{"activity", activity},
          {"components",
           Json::array({{{"uid", "b"}, {"kind", "BUTTON"}, {"text", label},
                         {"content_description", ""}, {"bounds", {0, 0, 10, 10}}}})}};
}

Json target_json(const std::string& label) {
  return {{"uid", "b"}, {"kind", "BUTTON"}, {"text", label},
          {"content_description", ""}, {"bounds", {0, 0, 10, 10}}};
}

// LAUNCH into A, then taps A->B->C.
Json chain_trace(const std::string& id, const std::string& source = "automated",
                 const std::string& version = "1.0") {
  return {{"schema_version", 1},
          {"app", {{"name", "Chain"}, {"version", version}, {"package", "x.chain"}}},
          {"source", source},
          {"trace_id", id},
          {"events",
           Json::array({{{"sequence", 1}, {"action", "LAUNCH"}, {"result_screen", screen_json("A", "to b")}},
                        {{"sequence", 2}, {"action", "TAP"}, {"target", target_json("to b")},
                         {"result_screen", screen_json("B", "to c")}},
                        {{"sequence", 3}, {"action", "TAP"}, {"target", target_json("to c")},
                         {"result_screen", screen_json("C", "end")}}})}};
}

TraceFile parsed(const Json& j) { return parse_trace(j.dump()); }

ValidationError validation_error(const Json& j) {
  try {
    parse_trace(j.dump());
  } catch (const ValidationError& e) {
    return e;
  }
  FAIL("expected a validation error");
  return ValidationError("", "");
}

}  // namespace

TEST_CASE("minimal trace parses") {
  Json j = chain_trace("t1");
  j["events"] = Json::array({j["events"][0]});
  auto t = parsed(j);
  CHECK(t.events.size() == 1);
  CHECK(t.events[0].action == Action::kLaunch);
  CHECK(t.app.name == "Chain");
  CHECK(t.source == model::TraceSource::kAutomated);
}

TEST_CASE("unknown fields are ignored and traces round-trip") {
  Json j = chain_trace("t1");
  j["extra"] = {{"anything", 1}};
  j["events"][1]["note"] = "ignored";
  auto t = parsed(j);
  CHECK(parse_trace(serialize_trace(t)) == t);
}

TEST_CASE("sequence numbers must strictly increase") {
  Json j = chain_trace("t1");
  j["events"][2]["sequence"] = 2;
  auto e = validation_error(j);
  CHECK(std::string(e.what()) == "non-increasing sequence at event 3");
  CHECK(e.field() == "events[2].sequence");
  CHECK(e.event_sequence() == 2);

  Json k = chain_trace("t1");
  k["events"][0]["sequence"] = 0;
  CHECK(std::string(validation_error(k).what()) == "sequence must start at 1");
}

TEST_CASE("schema violations name field and event") {
  Json j = chain_trace("t1");
  j["schema_version"] = 2;
  CHECK(validation_error(j).field() == "schema_version");

  j = chain_trace("t1");
  j["events"] = Json::array();
  CHECK(validation_error(j).field() == "events");

  j = chain_trace("t1");
  j["events"][0]["action"] = "TAP";
  j["events"][0]["target"] = target_json("x");
  CHECK(validation_error(j).field() == "events[0].action");

  j = chain_trace("t1");
  j["events"][1].erase("target");
  auto e = validation_error(j);
  CHECK(e.field() == "events[1].target");
  CHECK(e.event_sequence() == 2);

  j = chain_trace("t1");
  j["events"][1]["action"] = "TYPE";
  CHECK(validation_error(j).field() == "events[1].input_text");

  j = chain_trace("t1");
  j["events"][1]["action"] = "BACK";
  CHECK(validation_error(j).field() == "events[1].target");

  j = chain_trace("t1");
  j["events"][1]["target"]["bounds"] = {10, 10, 0, 0};
  CHECK(validation_error(j).field() == "events[1].target.bounds");

  j = chain_trace("t1");
  j["events"][2]["result_screen"]["components"][0]["parent"] = "nobody";
  CHECK(validation_error(j).field() == "events[2].result_screen.components[0].parent");

  j = chain_trace("t1");
  j["events"][2].erase("result_screen");
  CHECK(validation_error(j).field() == "events[2].result_screen");

  j = chain_trace("t1");
  j["source"] = "robot";
  CHECK(validation_error(j).field() == "source");

  j = chain_trace("t1");
  j["events"][1]["action"] = "SWIPE";
  j["events"][1].erase("target");
  CHECK(validation_error(j).field() == "events[1].swipe_direction");
}

TEST_CASE("malformed text reports a byte offset") {
  std::string text = R"({"schema_version": 1, "app": })";
  try {
    parse_trace(text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.byte_offset() == text.find('}'));
  }
}

TEST_CASE("fixture trace of 6 events over 4 screens") {
  Json j = chain_trace("t1");
  j["events"].push_back({{"sequence", 4}, {"action", "BACK"}, {"result_screen", screen_json("B", "to c")}});
  j["events"].push_back({{"sequence", 7}, {"action", "SWIPE"}, {"swipe_direction", "LEFT"},
                         {"result_screen", screen_json("D", "swiped")}});
  j["events"].push_back({{"sequence", 9}, {"action", "ROTATE"}, {"result_screen", screen_json("D", "swiped")}});
  auto t = parsed(j);
  CHECK(t.events.size() == 6);
  std::set<std::string> fps;
  for (const auto& e : t.events) {
    const auto& s = e.result_screen;
    fps.insert(model::fingerprint_screen(s.activity, s.window, s.components));
  }
  CHECK(fps.size() == 4);
}

TEST_CASE("build_model from one chain trace") {
  auto model = build_model({parsed(chain_trace("t1"))}, "chain-1-0", "T");
  CHECK(model->screen_count() == 3);
  CHECK(model->nodes().size() == 4);
  CHECK(model->edges().size() == 3);
  for (const auto& e : model->edges()) CHECK(e.weight == 1);
  CHECK(model::validate_model(*model).empty());
}

TEST_CASE("build_model weight scheme") {
  auto twice = build_model({parsed(chain_trace("t1")), parsed(chain_trace("t2"))}, "c", "T");
  CHECK(twice->edges().size() == 3);
  for (const auto& e : twice->edges()) CHECK(e.weight == 2);

  auto mixed = build_model(
      {parsed(chain_trace("t1")), parsed(chain_trace("t2", "manual"))}, "c", "T");
  for (const auto& e : mixed->edges()) CHECK(e.weight == 1 + 3);
}

TEST_CASE("build_model rejects mixed versions") {
  try {
    build_model({parsed(chain_trace("t1")), parsed(chain_trace("t2", "automated", "2.0")),
                 parsed(chain_trace("t3"))},
                "c", "T");
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    CHECK(msg.find("t2") != std::string::npos);
    CHECK(msg.find("t1") == std::string::npos);
    CHECK(msg.find("t3") == std::string::npos);
  }
}

TEST_CASE("build_model is independent of trace order") {
  std::vector<TraceFile> traces = {parsed(chain_trace("t1")), parsed(chain_trace("t2", "manual"))};
  // A variant of screen B with different geometry and screenshot: the
  // first registration in canonical order must win regardless of input order.
  Json k = chain_trace("t0");
  k["events"][1]["result_screen"]["components"][0]["bounds"] = {1, 1, 5, 5};
  k["events"][1]["result_screen"]["screenshot"] = "screenshots/b.png";
  traces.push_back(parsed(k));

  auto reference = model::save_model(*build_model(traces, "c", "T"));
  std::mt19937 rng(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(traces.begin(), traces.end(), rng);
    CHECK(model::save_model(*build_model(traces, "c", "T")) == reference);
  }
}

TEST_CASE("app_slug") {
  CHECK(app_slug("DemoPad", "1.0") == "demopad-1-0");
  CHECK(app_slug("My  App!", "v2.1-beta") == "my-app-v2-1-beta");
  CHECK(app_slug("", "") == "app");
}
