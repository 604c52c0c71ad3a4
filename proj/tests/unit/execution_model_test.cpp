#include <doctest.h>

#include <algorithm>

#include "bugchat/errors.hpp"
#include "bugchat/model/execution_model.hpp"
#include "bugchat/model/model_io.hpp"

using namespace bugchat::model;
using V = std::vector<std::string>;

namespace {

const ModelInfo kInfo{"app-1", "App", "1", "2026-01-01T00:00:00Z"};

GuiComponent comp(std::string uid, ComponentKind kind, std::string text,
                  std::string cd = "", Bounds b = {0, 0, 10, 10}) {
  GuiComponent c;
  c.uid = std::move(uid);
  c.kind = kind;
  c.text = std::move(text);
  c.content_description = std::move(cd);
  c.bounds = b;
  return c;
}

Screen screen(std::string activity, std::vector<GuiComponent> comps,
              std::optional<std::string> shot = std::nullopt) {
  Screen s;
  s.activity = std::move(activity);
  s.components = std::move(comps);
  s.screenshot = std::move(shot);
  return s;
}

InteractionDescriptor tap(const GuiComponent& c) {
  return {Action::kTap, c, std::nullopt};
}
InteractionDescriptor launch() { return {Action::kLaunch, std::nullopt, std::nullopt}; }

}  // namespace

TEST_CASE("fingerprint golden value") {
  std::vector<GuiComponent> comps = {
      comp("b1", ComponentKind::kButton, "Save"),
      comp("t1", ComponentKind::kTextView, "Total")};
  CHECK(canonical_screen_string("MainActivity", std::nullopt, comps) ==
        "MainActivity||BUTTON,Save,;TEXT_VIEW,Total,");
  // sha256sum over the canonical string above.
  CHECK(fingerprint_screen("MainActivity", std::nullopt, comps) ==
        "f343a1fc8a7c3ad21dc19aacfe8b59a0c27055d3a18fa0511149b8030f750917");
}

TEST_CASE("fingerprint ignores geometry and order") {
  auto a = comp("b1", ComponentKind::kButton, "Save", "", {0, 0, 5, 5});
  auto b = comp("x9", ComponentKind::kTextView, "Total", "", {3, 3, 90, 90});
  auto a2 = a;
  a2.bounds = {100, 100, 200, 200};
  a2.uid = "other";
  auto f1 = fingerprint_screen("Main", std::nullopt, {a, b});
  CHECK(f1 == fingerprint_screen("Main", std::nullopt, {b, a2}));
  CHECK(f1 != fingerprint_screen("Other", std::nullopt, {a, b}));
  CHECK(f1 != fingerprint_screen("Main", std::string("w"), {a, b}));
  CHECK(f1.size() == 64);
  CHECK(fingerprint_screen("Main", std::nullopt, {}).size() == 64);
}

TEST_CASE("upsert merges traversals and applies the weight scheme") {
  auto save = comp("b1", ComponentKind::kButton, "Save");
  auto field = comp("f1", ComponentKind::kTextField, "", "amount");
  ModelBuilder builder(kInfo);
  auto a = builder.register_screen(screen("A", {save, field}, "shots/a.png"));
  auto b = builder.register_screen(screen("B", {}));
  builder.upsert_transition(start_fingerprint(), launch(), a, TraceSource::kAutomated);
  builder.upsert_transition(a, tap(save), b, TraceSource::kAutomated);
  builder.upsert_transition(a, tap(save), b, TraceSource::kManual);
  builder.upsert_transition(a, {Action::kType, field, std::nullopt}, a,
                            TraceSource::kAutomated);
  builder.upsert_transition(a, {Action::kType, field, std::nullopt}, a,
                            TraceSource::kAutomated);
  auto model = builder.publish();

  CHECK(model->screen_count() == 2);
  CHECK(model->edges().size() == 3);
  auto out = outgoing_edges(*model, a);
  REQUIRE(out.size() == 2);
  CHECK(out[0].action == Action::kTap);
  CHECK(out[0].weight == 1 + 3);
  CHECK(out[0].screenshot == std::optional<std::string>("shots/a.png"));
  CHECK(out[0].highlight_bounds == std::optional<Bounds>(Bounds{0, 0, 10, 10}));
  CHECK(out[1].action == Action::kType);
  CHECK(out[1].weight == 2);
  CHECK(model->outgoing_weight(a) == 6);

  auto starts = outgoing_edges(*model, start_fingerprint());
  REQUIRE(starts.size() == 1);
  CHECK(starts[0].action == Action::kLaunch);
  CHECK(outgoing_edges(*model, b).empty());
  CHECK(validate_model(*model).empty());
}

TEST_CASE("outgoing order is action, component signature, target") {
  auto x = comp("x", ComponentKind::kButton, "X");
  auto y = comp("y", ComponentKind::kButton, "Y");
  auto l = comp("l", ComponentKind::kListItem, "A");
  ModelBuilder builder(kInfo);
  auto a = builder.register_screen(screen("A", {x, y, l}));
  auto b = builder.register_screen(screen("B", {}));
  auto c = builder.register_screen(screen("C", {}));
  builder.upsert_transition(start_fingerprint(), launch(), a, TraceSource::kAutomated);
  builder.upsert_transition(a, {Action::kBack, std::nullopt, std::nullopt}, b,
                            TraceSource::kAutomated);
  builder.upsert_transition(a, tap(y), b, TraceSource::kAutomated);
  builder.upsert_transition(a, tap(l), c, TraceSource::kAutomated);
  builder.upsert_transition(a, tap(x), c, TraceSource::kAutomated);
  builder.upsert_transition(a, tap(x), b, TraceSource::kAutomated);
  auto model = builder.publish();

  auto out = outgoing_edges(*model, a);
  REQUIRE(out.size() == 5);
  // Oracle: sort a copy by the documented key.
  auto expected = out;
  std::sort(expected.begin(), expected.end(), [](auto& p, auto& q) {
    return std::tie(p.action, p.target_component, p.swipe_direction, p.target) <
           std::tie(q.action, q.target_component, q.swipe_direction, q.target);
  });
  CHECK(out == expected);
  CHECK(out.back().action == Action::kBack);
  CHECK(out[0].target_component->text == "X");
  // Edge ids follow key order and id_of inverts edge().
  for (std::uint32_t i = 0; i < model->edges().size(); ++i) {
    CHECK(model->id_of(model->edges()[i]).value == i);
    if (i) CHECK(model->edges()[i - 1].key() < model->edges()[i].key());
  }
  CHECK(model_stats(*model).nondeterministic_nodes == std::vector<Fingerprint>{a});
}

TEST_CASE("swipe direction separates edges") {
  ModelBuilder builder(kInfo);
  auto a = builder.register_screen(screen("A", {}));
  auto b = builder.register_screen(screen("B", {}));
  builder.upsert_transition(start_fingerprint(), launch(), a, TraceSource::kAutomated);
  builder.upsert_transition(a, {Action::kSwipe, std::nullopt, SwipeDirection::kLeft},
                            b, TraceSource::kAutomated);
  builder.upsert_transition(a, {Action::kSwipe, std::nullopt, SwipeDirection::kRight},
                            b, TraceSource::kAutomated);
  CHECK(builder.publish()->outgoing(a).size() == 2);
}

TEST_CASE("integrity errors") {
  auto save = comp("b1", ComponentKind::kButton, "Save");
  ModelBuilder builder(kInfo);
  auto a = builder.register_screen(screen("A", {save}));
  Fingerprint unknown{"deadbeef"};
  auto is_integrity = [](auto&& fn) {
    try {
      fn();
    } catch (const bugchat::Error& e) {
      return e.kind() == bugchat::ErrorKind::kModelIntegrity;
    }
    return false;
  };
  CHECK(is_integrity([&] {
    builder.upsert_transition(a, tap(save), unknown, TraceSource::kAutomated);
  }));
  CHECK(is_integrity([&] {
    builder.upsert_transition(unknown, tap(save), a, TraceSource::kAutomated);
  }));
  CHECK(is_integrity([&] {
    builder.upsert_transition(a, launch(), a, TraceSource::kAutomated);
  }));
  CHECK(is_integrity([&] {
    builder.upsert_transition(a, {Action::kTap, std::nullopt, std::nullopt}, a,
                              TraceSource::kAutomated);
  }));
  CHECK(is_integrity([&] { builder.publish(); }));  // no LAUNCH edge

  auto bad = screen("A", {comp("", ComponentKind::kButton, "x")});
  CHECK(is_integrity([&] { builder.register_screen(bad); }));
  auto inverted = screen("A", {comp("u", ComponentKind::kButton, "x", "", {5, 5, 1, 1})});
  CHECK(is_integrity([&] { builder.register_screen(inverted); }));
  auto orphan = screen("A", {comp("u", ComponentKind::kButton, "x")});
  orphan.components[0].parent = "missing";
  CHECK(is_integrity([&] { builder.register_screen(orphan); }));
  auto wrong_fp = screen("A", {});
  wrong_fp.fingerprint = Fingerprint{"0000"};
  CHECK(is_integrity([&] { builder.register_screen(wrong_fp); }));
}

TEST_CASE("unknown fingerprints are not found") {
  ModelBuilder builder(kInfo);
  auto a = builder.register_screen(screen("A", {}));
  builder.upsert_transition(start_fingerprint(), launch(), a, TraceSource::kAutomated);
  auto model = builder.publish();
  CHECK_THROWS_AS(model->outgoing(Fingerprint{"nope"}), bugchat::NotFoundError);
  CHECK_THROWS_AS(screen_document(*model, Fingerprint{"nope"}), bugchat::NotFoundError);
  CHECK_THROWS_AS(model->edge(EdgeId{99}), bugchat::NotFoundError);
}

TEST_CASE("screen documents") {
  auto s = screen("StatsActivity", {comp("a", ComponentKind::kButton, "Save"),
                                    comp("b", ComponentKind::kTextView, "Fuel Economy")});
  auto doc = screen_document(s);
  // The documented suffix rules reduce "stats" to "stat".
  CHECK(doc == V{"activity", "economy", "fuel", "save", "stat"});

  auto empty = screen("NoteListActivity", {comp("a", ComponentKind::kImage, "")});
  CHECK(screen_document(empty) == V{"activity", "list", "note"});

  auto showing = screen("Main", {comp("a", ComponentKind::kTextView, "Showing")});
  auto d = screen_document(showing);
  CHECK(std::count(d.begin(), d.end(), "show") == 1);

  ModelBuilder builder(kInfo);
  auto fp = builder.register_screen(s);
  builder.upsert_transition(start_fingerprint(), launch(), fp, TraceSource::kAutomated);
  auto model = builder.publish();
  CHECK(screen_document(*model, fp) == doc);
  CHECK(model->document(start_fingerprint()).empty());
}

TEST_CASE("first registration wins for equal fingerprints") {
  ModelBuilder builder(kInfo);
  auto f1 = builder.register_screen(
      screen("A", {comp("u1", ComponentKind::kButton, "Go", "", {0, 0, 1, 1})}, "one.png"));
  auto f2 = builder.register_screen(
      screen("A", {comp("u2", ComponentKind::kButton, "Go", "", {5, 5, 9, 9})}, "two.png"));
  CHECK(f1 == f2);
  builder.upsert_transition(start_fingerprint(), launch(), f1, TraceSource::kAutomated);
  CHECK(builder.publish()->screen(f1).screenshot == std::optional<std::string>("one.png"));
}

TEST_CASE("persisted model round-trips") {
  auto save = comp("b1", ComponentKind::kButton, "Save", "", {1, 2, 3, 4});
  auto child = comp("c1", ComponentKind::kTextView, "Total");
  child.parent = "b1";
  ModelBuilder builder(kInfo);
  auto s = screen("A", {save, child}, "screenshots/a.png");
  s.window = "Dialog";
  auto a = builder.register_screen(s);
  auto b = builder.register_screen(screen("B", {}));
  builder.upsert_transition(start_fingerprint(), launch(), a, TraceSource::kManual);
  builder.upsert_transition(a, tap(save), b, TraceSource::kAutomated);
  builder.upsert_transition(b, {Action::kSwipe, std::nullopt, SwipeDirection::kUp},
                            a, TraceSource::kManual);
  auto model = builder.publish();

  auto text = save_model(*model);
  auto loaded = load_model(text);
  CHECK(loaded->info().app_id == model->info().app_id);
  CHECK(loaded->built_at() == kInfo.built_at);
  CHECK(loaded->nodes() == model->nodes());
  CHECK(std::equal(loaded->edges().begin(), loaded->edges().end(),
                   model->edges().begin(), model->edges().end()));
  CHECK(save_model(*loaded) == text);
  auto j = bugchat::parse_json(text);
  CHECK(j["schema_version"] == 1);
  CHECK(j["nodes"].size() == 2);
}

TEST_CASE("model loader rejects bad documents") {
  CHECK_THROWS_AS(load_model("{\"schema_version\": 1,"), bugchat::ParseError);
  CHECK_THROWS_AS(load_model(R"({"schema_version": 2})"), bugchat::ValidationError);
  CHECK_THROWS_AS(
      load_model(R"({"schema_version":1,"app_id":"a","app_name":"A","app_version":"1",
                     "nodes":[{"fingerprint":"abc","activity":"X","components":[]}],
                     "edges":[]})"),
      bugchat::Error);
  try {
    load_model("[1, 2,, 3]");
  } catch (const bugchat::ParseError& e) {
    CHECK(e.byte_offset() == 6);
  }
}
