#include <doctest.h>

#include <atomic>
#include <future>
#include <thread>

#include "bugchat/dialogue/session.hpp"
#include "bugchat/errors.hpp"
#include "support/demopad.hpp"
#include "support/models.hpp"

using namespace bugchat;
using namespace bugchat::dialogue;
using namespace bugchat::testing;
using model::Action;
using model::ComponentKind;

namespace {

constexpr const char* kGibberish = "zxq vlorp";

struct Harness {
  explicit Harness(std::shared_ptr<const model::AppExecutionModel> m, Clock clock = fixed_clock("T"))
      : model(std::move(m)), engine(single_app(model), text::Lexicon::builtin(), {}, Tips::builtin(),
                                    std::move(clock)) {}

  StartedSession start() { return start_session(engine, "s", model->app_id()); }

  std::shared_ptr<const model::AppExecutionModel> model;
  Engine engine;
};

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kIo;
}

std::vector<std::string> ids(const DialogueResponse& r, std::initializer_list<int> positions) {
  std::vector<std::string> out;
  for (int p : positions) out.push_back(r.suggestion_cards.at(static_cast<std::size_t>(p)).id);
  return out;
}

// Three unmatchable OB descriptions, then an unverified EB: straight to S2R.
void skip_to_steps(Session& s) {
  for (int i = 0; i < 3; ++i) s.handle_text(kGibberish);
  auto r = s.handle_text("It should work");
  REQUIRE(r.phase == Phase::kS2rDescribe);
}

// Home with seven "Open <x>" buttons, each leading to its own details screen.
BuiltModel wide_model() {
  const char* names[] = {"Alpha", "Bravo", "Charlie", "Delta", "Echo", "Foxtrot", "Golf"};
  std::vector<model::Screen> screens;
  std::vector<model::GuiComponent> buttons;
  for (const char* n : names) {
    buttons.push_back(comp(std::string("open_") + n, ComponentKind::kButton, std::string("Open ") + n));
  }
  screens.push_back(screen("HomeActivity", buttons));
  for (const char* n : names) {
    screens.push_back(screen(std::string(n) + "Activity",
                             {comp("details", ComponentKind::kTextView, "Details")}));
  }
  std::vector<std::tuple<int, model::InteractionDescriptor, int, int>> edges;
  for (int i = 0; i < 7; ++i) edges.emplace_back(0, tap(buttons[static_cast<std::size_t>(i)]), i + 1, 1);
  return build_model(std::move(screens), edges);
}

// A --type--> A, A -> B (w3), A -> C (w1), B -> D, C -> D.
BuiltModel diamond_model() {
  auto name = comp("name", ComponentKind::kTextField, "", "Name");
  auto bravo = comp("bravo", ComponentKind::kButton, "Bravo");
  auto charlie = comp("charlie", ComponentKind::kButton, "Charlie");
  auto submit = comp("submit", ComponentKind::kButton, "Submit");
  auto upload = comp("upload", ComponentKind::kButton, "Upload");
  return build_model({screen("FormActivity", {name, bravo, charlie}),
                      screen("ReviewActivity", {submit}), screen("ImportActivity", {upload}),
                      screen("DoneActivity", {comp("msg", ComponentKind::kTextView, "Thanks")})},
                     {{0, {Action::kType, name, {}}, 0, 1},
                      {0, tap(bravo), 1, 3},
                      {0, tap(charlie), 2, 1},
                      {1, tap(submit), 3, 1},
                      {2, tap(upload), 3, 1}});
}

// S0 -> S1 -> ... -> S5, each via a "Continue" button; S5 shows a crash report.
BuiltModel chain_model() {
  const char* names[] = {"Alpha", "Bravo", "Charlie", "Delta", "Echo"};
  std::vector<model::Screen> screens;
  std::vector<std::tuple<int, model::InteractionDescriptor, int, int>> edges;
  auto next = comp("continue", ComponentKind::kButton, "Continue");
  for (int i = 0; i < 5; ++i) {
    screens.push_back(screen(std::string(names[i]) + "StepActivity", {next}));
    edges.emplace_back(i, tap(next), i + 1, 1);
  }
  screens.push_back(screen("ResultActivity", {comp("crash", ComponentKind::kTextView, "Crash report")}));
  return build_model(std::move(screens), edges);
}

}  // namespace

TEST_CASE("start_session seeds the launch step") {
  Harness h(demopad_model());
  auto started = h.start();
  auto state = started.session->snapshot();
  CHECK(state.phase == Phase::kObDescribe);
  REQUIRE(state.steps.size() == 1);
  CHECK(state.steps[0].index == 1);
  CHECK(state.steps[0].text == "Open the app");
  REQUIRE(state.steps[0].edge);
  CHECK(h.model->edge(*state.steps[0].edge).action == Action::kLaunch);
  CHECK(state.current_state == h.model->edge(*state.steps[0].edge).target);
  CHECK(started.response.tips == Tips::builtin().for_stage("OB"));
  CHECK_FALSE(started.response.messages.empty());

  CHECK(kind_of([&] { start_session(h.engine, "x", std::string("nope")); }) == ErrorKind::kNotFound);
}

TEST_CASE("two launch targets leave the state unknown") {
  auto b = build_model({screen("MainActivity", {comp("go", ComponentKind::kButton, "Go")}),
                        screen("WidgetActivity", {comp("refresh", ComponentKind::kButton, "Refresh")}),
                        screen("OtherActivity", {})},
                       {{1, tap(comp("refresh", ComponentKind::kButton, "Refresh")), 2, 1}}, {0, 1});
  Harness h(b.model);
  auto started = h.start();
  auto state = started.session->snapshot();
  REQUIRE(state.steps.size() == 1);
  CHECK_FALSE(state.steps[0].edge);
  CHECK_FALSE(state.current_state);

  // A step matched one hop past START binds the launch step.
  auto& s = *started.session;
  skip_to_steps(s);
  auto r = s.handle_text("Tap refresh");
  REQUIRE(r.phase == Phase::kS2rConfirm);
  s.handle_confirmation(true);
  state = s.snapshot();
  REQUIRE(state.steps.size() == 2);
  REQUIRE(state.steps[0].edge);
  CHECK(b.model->edge(*state.steps[0].edge).target == b.fps[1]);
  CHECK(state.current_state == b.fps[2]);
}

TEST_CASE("OB: unique match asks for confirmation") {
  Harness h(demopad_model());
  auto s = h.start().session;
  auto r = s->handle_text("The word count shows NaN on the statistics screen");
  CHECK(r.phase == Phase::kObConfirm);
  REQUIRE(r.suggestion_cards.size() == 1);
  CHECK(r.suggestion_cards[0].caption == "Stats Activity");
  CHECK(r.suggestion_cards[0].image_url);
}

TEST_CASE("OB: three failed attempts record the text and move on") {
  Harness h(demopad_model());
  auto s = h.start().session;
  CHECK(s->handle_text(kGibberish).phase == Phase::kObDescribe);
  CHECK(s->snapshot().attempts == 1);
  CHECK(s->handle_text(kGibberish).phase == Phase::kObDescribe);
  CHECK(s->snapshot().attempts == 2);
  auto r = s->handle_text("qqq blorf");
  CHECK(r.phase == Phase::kEbDescribe);
  auto state = s->snapshot();
  CHECK(state.attempts == 0);
  CHECK(state.ob.raw_text == "qqq blorf");
  CHECK_FALSE(state.ob.quality);
  CHECK_FALSE(state.ob.fingerprint);
}

TEST_CASE("empty text does not use an attempt") {
  Harness h(demopad_model());
  auto s = h.start().session;
  auto r = s->handle_text("   ");
  CHECK(r.phase == Phase::kObDescribe);
  CHECK(s->snapshot().attempts == 0);
  CHECK_FALSE(r.messages.empty());
}

TEST_CASE("OB: rejections count as attempts and reset on success") {
  Harness h(demopad_model());
  auto s = h.start().session;
  const char* ob = "The word count shows NaN on the statistics screen";
  s->handle_text(ob);
  CHECK(s->handle_confirmation(false).phase == Phase::kObDescribe);
  s->handle_text(ob);
  CHECK(s->handle_confirmation(false).phase == Phase::kObDescribe);
  CHECK(s->snapshot().attempts == 2);
  s->handle_text(ob);
  CHECK(s->handle_confirmation(true).phase == Phase::kEbDescribe);
  auto state = s->snapshot();
  CHECK(state.attempts == 0);
  CHECK(state.ob.quality);
  CHECK(state.ob.fingerprint);
}

TEST_CASE("OB: select a card, or page with an empty selection") {
  SUBCASE("card 2 of a multiple match") {
    Harness h(demopad_model());
    auto s = h.start().session;
    auto r = s->handle_text("The groceries note");
    REQUIRE(r.phase == Phase::kObSelect);
    REQUIRE(r.suggestion_cards.size() >= 2);
    auto chosen = std::get<match::ScreenMatchResult>(s->snapshot().pending).candidates[1].fingerprint;
    r = s->handle_selection(ids(r, {1}));
    CHECK(r.phase == Phase::kEbDescribe);
    CHECK(s->snapshot().ob.fingerprint == chosen);
  }
  SUBCASE("second page") {
    auto wide = wide_model();
    Harness h(wide.model);
    auto s = h.start().session;
    auto r = s->handle_text("The details are wrong");
    REQUIRE(r.phase == Phase::kObSelect);
    CHECK(r.suggestion_cards.size() == 5);
    r = s->handle_selection({});
    CHECK(r.phase == Phase::kObSelect);
    CHECK(r.suggestion_cards.size() == 2);
    // Past the last page the attempt fails.
    r = s->handle_selection({});
    CHECK(r.phase == Phase::kObDescribe);
    CHECK(s->snapshot().attempts == 1);
  }
  SUBCASE("bad ids") {
    Harness h(demopad_model());
    auto s = h.start().session;
    auto r = s->handle_text("The groceries note");
    REQUIRE(r.phase == Phase::kObSelect);
    CHECK(kind_of([&] { s->handle_selection({"opt-999"}); }) == ErrorKind::kInvalidOption);
    CHECK(kind_of([&] { s->handle_selection(ids(r, {0, 1})); }) == ErrorKind::kProtocol);
    CHECK(s->snapshot().phase == Phase::kObSelect);
  }
}

TEST_CASE("S2R: seven candidates are paged five then two") {
  auto wide = wide_model();
  Harness h(wide.model);
  auto s = h.start().session;
  skip_to_steps(*s);
  auto r = s->handle_text("Tap the open button");
  REQUIRE(r.phase == Phase::kS2rSelect);
  CHECK(r.suggestion_cards.size() == 5);
  r = s->handle_selection({});
  CHECK(r.phase == Phase::kS2rSelect);
  REQUIRE(r.suggestion_cards.size() == 2);
  r = s->handle_selection(ids(r, {1}));
  CHECK(r.phase == Phase::kS2rDescribe);
  auto state = s->snapshot();
  REQUIRE(state.steps.size() == 2);
  CHECK(state.steps[1].source == StepSource::kTyped);
  CHECK(state.current_state == wide.model->edge(*state.steps[1].edge).target);
}

TEST_CASE("confirmations outside confirm phases are protocol errors") {
  Harness h(demopad_model());
  auto s = h.start().session;
  CHECK(kind_of([&] { s->handle_confirmation(true); }) == ErrorKind::kProtocol);
  CHECK(kind_of([&] { s->handle_selection({}); }) == ErrorKind::kProtocol);
  CHECK(s->snapshot().phase == Phase::kObDescribe);
  CHECK(s->snapshot().transcript.size() == 2);  // the greeting only
}

TEST_CASE("hop-1 matches insert the bridging step") {
  Harness h(demopad_model());
  auto s = h.start().session;
  skip_to_steps(*s);
  auto r = s->handle_text("Tap save");
  REQUIRE(r.phase == Phase::kS2rConfirm);
  s->handle_confirmation(true);
  auto state = s->snapshot();
  REQUIRE(state.steps.size() == 3);
  CHECK(state.steps[1].inferred);
  CHECK(state.steps[1].text == "Tap 'New note'");
  CHECK(state.steps[1].source == StepSource::kSuggested);
  CHECK_FALSE(state.steps[2].inferred);
  CHECK(state.steps[2].text == "Tap save");
}

TEST_CASE("prediction offers") {
  auto chain = chain_model();
  Harness h(chain.model);
  auto s = h.start().session;
  auto r = s->handle_text("The crash report is empty");
  REQUIRE(r.phase == Phase::kObConfirm);
  s->handle_confirmation(true);
  r = s->handle_text("The crash report should be shown");
  if (r.phase == Phase::kEbConfirm) r = s->handle_confirmation(true);
  REQUIRE(r.phase == Phase::kS2rDescribe);

  r = s->handle_text("Tap continue");
  REQUIRE(r.phase == Phase::kS2rConfirm);
  r = s->handle_confirmation(true);
  REQUIRE(r.phase == Phase::kS2rPredictOffer);
  CHECK(r.multi_select);
  CHECK(r.suggestion_cards.size() == 4);

  SUBCASE("ranks 1 and 2 append two steps and predict again") {
    r = s->handle_selection(ids(r, {0, 1}));
    auto state = s->snapshot();
    REQUIRE(state.steps.size() == 4);
    CHECK(state.steps[2].source == StepSource::kSuggested);
    CHECK(state.steps[3].source == StepSource::kSuggested);
    CHECK_FALSE(state.steps[2].inferred);
    CHECK(state.current_state == chain.fps[3]);
    CHECK(r.phase == Phase::kS2rPredictOffer);
    CHECK(r.suggestion_cards.size() == 2);
  }
  SUBCASE("skipped ranks are inserted as inferred steps") {
    r = s->handle_selection(ids(r, {0, 2}));
    auto state = s->snapshot();
    REQUIRE(state.steps.size() == 5);
    CHECK_FALSE(state.steps[2].inferred);
    CHECK(state.steps[3].inferred);
    CHECK_FALSE(state.steps[4].inferred);
    CHECK(state.current_state == chain.fps[4]);
  }
  SUBCASE("the last suggestion reaches the OB screen") {
    r = s->handle_selection(ids(r, {3}));
    CHECK(r.phase == Phase::kLastStepConfirm);
    CHECK(s->handle_confirmation(false).phase == Phase::kS2rDescribe);
  }
  SUBCASE("no: describe the next step manually") {
    r = s->handle_confirmation(false);
    CHECK(r.phase == Phase::kS2rDescribe);
    CHECK(r.suggestion_cards.empty());
    CHECK(s->snapshot().steps.size() == 2);
  }
  SUBCASE("free text drops the offer") {
    r = s->handle_text("Tap continue");
    CHECK(r.phase == Phase::kS2rConfirm);
  }
}

TEST_CASE("prediction paging: empty selection asks for more") {
  // Seven continue steps: the first offer shows five of six remaining edges.
  std::vector<model::Screen> screens;
  std::vector<std::tuple<int, model::InteractionDescriptor, int, int>> edges;
  auto next = comp("continue", ComponentKind::kButton, "Continue");
  const char* names[] = {"A", "B", "C", "D", "E", "F", "G"};
  for (int i = 0; i < 7; ++i) {
    screens.push_back(screen(std::string("Stage") + names[i] + "Activity", {next}));
    edges.emplace_back(i, tap(next), i + 1, 1);
  }
  screens.push_back(screen("ResultActivity", {comp("crash", ComponentKind::kTextView, "Crash report")}));
  auto b = build_model(std::move(screens), edges);
  Harness h(b.model);
  auto s = h.start().session;
  s->handle_text("The crash report is empty");
  s->handle_confirmation(true);
  auto r = s->handle_text("The crash report should be shown");
  if (r.phase == Phase::kEbConfirm) r = s->handle_confirmation(true);
  s->handle_text("Tap continue");
  r = s->handle_confirmation(true);
  REQUIRE(r.phase == Phase::kS2rPredictOffer);
  CHECK(r.suggestion_cards.size() == 5);

  r = s->handle_selection({});
  CHECK(r.phase == Phase::kS2rPredictOffer);
  CHECK(r.suggestion_cards.empty());
  r = s->handle_confirmation(true);
  CHECK(r.phase == Phase::kS2rPredictOffer);
  REQUIRE(r.suggestion_cards.size() == 1);
  r = s->handle_selection(ids(r, {0}));
  CHECK(r.phase == Phase::kLastStepConfirm);
  auto state = s->snapshot();
  CHECK(state.steps.size() == 8);
  int inferred = 0;
  for (const auto& step : state.steps) inferred += step.inferred;
  CHECK(inferred == 5);  // the unselected first page
}

TEST_CASE("quick actions") {
  Harness h(demopad_model());
  SUBCASE("restart mid-S2R returns to the seeded state") {
    auto s = h.start().session;
    skip_to_steps(*s);
    s->handle_text("Tap the settings icon");
    s->handle_confirmation(true);
    auto before = s->snapshot();
    REQUIRE(before.steps.size() == 2);
    auto r = s->handle_quick_action(QuickAction::kRestart);
    CHECK(r.phase == Phase::kObDescribe);
    auto after = s->snapshot();
    REQUIRE(after.steps.size() == 1);
    CHECK(after.steps[0].text == "Open the app");
    CHECK(after.current_state == h.start().session->snapshot().current_state);
    CHECK(after.ob.raw_text.empty());
    CHECK(after.segment == 1);
    // The transcript keeps everything said before the restart.
    REQUIRE(after.transcript.size() > before.transcript.size());
    for (std::size_t i = 0; i < before.transcript.size(); ++i) {
      CHECK(after.transcript[i].text == before.transcript[i].text);
    }
  }
  SUBCASE("finish without EB") {
    auto s = h.start().session;
    s->handle_text("The word count shows NaN on the statistics screen");
    s->handle_confirmation(true);
    auto r = s->handle_quick_action(QuickAction::kFinish);
    CHECK(r.phase == Phase::kReportReady);
    CHECK_FALSE(r.can_finish);
    auto report = s->report();
    CHECK_FALSE(report.draft);
    CHECK(report.expected_behavior.text.empty());
    CHECK_FALSE(report.quality.eb_matched);
    CHECK(report.quality.ob_matched);
    CHECK(report.steps.size() == 1);
  }
  SUBCASE("preview equals the report at that instant") {
    auto s = h.start().session;
    s->handle_text("The word count shows NaN on the statistics screen");
    auto r = s->handle_quick_action(QuickAction::kPreview);
    CHECK(r.phase == Phase::kObConfirm);
    REQUIRE(r.preview);
    CHECK(*r.preview == report::to_json(s->report()));
    CHECK((*r.preview)["draft"] == true);
    CHECK(r.suggestion_cards.size() == 1);
  }
}

TEST_CASE("edit_step") {
  auto d = diamond_model();
  Harness h(d.model);
  auto s = h.start().session;
  skip_to_steps(*s);
  s->handle_text("Type into the name field");
  s->handle_confirmation(true);
  s->handle_text("Tap the bravo button");
  s->handle_confirmation(true);
  s->handle_text("Tap submit");
  s->handle_confirmation(true);
  auto state = s->snapshot();
  REQUIRE(state.steps.size() == 4);
  CHECK(state.current_state == d.fps[3]);
  for (const auto& step : state.steps) CHECK_FALSE(step.stale);

  SUBCASE("sibling edge marks the next step stale") {
    auto r = s->edit_step(3, "Tap the charlie button");
    state = s->snapshot();
    REQUIRE(state.steps.size() == 4);
    CHECK(state.steps[2].source == StepSource::kEdited);
    CHECK(d.model->edge(*state.steps[2].edge).target == d.fps[2]);
    CHECK(state.steps[3].stale);
    CHECK(r.reported_steps[3].step.stale);
    CHECK(state.current_state == d.fps[3]);
  }
  SUBCASE("editing the last step moves the state") {
    s->edit_step(4, "Type into the name field");
    state = s->snapshot();
    CHECK_FALSE(state.steps[3].edge);  // not reachable from ReviewActivity
    s->edit_step(3, "Tap the charlie button");
    s->edit_step(4, "Tap upload");
    state = s->snapshot();
    CHECK(state.current_state == d.fps[3]);
    CHECK_FALSE(state.steps[3].stale);
  }
  SUBCASE("unmatchable text is stored unmatched") {
    s->edit_step(3, kGibberish);
    state = s->snapshot();
    CHECK(state.steps[2].text == kGibberish);
    CHECK_FALSE(state.steps[2].matched());
    CHECK(state.steps[2].source == StepSource::kEdited);
  }
  SUBCASE("bad edits") {
    CHECK(kind_of([&] { s->edit_step(1, "Open it"); }) == ErrorKind::kProtocol);
    CHECK(kind_of([&] { s->edit_step(9, "Tap submit"); }) == ErrorKind::kNotFound);
    CHECK(kind_of([&] { s->edit_step(0, "Tap submit"); }) == ErrorKind::kNotFound);
  }
}

TEST_CASE("tips follow the stage") {
  Harness h(chain_model().model);
  auto s = h.start().session;
  CHECK(s->tips() == Tips::builtin().for_stage("OB"));
  s->handle_text("The crash report is empty");
  CHECK(s->tips() == Tips::builtin().for_stage("CONFIRM"));
  s->handle_quick_action(QuickAction::kFinish);
  CHECK(s->tips() == Tips::builtin().for_stage("REPORT"));
  CHECK_FALSE(Tips::builtin().for_stage("PREDICT").empty());
  CHECK(tip_stage(Phase::kS2rPredictOffer) == "PREDICT");
  CHECK(Tips::builtin().for_stage("nope").empty());
}

TEST_CASE("app selection") {
  Harness h(demopad_model());
  auto started = start_session(h.engine, "s", std::nullopt);
  auto& s = *started.session;
  CHECK(started.response.phase == Phase::kAppSelection);
  REQUIRE(started.response.suggestion_cards.size() == 1);
  CHECK(started.response.suggestion_cards[0].caption == "DemoPad 1.0");
  CHECK_FALSE(started.response.can_finish);
  CHECK(kind_of([&] { s.handle_quick_action(QuickAction::kFinish); }) == ErrorKind::kProtocol);
  CHECK(s.handle_text("DemoPad").phase == Phase::kAppSelection);
  auto r = s.handle_selection({started.response.suggestion_cards[0].id});
  CHECK(r.phase == Phase::kObDescribe);
  CHECK(s.snapshot().steps.size() == 1);
}

TEST_CASE("the transition table matches the documented rules") {
  auto confirm_phase = [](Phase p) {
    return p == Phase::kObConfirm || p == Phase::kEbConfirm || p == Phase::kS2rConfirm ||
           p == Phase::kLastStepConfirm || p == Phase::kS2rPredictOffer;
  };
  auto select_phase = [](Phase p) {
    return p == Phase::kObSelect || p == Phase::kS2rSelect || p == Phase::kS2rPredictOffer ||
           p == Phase::kAppSelection;
  };
  for (std::size_t pi = 0; pi < kPhaseCount; ++pi) {
    auto p = static_cast<Phase>(pi);
    CHECK(parse_phase(to_string(p)) == p);
    for (std::size_t ei = 0; ei < kEventCount; ++ei) {
      auto e = static_cast<EventKind>(ei);
      auto o = transition(p, e);
      CHECK(o != Outcome::kUndefined);
      bool rejected = o == Outcome::kProtocolError;
      switch (e) {
        case EventKind::kYes:
        case EventKind::kNo: CHECK(rejected == !confirm_phase(p)); break;
        case EventKind::kSelection: CHECK(rejected == !select_phase(p)); break;
        case EventKind::kFinish:
        case EventKind::kPreview:
        case EventKind::kEditStep: CHECK(rejected == (p == Phase::kAppSelection)); break;
        case EventKind::kRestart:
        case EventKind::kText: CHECK_FALSE(rejected); break;
      }
    }
  }
}

TEST_CASE("a second concurrent event on one session is busy") {
  std::promise<void> entered;
  std::promise<void> release;
  auto release_future = release.get_future().share();
  std::atomic<bool> block{false};
  Clock clock = [&]() -> std::string {
    if (block.exchange(false)) {
      entered.set_value();
      release_future.wait();
    }
    return "T";
  };
  Harness h(demopad_model(), clock);
  auto s = h.start().session;
  auto other = h.start().session;
  block = true;
  auto preview = std::async(std::launch::async, [&] { return s->handle_quick_action(QuickAction::kPreview); });
  entered.get_future().wait();
  CHECK(kind_of([&] { s->handle_text("hello"); }) == ErrorKind::kBusy);
  // Other sessions are unaffected.
  CHECK(other->handle_text("Tap save").phase != Phase::kAppSelection);
  release.set_value();
  CHECK(preview.get().preview.has_value());
}
