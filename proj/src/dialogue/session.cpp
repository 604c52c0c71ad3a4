#include "bugchat/dialogue/session.hpp"

#include <algorithm>
#include <set>

#include "bugchat/embedded_data.hpp"
#include "bugchat/errors.hpp"
#include "bugchat/model/model_io.hpp"
#include "bugchat/text/normalize.hpp"

namespace bugchat::dialogue {
namespace {

using model::EdgeId;
using model::Fingerprint;

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::string screen_caption(const model::Screen& screen) {
  std::string caption = text::split_identifier(screen.activity);
  if (screen.window) caption += " (" + *screen.window + ")";
  return caption;
}

std::string plural(std::size_t n, const char* word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

// One event applied to a copy of the session state.
class Turn {
 public:
  Turn(const Engine& engine, SessionState& state) : engine_(engine), s_(state) {}

  std::vector<std::string> messages;
  std::optional<Json> preview;

  void say(std::string text) { messages.push_back(std::move(text)); }

  const model::AppExecutionModel& model() const { return *s_.model; }

  // --- session lifecycle ----------------------------------------------------

  void seed(const std::string& app_id) {
    auto model = engine_.apps().find ? engine_.apps().find(app_id) : nullptr;
    if (!model) throw NotFoundError("unknown app " + app_id);
    s_.app_id = app_id;
    s_.model = std::move(model);
    s_.attempts = 0;
    s_.ob = {};
    s_.eb = {};
    s_.steps.clear();
    s_.current_state.reset();
    clear_pending();

    StepRecord open;
    open.index = 1;
    open.text = "Open the app";
    auto launches = s_.model->launch_edges();
    if (launches.size() == 1) {
      open.edge = launches.front();
      open.source = StepSource::kSuggested;
      s_.current_state = s_.model->edge(launches.front()).target;
    }
    s_.steps.push_back(std::move(open));
    enter(Phase::kObDescribe);
    say("Let's report a problem in " + s_.model->app_name() + " " + s_.model->app_version() +
        ". I recorded \"Open the app\" as the first step.");
    say("What went wrong? Describe the problem you observed.");
  }

  void offer_apps() {
    clear_pending();
    auto apps = engine_.apps().list ? engine_.apps().list() : std::vector<AppChoice>{};
    s_.phase = Phase::kAppSelection;
    if (apps.empty()) {
      say("No apps are available yet. Ask the developers to upload one.");
      s_.pending = apps;
      return;
    }
    for (std::size_t i = 0; i < apps.size(); ++i) {
      add_card(i, apps[i].label, apps[i].icon_url, std::nullopt);
    }
    s_.pending = std::move(apps);
    say("Which app has the problem?");
  }

  void restart() {
    ++s_.segment;
    s_.transcript.push_back({s_.segment, "system", "restarted"});
    if (s_.app_id.empty()) {
      offer_apps();
    } else {
      seed(s_.app_id);
    }
  }

  void finish() {
    clear_pending();
    s_.attempts = 0;
    enter(Phase::kReportReady);
    say("Your bug report is ready.");
  }

  void notice() {
    if (s_.phase == Phase::kReportReady) {
      say("The report is complete. Use Restart to report another problem.");
    } else {
      say("Please pick one of the apps listed.");
    }
  }

  // --- descriptions ---------------------------------------------------------

  void describe(std::string_view text) {
    if (is_blank(text)) {
      say("I did not get a description. Please type one.");
      return;
    }
    auto phrases = engine_.parser().parse_message(text);
    if (phrases.empty()) {
      say("I did not get a description. Please type one.");
      return;
    }
    const auto& phrase = phrases.front();
    s_.pending_text = std::string(text);
    switch (s_.phase) {
      case Phase::kObDescribe: describe_ob(phrase); break;
      case Phase::kEbDescribe: describe_eb(phrase); break;
      case Phase::kS2rDescribe: describe_step(phrase); break;
      default: throw ProtocolError("no description expected in " + std::string(to_string(s_.phase)));
    }
  }

  void rephrase(std::string_view text) {
    if (is_blank(text)) {
      say("I did not get a description. Please type one.");
      return;
    }
    clear_pending();
    switch (s_.phase) {
      case Phase::kObConfirm:
      case Phase::kObSelect: s_.phase = Phase::kObDescribe; break;
      case Phase::kEbConfirm: s_.phase = Phase::kEbDescribe; break;
      default: s_.phase = Phase::kS2rDescribe; break;
    }
    describe(text);
  }

  // --- confirmations --------------------------------------------------------

  void accept() {
    switch (s_.phase) {
      case Phase::kObConfirm: {
        auto result = std::get<match::ScreenMatchResult>(s_.pending);
        store_ob(result.candidates.front().fingerprint);
        break;
      }
      case Phase::kEbConfirm: store_eb(true); break;
      case Phase::kS2rConfirm: {
        auto result = std::get<match::EdgeMatchResult>(s_.pending);
        confirm_edge(result.candidates.front());
        break;
      }
      case Phase::kLastStepConfirm: finish(); break;
      case Phase::kS2rPredictOffer: more_suggestions(); break;
      default: throw ProtocolError("nothing to confirm");
    }
  }

  void reject() {
    switch (s_.phase) {
      case Phase::kObConfirm:
      case Phase::kEbConfirm:
      case Phase::kS2rConfirm: strike(); break;
      case Phase::kLastStepConfirm:
        clear_pending();
        enter(Phase::kS2rDescribe);
        say("OK. What did you do next?");
        break;
      case Phase::kS2rPredictOffer:
        clear_pending();
        enter(Phase::kS2rDescribe);
        say("OK. Please describe the next step you performed.");
        break;
      default: throw ProtocolError("nothing to confirm");
    }
  }

  // --- selections -----------------------------------------------------------

  void select(const std::vector<std::string>& ids) {
    std::vector<std::size_t> chosen;
    for (const auto& id : ids) {
      auto it = s_.options.find(id);
      if (it == s_.options.end()) throw Error(ErrorKind::kInvalidOption, "unknown option " + id);
      if (std::find(chosen.begin(), chosen.end(), it->second) == chosen.end()) {
        chosen.push_back(it->second);
      }
    }
    std::sort(chosen.begin(), chosen.end());

    if (s_.phase == Phase::kS2rPredictOffer) {
      select_predicted(chosen);
      return;
    }
    if (chosen.size() > 1) throw ProtocolError("select exactly one option");

    switch (s_.phase) {
      case Phase::kAppSelection: {
        if (chosen.empty()) {
          say("Please pick one of the apps listed.");
          return;
        }
        auto apps = std::get<std::vector<AppChoice>>(s_.pending);
        seed(apps[chosen.front()].app_id);
        break;
      }
      case Phase::kObSelect: {
        auto result = std::get<match::ScreenMatchResult>(s_.pending);
        if (chosen.empty()) {
          next_page(result.page_count());
          return;
        }
        store_ob(result.candidates[chosen.front()].fingerprint);
        break;
      }
      case Phase::kS2rSelect: {
        auto result = std::get<match::EdgeMatchResult>(s_.pending);
        if (chosen.empty()) {
          next_page(result.page_count());
          return;
        }
        confirm_edge(result.candidates[chosen.front()]);
        break;
      }
      default: throw ProtocolError("nothing to select");
    }
  }

  // --- step editing ---------------------------------------------------------

  void edit(int index, std::string_view text) {
    if (index < 1 || index > static_cast<int>(s_.steps.size())) {
      throw NotFoundError("no step " + std::to_string(index));
    }
    if (index == 1) throw ProtocolError("the first step cannot be edited");
    if (is_blank(text)) throw Error(ErrorKind::kEmptyInput, "empty step text");

    auto pos = static_cast<std::size_t>(index - 1);
    bool last = pos + 1 == s_.steps.size();
    auto before = state_before(pos);
    auto phrases = engine_.parser().parse_message(text);

    StepRecord step;
    step.text = std::string(text);
    step.source = StepSource::kEdited;
    std::optional<StepRecord> prefix;
    if (!phrases.empty()) {
      auto result = engine_.matcher().match_step(model(), phrases.front(), before);
      if (result.verdict == match::Verdict::kSingle) {
        const auto& c = result.candidates.front();
        step.edge = c.edge;
        step.screenshot = model().edge(c.edge).screenshot;
        if (c.inferred_prefix) prefix = inferred_step(*c.inferred_prefix);
      }
    }
    if (step.edge && prefix && model().edge(*prefix->edge).action == model::Action::kLaunch &&
        !s_.steps.front().edge && pos == 1) {
      bind_launch(*prefix->edge);
      prefix.reset();
    }
    bool matched = step.edge.has_value();
    s_.steps[pos] = std::move(step);
    if (prefix) s_.steps.insert(s_.steps.begin() + static_cast<std::ptrdiff_t>(pos), *prefix);
    renumber();

    if (matched) {
      say("Step " + std::to_string(index) + " updated.");
    } else {
      say("Step " + std::to_string(index) + " updated, but I could not match it to the app.");
    }
    if (last && s_.steps.back().matched()) {
      auto target = model().edge(*s_.steps.back().edge).target;
      if (s_.current_state != target) {
        s_.current_state = target;
        switch (s_.phase) {
          case Phase::kS2rConfirm:
          case Phase::kS2rSelect:
          case Phase::kS2rPredictOffer:
          case Phase::kLastStepConfirm:
          case Phase::kS2rDescribe: after_step(); break;
          default: break;
        }
      }
    }
    if (std::any_of(s_.steps.begin(), s_.steps.end(), [](auto& st) { return st.stale; })) {
      say("Some later steps no longer follow from the edited one; please review them.");
    }
  }

  // --- helpers shared with Session ---------------------------------------------

  void enter(Phase phase) {
    s_.phase = phase;
    s_.tips_stage = std::string(tip_stage(phase));
  }

 private:
  void clear_pending() {
    s_.pending = std::monostate{};
    s_.pending_text.clear();
    s_.page = 0;
    s_.asking_more = false;
    s_.cards.clear();
    s_.options.clear();
  }

  void add_card(std::size_t index, std::string caption, std::optional<std::string> image,
                std::optional<model::Bounds> bounds) {
    std::string id = "opt-" + std::to_string(s_.next_option++);
    s_.options[id] = index;
    s_.cards.push_back({id, std::move(caption), std::move(image), bounds});
  }

  void clear_cards() {
    s_.cards.clear();
    s_.options.clear();
  }

  void screen_cards(const match::ScreenMatchResult& result) {
    clear_cards();
    auto page = result.page(s_.page);
    std::size_t first = s_.page * result.page_size;
    for (std::size_t i = 0; i < page.size(); ++i) {
      const auto& screen = model().screen(page[i].fingerprint);
      std::optional<std::string> image;
      if (screen.screenshot) image = capture_url(s_.app_id, page[i].fingerprint);
      add_card(first + i, screen_caption(screen), image, std::nullopt);
    }
  }

  void edge_card(std::size_t index, EdgeId id, std::string caption) {
    const auto& e = model().edge(id);
    std::optional<std::string> image;
    if (e.screenshot) image = capture_url(s_.app_id, e.source);
    add_card(index, std::move(caption), image, e.highlight_bounds);
  }

  void edge_cards(const match::EdgeMatchResult& result) {
    clear_cards();
    auto page = result.page(s_.page);
    std::size_t first = s_.page * result.page_size;
    for (std::size_t i = 0; i < page.size(); ++i) {
      edge_card(first + i, page[i].edge, predict::caption_edge(model().edge(page[i].edge)));
    }
  }

  void prediction_cards(const predict::PredictionCursor& cursor) {
    clear_cards();
    for (const auto& suggestion : cursor.batch(model())) {
      edge_card(static_cast<std::size_t>(suggestion.rank), suggestion.edge, suggestion.caption);
    }
  }

  void describe_ob(const text::ParsedPhrase& phrase) {
    auto result = engine_.matcher().match_screen(model(), phrase);
    if (result.verdict == match::Verdict::kNone) {
      strike();
      return;
    }
    s_.pending = result;
    s_.page = 0;
    screen_cards(result);
    if (result.verdict == match::Verdict::kSingle) {
      enter(Phase::kObConfirm);
      say("Is this the screen where you saw the problem?");
    } else {
      enter(Phase::kObSelect);
      say("Which of these screens shows the problem?");
      more_hint(result.page_count());
    }
  }

  void describe_eb(const text::ParsedPhrase& phrase) {
    if (!s_.ob.fingerprint) {
      store_eb(false);
      return;
    }
    if (!engine_.matcher().match_eb_against_ob(model(), phrase, *s_.ob.fingerprint)) {
      strike();
      return;
    }
    clear_cards();
    const auto& screen = model().screen(*s_.ob.fingerprint);
    std::optional<std::string> image;
    if (screen.screenshot) image = capture_url(s_.app_id, *s_.ob.fingerprint);
    add_card(0, screen_caption(screen), image, std::nullopt);
    enter(Phase::kEbConfirm);
    say("So on this screen you expected: \"" + s_.pending_text + "\". Is that right?");
  }

  void describe_step(const text::ParsedPhrase& phrase) {
    auto from = s_.current_state.value_or(model::start_fingerprint());
    auto result = engine_.matcher().match_step(model(), phrase, from);
    if (result.verdict == match::Verdict::kNone) {
      strike();
      return;
    }
    s_.pending = result;
    s_.page = 0;
    edge_cards(result);
    if (result.verdict == match::Verdict::kSingle) {
      enter(Phase::kS2rConfirm);
      say("Is this the step you performed?");
    } else {
      enter(Phase::kS2rSelect);
      say("Which of these steps did you perform?");
      more_hint(result.page_count());
    }
  }

  void more_hint(std::size_t page_count) {
    if (s_.page + 1 < page_count) say("Select none to see more options.");
  }

  void next_page(std::size_t page_count) {
    if (s_.page + 1 >= page_count) {
      strike();
      return;
    }
    ++s_.page;
    if (auto* screens = std::get_if<match::ScreenMatchResult>(&s_.pending)) {
      screen_cards(*screens);
    } else {
      edge_cards(std::get<match::EdgeMatchResult>(s_.pending));
    }
    say("Here are more options.");
    more_hint(page_count);
  }

  Phase describe_phase() const {
    switch (s_.phase) {
      case Phase::kObDescribe:
      case Phase::kObConfirm:
      case Phase::kObSelect: return Phase::kObDescribe;
      case Phase::kEbDescribe:
      case Phase::kEbConfirm: return Phase::kEbDescribe;
      default: return Phase::kS2rDescribe;
    }
  }

  // A failed attempt at the current element; the third one records the
  // text unmatched and moves on.
  void strike() {
    auto phase = describe_phase();
    std::string text = s_.pending_text;
    clear_pending();
    ++s_.attempts;
    if (s_.attempts < kMaxAttempts) {
      enter(phase);
      const auto& tips = engine_.tips().for_stage(tip_stage(phase));
      say("I could not match that to the app. Could you rephrase it?");
      if (!tips.empty()) {
        say("Tip: " + tips[static_cast<std::size_t>(s_.attempts - 1) % tips.size()]);
      }
      return;
    }
    s_.attempts = 0;
    switch (phase) {
      case Phase::kObDescribe:
        s_.ob = {text, parse_or_none(text), std::nullopt, false};
        enter(Phase::kEbDescribe);
        say("I recorded your description as is.");
        say("What did you expect the app to do instead?");
        break;
      case Phase::kEbDescribe:
        s_.eb = {text, parse_or_none(text), std::nullopt, false};
        enter_steps("I recorded your description as is.");
        break;
      default: {
        StepRecord step;
        step.text = text;
        append(std::move(step));
        enter(Phase::kS2rDescribe);
        say("I recorded the step as you wrote it. What did you do next?");
        break;
      }
    }
  }

  std::optional<text::ParsedPhrase> parse_or_none(const std::string& text) const {
    auto phrases = engine_.parser().parse_message(text);
    if (phrases.empty()) return std::nullopt;
    return phrases.front();
  }

  void store_ob(const Fingerprint& fp) {
    s_.ob = {s_.pending_text, parse_or_none(s_.pending_text), fp, true};
    clear_pending();
    s_.attempts = 0;
    enter(Phase::kEbDescribe);
    say("Got it. What did you expect the app to do instead?");
  }

  void store_eb(bool verified) {
    s_.eb = {s_.pending_text, parse_or_none(s_.pending_text), s_.ob.fingerprint, verified};
    clear_pending();
    s_.attempts = 0;
    enter_steps("Thanks.");
  }

  void enter_steps(const std::string& lead) {
    enter(Phase::kS2rDescribe);
    say(lead + " Now tell me the steps you performed after opening the app, one at a time.");
  }

  StepRecord inferred_step(EdgeId id) const {
    StepRecord step;
    const auto& e = model().edge(id);
    step.text = predict::caption_edge(e);
    step.edge = id;
    step.screenshot = e.screenshot;
    step.inferred = true;
    step.source = StepSource::kSuggested;
    return step;
  }

  void bind_launch(EdgeId id) {
    auto& open = s_.steps.front();
    open.edge = id;
    open.source = StepSource::kSuggested;
  }

  void append(StepRecord step) {
    s_.steps.push_back(std::move(step));
    renumber();
  }

  void renumber() {
    std::optional<Fingerprint> state;
    for (std::size_t i = 0; i < s_.steps.size(); ++i) {
      auto& step = s_.steps[i];
      step.index = static_cast<int>(i) + 1;
      step.stale = false;
      if (step.edge) {
        const auto& e = model().edge(*step.edge);
        step.stale = state && *state != e.source;
        state = e.target;
      } else {
        state.reset();
      }
    }
  }

  Fingerprint state_before(std::size_t pos) const {
    for (std::size_t j = pos; j-- > 0;) {
      if (s_.steps[j].edge) return model().edge(*s_.steps[j].edge).target;
    }
    return model::start_fingerprint();
  }

  void confirm_edge(const match::EdgeCandidate& candidate) {
    std::string text = s_.pending_text;
    if (candidate.inferred_prefix) {
      const auto& bridge = model().edge(*candidate.inferred_prefix);
      if (bridge.action == model::Action::kLaunch && !s_.steps.front().edge) {
        bind_launch(*candidate.inferred_prefix);
      } else {
        append(inferred_step(*candidate.inferred_prefix));
      }
    }
    StepRecord step;
    step.text = text;
    step.edge = candidate.edge;
    step.screenshot = model().edge(candidate.edge).screenshot;
    append(std::move(step));
    s_.current_state = model().edge(candidate.edge).target;
    s_.attempts = 0;
    clear_pending();
    after_step();
  }

  // After the state advanced: last-step question, prediction, or the next
  // manual step.
  void after_step() {
    clear_pending();
    if (s_.ob.fingerprint && s_.current_state == s_.ob.fingerprint) {
      enter(Phase::kLastStepConfirm);
      say("You reached the screen where the problem happened. Was this the last step?");
      return;
    }
    if (s_.ob.fingerprint && s_.current_state) {
      if (auto cursor = predict::start_prediction(model(), *s_.current_state, *s_.ob.fingerprint)) {
        s_.pending = *cursor;
        prediction_cards(*cursor);
        enter(Phase::kS2rPredictOffer);
        say("Did you perform any of these steps next? Select all that apply, or none.");
        return;
      }
    }
    enter(Phase::kS2rDescribe);
    say("What did you do next?");
  }

  void more_suggestions() {
    auto cursor = std::get<predict::PredictionCursor>(s_.pending);
    auto advance = predict::next_batch(model(), cursor, *s_.current_state, std::nullopt);
    if (!advance.cursor) {
      clear_pending();
      enter(Phase::kS2rDescribe);
      say("I have no more suggestions. Please describe the next step you performed.");
      return;
    }
    s_.pending = *advance.cursor;
    s_.asking_more = false;
    prediction_cards(*advance.cursor);
    say("Here are more suggested steps. Select all that you performed, or none.");
  }

  void select_predicted(const std::vector<std::size_t>& ranks) {
    auto cursor = std::get<predict::PredictionCursor>(s_.pending);
    if (ranks.empty()) {
      bool more = !s_.asking_more && cursor.offset + predict::kBatchSize < cursor.path.size();
      if (more) {
        s_.asking_more = true;
        clear_cards();
        say("Do you want additional suggestions?");
        return;
      }
      clear_pending();
      enter(Phase::kS2rDescribe);
      say("OK. Please describe the next step you performed.");
      return;
    }
    std::set<std::size_t> chosen(ranks.begin(), ranks.end());
    int last = static_cast<int>(ranks.back());
    auto advance = predict::next_batch(model(), cursor, *s_.current_state, last);
    for (std::size_t i = 0; i < advance.accepted.size(); ++i) {
      EdgeId id = advance.accepted[i];
      bool picked = i >= cursor.offset && chosen.count(i - cursor.offset + 1);
      StepRecord step = inferred_step(id);
      step.inferred = !picked;
      append(std::move(step));
      s_.current_state = model().edge(id).target;
    }
    say("Added " + plural(advance.accepted.size(), "step") + ".");
    clear_pending();
    if (s_.ob.fingerprint && s_.current_state == s_.ob.fingerprint) {
      after_step();
      return;
    }
    if (advance.cursor) {
      s_.pending = *advance.cursor;
      prediction_cards(*advance.cursor);
      enter(Phase::kS2rPredictOffer);
      say("Did you perform any of these steps next? Select all that apply, or none.");
      return;
    }
    enter(Phase::kS2rDescribe);
    say("What did you do next?");
  }

  const Engine& engine_;
  SessionState& s_;
};

}  // namespace

// --- small helpers ------------------------------------------------------------

std::string_view to_string(StepSource source) {
  switch (source) {
    case StepSource::kTyped: return "typed";
    case StepSource::kSuggested: return "suggested";
    case StepSource::kEdited: return "edited";
  }
  return "?";
}

std::string_view to_string(QuickAction action) {
  switch (action) {
    case QuickAction::kFinish: return "finish";
    case QuickAction::kRestart: return "restart";
    case QuickAction::kPreview: return "preview";
  }
  return "?";
}

std::optional<QuickAction> parse_quick_action(std::string_view s) {
  if (s == "finish") return QuickAction::kFinish;
  if (s == "restart") return QuickAction::kRestart;
  if (s == "preview") return QuickAction::kPreview;
  return std::nullopt;
}

std::string capture_url(const std::string& app_id, const model::Fingerprint& fp) {
  return "/apps/" + app_id + "/screens/" + fp.str() + "/capture";
}

std::string_view tip_stage(Phase phase) {
  switch (phase) {
    case Phase::kAppSelection: return "APP";
    case Phase::kObDescribe: return "OB";
    case Phase::kEbDescribe: return "EB";
    case Phase::kS2rDescribe: return "S2R";
    case Phase::kObSelect:
    case Phase::kS2rSelect: return "SELECT";
    case Phase::kS2rPredictOffer: return "PREDICT";
    case Phase::kObConfirm:
    case Phase::kEbConfirm:
    case Phase::kS2rConfirm:
    case Phase::kLastStepConfirm: return "CONFIRM";
    case Phase::kReportReady: return "REPORT";
  }
  return "OB";
}

const Tips& Tips::builtin() {
  static const Tips tips = [] {
    auto text = embedded_file("tips.json");
    if (!text) throw Error(ErrorKind::kIo, "tips.json is not embedded");
    return parse(*text);
  }();
  return tips;
}

Tips Tips::parse(std::string_view json_text) {
  auto j = parse_json(json_text);
  require_object(j, "tips");
  Tips tips;
  for (const auto& [stage, list] : j.items()) {
    if (!list.is_array()) throw ValidationError("expected an array", "tips." + stage);
    auto& out = tips.tips_[stage];
    for (const auto& tip : list) {
      if (!tip.is_string()) throw ValidationError("expected strings", "tips." + stage);
      out.push_back(tip.get<std::string>());
    }
  }
  return tips;
}

const std::vector<std::string>& Tips::for_stage(std::string_view stage) const {
  static const std::vector<std::string> none;
  auto it = tips_.find(stage);
  return it == tips_.end() ? none : it->second;
}

AppDirectory single_app(std::shared_ptr<const model::AppExecutionModel> model) {
  AppDirectory dir;
  dir.list = [model] {
    return std::vector<AppChoice>{
        {model->app_id(), model->app_name() + " " + model->app_version(), std::nullopt}};
  };
  dir.find = [model](const std::string& id) {
    return id == model->app_id() ? model : nullptr;
  };
  return dir;
}

Engine::Engine(AppDirectory apps, const text::Lexicon& lexicon, match::MatchConfig config,
               const Tips& tips, Clock clock)
    : apps_(std::move(apps)),
      parser_(lexicon),
      matcher_(lexicon, config),
      tips_(&tips),
      clock_(std::move(clock)) {}

// --- responses ------------------------------------------------------------------

namespace {

DialogueResponse build_response(const Engine& engine, const SessionState& s,
                                std::vector<std::string> messages) {
  DialogueResponse r;
  r.session_id = s.session_id;
  r.app_id = s.app_id;
  r.phase = s.phase;
  r.messages = std::move(messages);
  r.suggestion_cards = s.cards;
  r.multi_select = s.phase == Phase::kS2rPredictOffer;
  for (const auto& step : s.steps) {
    StepView view{step, std::nullopt, std::nullopt};
    if (step.edge) {
      const auto& e = s.model->edge(*step.edge);
      if (step.screenshot) view.image_url = capture_url(s.app_id, e.source);
      view.highlight_bounds = e.highlight_bounds;
    }
    r.reported_steps.push_back(std::move(view));
  }
  for (auto it = r.reported_steps.rbegin();
       it != r.reported_steps.rend() && r.capture_panel.size() < kCapturePanelSize; ++it) {
    if (it->image_url) r.capture_panel.push_back({it->step.index, *it->image_url});
  }
  std::reverse(r.capture_panel.begin(), r.capture_panel.end());
  r.tips = engine.tips().for_stage(tip_stage(s.phase));
  r.can_finish = s.phase != Phase::kAppSelection && s.phase != Phase::kReportReady;
  return r;
}

}  // namespace

Json to_json(const DialogueResponse& r) {
  Json j = Json::object();
  j["session_id"] = r.session_id;
  j["app_id"] = r.app_id.empty() ? Json(nullptr) : Json(r.app_id);
  j["phase"] = std::string(to_string(r.phase));
  j["messages"] = r.messages;
  j["suggestion_cards"] = Json::array();
  for (const auto& c : r.suggestion_cards) {
    j["suggestion_cards"].push_back(
        {{"id", c.id},
         {"caption", c.caption},
         {"image_url", c.image_url ? Json(*c.image_url) : Json(nullptr)},
         {"highlight_bounds", c.highlight_bounds ? model::to_json(*c.highlight_bounds) : Json(nullptr)}});
  }
  j["multi_select"] = r.multi_select;
  j["reported_steps"] = Json::array();
  for (const auto& v : r.reported_steps) {
    j["reported_steps"].push_back(
        {{"index", v.step.index},
         {"text", v.step.text},
         {"matched", v.step.matched()},
         {"inferred", v.step.inferred},
         {"source", std::string(to_string(v.step.source))},
         {"stale", v.step.stale},
         {"screenshot", v.step.screenshot ? Json(*v.step.screenshot) : Json(nullptr)},
         {"image_url", v.image_url ? Json(*v.image_url) : Json(nullptr)},
         {"highlight_bounds", v.highlight_bounds ? model::to_json(*v.highlight_bounds) : Json(nullptr)}});
  }
  j["capture_panel"] = Json::array();
  for (const auto& c : r.capture_panel) {
    j["capture_panel"].push_back({{"step_index", c.step_index}, {"image_url", c.image_url}});
  }
  j["tips"] = r.tips;
  j["can_finish"] = r.can_finish;
  if (r.preview) j["preview"] = *r.preview;
  return j;
}

report::BugReport generate_report(const SessionState& s, std::string created_at) {
  report::CollectedReport c;
  c.ob_text = s.ob.raw_text;
  c.ob_fingerprint = s.ob.fingerprint;
  c.ob_matched = s.ob.quality;
  c.eb_text = s.eb.raw_text;
  c.eb_matched = s.eb.quality;
  c.draft = s.phase != Phase::kReportReady;
  for (const auto& step : s.steps) c.steps.push_back({step.text, step.edge, step.inferred, std::string(to_string(step.source))});
  return report::generate_report(*s.model, c, std::move(created_at));
}

// --- Session --------------------------------------------------------------------

Session::Session(const Engine& engine, std::string session_id) : engine_(&engine) {
  state_.session_id = std::move(session_id);
  state_.tips_stage = std::string(tip_stage(Phase::kAppSelection));
}

template <typename F>
DialogueResponse Session::apply(EventKind kind, std::string user_text, F&& handler) {
  std::unique_lock lock(mutex_, std::try_to_lock);
  if (!lock.owns_lock()) throw Error(ErrorKind::kBusy, "session is handling another event");

  auto outcome = transition(state_.phase, kind);
  if (outcome == Outcome::kProtocolError) {
    throw ProtocolError(std::string(to_string(kind)) + " is not accepted in " +
                        std::string(to_string(state_.phase)));
  }
  SessionState next = state_;
  Turn turn(*engine_, next);
  handler(turn, outcome, next);
  next.transcript.push_back({next.segment, "user", std::move(user_text)});
  for (const auto& m : turn.messages) next.transcript.push_back({next.segment, "bot", m});
  auto response = build_response(*engine_, next, turn.messages);
  response.preview = std::move(turn.preview);
  state_ = std::move(next);
  return response;
}

DialogueResponse Session::open(std::optional<std::string> app_id) {
  std::unique_lock lock(mutex_, std::try_to_lock);
  if (!lock.owns_lock()) throw Error(ErrorKind::kBusy, "session is handling another event");
  SessionState next = state_;
  Turn turn(*engine_, next);
  if (app_id) {
    turn.seed(*app_id);
  } else {
    turn.offer_apps();
  }
  for (const auto& m : turn.messages) next.transcript.push_back({next.segment, "bot", m});
  auto response = build_response(*engine_, next, turn.messages);
  state_ = std::move(next);
  return response;
}

DialogueResponse Session::handle_text(std::string_view text) {
  return apply(EventKind::kText, std::string(text), [&](Turn& turn, Outcome outcome, SessionState&) {
    switch (outcome) {
      case Outcome::kDescribe: turn.describe(text); break;
      case Outcome::kRephrase: turn.rephrase(text); break;
      default: turn.notice(); break;
    }
  });
}

DialogueResponse Session::handle_confirmation(bool yes) {
  return apply(yes ? EventKind::kYes : EventKind::kNo, yes ? "yes" : "no",
               [&](Turn& turn, Outcome outcome, SessionState&) {
                 if (outcome == Outcome::kAccept) {
                   turn.accept();
                 } else {
                   turn.reject();
                 }
               });
}

DialogueResponse Session::handle_selection(const std::vector<std::string>& option_ids) {
  std::string text = "selected:";
  for (const auto& id : option_ids) text += " " + id;
  if (option_ids.empty()) text += " none";
  return apply(EventKind::kSelection, text,
               [&](Turn& turn, Outcome, SessionState&) { turn.select(option_ids); });
}

DialogueResponse Session::handle_quick_action(QuickAction action) {
  EventKind kind = action == QuickAction::kFinish    ? EventKind::kFinish
                   : action == QuickAction::kRestart ? EventKind::kRestart
                                                     : EventKind::kPreview;
  return apply(kind, "[" + std::string(to_string(action)) + "]",
               [&](Turn& turn, Outcome outcome, SessionState& next) {
                 switch (outcome) {
                   case Outcome::kFinish: turn.finish(); break;
                   case Outcome::kRestart: turn.restart(); break;
                   default:
                     turn.preview = report::to_json(generate_report(next, engine_->now()));
                     turn.say("Here is a preview of your report.");
                     break;
                 }
               });
}

DialogueResponse Session::edit_step(int index, std::string_view text) {
  return apply(EventKind::kEditStep,
               "[edit step " + std::to_string(index) + "] " + std::string(text),
               [&](Turn& turn, Outcome, SessionState&) { turn.edit(index, text); });
}

DialogueResponse Session::view() const {
  std::lock_guard lock(mutex_);
  return build_response(*engine_, state_, {});
}

SessionState Session::snapshot() const {
  std::lock_guard lock(mutex_);
  return state_;
}

report::BugReport Session::report() const {
  auto state = snapshot();
  if (!state.model) throw ProtocolError("no app selected");
  return generate_report(state, engine_->now());
}

std::vector<std::string> Session::tips() const {
  std::lock_guard lock(mutex_);
  return engine_->tips().for_stage(tip_stage(state_.phase));
}

StartedSession start_session(const Engine& engine, std::string session_id,
                             std::optional<std::string> app_id) {
  auto session = std::make_shared<Session>(engine, std::move(session_id));
  auto response = session->open(std::move(app_id));
  return {std::move(session), std::move(response)};
}

}  // namespace bugchat::dialogue
