#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bugchat/clock.hpp"
#include "bugchat/dialogue/transitions.hpp"
#include "bugchat/json_util.hpp"
#include "bugchat/match/matcher.hpp"
#include "bugchat/predict/predictor.hpp"
#include "bugchat/report/report.hpp"
#include "bugchat/text/parser.hpp"

namespace bugchat::dialogue {

inline constexpr int kMaxAttempts = 3;
inline constexpr std::size_t kCapturePanelSize = 3;

enum class StepSource : std::uint8_t { kTyped, kSuggested, kEdited };
std::string_view to_string(StepSource source);

enum class QuickAction : std::uint8_t { kFinish, kRestart, kPreview };
std::string_view to_string(QuickAction action);
std::optional<QuickAction> parse_quick_action(std::string_view s);

/// OB or EB as the reporter described it.
struct ElementRecord {
  std::string raw_text;
  std::optional<text::ParsedPhrase> phrase;
  std::optional<model::Fingerprint> fingerprint;
  bool quality = false;  // matched (OB) or verified against the OB screen (EB)
};

struct StepRecord {
  int index = 0;
  std::string text;
  std::optional<model::EdgeId> edge;
  std::optional<std::string> screenshot;
  bool inferred = false;
  StepSource source = StepSource::kTyped;
  bool stale = false;  // does not continue from the step before it

  bool matched() const { return edge.has_value(); }
};

struct SuggestionCard {
  std::string id;
  std::string caption;
  std::optional<std::string> image_url;
  std::optional<model::Bounds> highlight_bounds;
};

struct StepView {
  StepRecord step;
  std::optional<std::string> image_url;
  std::optional<model::Bounds> highlight_bounds;
};

struct CaptureView {
  int step_index = 0;
  std::string image_url;
};

struct TranscriptEntry {
  int segment = 0;  // restart opens a new segment
  std::string role;  // "user", "bot" or "system"
  std::string text;
};

struct DialogueResponse {
  std::string session_id;
  std::string app_id;
  Phase phase = Phase::kAppSelection;
  std::vector<std::string> messages;
  std::vector<SuggestionCard> suggestion_cards;
  bool multi_select = false;
  std::vector<StepView> reported_steps;
  std::vector<CaptureView> capture_panel;
  std::vector<std::string> tips;
  bool can_finish = false;
  std::optional<Json> preview;
};

Json to_json(const DialogueResponse& response);

/// Stage-keyed tip strings ("OB", "S2R", ...).
class Tips {
 public:
  static const Tips& builtin();
  static Tips parse(std::string_view json_text);

  const std::vector<std::string>& for_stage(std::string_view stage) const;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> tips_;
};

std::string_view tip_stage(Phase phase);

struct AppChoice {
  std::string app_id;
  std::string label;
  std::optional<std::string> icon_url;
};

/// Where sessions find apps; `find` returns nullptr for unknown ids.
struct AppDirectory {
  std::function<std::vector<AppChoice>()> list;
  std::function<std::shared_ptr<const model::AppExecutionModel>(const std::string&)> find;
};

/// A directory serving one model.
AppDirectory single_app(std::shared_ptr<const model::AppExecutionModel> model);

/// Shared, immutable collaborators of every session.
class Engine {
 public:
  explicit Engine(AppDirectory apps, const text::Lexicon& lexicon = text::Lexicon::builtin(),
                  match::MatchConfig config = {}, const Tips& tips = Tips::builtin(),
                  Clock clock = system_clock());

  const AppDirectory& apps() const { return apps_; }
  const text::SentenceParser& parser() const { return parser_; }
  const match::Matcher& matcher() const { return matcher_; }
  const Tips& tips() const { return *tips_; }
  std::string now() const { return clock_(); }

 private:
  AppDirectory apps_;
  text::SentenceParser parser_;
  match::Matcher matcher_;
  const Tips* tips_;
  Clock clock_;
};

/// Candidates the reporter is currently looking at.
using Pending = std::variant<std::monostate, match::ScreenMatchResult, match::EdgeMatchResult,
                             predict::PredictionCursor, std::vector<AppChoice>>;

struct SessionState {
  std::string session_id;
  std::string app_id;
  std::shared_ptr<const model::AppExecutionModel> model;
  Phase phase = Phase::kAppSelection;
  int attempts = 0;
  ElementRecord ob;
  ElementRecord eb;
  std::vector<StepRecord> steps;
  std::optional<model::Fingerprint> current_state;

  Pending pending;
  std::string pending_text;  // the description behind `pending`
  std::size_t page = 0;
  bool asking_more = false;  // predict offer turned into "more suggestions?"
  std::vector<SuggestionCard> cards;
  std::map<std::string, std::size_t> options;  // option id -> candidate index or rank
  std::uint64_t next_option = 1;

  std::vector<TranscriptEntry> transcript;
  int segment = 0;
  std::string tips_stage;
};

/// One conversation. Events are serialized: a second event arriving while
/// one is being handled fails with Error(kBusy). Failed events leave the
/// state untouched.
class Session {
 public:
  Session(const Engine& engine, std::string session_id);

  /// Binds the app and seeds step 1. Throws NotFoundError.
  DialogueResponse open(std::optional<std::string> app_id);

  DialogueResponse handle_text(std::string_view text);
  DialogueResponse handle_confirmation(bool yes);
  DialogueResponse handle_selection(const std::vector<std::string>& option_ids);
  DialogueResponse handle_quick_action(QuickAction action);
  DialogueResponse edit_step(int index, std::string_view text);

  /// The panels as they stand, without messages.
  DialogueResponse view() const;
  SessionState snapshot() const;
  /// Draft unless the session is REPORT_READY.
  report::BugReport report() const;
  std::vector<std::string> tips() const;

 private:
  template <typename F>
  DialogueResponse apply(EventKind kind, std::string user_text, F&& handler);

  const Engine* engine_;
  mutable std::mutex mutex_;
  SessionState state_;
};

struct StartedSession {
  std::shared_ptr<Session> session;
  DialogueResponse response;
};

/// Without an app id the session starts in APP_SELECTION.
StartedSession start_session(const Engine& engine, std::string session_id,
                             std::optional<std::string> app_id);

/// Report from a state snapshot (used by `Session::report`).
report::BugReport generate_report(const SessionState& state, std::string created_at);

/// "/apps/<app_id>/screens/<fingerprint>/capture".
std::string capture_url(const std::string& app_id, const model::Fingerprint& fp);

}  // namespace bugchat::dialogue
