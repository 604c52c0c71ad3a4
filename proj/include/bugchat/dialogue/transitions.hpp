#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace bugchat::dialogue {

enum class Phase : std::uint8_t {
  kAppSelection,
  kObDescribe,
  kObConfirm,
  kObSelect,
  kEbDescribe,
  kEbConfirm,
  kS2rDescribe,
  kS2rConfirm,
  kS2rSelect,
  kS2rPredictOffer,
  kLastStepConfirm,
  kReportReady,
};
inline constexpr std::size_t kPhaseCount = 12;

enum class EventKind : std::uint8_t {
  kText,
  kYes,
  kNo,
  kSelection,
  kFinish,
  kRestart,
  kPreview,
  kEditStep,
};
inline constexpr std::size_t kEventCount = 8;

/// What the session does with an event in a given phase.
enum class Outcome : std::uint8_t {
  kUndefined,   // never present in the table
  kDescribe,    // parse and match the text for the current element
  kRephrase,    // drop pending suggestions, back to *_DESCRIBE, then describe
  kAccept,      // yes
  kReject,      // no
  kSelect,      // option ids
  kFinish,
  kRestart,
  kPreview,
  kEdit,
  kNotice,      // explain what is expected; no state change
  kProtocolError,
};

std::string_view to_string(Phase phase);
std::string_view to_string(EventKind kind);
std::string_view to_string(Outcome outcome);
std::optional<Phase> parse_phase(std::string_view s);

namespace detail {

using O = Outcome;
//                         Text           Yes           No            Selection        Finish           Restart          Preview          EditStep
inline constexpr std::array<std::array<Outcome, kEventCount>, kPhaseCount> kTable{{
    /* APP_SELECTION    */ {O::kNotice,   O::kProtocolError, O::kProtocolError, O::kSelect, O::kProtocolError, O::kRestart, O::kProtocolError, O::kProtocolError},
    /* OB_DESCRIBE      */ {O::kDescribe, O::kProtocolError, O::kProtocolError, O::kProtocolError, O::kFinish, O::kRestart, O::kPreview, O::kEdit},
    /* OB_CONFIRM       */ {O::kRephrase, O::kAccept, O::kReject, O::kProtocolError, O::kFinish, O::kRestart, O::kPreview, O::kEdit},
    /* OB_SELECT        */ {O::kRephrase, O::kProtocolError, O::kProtocolError, O::kSelect, O::kFinish, O::kRestart, O::kPreview, O::kEdit},
    /* EB_DESCRIBE      */ {O::kDescribe, O::kProtocolError, O::kProtocolError, O::kProtocolError, O::kFinish, O::kRestart, O::kPreview, O::kEdit},
    /* EB_CONFIRM       */ {O::kRephrase, O::kAccept, O::kReject, O::kProtocolError, O::kFinish, O::kRestart, O::kPreview, O::kEdit},
    /* S2R_DESCRIBE     */ {O::kDescribe, O::kProtocolError, O::kProtocolError, O::kProtocolError, O::kFinish, O::kRestart, O::kPreview, O::kEdit},
    /* S2R_CONFIRM      */ {O::kRephrase, O::kAccept, O::kReject, O::kProtocolError, O::kFinish, O::kRestart, O::kPreview, O::kEdit},
    /* S2R_SELECT       */ {O::kRephrase, O::kProtocolError, O::kProtocolError, O::kSelect, O::kFinish, O::kRestart, O::kPreview, O::kEdit},
    /* S2R_PREDICT_OFFER*/ {O::kRephrase, O::kAccept, O::kReject, O::kSelect, O::kFinish, O::kRestart, O::kPreview, O::kEdit},
    /* LAST_STEP_CONFIRM*/ {O::kRephrase, O::kAccept, O::kReject, O::kProtocolError, O::kFinish, O::kRestart, O::kPreview, O::kEdit},
    /* REPORT_READY     */ {O::kNotice,   O::kProtocolError, O::kProtocolError, O::kProtocolError, O::kFinish, O::kRestart, O::kPreview, O::kEdit},
}};

constexpr bool table_is_closed() {
  for (const auto& row : kTable) {
    for (auto outcome : row) {
      if (outcome == Outcome::kUndefined) return false;
    }
  }
  return true;
}
static_assert(table_is_closed(), "every (phase, event) pair needs an outcome");

}  // namespace detail

/// The single outcome the transition table assigns to (phase, event).
constexpr Outcome transition(Phase phase, EventKind event) {
  return detail::kTable[static_cast<std::size_t>(phase)][static_cast<std::size_t>(event)];
}

}  // namespace bugchat::dialogue
