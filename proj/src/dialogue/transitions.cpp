#include "bugchat/dialogue/transitions.hpp"

namespace bugchat::dialogue {
namespace {

constexpr std::array<std::string_view, kPhaseCount> kPhaseNames = {
    "APP_SELECTION", "OB_DESCRIBE",  "OB_CONFIRM",  "OB_SELECT",
    "EB_DESCRIBE",   "EB_CONFIRM",   "S2R_DESCRIBE", "S2R_CONFIRM",
    "S2R_SELECT",    "S2R_PREDICT_OFFER", "LAST_STEP_CONFIRM", "REPORT_READY"};

}  // namespace

std::string_view to_string(Phase phase) {
  return kPhaseNames[static_cast<std::size_t>(phase)];
}

std::optional<Phase> parse_phase(std::string_view s) {
  for (std::size_t i = 0; i < kPhaseNames.size(); ++i) {
    if (kPhaseNames[i] == s) return static_cast<Phase>(i);
  }
  return std::nullopt;
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kText: return "text";
    case EventKind::kYes: return "yes";
    case EventKind::kNo: return "no";
    case EventKind::kSelection: return "selection";
    case EventKind::kFinish: return "finish";
    case EventKind::kRestart: return "restart";
    case EventKind::kPreview: return "preview";
    case EventKind::kEditStep: return "edit_step";
  }
  return "?";
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kUndefined: return "undefined";
    case Outcome::kDescribe: return "describe";
    case Outcome::kRephrase: return "rephrase";
    case Outcome::kAccept: return "accept";
    case Outcome::kReject: return "reject";
    case Outcome::kSelect: return "select";
    case Outcome::kFinish: return "finish";
    case Outcome::kRestart: return "restart";
    case Outcome::kPreview: return "preview";
    case Outcome::kEdit: return "edit";
    case Outcome::kNotice: return "notice";
    case Outcome::kProtocolError: return "protocol_error";
  }
  return "?";
}

}  // namespace bugchat::dialogue
