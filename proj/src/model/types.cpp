#include "bugchat/model/types.hpp"

#include <array>
#include <utility>

namespace bugchat::model {
namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<Enum, std::string_view>, N>& table,
                           std::string_view s) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table,
                         Enum e) {
  for (const auto& [value, name] : table) {
    if (value == e) return name;
  }
  return "?";
}

constexpr std::array<std::pair<ComponentKind, std::string_view>, 8> kKinds{{
    {ComponentKind::kButton, "BUTTON"},
    {ComponentKind::kTextField, "TEXT_FIELD"},
    {ComponentKind::kCheckbox, "CHECKBOX"},
    {ComponentKind::kListItem, "LIST_ITEM"},
    {ComponentKind::kTextView, "TEXT_VIEW"},
    {ComponentKind::kImage, "IMAGE"},
    {ComponentKind::kMenuItem, "MENU_ITEM"},
    {ComponentKind::kOther, "OTHER"},
}};

constexpr std::array<std::pair<Action, std::string_view>, 7> kActions{{
    {Action::kLaunch, "LAUNCH"},
    {Action::kTap, "TAP"},
    {Action::kLongTap, "LONG_TAP"},
    {Action::kType, "TYPE"},
    {Action::kSwipe, "SWIPE"},
    {Action::kBack, "BACK"},
    {Action::kRotate, "ROTATE"},
}};

constexpr std::array<std::pair<SwipeDirection, std::string_view>, 4> kDirections{{
    {SwipeDirection::kUp, "UP"},
    {SwipeDirection::kDown, "DOWN"},
    {SwipeDirection::kLeft, "LEFT"},
    {SwipeDirection::kRight, "RIGHT"},
}};

constexpr std::array<std::pair<TraceSource, std::string_view>, 2> kSources{{
    {TraceSource::kAutomated, "automated"},
    {TraceSource::kManual, "manual"},
}};

}  // namespace

std::string_view to_string(ComponentKind kind) { return name_of(kKinds, kind); }
std::string_view to_string(Action action) { return name_of(kActions, action); }
std::string_view to_string(SwipeDirection d) { return name_of(kDirections, d); }
std::string_view to_string(TraceSource s) { return name_of(kSources, s); }

std::optional<ComponentKind> parse_component_kind(std::string_view s) {
  return lookup(kKinds, s);
}
std::optional<Action> parse_action(std::string_view s) {
  return lookup(kActions, s);
}
std::optional<SwipeDirection> parse_swipe_direction(std::string_view s) {
  return lookup(kDirections, s);
}
std::optional<TraceSource> parse_trace_source(std::string_view s) {
  return lookup(kSources, s);
}

std::string_view display_name(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::kButton:
      return "button";
    case ComponentKind::kTextField:
      return "text field";
    case ComponentKind::kCheckbox:
      return "checkbox";
    case ComponentKind::kListItem:
      return "list item";
    case ComponentKind::kTextView:
      return "text";
    case ComponentKind::kImage:
      return "image";
    case ComponentKind::kMenuItem:
      return "menu item";
    case ComponentKind::kOther:
      return "component";
  }
  return "component";
}

bool requires_component(Action action) {
  return action == Action::kTap || action == Action::kLongTap ||
         action == Action::kType;
}

}  // namespace bugchat::model
