#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bugchat::model {

enum class ComponentKind : std::uint8_t {
  kButton,
  kTextField,
  kCheckbox,
  kListItem,
  kTextView,
  kImage,
  kMenuItem,
  kOther,
};

// Declaration order is the documented edge ordering.
enum class Action : std::uint8_t {
  kLaunch,
  kTap,
  kLongTap,
  kType,
  kSwipe,
  kBack,
  kRotate,
};

enum class SwipeDirection : std::uint8_t { kUp, kDown, kLeft, kRight };

enum class TraceSource : std::uint8_t { kAutomated, kManual };

std::string_view to_string(ComponentKind kind);
std::string_view to_string(Action action);
std::string_view to_string(SwipeDirection direction);
std::string_view to_string(TraceSource source);

std::optional<ComponentKind> parse_component_kind(std::string_view s);
std::optional<Action> parse_action(std::string_view s);
std::optional<SwipeDirection> parse_swipe_direction(std::string_view s);
std::optional<TraceSource> parse_trace_source(std::string_view s);

/// Human-readable kind name used in captions ("text field").
std::string_view display_name(ComponentKind kind);

/// TAP, LONG_TAP and TYPE act on a component; the rest do not.
bool requires_component(Action action);

/// Content hash identifying a screen state.
class Fingerprint {
 public:
  Fingerprint() = default;
  explicit Fingerprint(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  auto operator<=>(const Fingerprint&) const = default;

 private:
  std::string value_;
};

/// Index of an edge in `AppExecutionModel::edges()`. Edge ids follow the
/// lexicographic edge-key order, so comparing ids compares keys.
struct EdgeId {
  std::uint32_t value = 0;
  auto operator<=>(const EdgeId&) const = default;
};

struct Bounds {
  int x1 = 0;
  int y1 = 0;
  int x2 = 0;
  int y2 = 0;

  bool well_formed() const { return x1 <= x2 && y1 <= y2; }
  auto operator<=>(const Bounds&) const = default;
};

/// The identity-relevant part of a component: geometry and ids excluded.
struct ComponentSignature {
  ComponentKind kind = ComponentKind::kOther;
  std::string text;
  std::string content_description;

  auto operator<=>(const ComponentSignature&) const = default;
};

struct GuiComponent {
  std::string uid;
  ComponentKind kind = ComponentKind::kOther;
  std::string text;
  std::string content_description;
  Bounds bounds;
  std::optional<std::string> parent;

  ComponentSignature signature() const {
    return {kind, text, content_description};
  }
  bool operator==(const GuiComponent&) const = default;
};

struct Screen {
  Fingerprint fingerprint;
  std::string activity;
  std::optional<std::string> window;
  std::vector<GuiComponent> components;
  std::optional<std::string> screenshot;

  bool operator==(const Screen&) const = default;
};

/// What identifies an edge: two traversals with equal keys merge.
struct EdgeKey {
  Fingerprint source;
  Action action = Action::kTap;
  std::optional<ComponentSignature> component;
  std::optional<SwipeDirection> swipe_direction;
  Fingerprint target;

  auto operator<=>(const EdgeKey&) const = default;
};

struct Interaction {
  Fingerprint source;
  Fingerprint target;
  Action action = Action::kTap;
  std::optional<ComponentSignature> target_component;
  std::optional<SwipeDirection> swipe_direction;
  std::int64_t weight = 1;
  std::optional<std::string> screenshot;
  std::optional<Bounds> highlight_bounds;

  EdgeKey key() const {
    return {source, action, target_component, swipe_direction, target};
  }
  bool operator==(const Interaction&) const = default;
};

}  // namespace bugchat::model

template <>
struct std::hash<bugchat::model::Fingerprint> {
  std::size_t operator()(const bugchat::model::Fingerprint& f) const noexcept {
    return std::hash<std::string>{}(f.str());
  }
};
