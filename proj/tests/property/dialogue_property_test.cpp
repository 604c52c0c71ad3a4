#include <doctest.h>

#include "support/dialogue_fuzz.hpp"

using namespace bugchat::testing;

TEST_CASE("dialogue invariants over random conversations") {
  DialogueFuzzOptions options;
  options.seed = 7;
  auto result = run_dialogue_fuzz(options);
  for (const auto& v : result.violations) MESSAGE(v);
  CHECK(result.violations.empty());
  CHECK(result.sequences >= 1000);
  CHECK(result.max_cards <= 5);
  // The random walk must actually reach the interesting phases.
  for (const char* phase : {"OB_CONFIRM", "OB_SELECT", "EB_DESCRIBE", "S2R_DESCRIBE", "S2R_CONFIRM",
                            "S2R_SELECT", "S2R_PREDICT_OFFER", "LAST_STEP_CONFIRM"}) {
    CAPTURE(phase);
    CHECK(result.phase_visits[phase] > 0);
  }
  CHECK(result.predicted_steps > 0);
  CHECK(result.strikes_recorded > 0);
  for (const auto& [phase, visits] : result.phase_visits) MESSAGE(phase << " " << visits);
  MESSAGE("events=" << result.events << " rejected=" << result.rejected_events
                    << " predicted_steps=" << result.predicted_steps);
}
