#pragma once

#include "choiceless/specker/lemma.hpp"
#include "choiceless/specker/oracle.hpp"
#include "choiceless/specker/thm3.hpp"
#include "choiceless/specker/thm4.hpp"
#include "choiceless/specker/thm5.hpp"

namespace choiceless::specker {

/// Replays any witness kind against a fresh copy of the oracle.
inline Report replay(const Witness& w, const BijectionOracle& oracle) {
  Report basic = replay_basic(w, oracle);
  if (!basic.ok || w.kind != "stop_count") return basic;
  return replay_stop_count(w, oracle);
}

}  // namespace choiceless::specker
