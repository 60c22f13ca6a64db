#pragma once

#include <string>

#include "json.hpp"

namespace choiceless {

using json = nlohmann::ordered_json;

/// Outcome of checking a claim over a finite range. A counterexample is a
/// finding, never an exception.
struct Report {
  std::string claim;
  std::string range;
  bool ok = true;
  json counterexample;  // null when ok
  json details = json::object();

  std::string status() const { return ok ? "ok" : "counterexample"; }

  void fail(json witness) {
    if (ok) counterexample = std::move(witness);
    ok = false;
  }

  json to_json() const {
    json out{{"claim", claim}, {"range", range}, {"status", status()}};
    if (!ok) out["counterexample"] = counterexample;
    if (!details.empty()) out["details"] = details;
    return out;
  }
};

}  // namespace choiceless
