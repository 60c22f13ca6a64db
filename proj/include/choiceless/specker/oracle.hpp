#pragma once

// Finite universes, query spaces and table-driven bijection oracles shared by
// the diagonalization engines.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "choiceless/bignat.hpp"
#include "choiceless/encodings.hpp"
#include "choiceless/report.hpp"

namespace choiceless::specker {

using Subset = std::uint64_t;
using Elements = std::vector<std::size_t>;  // universe indices

inline bool contains(Subset s, std::size_t x) { return (s >> x) & 1u; }
inline Subset singleton(std::size_t x) { return Subset{1} << x; }
inline std::size_t popcount(Subset s) { return static_cast<std::size_t>(__builtin_popcountll(s)); }

inline Elements members(Subset s) {
  Elements out;
  for (std::size_t x = 0; s; ++x, s >>= 1) {
    if (s & 1u) out.push_back(x);
  }
  return out;
}

class Universe {
 public:
  Universe() = default;
  explicit Universe(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    if (tokens_.empty() || tokens_.size() > 64) {
      throw std::invalid_argument("a universe needs 1 to 64 tokens, got " + std::to_string(tokens_.size()));
    }
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (!index_.emplace(tokens_[i], i).second) throw std::invalid_argument("duplicate token '" + tokens_[i] + "'");
    }
  }

  /// Tokens "0", "1", ..., "n-1".
  static Universe numbered(std::size_t n) {
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < n; ++i) tokens.push_back(std::to_string(i));
    return Universe(std::move(tokens));
  }

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  Subset full() const { return size() == 64 ? ~Subset{0} : (Subset{1} << size()) - 1; }

  std::optional<std::size_t> find(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  json subset_to_json(Subset s) const {
    json out = json::array();
    for (std::size_t x : members(s)) out.push_back(tokens_[x]);
    return out;
  }

  json elements_to_json(const Elements& xs) const {
    json out = json::array();
    for (std::size_t x : xs) out.push_back(tokens_.at(x));
    return out;
  }

  json to_json() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::size_t> index_;
};

/// Which family the query codes range over: finite subsets, finite
/// sequences, or injective finite sequences of the universe.
enum class Space { fin_set, seq, inj_seq };

inline std::string space_name(Space space) {
  switch (space) {
    case Space::fin_set: return "finSet";
    case Space::seq: return "seq";
    case Space::inj_seq: return "injSeq";
  }
  return "?";
}

inline std::optional<Space> parse_space(const std::string& name) {
  if (name == "finSet") return Space::fin_set;
  if (name == "seq") return Space::seq;
  if (name == "injSeq") return Space::inj_seq;
  return std::nullopt;
}

/// Code of a query. For fin_set the elements are taken as a set.
inline BigNat encode_query(Space space, const Elements& xs) {
  switch (space) {
    case Space::fin_set: {
      encodings::FinSetCode sorted(xs.begin(), xs.end());
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      return encodings::fin_encode(sorted);
    }
    case Space::seq: return encodings::seq_encode(encodings::SeqCode(xs.begin(), xs.end()));
    case Space::inj_seq: return encodings::inj_encode(encodings::InjSeqCode(xs.begin(), xs.end()));
  }
  return 0;
}

/// Elements named by a query code, or empty if some entry lies outside a
/// universe of the given size.
inline std::optional<Elements> decode_query(Space space, const BigNat& code, std::size_t universe_size) {
  std::vector<BigNat> raw;
  switch (space) {
    case Space::fin_set:
      if (code >= pow2(universe_size)) return std::nullopt;
      for (std::size_t x : encodings::fin_decode(code)) raw.push_back(x);
      break;
    case Space::seq: raw = encodings::seq_decode(code); break;
    case Space::inj_seq: raw = encodings::inj_decode(code); break;
  }
  Elements out;
  for (const BigNat& v : raw) {
    if (v >= universe_size) return std::nullopt;
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

/// Fin-set code of a subset; equal to the mask read as a number.
inline BigNat subset_code(Subset s) { return BigNat(s); }

class oracle_format_error : public std::runtime_error {
 public:
  oracle_format_error(std::string location, const std::string& message)
      : std::runtime_error("malformed oracle at " + location + ": " + message), location(std::move(location)) {}
  std::string location;
};

/// One question put to the oracle. Forward: code -> subset. Backward:
/// subset -> code. `answered` is false when the table had no entry.
struct Exchange {
  bool forward = true;
  BigNat code;
  Subset subset = 0;
  bool answered = false;

  friend bool operator==(const Exchange&, const Exchange&) = default;
};

/// A purported bijection between the codes of a query space and subsets of
/// a finite universe, given as a finite table. Backward lookups invert the
/// table unless an explicit backward table is supplied. Collisions are kept,
/// not rejected: they are exactly what the engines report.
class BijectionOracle {
 public:
  BijectionOracle() = default;
  BijectionOracle(Universe universe, Space space, std::vector<std::pair<BigNat, Subset>> forward,
                  std::optional<std::vector<std::pair<Subset, BigNat>>> backward = std::nullopt)
      : universe_(std::move(universe)), space_(space), entries_(std::move(forward)) {
    for (const auto& [code, subset] : entries_) {
      if (subset & ~universe_.full()) throw std::invalid_argument("subset outside the universe");
      if (!decode_query(space_, code, universe_.size())) {
        throw std::invalid_argument("query code " + code.str() + " names elements outside the universe");
      }
      forward_.emplace(code, subset);
    }
    if (backward) {
      explicit_backward_ = true;
      for (const auto& [subset, code] : *backward) backward_.emplace(subset, code);
    } else {
      for (const auto& [code, subset] : entries_) backward_.emplace(subset, code);
    }
  }

  const Universe& universe() const { return universe_; }
  Space space() const { return space_; }
  const std::vector<std::pair<BigNat, Subset>>& entries() const { return entries_; }
  bool explicit_backward() const { return explicit_backward_; }

  std::optional<Subset> forward(const BigNat& code) {
    auto it = forward_.find(code);
    Exchange e{true, code, 0, it != forward_.end()};
    if (e.answered) e.subset = it->second;
    transcript_.push_back(e);
    if (!e.answered) return std::nullopt;
    return e.subset;
  }

  std::optional<Subset> forward(const Elements& query) { return forward(encode_query(space_, query)); }

  std::optional<BigNat> backward(Subset target) {
    auto it = backward_.find(target);
    Exchange e{false, 0, target, it != backward_.end()};
    if (e.answered) e.code = it->second;
    transcript_.push_back(e);
    if (!e.answered) return std::nullopt;
    return e.code;
  }

  /// Every table code whose forward answer is `target`, without recording.
  std::vector<BigNat> preimages(Subset target) const {
    std::vector<BigNat> out;
    for (const auto& [code, subset] : entries_) {
      if (subset == target) out.push_back(code);
    }
    return out;
  }

  /// Every table subset listed against `code`, without recording.
  std::vector<Subset> listed_subsets(const BigNat& code) const {
    std::vector<Subset> out;
    for (const auto& [c, subset] : entries_) {
      if (c == code) out.push_back(subset);
    }
    return out;
  }

  Elements decode(const BigNat& code) const { return *decode_query(space_, code, universe_.size()); }

  const std::vector<Exchange>& transcript() const { return transcript_; }
  void clear_transcript() { transcript_.clear(); }

  json exchange_to_json(const Exchange& e) const {
    json out{{"direction", e.forward ? "forward" : "backward"}};
    if (e.forward) {
      out["query"] = e.code.str();
      out["query_elements"] = universe_.elements_to_json(decode(e.code));
      out["answer"] = e.answered ? universe_.subset_to_json(e.subset) : json(nullptr);
    } else {
      out["query"] = universe_.subset_to_json(e.subset);
      out["answer"] = e.answered ? json(e.code.str()) : json(nullptr);
      if (e.answered) {
        auto xs = decode_query(space_, e.code, universe_.size());
        out["answer_elements"] = xs ? universe_.elements_to_json(*xs) : json(nullptr);
      }
    }
    return out;
  }

  json to_json() const {
    json forward = json::array();
    for (const auto& [code, subset] : entries_) forward.push_back({code.str(), universe_.subset_to_json(subset)});
    json out{{"space", space_name(space_)}, {"universe", universe_.to_json()}, {"forward", forward}};
    if (explicit_backward_) {
      json backward = json::array();
      for (const auto& [subset, code] : backward_) backward.push_back({universe_.subset_to_json(subset), code.str()});
      out["backward"] = backward;
    }
    return out;
  }

 private:
  Universe universe_;
  Space space_ = Space::fin_set;
  std::vector<std::pair<BigNat, Subset>> entries_;
  std::map<BigNat, Subset> forward_;  // first listed answer wins
  std::map<Subset, BigNat> backward_;
  bool explicit_backward_ = false;
  std::vector<Exchange> transcript_;
};

namespace detail {

inline Subset parse_subset(const json& value, const Universe& universe, const std::string& where) {
  if (!value.is_array()) throw oracle_format_error(where, "subset must be an array of tokens");
  Subset s = 0;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const std::string at = where + "/" + std::to_string(i);
    if (!value[i].is_string()) throw oracle_format_error(at, "token must be a string");
    auto x = universe.find(value[i].get<std::string>());
    if (!x) throw oracle_format_error(at, "unknown token '" + value[i].get<std::string>() + "'");
    if (contains(s, *x)) throw oracle_format_error(at, "repeated token '" + value[i].get<std::string>() + "'");
    s |= singleton(*x);
  }
  return s;
}

inline BigNat parse_code(const json& value, Space space, const Universe& universe, const std::string& where) {
  BigNat code;
  if (value.is_number_unsigned()) {
    code = value.get<std::uint64_t>();
  } else if (value.is_number_integer()) {
    throw oracle_format_error(where, "query code must be non-negative");
  } else if (value.is_string()) {
    try {
      code = parse_bignat(value.get<std::string>());
    } catch (const std::exception&) {
      throw oracle_format_error(where, "query code '" + value.get<std::string>() + "' is not a decimal natural");
    }
  } else if (value.is_array()) {
    Elements xs;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const std::string at = where + "/" + std::to_string(i);
      if (!value[i].is_string()) throw oracle_format_error(at, "token must be a string");
      auto x = universe.find(value[i].get<std::string>());
      if (!x) throw oracle_format_error(at, "unknown token '" + value[i].get<std::string>() + "'");
      xs.push_back(*x);
    }
    if (space != Space::seq) {
      std::set<std::size_t> distinct(xs.begin(), xs.end());
      if (distinct.size() != xs.size()) throw oracle_format_error(where, "repeated token in a " + space_name(space) + " query");
    }
    return encode_query(space, xs);
  } else {
    throw oracle_format_error(where, "query must be a natural, a decimal string or an array of tokens");
  }
  if (!decode_query(space, code, universe.size())) {
    throw oracle_format_error(where, "query code " + code.str() + " names elements outside the universe");
  }
  return code;
}

}  // namespace detail

/// Reads {"space", "universe", "forward": [[query, subset], ...]} with an
/// optional "backward": [[subset, query], ...]. Other keys are ignored.
inline BijectionOracle oracle_from_json(const json& doc) {
  if (!doc.is_object()) throw oracle_format_error("/", "document must be an object");
  if (!doc.contains("space") || !doc["space"].is_string()) throw oracle_format_error("/space", "missing space name");
  auto space = parse_space(doc["space"].get<std::string>());
  if (!space) throw oracle_format_error("/space", "unknown space '" + doc["space"].get<std::string>() + "'");
  if (!doc.contains("universe") || !doc["universe"].is_array()) {
    throw oracle_format_error("/universe", "missing token array");
  }
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < doc["universe"].size(); ++i) {
    if (!doc["universe"][i].is_string()) throw oracle_format_error("/universe/" + std::to_string(i), "token must be a string");
    tokens.push_back(doc["universe"][i].get<std::string>());
  }
  Universe universe;
  try {
    universe = Universe(tokens);
  } catch (const std::invalid_argument& e) {
    throw oracle_format_error("/universe", e.what());
  }
  if (!doc.contains("forward") || !doc["forward"].is_array()) throw oracle_format_error("/forward", "missing table");
  std::vector<std::pair<BigNat, Subset>> forward;
  for (std::size_t i = 0; i < doc["forward"].size(); ++i) {
    const std::string at = "/forward/" + std::to_string(i);
    const json& row = doc["forward"][i];
    if (!row.is_array() || row.size() != 2) throw oracle_format_error(at, "row must be [query, subset]");
    forward.emplace_back(detail::parse_code(row[0], *space, universe, at + "/0"),
                         detail::parse_subset(row[1], universe, at + "/1"));
  }
  std::optional<std::vector<std::pair<Subset, BigNat>>> backward;
  if (doc.contains("backward")) {
    if (!doc["backward"].is_array()) throw oracle_format_error("/backward", "backward table must be an array");
    backward.emplace();
    for (std::size_t i = 0; i < doc["backward"].size(); ++i) {
      const std::string at = "/backward/" + std::to_string(i);
      const json& row = doc["backward"][i];
      if (!row.is_array() || row.size() != 2) throw oracle_format_error(at, "row must be [subset, query]");
      backward->emplace_back(detail::parse_subset(row[0], universe, at + "/0"),
                             detail::parse_code(row[1], *space, universe, at + "/1"));
    }
  }
  return BijectionOracle(std::move(universe), *space, std::move(forward), std::move(backward));
}

inline BijectionOracle load_oracle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw oracle_format_error(path, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw oracle_format_error(path + " byte " + std::to_string(e.byte), "invalid JSON");
  }
  return oracle_from_json(doc);
}

// ---------------------------------------------------------------------------
// Outcomes.

/// Concrete evidence that an oracle is not a bijection.
///   collision            two exchanges in one direction with distinct
///                        queries and equal answers
///   non_surjective       a backward query the table cannot answer; no table
///                        row maps to the target
///   inverse_inconsistent backward(target) = q but forward(q) != target
///   stop_count           a stop state whose class count contradicts the
///                        number of sequences it must absorb
struct Witness {
  std::string kind;
  std::vector<Exchange> evidence;
  json data = json::object();
};

enum class OutcomeKind { extended, stopped, witness, exhausted };

inline std::string outcome_name(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::extended: return "Extended";
    case OutcomeKind::stopped: return "Stopped";
    case OutcomeKind::witness: return "Witness";
    case OutcomeKind::exhausted: return "Exhausted";
  }
  return "?";
}

/// Extended carries the new stage (a subset) or the new element; Stopped and
/// Exhausted carry a report; Witness carries the violation.
struct DiagOutcome {
  OutcomeKind kind = OutcomeKind::exhausted;
  std::optional<Subset> stage;
  std::optional<std::size_t> element;
  std::optional<Witness> witness;
  json report = json::object();

  static DiagOutcome extended_stage(Subset s) { return {OutcomeKind::extended, s, std::nullopt, std::nullopt, json::object()}; }
  static DiagOutcome extended_element(std::size_t x) { return {OutcomeKind::extended, std::nullopt, x, std::nullopt, json::object()}; }
  static DiagOutcome found(Witness w) { return {OutcomeKind::witness, std::nullopt, std::nullopt, std::move(w), json::object()}; }
  static DiagOutcome stopped(json report) { return {OutcomeKind::stopped, std::nullopt, std::nullopt, std::nullopt, std::move(report)}; }
  static DiagOutcome exhausted(json report) {
    return {OutcomeKind::exhausted, std::nullopt, std::nullopt, std::nullopt, std::move(report)};
  }
};

inline json witness_to_json(const Witness& w, const BijectionOracle& oracle) {
  json evidence = json::array();
  for (const auto& e : w.evidence) evidence.push_back(oracle.exchange_to_json(e));
  return {{"kind", w.kind}, {"evidence", evidence}, {"data", w.data}};
}

inline json outcome_to_json(const DiagOutcome& o, const BijectionOracle& oracle) {
  json out{{"outcome", outcome_name(o.kind)}};
  if (o.stage) out["stage"] = oracle.universe().subset_to_json(*o.stage);
  if (o.element) out["element"] = oracle.universe().token(*o.element);
  if (o.witness) out["witness"] = witness_to_json(*o.witness, oracle);
  if (!o.report.empty()) out["report"] = o.report;
  return out;
}

/// Trace of a multi-stage run: one entry per oracle exchange, tagged with the
/// stage and the action it led to.
struct Run {
  std::vector<DiagOutcome> steps;
  json trace = json::array();

  const DiagOutcome& last() const { return steps.back(); }
  std::size_t extensions() const {
    return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const DiagOutcome& o) {
      return o.kind == OutcomeKind::extended;
    }));
  }
};

namespace detail {

/// Appends the exchanges made since `from` to the trace.
inline void record(Run& run, const BijectionOracle& oracle, std::size_t from, std::size_t stage, const std::string& action) {
  const auto& t = oracle.transcript();
  for (std::size_t i = from; i < t.size(); ++i) {
    json entry = oracle.exchange_to_json(t[i]);
    json row{{"stage", stage}, {"query", entry["query"]}, {"answer", entry["answer"]}, {"action", action}};
    row["direction"] = entry["direction"];
    run.trace.push_back(row);
  }
}

inline Witness collision(const Exchange& a, const Exchange& b, json data = json::object()) {
  return Witness{"collision", {a, b}, std::move(data)};
}

inline Witness non_surjective(const BijectionOracle& oracle, const Exchange& e) {
  return Witness{"non_surjective", {e}, {{"searched_rows", oracle.entries().size()}, {"preimages_found", 0}}};
}

}  // namespace detail

/// Re-issues the witness's exchanges against a fresh copy of the oracle and
/// re-derives the violation from the answers alone.
inline Report replay_basic(const Witness& w, BijectionOracle oracle) {
  Report report{"witness replays", w.kind};
  oracle.clear_transcript();
  std::vector<Exchange> again;
  for (const Exchange& e : w.evidence) {
    if (e.forward) {
      oracle.forward(e.code);
    } else {
      oracle.backward(e.subset);
    }
    again.push_back(oracle.transcript().back());
  }
  if (again != w.evidence) {
    report.fail({{"reason", "oracle answers differ from the recorded evidence"}});
    return report;
  }
  if (w.kind == "collision") {
    if (again.size() != 2 || again[0].forward != again[1].forward || !again[0].answered || !again[1].answered) {
      report.fail({{"reason", "collision needs two answered exchanges in one direction"}});
    } else if (again[0].forward && !(again[0].code != again[1].code && again[0].subset == again[1].subset)) {
      report.fail({{"reason", "forward answers do not collide"}});
    } else if (!again[0].forward && !(again[0].subset != again[1].subset && again[0].code == again[1].code)) {
      report.fail({{"reason", "backward answers do not collide"}});
    }
  } else if (w.kind == "non_surjective") {
    if (again.size() != 1 || again[0].forward || again[0].answered) {
      report.fail({{"reason", "expected one unanswered backward query"}});
    } else if (!oracle.explicit_backward() && !oracle.preimages(again[0].subset).empty()) {
      report.fail({{"reason", "the table does map to the target"}});
    }
  } else if (w.kind == "inverse_inconsistent") {
    if (again.size() != 2 || again[0].forward || !again[1].forward || !again[0].answered ||
        again[0].code != again[1].code || (again[1].answered && again[0].subset == again[1].subset)) {
      report.fail({{"reason", "expected backward(t) = q and forward(q) != t"}});
    }
  } else if (w.kind != "stop_count") {
    report.fail({{"reason", "unknown witness kind"}});
  }
  return report;
}

}  // namespace choiceless::specker
