#pragma once

// Staged construction against a bijection B: Seq(S) -> P(S).
//
// With S_n = {s_0..s_{n-1}}, x ~ y iff x and y lie in the same sets B(q) for
// all q in Seq(S_n). The order on Seq(S_n) (by length, then lexicographically
// by position in the stage) induces orders on eq and on P(eq). A stage
// extends through B^-1 of the first r in P(eq) outside B[Seq(S_n)], else
// through B^-1({s_i}) for a singleton not attained; otherwise it stops.
// A stop forces 2^|eq| = n*, which the engine checks exactly.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "choiceless/specker/oracle.hpp"
#include "choiceless/starcount.hpp"

namespace choiceless::specker {

/// All injective sequences over `base`, by length and then lexicographically
/// by position in `base`.
inline std::vector<Elements> seq_order(const Elements& base) {
  std::vector<Elements> out;
  const std::size_t n = base.size();
  for (std::size_t len = 0; len <= n; ++len) {
    Elements current;
    std::vector<bool> used(n, false);
    std::function<void()> walk = [&] {
      if (current.size() == len) {
        out.push_back(current);
        return;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        used[i] = true;
        current.push_back(base[i]);
        walk();
        current.pop_back();
        used[i] = false;
      }
    };
    walk();
  }
  return out;
}

/// Classes of x ~ y iff x, y agree on every answered B(q). A class comes
/// before another if, at the first q telling them apart, it lies in B(q).
inline std::vector<Subset> eq_from_oracle(Subset full, const std::vector<std::optional<Subset>>& answers) {
  std::map<std::vector<bool>, Subset> by_signature;
  for (std::size_t x = 0; full >> x; ++x) {
    if (!contains(full, x)) continue;
    std::vector<bool> signature;
    for (const auto& a : answers) {
      if (a) signature.push_back(contains(*a, x));
    }
    by_signature[signature] |= singleton(x);
  }
  std::vector<Subset> out;
  for (auto it = by_signature.rbegin(); it != by_signature.rend(); ++it) out.push_back(it->second);
  return out;
}

/// Union of the classes picked by the bits of `index` (class i <-> bit i).
inline Subset union_of_classes(const std::vector<Subset>& classes, std::uint64_t index) {
  Subset r = 0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if ((index >> i) & 1u) r |= classes[i];
  }
  return r;
}

/// First r in P(eq), ordered by the class-bit index, that is not attained.
inline std::optional<Subset> first_missing_r(const std::vector<Subset>& classes, const std::set<Subset>& attained) {
  if (classes.size() >= 64) throw std::length_error("too many classes to enumerate P(eq)");
  const std::uint64_t total = std::uint64_t{1} << classes.size();
  for (std::uint64_t index = 0; index < total; ++index) {
    const Subset r = union_of_classes(classes, index);
    if (!attained.count(r)) return r;
  }
  return std::nullopt;
}

/// Not a union of classes: some class meets both r and its complement.
inline bool is_good(Subset r, const std::vector<Subset>& classes) {
  for (Subset c : classes) {
    if ((c & r) && (c & ~r)) return true;
  }
  return false;
}

/// The conditions of a stop at S_n and the count they force.
inline Report stop_check(const Elements& base, const std::vector<Subset>& classes, const std::set<Subset>& attained) {
  Report report{"stop(S_n) implies 2^kappa = n*", "n = " + std::to_string(base.size())};
  const std::size_t kappa = classes.size();
  bool all_attained = kappa < 64;
  if (all_attained) {
    for (std::uint64_t index = 0; index < (std::uint64_t{1} << kappa) && all_attained; ++index) {
      all_attained = attained.count(union_of_classes(classes, index)) > 0;
    }
  }
  bool singletons = true;
  for (std::size_t s : base) singletons = singletons && std::count(classes.begin(), classes.end(), singleton(s)) > 0;
  const BigNat star_n = starcount::star(base.size());
  const BigNat two_kappa = pow2(kappa);
  report.details = {{"kappa", kappa},
                    {"n", base.size()},
                    {"star_n", star_n.str()},
                    {"two_pow_kappa", two_kappa.str()},
                    {"all_r_attained", all_attained},
                    {"singletons_are_classes", singletons},
                    {"guard", two_kappa == star_n}};
  if (!all_attained || !singletons) report.fail({{"reason", "not a stop state"}});
  if (two_kappa != star_n) report.fail({{"kappa", kappa}, {"star_n", star_n.str()}});
  return report;
}

struct TminResult {
  bool any_good = false;
  Subset t_min = 0;
  std::size_t m_t = 0;   // |S^x| for x in T_min
  std::size_t m_eq = 0;  // least |x_=| over x in T_min
  std::map<std::size_t, Subset> x_eq;
};

/// T_min = {x : S^x good and of least size among good S^x};
/// x_= = {y : S^y = S^x}.
inline TminResult tmin_and_m_eq(const std::map<std::size_t, Subset>& sx, const std::vector<Subset>& classes) {
  TminResult out;
  for (const auto& [x, s] : sx) {
    if (!is_good(s, classes)) continue;
    const std::size_t size = popcount(s);
    if (!out.any_good || size < out.m_t) {
      out.any_good = true;
      out.m_t = size;
      out.t_min = 0;
    }
    if (size == out.m_t) out.t_min |= singleton(x);
  }
  if (!out.any_good) return out;
  out.m_eq = SIZE_MAX;
  for (std::size_t x : members(out.t_min)) {
    Subset same = 0;
    for (const auto& [y, s] : sx) {
      if (s == sx.at(x)) same |= singleton(y);
    }
    out.x_eq[x] = same;
    out.m_eq = std::min(out.m_eq, popcount(same));
  }
  return out;
}

/// SEQ^x: the stage elements of S^x in stage order, then the rest in
/// universe order. Depends on the set S^x only.
inline Elements seq_x(Subset sx, const Elements& base) {
  Elements out;
  Subset rest = sx;
  for (std::size_t s : base) {
    if (contains(sx, s)) {
      out.push_back(s);
      rest &= ~singleton(s);
    }
  }
  for (std::size_t x : members(rest)) out.push_back(x);
  return out;
}

/// Q_i = {i-th element of SEQ^x : x in T_min}, for i < m_T.
inline std::vector<Subset> q_sets(const std::map<std::size_t, Subset>& sx, const TminResult& t, const Elements& base) {
  std::vector<Subset> out(t.m_t, 0);
  for (std::size_t x : members(t.t_min)) {
    const Elements seq = seq_x(sx.at(x), base);
    for (std::size_t i = 0; i < t.m_t && i < seq.size(); ++i) out[i] |= singleton(seq[i]);
  }
  return out;
}

struct Thm4Options {
  /// Run the refinement (S^x, T_min, Q_i) even when the stop guard fails.
  bool recommence_after_guard_failure = false;
  /// Stage limit for each recommenced construction.
  std::size_t sub_budget = 8;
};

/// What one basic stage saw.
struct Thm4StageInfo {
  Elements base;
  std::vector<Elements> sequences;
  std::vector<std::optional<Subset>> answers;
  std::vector<Subset> classes;
  std::set<Subset> attained;
  std::optional<Subset> missing_r;
  std::optional<std::size_t> missing_singleton;
  bool stop = false;
  json stop_report;
};

namespace detail {

/// backward(target), a forward check, then the first element outside `base`.
inline DiagOutcome thm4_extend_via(Subset target, const Elements& base, BijectionOracle& oracle, json report) {
  const Universe& u = oracle.universe();
  report["target"] = u.subset_to_json(target);
  auto code = oracle.backward(target);
  if (!code) return DiagOutcome::found(non_surjective(oracle, oracle.transcript().back()));
  const Exchange back = oracle.transcript().back();
  auto check = oracle.forward(*code);
  if (!check || *check != target) {
    return DiagOutcome::found(Witness{"inverse_inconsistent", {back, oracle.transcript().back()}, report});
  }
  const Elements q = oracle.decode(*code);
  report["answer"] = u.elements_to_json(q);
  std::set<std::size_t> in_base(base.begin(), base.end());
  for (std::size_t x : q) {
    if (!in_base.count(x)) {
      DiagOutcome out = DiagOutcome::extended_element(x);
      out.report = report;
      return out;
    }
  }
  report["reason"] = "B^-1 of the target lies in Seq(S_n)";
  return DiagOutcome::stopped(report);
}

}  // namespace detail

/// One basic stage at S_n = base. A stop with a failed guard is a stop_count
/// witness; a stop with the guard satisfied is Stopped.
inline DiagOutcome thm4_stage(const Elements& base, BijectionOracle& oracle, Thm4StageInfo* inspect = nullptr) {
  const Universe& u = oracle.universe();
  if (oracle.space() != Space::inj_seq) throw std::invalid_argument("the Seq(S) engine needs an injSeq oracle");
  Thm4StageInfo info;
  info.base = base;
  info.sequences = seq_order(base);
  const std::size_t mark = oracle.transcript().size();
  std::map<Subset, std::size_t> first_with;  // answer -> position in transcript
  std::optional<std::pair<std::size_t, std::size_t>> clash;
  for (const Elements& q : info.sequences) {
    info.answers.push_back(oracle.forward(q));
    if (!info.answers.back()) continue;
    info.attained.insert(*info.answers.back());
    auto [it, fresh] = first_with.emplace(*info.answers.back(), oracle.transcript().size() - 1);
    if (!fresh && !clash) clash = std::make_pair(it->second, oracle.transcript().size() - 1);
  }
  const std::vector<Exchange> exchanges(oracle.transcript().begin() + static_cast<std::ptrdiff_t>(mark),
                                        oracle.transcript().end());
  const std::size_t unanswered = static_cast<std::size_t>(
      std::count(info.answers.begin(), info.answers.end(), std::nullopt));
  info.classes = eq_from_oracle(u.full(), info.answers);
  info.missing_r = first_missing_r(info.classes, info.attained);
  if (!info.missing_r) {
    for (std::size_t s : base) {
      if (!info.attained.count(singleton(s))) {
        info.missing_singleton = s;
        break;
      }
    }
  }
  info.stop = !info.missing_r && !info.missing_singleton;

  json report{{"n", base.size()}, {"kappa", info.classes.size()}, {"unanswered", unanswered}};
  json classes = json::array();
  for (Subset c : info.classes) classes.push_back(u.subset_to_json(c));
  report["classes"] = classes;

  auto finish = [&](DiagOutcome o) {
    if (inspect) *inspect = info;
    return o;
  };
  if (info.stop) {
    Report check = stop_check(base, info.classes, info.attained);
    info.stop_report = check.to_json();
    report["stop"] = check.details;
    if (unanswered > 0) {
      report["reason"] = "stop state with unanswered sequences; the count cannot be certified";
      return finish(DiagOutcome::exhausted(report));
    }
    if (!check.details["guard"].get<bool>()) {
      json data = report;
      data["base"] = u.elements_to_json(base);
      if (clash) data["collision"] = {clash->first - mark, clash->second - mark};
      return finish(DiagOutcome::found(Witness{"stop_count", exchanges, data}));
    }
    return finish(DiagOutcome::stopped(report));
  }
  if (clash) {
    const auto& t = oracle.transcript();
    return finish(DiagOutcome::found(detail::collision(t[clash->first], t[clash->second], report)));
  }
  if (info.missing_r) {
    report["rule"] = "first missing r";
    return finish(detail::thm4_extend_via(*info.missing_r, base, oracle, report));
  }
  report["rule"] = "missing singleton";
  return finish(detail::thm4_extend_via(singleton(*info.missing_singleton), base, oracle, report));
}

/// The four lexicographically least tokens, in that order.
inline Elements thm4_seed(const Universe& u) {
  if (u.size() < 4) throw std::invalid_argument("the Seq(S) engine needs at least 4 elements");
  Elements order(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u.token(a) < u.token(b); });
  order.resize(4);
  return order;
}

namespace detail {

inline bool is_stop(const DiagOutcome& o) {
  return o.kind == OutcomeKind::stopped ? o.report.contains("stop")
                                        : o.kind == OutcomeKind::witness && o.witness->kind == "stop_count";
}

/// Refinement after stop(S_n): recommence from S_n + {x} for each x outside
/// S_n, collect S^x, then extend through T_min or a good Q_j.
inline DiagOutcome thm4_refine(const Elements& base, const std::vector<Subset>& classes, BijectionOracle& oracle,
                               const Thm4Options& options, json& log) {
  const Universe& u = oracle.universe();
  std::set<std::size_t> in_base(base.begin(), base.end());
  std::map<std::size_t, Subset> sx;
  json recommenced = json::array();
  for (std::size_t x = 0; x < u.size(); ++x) {
    if (in_base.count(x)) continue;
    Elements sub = base;
    sub.push_back(x);
    bool stopped = false;
    for (std::size_t step = 0; step < options.sub_budget; ++step) {
      DiagOutcome o = thm4_stage(sub, oracle);
      if (is_stop(o)) {
        stopped = true;
        break;
      }
      if (o.kind != OutcomeKind::extended) return o;
      sub.push_back(*o.element);
    }
    if (!stopped) {
      return DiagOutcome::exhausted({{"reason", "recommenced construction did not stop within the sub-budget"},
                                     {"x", u.token(x)},
                                     {"sub_budget", options.sub_budget}});
    }
    Subset s = 0;
    for (std::size_t y : sub) s |= singleton(y);
    sx[x] = s;
    Elements y_added(sub.begin() + static_cast<std::ptrdiff_t>(base.size()) + 1, sub.end());
    recommenced.push_back({{"x", u.token(x)}, {"S_x", u.subset_to_json(s)}, {"Y", u.elements_to_json(y_added)}});
  }
  log["recommenced"] = recommenced;
  TminResult t = tmin_and_m_eq(sx, classes);
  if (!t.any_good) {
    log["reason"] = "no S^x is good";
    return DiagOutcome::stopped(log);
  }
  log["T_min"] = u.subset_to_json(t.t_min);
  log["m_T"] = t.m_t;
  log["m_eq"] = t.m_eq;
  if (is_good(t.t_min, classes)) {
    log["rule"] = "T_min is good";
    return thm4_extend_via(t.t_min, base, oracle, log);
  }
  auto qs = q_sets(sx, t, base);
  json q_json = json::array();
  for (Subset q : qs) q_json.push_back(u.subset_to_json(q));
  log["Q"] = q_json;
  for (std::size_t j = 0; j < qs.size(); ++j) {
    if (!is_good(qs[j], classes)) continue;
    log["rule"] = "Q_" + std::to_string(j) + " is good";
    return thm4_extend_via(qs[j], base, oracle, log);
  }
  log["reason"] = "no Q_i is good";
  return DiagOutcome::stopped(log);
}

}  // namespace detail

/// Runs stages from the 4-element seed for at most `budget` extensions.
inline Run thm4_engine(BijectionOracle& oracle, std::size_t budget, const Thm4Options& options = {}) {
  Run run;
  Elements base = thm4_seed(oracle.universe());
  for (std::size_t step = 0;; ++step) {
    if (step == budget) {
      run.steps.push_back(DiagOutcome::exhausted({{"reason", "budget reached"}, {"budget", budget}}));
      break;
    }
    const std::size_t mark = oracle.transcript().size();
    Thm4StageInfo info;
    DiagOutcome o = thm4_stage(base, oracle, &info);
    const bool refine = info.stop && (o.kind == OutcomeKind::stopped ||
                                      (options.recommence_after_guard_failure && o.kind == OutcomeKind::witness));
    if (refine) {
      detail::record(run, oracle, mark, base.size(), o.kind == OutcomeKind::witness ? "guard failed" : "stop");
      run.steps.push_back(o);
      const std::size_t refine_mark = oracle.transcript().size();
      json log = json::object();
      o = detail::thm4_refine(base, info.classes, oracle, options, log);
      detail::record(run, oracle, refine_mark, base.size(), "refine: " + outcome_name(o.kind));
    } else {
      detail::record(run, oracle, mark, base.size(), outcome_name(o.kind));
    }
    run.steps.push_back(o);
    if (o.kind != OutcomeKind::extended) break;
    base.push_back(*o.element);
  }
  return run;
}

/// Re-derives a stop_count witness from its recorded answers: every r in
/// P(eq) attained, every stage singleton a class, and 2^kappa != n*.
inline Report replay_stop_count(const Witness& w, const BijectionOracle& oracle) {
  Report report{"stop_count witness replays", "recorded stage"};
  std::vector<std::optional<Subset>> answers;
  std::set<Subset> attained;
  for (const Exchange& e : w.evidence) {
    if (!e.forward || !e.answered) {
      report.fail({{"reason", "stop evidence must be answered forward queries"}});
      return report;
    }
    answers.push_back(e.subset);
    attained.insert(e.subset);
  }
  Elements base;
  for (const auto& token : w.data.at("base")) base.push_back(*oracle.universe().find(token.get<std::string>()));
  std::set<BigNat> expected, seen;
  for (const Elements& q : seq_order(base)) expected.insert(encode_query(Space::inj_seq, q));
  for (const Exchange& e : w.evidence) seen.insert(e.code);
  if (expected != seen) {
    report.fail({{"reason", "evidence does not cover Seq(S_n)"}});
    return report;
  }
  Report check = stop_check(base, eq_from_oracle(oracle.universe().full(), answers), attained);
  report.details = check.details;
  if (!check.details["all_r_attained"].get<bool>() || !check.details["singletons_are_classes"].get<bool>() ||
      check.details["guard"].get<bool>()) {
    report.fail({{"reason", "recorded answers do not form a stop state with a failed guard"}});
  }
  return report;
}

}  // namespace choiceless::specker
