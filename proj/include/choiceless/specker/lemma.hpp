#pragma once

// From an injection J: P(S) -> Seq(S) to ever longer injective sequences in S.
//
// The oracle lists pairs (sequence code, subset), read as J(subset) = code;
// backward queries evaluate J and forward queries evaluate J^-1.

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "choiceless/specker/oracle.hpp"
#include "choiceless/starcount.hpp"

namespace choiceless::specker {

struct FlattenResult {
  Elements outputs;
  std::vector<std::size_t> consumed;  // inputs used for each output
  bool exhausted = false;             // input ended before a fresh element
  std::size_t trailing = 0;           // inputs used after the last output
  bool bound_respected = true;        // every gap <= star(|emitted|) + 1
};

/// Consumes pairwise distinct injective sequences and emits, each time one
/// leaves the emitted set F, its first element outside F. At most
/// star(|F|) + 1 inputs can stay inside F.
inline FlattenResult lemma_flatten(const std::vector<Elements>& seqs) {
  std::set<Elements> distinct;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    std::set<std::size_t> entries(seqs[i].begin(), seqs[i].end());
    if (entries.size() != seqs[i].size()) throw std::invalid_argument("input " + std::to_string(i) + " is not injective");
    if (!distinct.insert(seqs[i]).second) throw std::invalid_argument("input " + std::to_string(i) + " repeats an earlier sequence");
  }
  FlattenResult out;
  std::set<std::size_t> emitted;
  std::size_t gap = 0;
  for (const Elements& s : seqs) {
    ++gap;
    for (std::size_t x : s) {
      if (emitted.count(x)) continue;
      if (BigNat(gap) > starcount::star(emitted.size()) + 1) out.bound_respected = false;
      emitted.insert(x);
      out.outputs.push_back(x);
      out.consumed.push_back(gap);
      gap = 0;
      break;
    }
  }
  out.trailing = gap;
  out.exhausted = gap > 0 || seqs.empty();
  if (BigNat(gap) > starcount::star(emitted.size()) + 1) out.bound_respected = false;
  return out;
}

/// Gamma(x) for x in T: x -> its stage index iota -> the injective sequence
/// of naturals with code iota -> the same sequence over T -> J^-1. Undefined
/// when the decoded sequence leaves {0..|T|-1} or J^-1 has no row; elements
/// with undefined Gamma, and all elements outside T, go into S_alpha.
struct LemmaPipeline {
  std::vector<std::optional<Subset>> gamma_values;  // per universe element
  Subset diagonal = 0;
};

inline DiagOutcome lemma_stage(const Elements& t, BijectionOracle& oracle, LemmaPipeline* inspect = nullptr) {
  const Universe& u = oracle.universe();
  if (oracle.space() != Space::inj_seq) throw std::invalid_argument("the Seq(S) lemma engine needs an injSeq oracle");
  std::set<std::size_t> in_t(t.begin(), t.end());
  if (in_t.size() != t.size()) throw std::invalid_argument("stage elements must be distinct");
  for (std::size_t x : t) {
    if (x >= u.size()) throw std::invalid_argument("stage element outside the universe");
  }

  LemmaPipeline p;
  p.gamma_values.assign(u.size(), std::nullopt);
  for (std::size_t iota = 0; iota < t.size(); ++iota) {
    auto naturals = encodings::inj_decode(iota);
    bool inside = true;
    Elements sigma;
    for (const BigNat& v : naturals) {
      if (v >= t.size()) {
        inside = false;
        break;
      }
      sigma.push_back(t[static_cast<std::size_t>(v)]);
    }
    if (!inside) continue;
    p.gamma_values[t[iota]] = oracle.forward(sigma);
  }
  for (std::size_t x = 0; x < u.size(); ++x) {
    if (!p.gamma_values[x] || !contains(*p.gamma_values[x], x)) p.diagonal |= singleton(x);
  }
  if (inspect) *inspect = p;
  json report{{"alpha", t.size()}, {"target", u.subset_to_json(p.diagonal)}};

  auto code = oracle.backward(p.diagonal);
  if (!code) {
    report["reason"] = "J has no row for the diagonal set";
    return DiagOutcome::exhausted(report);
  }
  const Exchange back = oracle.transcript().back();
  auto check = oracle.forward(*code);
  const Exchange fwd = oracle.transcript().back();
  if (!check || *check != p.diagonal) {
    // Another subset listed against the same sequence: J is not injective.
    for (Subset other : oracle.listed_subsets(*code)) {
      if (other == p.diagonal) continue;
      auto again = oracle.backward(other);
      if (again && *again == *code) return DiagOutcome::found(detail::collision(back, oracle.transcript().back(), report));
    }
    return DiagOutcome::found(Witness{"inverse_inconsistent", {back, fwd}, report});
  }
  const Elements sigma = oracle.decode(*code);
  report["answer"] = u.elements_to_json(sigma);
  for (std::size_t x : sigma) {
    if (!in_t.count(x)) {
      DiagOutcome out = DiagOutcome::extended_element(x);
      out.report = report;
      return out;
    }
  }
  // J(S_alpha) lies in Seq(T). Look for a second subset with the same answer.
  for (Subset other : oracle.listed_subsets(*code)) {
    if (other == p.diagonal) continue;
    auto again = oracle.backward(other);
    if (again && *again == *code) return DiagOutcome::found(detail::collision(back, oracle.transcript().back(), report));
  }
  report["reason"] = "answer lies inside T and no second subset shares it";
  return DiagOutcome::stopped(report);
}

inline Run lemma_run(BijectionOracle& oracle, std::size_t budget) {
  Run run;
  Elements t;
  for (std::size_t step = 0;; ++step) {
    if (step == budget) {
      run.steps.push_back(DiagOutcome::exhausted({{"reason", "budget reached"}, {"budget", budget}}));
      break;
    }
    const std::size_t mark = oracle.transcript().size();
    DiagOutcome o = lemma_stage(t, oracle);
    detail::record(run, oracle, mark, t.size(), outcome_name(o.kind));
    run.steps.push_back(o);
    if (o.kind != OutcomeKind::extended) break;
    t.push_back(*o.element);
  }
  return run;
}

}  // namespace choiceless::specker
