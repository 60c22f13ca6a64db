#pragma once

// Construction against a bijection B: seq(S) -> P(S).
//
//   xi_i = B(<s0, ..., s0>) (i copies), required pairwise distinct.
//   c_i  = pairwise disjoint nonempty sets carved out of the xi_i.
//   Gamma(i) = B(h(i)), h the length-then-lex enumeration of seq(S_n).
//   t = union of the c_i with c_i n Gamma(i) empty; then t != Gamma(k) for
//   every k, witnessed inside c_k, and B^-1(t) leaves seq(S_n).

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "choiceless/specker/oracle.hpp"

namespace choiceless::specker {

/// The first `count` sequences over `base` (repetitions allowed), by length
/// and then lexicographically by position in `base`.
inline std::vector<Elements> seq_prefix(const Elements& base, std::size_t count) {
  std::vector<Elements> out;
  if (count == 0) return out;
  out.push_back({});
  if (base.empty()) return out;
  for (std::size_t len = 1; out.size() < count; ++len) {
    std::vector<std::size_t> digits(len, 0);
    while (out.size() < count) {
      Elements s;
      for (std::size_t d : digits) s.push_back(base[d]);
      out.push_back(s);
      std::size_t i = len;
      while (i > 0 && ++digits[i - 1] == base.size()) digits[--i] = 0;
      if (i == 0) break;
    }
  }
  return out;
}

/// Pairwise disjoint nonempty c_i from the probes: c_i is the atom of the
/// Boolean algebra generated by all probes that lies below xi_i, is not yet
/// used, and has the least least element. Stops at the first i without one.
inline std::vector<Subset> disjointify(const std::vector<Subset>& xis, Subset full) {
  std::map<std::vector<bool>, Subset> atoms_by_signature;
  for (std::size_t x : members(full)) {
    std::vector<bool> signature;
    for (Subset xi : xis) signature.push_back(contains(xi, x));
    atoms_by_signature[signature] |= singleton(x);
  }
  std::vector<Subset> atoms;
  for (const auto& [sig, atom] : atoms_by_signature) atoms.push_back(atom);
  std::sort(atoms.begin(), atoms.end(), [](Subset a, Subset b) { return __builtin_ctzll(a) < __builtin_ctzll(b); });

  std::vector<Subset> out;
  Subset used = 0;
  for (Subset xi : xis) {
    std::optional<Subset> pick;
    for (Subset atom : atoms) {
      if ((atom & ~xi) == 0 && (atom & used) == 0) {
        pick = atom;
        break;
      }
    }
    if (!pick) break;
    out.push_back(*pick);
    used |= *pick;
  }
  return out;
}

/// t = union of the c_i with c_i n Gamma(i) empty.
inline Subset thm5_diagonal(const std::vector<Subset>& cs, const std::vector<Subset>& gammas) {
  Subset t = 0;
  for (std::size_t i = 0; i < cs.size() && i < gammas.size(); ++i) {
    if ((cs[i] & gammas[i]) == 0) t |= cs[i];
  }
  return t;
}

/// For each k, an element of c_k on which t and Gamma(k) differ, if any.
inline std::vector<std::optional<std::size_t>> diagonal_witnesses(const std::vector<Subset>& cs,
                                                                  const std::vector<Subset>& gammas, Subset t) {
  std::vector<std::optional<std::size_t>> out;
  for (std::size_t k = 0; k < cs.size() && k < gammas.size(); ++k) {
    const Subset differ = cs[k] & (t ^ gammas[k]);
    out.push_back(differ ? std::optional<std::size_t>(static_cast<std::size_t>(__builtin_ctzll(differ))) : std::nullopt);
  }
  return out;
}

struct Thm5Setup {
  std::vector<Subset> xis;
  std::vector<Subset> cs;
};

struct Thm5StageInfo {
  std::vector<Subset> gammas;
  Subset t = 0;
  std::vector<std::optional<std::size_t>> witnesses;
};

/// Probes xi_0..xi_{probes-1}, checks them distinct and disjointifies.
inline std::optional<DiagOutcome> thm5_setup(std::size_t s0, std::size_t probes, BijectionOracle& oracle, Thm5Setup& setup) {
  const Universe& u = oracle.universe();
  std::map<Subset, Exchange> seen;
  for (std::size_t i = 0; i < probes; ++i) {
    auto xi = oracle.forward(Elements(i, s0));
    if (!xi) {
      return DiagOutcome::exhausted({{"reason", "forward table has no row for a repeated-s0 probe"}, {"i", i}});
    }
    auto [it, fresh] = seen.emplace(*xi, oracle.transcript().back());
    if (!fresh) return DiagOutcome::found(detail::collision(it->second, oracle.transcript().back(), {{"probe", i}}));
    setup.xis.push_back(*xi);
  }
  setup.cs = disjointify(setup.xis, u.full());
  if (setup.cs.empty()) {
    return DiagOutcome::exhausted({{"reason", "disjointification found no nonempty c_0 in this finite universe"}});
  }
  return std::nullopt;
}

/// One stage at S_n = base, given the c_i.
inline DiagOutcome thm5_stage(const Elements& base, const std::vector<Subset>& cs, BijectionOracle& oracle,
                              Thm5StageInfo* inspect = nullptr) {
  const Universe& u = oracle.universe();
  Thm5StageInfo info;
  const auto hs = seq_prefix(base, cs.size());
  for (const Elements& h : hs) {
    auto g = oracle.forward(h);
    if (!g) {
      return DiagOutcome::exhausted({{"reason", "forward table has no row for h(i)"},
                                     {"i", info.gammas.size()},
                                     {"query", u.elements_to_json(h)}});
    }
    info.gammas.push_back(*g);
  }
  info.t = thm5_diagonal(cs, info.gammas);
  info.witnesses = diagonal_witnesses(cs, info.gammas, info.t);
  if (inspect) *inspect = info;

  json report{{"n", base.size()}, {"m", cs.size()}, {"t", u.subset_to_json(info.t)}};
  auto code = oracle.backward(info.t);
  if (!code) return DiagOutcome::found(detail::non_surjective(oracle, oracle.transcript().back()));
  const Exchange back = oracle.transcript().back();
  auto check = oracle.forward(*code);
  if (!check || *check != info.t) {
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
  report["reason"] = "B^-1(t) lies in seq(S_n) beyond the m enumerated sequences";
  return DiagOutcome::stopped(report);
}

struct Thm5Run {
  Run run;
  Thm5Setup setup;
  std::vector<Thm5StageInfo> stages;
};

/// Starts from <s0> and extends at most `budget` times. The number of probes
/// defaults to the universe size.
inline Thm5Run thm5_run(std::size_t s0, BijectionOracle& oracle, std::size_t budget, std::size_t probes = 0) {
  const Universe& u = oracle.universe();
  if (oracle.space() != Space::seq) throw std::invalid_argument("the seq(S) engine needs a seq oracle");
  if (s0 >= u.size()) throw std::invalid_argument("s0 is not in the universe");
  if (probes == 0) probes = u.size();
  Thm5Run out;
  const std::size_t mark = oracle.transcript().size();
  if (auto stop = thm5_setup(s0, probes, oracle, out.setup)) {
    detail::record(out.run, oracle, mark, 1, outcome_name(stop->kind));
    out.run.steps.push_back(*stop);
    return out;
  }
  detail::record(out.run, oracle, mark, 1, "probe");
  Elements base{s0};
  for (std::size_t step = 0;; ++step) {
    if (step == budget) {
      out.run.steps.push_back(DiagOutcome::exhausted({{"reason", "budget reached"}, {"budget", budget}}));
      break;
    }
    const std::size_t stage_mark = oracle.transcript().size();
    Thm5StageInfo info;
    DiagOutcome o = thm5_stage(base, out.setup.cs, oracle, &info);
    out.stages.push_back(info);
    detail::record(out.run, oracle, stage_mark, base.size(), outcome_name(o.kind));
    out.run.steps.push_back(o);
    if (o.kind != OutcomeKind::extended) break;
    base.push_back(*o.element);
  }
  return out;
}

}  // namespace choiceless::specker
