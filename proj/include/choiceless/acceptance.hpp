#pragma once

// The acceptance suite: one Report per criterion, each with a pinned time
// limit. A criterion passes when its report is ok and it finishes in time.

#include <chrono>
#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "choiceless/encodings.hpp"
#include "choiceless/fixtures.hpp"
#include "choiceless/hereditary.hpp"
#include "choiceless/mostowski.hpp"
#include "choiceless/report.hpp"
#include "choiceless/specker.hpp"
#include "choiceless/starcount.hpp"

namespace choiceless::acceptance {

struct Criterion {
  int id;
  std::string title;
  double limit_ms;
  std::function<Report()> check;
};

struct Result {
  int id;
  std::string title;
  bool passed;
  double elapsed_ms;
  double limit_ms;
  Report report;

  json to_json() const {
    return {{"id", id},         {"title", title},       {"passed", passed},
            {"elapsed_ms", elapsed_ms}, {"limit_ms", limit_ms}, {"report", report.to_json()}};
  }

  std::string line() const {
    char timing[96];
    std::snprintf(timing, sizeof timing, "%.3f ms, limit %.0f ms", elapsed_ms, limit_ms);
    std::string why;
    if (!report.ok) why = " counterexample " + report.counterexample.dump();
    else if (!passed) why = " over time limit";
    return std::string(passed ? "PASS" : "FAIL") + " " + std::to_string(id) + " " + title + " (" + timing + ")" + why;
  }
};

namespace detail {

using mostowski::Atom;
using mostowski::SymSet;
using specker::Subset;

inline std::vector<Atom> pool_of(std::initializer_list<const char*> texts) {
  std::vector<Atom> out;
  for (const char* t : texts) out.push_back(mostowski::parse_atom(t));
  return out;
}

inline Report star_values() {
  Report r{"0* = 1, 1* = 2, 2* = 5, 3* = 16, 16* = 56874039553217", "n in {0, 1, 2, 3, 16}"};
  const std::vector<std::pair<std::size_t, const char*>> expected{
      {0, "1"}, {1, "2"}, {2, "5"}, {3, "16"}, {16, "56874039553217"}};
  for (const auto& [n, value] : expected) {
    const BigNat got = starcount::star(n);
    if (got != parse_bignat(value)) r.fail({{"n", n}, {"expected", value}, {"got", got.str()}});
  }
  return r;
}

inline Report scan_pow2_million() {
  Report r{"n* is a power of two exactly for n in {0, 1, 3}", "n in [0, 1000000]"};
  const auto hits = starcount::scan_pow2(1000000);
  r.details["hits"] = hits;
  if (hits != std::vector<std::size_t>{0, 1, 3}) r.fail({{"hits", hits}});
  return r;
}

inline Report divisibility() {
  Report r{"divisibility lemma for r = 1..4", "n in [0, 10000]"};
  for (unsigned e = 1; e <= 4; ++e) {
    Report one = starcount::check_divisibility_lemma(e, 10000);
    if (!one.ok) r.fail({{"r", e}, {"counterexample", one.counterexample}});
  }
  return r;
}

inline Report identity_two() {
  Report r{"congruence identity for 2 <= n <= 50, 2 <= k <= 8; T(n) odd for odd 3 <= n <= 49", "as stated"};
  Report cong = starcount::check_identity_2_range(50, 8);
  Report parity = starcount::check_t_parity_range(49);
  r.details["identity"] = cong.to_json();
  r.details["t_parity"] = parity.to_json();
  if (!cong.ok) r.fail({{"identity", cong.counterexample}});
  if (!parity.ok) r.fail({{"t_parity", parity.counterexample}});
  return r;
}

inline Report inequality_threshold() {
  Report r{"2*2^(2n+1) < n! for 12 <= n <= 64 and fails at n = 11", "n in [11, 64]"};
  Report bound = mostowski::check_seq_bound(12, 64);
  if (!bound.ok) r.fail({{"bound", bound.counterexample}});
  const bool holds_at_11 = mostowski::seq_bound_holds(11);
  r.details["holds_at_11"] = holds_at_11;
  r.details["least_n_from_which_bound_holds"] = bound.details["least_n_from_which_bound_holds"];
  if (holds_at_11) {
    r.fail({{"n", 11},
            {"lhs", (2 * pow2(23)).str()},
            {"rhs", factorial(11).str()},
            {"reason", "the inequality already holds at n = 11"}});
  }
  return r;
}

inline Report mostowski_counts() {
  Report r{"|enumerate_with_support(E)| = 2^(2|E|+1), distinct; ranks coherent under larger-atom extension",
           "|E| <= 4 for counts; all prefix pairs of subsets of a 5-atom pool for coherence"};
  const auto pool = pool_of({"-5", "-1", "0", "2/3", "6"});
  for (std::size_t m = 0; m <= 4; ++m) {
    const std::vector<Atom> e(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
    const auto list = mostowski::enumerate_with_support(e);
    std::set<SymSet> distinct(list.begin(), list.end());
    if (BigNat(list.size()) != pow2(2 * m + 1) || distinct.size() != list.size()) {
      r.fail({{"size", m}, {"count", list.size()}, {"distinct", distinct.size()}});
    }
  }
  std::size_t pairs = 0;
  for (std::uint32_t mask = 0; mask < 32; ++mask) {
    std::vector<Atom> e2;
    for (std::size_t i = 0; i < 5; ++i) {
      if (mask >> i & 1u) e2.push_back(pool[i]);
    }
    for (std::size_t m1 = 0; m1 <= e2.size(); ++m1) {
      const std::vector<Atom> e1(e2.begin(), e2.begin() + static_cast<std::ptrdiff_t>(m1));
      for (const SymSet& x : mostowski::enumerate_with_support(e1)) {
        ++pairs;
        if (mostowski::rank(x, e1) != mostowski::rank(x, e2)) {
          r.fail({{"E1", mostowski::atoms_to_json(e1)}, {"E2", mostowski::atoms_to_json(e2)},
                  {"set", mostowski::to_json(x)}});
        }
      }
    }
  }
  r.details["coherence_checks"] = pairs;
  return r;
}

inline Report fin_surjective() {
  Report r{"every canonical set with |supp| <= 3 over a 6-atom pool is fin_map(E)", "6-atom pool"};
  std::size_t checked = 0;
  for (const SymSet& x : mostowski::canonical_family(pool_of({"-3", "-1", "0", "1/2", "2", "10"}), 3)) {
    ++checked;
    const auto e = mostowski::fin_preimage(x);
    if (!(mostowski::fin_map(e) == x)) r.fail({{"set", mostowski::to_json(x)}});
  }
  r.details["sets"] = checked;
  return r;
}

inline Report seq_a_injective() {
  Report r{"Seq_A outputs pairwise distinct", "supports <= 3 atoms of a 6-atom pool disjoint from A24"};
  std::set<std::vector<Atom>> outputs;
  std::size_t checked = 0;
  for (const SymSet& y : mostowski::canonical_family(pool_of({"-3", "-1", "1/2", "51/2", "30", "100"}), 3)) {
    ++checked;
    if (!outputs.insert(mostowski::seq_a(y)).second) r.fail({{"set", mostowski::to_json(y)}});
  }
  r.details["sets"] = checked;
  return r;
}

inline void for_each_list(unsigned bound, std::size_t max_length, bool injective,
                          const std::function<void(const std::vector<BigNat>&)>& visit) {
  std::vector<BigNat> current;
  std::vector<bool> used(bound, false);
  std::function<void()> rec = [&]() {
    visit(current);
    if (current.size() == max_length) return;
    for (unsigned v = 0; v < bound; ++v) {
      if (injective && used[v]) continue;
      used[v] = true;
      current.push_back(v);
      rec();
      current.pop_back();
      used[v] = false;
    }
  };
  rec();
}

inline Report codec_round_trips() {
  using namespace encodings;
  Report r{"fin, seq and injective-seq codecs are mutually inverse",
           "codes in [0, 100000); sets of [0, 16); lists over [0, 20) of length <= 4; injective lists over [0, 12) "
           "of length <= 4"};
  for (unsigned n = 0; n < 100000; ++n) {
    if (fin_encode(fin_decode(n)) != n) r.fail({{"codec", "fin"}, {"code", n}});
    if (seq_encode(seq_decode(n)) != n) r.fail({{"codec", "seq"}, {"code", n}});
    if (inj_encode(inj_decode(n)) != n) r.fail({{"codec", "injSeq"}, {"code", n}});
  }
  for (unsigned mask = 0; mask < (1u << 16); ++mask) {
    FinSetCode s;
    for (unsigned b = 0; b < 16; ++b) {
      if (mask >> b & 1u) s.push_back(b);
    }
    if (fin_decode(fin_encode(s)) != s) r.fail({{"codec", "fin"}, {"mask", mask}});
  }
  std::size_t lists = 0;
  for_each_list(20, 4, false, [&](const std::vector<BigNat>& s) {
    ++lists;
    if (seq_decode(seq_encode(s)) != s) r.fail({{"codec", "seq"}, {"length", s.size()}});
  });
  for_each_list(12, 4, true, [&](const std::vector<BigNat>& s) {
    ++lists;
    if (inj_decode(inj_encode(s)) != s) r.fail({{"codec", "injSeq"}, {"length", s.size()}});
  });
  r.details["lists"] = lists;
  return r;
}

inline Report equivalence_sweep() { return specker::thm3_fact_sweep(500, 2024, 8, 6); }

inline Report hereditary_levels() {
  using namespace hereditary;
  Report r{"|A_1| = 1, |A_2| = 3, k_2 = 2, |A_3| = 47, k_3 = 8; Psi injective; 2 images of Y at level 1",
           "levels 0..3"};
  const LevelState s = build_level(3);
  const std::vector<std::pair<std::string, std::uint64_t>> got{{"|A_1|", s.atoms_at(1)}, {"|A_2|", s.atoms_at(2)},
                                                               {"k_2", s.group_size(2)}, {"|A_3|", s.atoms_at(3)},
                                                               {"k_3", s.group_size(3)}};
  const std::vector<std::uint64_t> expected{1, 3, 2, 47, 8};
  for (std::size_t i = 0; i < got.size(); ++i) {
    r.details[got[i].first] = got[i].second;
    if (got[i].second != expected[i]) r.fail({{got[i].first, got[i].second}, {"expected", expected[i]}});
  }
  std::set<AtomId> seen;
  for (const Fiber& fb : s.fibers()) {
    const auto fiber = psi(s, fb.seq);
    for (AtomId x : fiber) {
      if (!seen.insert(x).second) r.fail({{"psi_overlap_at", s.name(x)}});
    }
    if (fiber.empty()) r.fail({{"psi_empty_fiber_level", fb.level}});
  }
  const Report fact3 = fact3_counter(build_level(2), {0});
  r.details["Y_images"] = fact3.details["Y_images"];
  if (fact3.details["Y_images"] != 2) r.fail({{"Y_images", fact3.details["Y_images"]}});
  return r;
}

inline json fixture_doc(const std::string& name) { return json::parse(fixtures::embedded().at(name)); }

inline Subset subset_of(const specker::Universe& u, const json& tokens) {
  Subset s = 0;
  for (const auto& t : tokens) s |= specker::singleton(*u.find(t.get<std::string>()));
  return s;
}

inline void check_replay(Report& r, const std::string& fixture, const specker::DiagOutcome& o,
                         const specker::BijectionOracle& oracle, std::size_t& replayed) {
  if (!o.witness) return;
  ++replayed;
  Report again = specker::replay(*o.witness, oracle);
  if (!again.ok) r.fail({{"fixture", fixture}, {"replay", again.counterexample}});
}

inline Report specker_engines() {
  using namespace specker;
  Report r{"engines follow the fixture scripts, the diagonal differs from every Gamma(k), every witness replays",
           "fixtures in data/oracles"};
  std::size_t replayed = 0;

  {
    json doc = fixture_doc("thm5_eight");
    BijectionOracle oracle = oracle_from_json(doc);
    const Universe& u = oracle.universe();
    Thm5Run run = thm5_run(*u.find(doc["expect"]["s0"].get<std::string>()), oracle, 10);
    r.details["thm5_extensions"] = run.run.extensions();
    if (run.run.extensions() < 2) r.fail({{"fixture", "thm5_eight"}, {"extensions", run.run.extensions()}});
    for (std::size_t i = 0; i < run.stages.size(); ++i) {
      const auto& st = run.stages[i];
      if (st.gammas.size() != run.setup.cs.size()) continue;
      for (std::size_t k = 0; k < st.witnesses.size(); ++k) {
        const auto& w = st.witnesses[k];
        if (!w || !contains(run.setup.cs[k], *w) || contains(st.t, *w) == contains(st.gammas[k], *w)) {
          r.fail({{"fixture", "thm5_eight"}, {"stage", i}, {"k", k}, {"reason", "t agrees with Gamma(k)"}});
        }
      }
    }
    for (const auto& o : run.run.steps) check_replay(r, "thm5_eight", o, oracle, replayed);
  }

  {
    json doc = fixture_doc("thm3_six");
    BijectionOracle oracle = oracle_from_json(doc);
    const json& expect = doc["expect"];
    std::vector<Subset> stages;
    std::vector<std::string> got;
    for (std::size_t step = 0; step < 10; ++step) {
      DiagOutcome o = thm3_stage(stages, oracle);
      got.push_back(outcome_name(o.kind));
      check_replay(r, "thm3_six", o, oracle, replayed);
      if (o.kind != OutcomeKind::extended) {
        if (!o.witness || o.witness->kind != expect["witness_kind"]) r.fail({{"fixture", "thm3_six"}, {"final", outcome_to_json(o, oracle)}});
        break;
      }
      if (step < expect["stages"].size() && *o.stage != subset_of(oracle.universe(), expect["stages"][step])) {
        r.fail({{"fixture", "thm3_six"}, {"step", step}, {"stage", oracle.universe().subset_to_json(*o.stage)}});
      }
      stages.push_back(*o.stage);
    }
    if (json(got) != expect["outcomes"]) r.fail({{"fixture", "thm3_six"}, {"outcomes", got}});
  }

  for (const char* name : {"thm4_extend", "thm4_collision", "thm4_stop_five", "thm4_stop_four"}) {
    json doc = fixture_doc(name);
    BijectionOracle oracle = oracle_from_json(doc);
    const Universe& u = oracle.universe();
    Run run = thm4_engine(oracle, 12);
    const json& script = doc["expect"]["outcomes"];
    if (run.steps.size() != script.size()) {
      r.fail({{"fixture", name}, {"steps", run.steps.size()}, {"scripted", script.size()}});
      continue;
    }
    for (std::size_t i = 0; i < script.size(); ++i) {
      const DiagOutcome& o = run.steps[i];
      bool match = outcome_name(o.kind) == script[i]["outcome"];
      if (script[i].contains("element")) match = match && o.element && u.token(*o.element) == script[i]["element"];
      if (script[i].contains("witness_kind")) match = match && o.witness && o.witness->kind == script[i]["witness_kind"];
      if (!match) r.fail({{"fixture", name}, {"step", i}, {"got", outcome_to_json(o, oracle)}, {"scripted", script[i]}});
      check_replay(r, name, o, oracle, replayed);
    }
  }
  r.details["witnesses_replayed"] = replayed;
  return r;
}

}  // namespace detail

inline std::vector<Criterion> criteria() {
  return {
      {1, "star values", 1, detail::star_values},
      {2, "scan-pow2 to 10^6", 600000, detail::scan_pow2_million},
      {3, "parity law to 10^4", 1000, [] { return starcount::check_parity_law(10000); }},
      {4, "divisibility lemma r <= 4 to 10^4", 10000, detail::divisibility},
      {5, "congruence identity and T(n) parity", 30000, detail::identity_two},
      {6, "sequence bound threshold at 12", 1, detail::inequality_threshold},
      {7, "Mostowski counts and coherence", 10000, detail::mostowski_counts},
      {8, "Fin surjectivity on the fragment", 30000, detail::fin_surjective},
      {9, "Seq_A injectivity", 30000, detail::seq_a_injective},
      {10, "codec round trips", 30000, detail::codec_round_trips},
      {11, "g(x) = g(y) <=> x ~ y on 500 instances", 5000, detail::equivalence_sweep},
      {12, "hereditary levels", 60000, detail::hereditary_levels},
      {13, "specker engines on fixtures", 60000, detail::specker_engines},
  };
}

inline Result run_criterion(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Report report;
  try {
    report = c.check();
  } catch (const std::exception& e) {
    report = Report{c.title, "", true, nullptr, json::object()};
    report.fail({{"exception", e.what()}});
  }
  const double elapsed =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return {c.id, c.title, report.ok && elapsed < c.limit_ms, elapsed, c.limit_ms, report};
}

/// Runs the criteria with the given ids (all when empty).
inline std::vector<Result> run(const std::set<int>& only = {}) {
  std::vector<Result> out;
  for (const Criterion& c : criteria()) {
    if (only.empty() || only.count(c.id)) out.push_back(run_criterion(c));
  }
  return out;
}

}  // namespace choiceless::acceptance
