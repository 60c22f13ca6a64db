#pragma once

// Finite stages of the fin(S) versus P(S) diagonal construction.
//
//   D_{x,mu} = intersection of the stages s_iota (iota < mu) containing x,
//              the whole universe when there are none.
//   g(x)     = {mu : x in s_mu and s_mu n D_{x,mu} != D_{x,mu}}.
//   eta      = rank of the fin-code of g(x) among the realized codes.
//   Gamma    = B o G o eta o g,   S_alpha = {x : x not in Gamma(x)}.

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "choiceless/encodings.hpp"
#include "choiceless/specker/oracle.hpp"

namespace choiceless::specker {

inline Subset d_set(std::size_t x, const std::vector<Subset>& stages, std::size_t mu, Subset full) {
  Subset d = full;
  for (std::size_t iota = 0; iota < mu; ++iota) {
    if (contains(stages[iota], x)) d &= stages[iota];
  }
  return d;
}

/// g(x) as the ascending list of stage indices.
inline std::vector<std::size_t> thm3_g(std::size_t x, const std::vector<Subset>& stages, Subset full) {
  std::vector<std::size_t> out;
  Subset d = full;
  for (std::size_t mu = 0; mu < stages.size(); ++mu) {
    if (!contains(stages[mu], x)) continue;
    if ((stages[mu] & d) != d) out.push_back(mu);
    d &= stages[mu];
  }
  return out;
}

/// g(x) = g(y) <=> x ~ y for every pair, and g(x) lies in {0..alpha-1}.
inline Report thm3_fact_check(std::size_t universe_size, const std::vector<Subset>& stages) {
  Report report{"g(x) = g(y) <=> x ~ y, and g(x) is a finite subset of alpha",
                "|S| = " + std::to_string(universe_size) + ", alpha = " + std::to_string(stages.size())};
  const Subset full = universe_size == 64 ? ~Subset{0} : (Subset{1} << universe_size) - 1;
  std::vector<std::vector<std::size_t>> g(universe_size);
  for (std::size_t x = 0; x < universe_size; ++x) {
    g[x] = thm3_g(x, stages, full);
    for (std::size_t mu : g[x]) {
      if (mu >= stages.size()) report.fail({{"x", x}, {"g_entry_out_of_range", mu}});
    }
  }
  std::size_t pairs = 0;
  for (std::size_t x = 0; x < universe_size; ++x) {
    for (std::size_t y = x + 1; y < universe_size; ++y) {
      ++pairs;
      bool equivalent = true;
      for (Subset s : stages) equivalent = equivalent && contains(s, x) == contains(s, y);
      if ((g[x] == g[y]) != equivalent) {
        report.fail({{"x", x}, {"y", y}, {"g_x", g[x]}, {"g_y", g[y]}, {"equivalent", equivalent}});
      }
    }
  }
  report.details["pairs"] = pairs;
  return report;
}

/// Random instances with |S| in 1..max_size and alpha in 0..max_alpha.
inline Report thm3_fact_sweep(std::size_t trials, std::uint64_t seed, std::size_t max_size = 8,
                              std::size_t max_alpha = 6) {
  Report report{"g(x) = g(y) <=> x ~ y",
                std::to_string(trials) + " random instances, |S| <= " + std::to_string(max_size) +
                    ", alpha <= " + std::to_string(max_alpha) + ", seed " + std::to_string(seed)};
  std::mt19937_64 rng(seed);
  std::size_t pairs = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t size = 1 + rng() % max_size;
    const std::size_t alpha = rng() % (max_alpha + 1);
    std::vector<Subset> stages;
    for (std::size_t i = 0; i < alpha; ++i) stages.push_back(rng() & ((Subset{1} << size) - 1));
    Report one = thm3_fact_check(size, stages);
    pairs += one.details["pairs"].get<std::size_t>();
    if (!one.ok) {
      json cx = one.counterexample;
      cx["trial"] = trial;
      cx["stages"] = stages;
      report.fail(cx);
    }
  }
  report.details["pairs"] = pairs;
  return report;
}

/// Intermediate values of one diagonal stage, kept for inspection.
struct Thm3Pipeline {
  std::vector<std::vector<std::size_t>> g;
  std::vector<std::size_t> eta;        // per element
  std::size_t gamma = 0;               // number of realized g-values
  std::vector<Subset> h;               // per stage: the eta-values of its elements
  std::vector<std::size_t> G;          // eta-value -> stage index
  bool G_bijective = false;
  std::vector<Subset> gamma_values;    // Gamma(x) per element
  Subset diagonal = 0;
};

namespace detail {

/// g, eta, h and G for the given stages (no oracle access).
inline Thm3Pipeline thm3_pipeline(std::size_t size, const std::vector<Subset>& stages) {
  const Subset full = size == 64 ? ~Subset{0} : (Subset{1} << size) - 1;
  Thm3Pipeline p;
  std::set<BigNat> codes;
  std::vector<BigNat> code_of(size);
  for (std::size_t x = 0; x < size; ++x) {
    p.g.push_back(thm3_g(x, stages, full));
    code_of[x] = encodings::fin_encode(p.g.back());
    codes.insert(code_of[x]);
  }
  std::map<BigNat, std::size_t> rank;
  for (const auto& c : codes) rank.emplace(c, rank.size());
  for (std::size_t x = 0; x < size; ++x) p.eta.push_back(rank.at(code_of[x]));
  p.gamma = codes.size();

  const std::size_t alpha = stages.size();
  for (Subset s : stages) {
    Subset hv = 0;
    for (std::size_t x : members(s)) hv |= singleton(p.eta[x]);
    p.h.push_back(hv);
  }
  if (p.gamma == alpha) {
    std::vector<std::size_t> xs(p.gamma), ys(alpha);
    for (std::size_t i = 0; i < alpha; ++i) xs[i] = ys[i] = i;
    std::vector<Subset> sorted_h = p.h;
    std::sort(sorted_h.begin(), sorted_h.end());
    auto g_map = [&](std::size_t iota) {
      return static_cast<std::size_t>(std::lower_bound(sorted_h.begin(), sorted_h.end(), p.h[iota]) - sorted_h.begin());
    };
    auto bijection = encodings::cantor_bernstein(xs, ys, [](std::size_t xi) { return xi; }, g_map);
    for (std::size_t xi = 0; xi < p.gamma; ++xi) p.G.push_back(bijection.at(xi));
    p.G_bijective = true;
  } else {
    for (std::size_t xi = 0; xi < p.gamma; ++xi) p.G.push_back(xi % alpha);
  }
  return p;
}

}  // namespace detail

/// One stage: the bootstrap B^-1(S) when no stages exist, otherwise the
/// diagonal S_alpha sent back through B^-1.
inline DiagOutcome thm3_stage(const std::vector<Subset>& stages, BijectionOracle& oracle,
                              Thm3Pipeline* inspect = nullptr) {
  const Universe& u = oracle.universe();
  if (oracle.space() != Space::fin_set) throw std::invalid_argument("the fin(S) engine needs a finSet oracle");
  {
    std::set<Subset> distinct(stages.begin(), stages.end());
    if (distinct.size() != stages.size()) throw std::invalid_argument("stages must be pairwise distinct");
    for (Subset s : stages) {
      if (s & ~u.full()) throw std::invalid_argument("stage outside the universe");
    }
  }
  Subset target = u.full();
  json report{{"alpha", stages.size()}};
  if (!stages.empty()) {
    Thm3Pipeline p = detail::thm3_pipeline(u.size(), stages);
    // B on every stage; two stages with one answer already refute injectivity.
    std::vector<Subset> b_of_stage;
    std::map<Subset, std::pair<std::size_t, Exchange>> seen;  // answer -> (stage, exchange)
    for (std::size_t iota = 0; iota < stages.size(); ++iota) {
      auto answer = oracle.forward(subset_code(stages[iota]));
      if (!answer) {
        return DiagOutcome::exhausted({{"reason", "forward table has no row for a stage"},
                                       {"stage", u.subset_to_json(stages[iota])}});
      }
      auto [it, fresh] = seen.emplace(*answer, std::make_pair(iota, oracle.transcript().back()));
      if (!fresh) {
        return DiagOutcome::found(detail::collision(it->second.second, oracle.transcript().back(),
                                                    {{"stage_indices", {it->second.first, iota}}}));
      }
      b_of_stage.push_back(*answer);
    }
    for (std::size_t x = 0; x < u.size(); ++x) {
      p.gamma_values.push_back(b_of_stage[p.G[p.eta[x]]]);
      if (!contains(p.gamma_values.back(), x)) p.diagonal |= singleton(x);
    }
    target = p.diagonal;
    report["gamma"] = p.gamma;
    report["G_bijective"] = p.G_bijective;
    if (inspect) *inspect = p;
  }
  report["target"] = u.subset_to_json(target);

  auto code = oracle.backward(target);
  if (!code) return DiagOutcome::found(detail::non_surjective(oracle, oracle.transcript().back()));
  const Exchange back = oracle.transcript().back();
  auto check = oracle.forward(*code);
  if (!check || *check != target) {
    return DiagOutcome::found(Witness{"inverse_inconsistent", {back, oracle.transcript().back()}, report});
  }
  const Subset stage = static_cast<Subset>(*code);
  for (std::size_t beta = 0; beta < stages.size(); ++beta) {
    if (stages[beta] != stage) continue;
    // An earlier backward query with another target that returned this stage.
    for (const Exchange& e : oracle.transcript()) {
      if (!e.forward && e.answered && e.code == *code && e.subset != target) {
        return DiagOutcome::found(detail::collision(e, back, {{"stage_index", beta}}));
      }
    }
    report["reason"] = "diagonal returned to an existing stage";
    report["stage_index"] = beta;
    return DiagOutcome::stopped(report);
  }
  DiagOutcome out = DiagOutcome::extended_stage(stage);
  out.report = report;
  return out;
}

/// Repeats thm3_stage from no stages, for at most `budget` extensions.
inline Run thm3_run(BijectionOracle& oracle, std::size_t budget) {
  Run run;
  std::vector<Subset> stages;
  for (std::size_t step = 0; step <= budget; ++step) {
    const std::size_t mark = oracle.transcript().size();
    if (step == budget) {
      run.steps.push_back(DiagOutcome::exhausted({{"reason", "budget reached"}, {"budget", budget}}));
      break;
    }
    DiagOutcome o = thm3_stage(stages, oracle);
    detail::record(run, oracle, mark, stages.size(), outcome_name(o.kind));
    run.steps.push_back(o);
    if (o.kind != OutcomeKind::extended) break;
    stages.push_back(*o.stage);
  }
  return run;
}

}  // namespace choiceless::specker
