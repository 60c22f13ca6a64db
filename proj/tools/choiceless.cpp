#include <chrono>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "choiceless/acceptance.hpp"
#include "choiceless/encodings.hpp"
#include "choiceless/hereditary.hpp"
#include "choiceless/mostowski.hpp"
#include "choiceless/ordinals.hpp"
#include "choiceless/specker.hpp"
#include "choiceless/starcount.hpp"

using namespace choiceless;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_bad_oracle = 3;

/// What a subcommand produced: a status among ok, counterexample, witness,
/// exhausted, and its JSON payload.
struct Outcome {
  std::string status = "ok";
  json payload;
};

Outcome from_report(const Report& r) { return {r.status(), r.to_json()}; }

/// Naturals that fit in a double exactly print as numbers, larger ones as
/// decimal strings.
json natural(const BigNat& n) {
  if (n < (BigNat(1) << 53)) return n.convert_to<std::uint64_t>();
  return n.str();
}

json naturals(const std::vector<BigNat>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(natural(x));
  return out;
}

json ordinal_list(const std::vector<ordinals::Ordinal>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(ordinals::to_string(x));
  return out;
}

json parse_json_arg(const std::string& text, const std::string& flag) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    throw std::invalid_argument(flag + " is not valid JSON");
  }
}

std::vector<BigNat> parse_naturals(const json& j, const std::string& flag) {
  if (!j.is_array()) throw std::invalid_argument(flag + " must be a JSON array");
  std::vector<BigNat> out;
  for (const auto& v : j) {
    if (v.is_number_unsigned()) out.emplace_back(v.get<std::uint64_t>());
    else if (v.is_string()) out.push_back(parse_bignat(v.get<std::string>()));
    else throw std::invalid_argument(flag + " entries must be naturals or decimal strings");
  }
  return out;
}

std::string outcome_status(const specker::DiagOutcome& o) {
  switch (o.kind) {
    case specker::OutcomeKind::witness: return "witness";
    case specker::OutcomeKind::exhausted: return "exhausted";
    default: return "ok";
  }
}

Outcome run_payload(const specker::Run& run, const specker::BijectionOracle& oracle) {
  json steps = json::array();
  for (const auto& o : run.steps) steps.push_back(specker::outcome_to_json(o, oracle));
  return {outcome_status(run.last()),
          {{"extensions", run.extensions()}, {"final", outcome_name(run.last().kind)}, {"steps", steps},
           {"trace", run.trace}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite, executable fragments of choiceless cardinal arithmetic. Output is JSON on stdout."};
  app.require_subcommand(1);
  bool pretty = false;
  bool wrap = false;
  std::uint64_t seed = 2024;
  app.add_flag("--pretty", pretty, "indent the JSON output");
  app.add_flag("--report", wrap, "wrap the payload in a run report with command, parameters, status and timing");
  app.add_option("--seed", seed, "seed for randomized sweeps");
  app.fallthrough();

  std::function<Outcome()> action;
  std::string command;
  json parameters = json::object();
  auto on = [&](CLI::App* sub, std::function<Outcome()> fn) {
    sub->callback([&, sub, fn] {
      command = sub->get_parent()->get_parent() ? sub->get_parent()->get_name() + " " + sub->get_name()
                                                 : sub->get_name();
      for (const CLI::Option* opt : sub->get_options()) {
        if (opt->count() > 0 && opt->get_name() != "--help") parameters[opt->get_name()] = opt->as<std::string>();
      }
      action = fn;
    });
  };

  // ordinal
  auto* ord = app.add_subcommand("ordinal", "ordinals below epsilon_0 in Cantor normal form");
  ord->require_subcommand(1);
  std::string a_text, b_text, index_text;
  auto* ord_parse = ord->add_subcommand("parse", "normalize a notation");
  ord_parse->add_option("a", a_text)->required();
  on(ord_parse, [&] { return Outcome{"ok", {{"ordinal", ordinals::to_string(ordinals::parse_ordinal(a_text))}}}; });
  auto* ord_cmp = ord->add_subcommand("compare", "compare two ordinals (-1, 0, 1)");
  ord_cmp->add_option("a", a_text)->required();
  ord_cmp->add_option("b", b_text)->required();
  on(ord_cmp, [&] {
    const auto c = ordinals::compare(ordinals::parse_ordinal(a_text), ordinals::parse_ordinal(b_text));
    return Outcome{"ok", {{"order", c < 0 ? -1 : (c > 0 ? 1 : 0)}}};
  });
  auto* ord_add = ord->add_subcommand("add", "ordinal sum a + b");
  ord_add->add_option("a", a_text)->required();
  ord_add->add_option("b", b_text)->required();
  on(ord_add, [&] {
    return Outcome{"ok", {{"sum", ordinals::to_string(ordinals::add(ordinals::parse_ordinal(a_text),
                                                                     ordinals::parse_ordinal(b_text)))}}};
  });
  auto* ord_rev = ord->add_subcommand("reverse", "reverse the order of the terms");
  ord_rev->add_option("a", a_text)->required();
  on(ord_rev, [&] {
    return Outcome{"ok", {{"reverse", ordinals::to_string(ordinals::reverse(ordinals::parse_ordinal(a_text)))}}};
  });
  auto* ord_index = ord->add_subcommand("index", "natural-number index of a notation, or the notation at --of N");
  ord_index->add_option("a", a_text);
  ord_index->add_option("--of", index_text, "index to invert");
  on(ord_index, [&] {
    if (!index_text.empty()) {
      return Outcome{"ok", {{"ordinal", ordinals::to_string(ordinals::unindex(parse_bignat(index_text)))}}};
    }
    if (a_text.empty()) throw std::invalid_argument("give an ordinal or --of N");
    return Outcome{"ok", {{"index", ordinals::nat_index(ordinals::parse_ordinal(a_text)).str()}}};
  });

  // encode
  auto* enc = app.add_subcommand("encode", "codecs for finite sets (fin), sequences (seq), injective sequences (Seq)");
  std::string codec, encode_text, decode_text, alpha_text;
  enc->add_option("codec", codec, "fin | seq | Seq")->required()->check(CLI::IsMember({"fin", "seq", "Seq"}));
  auto* enc_opt = enc->add_option("--encode", encode_text, "JSON array of naturals (or of ordinals with --alpha)");
  auto* dec_opt = enc->add_option("--decode", decode_text, "code: a natural (or an ordinal below --alpha)");
  enc_opt->excludes(dec_opt);
  enc->add_option("--alpha", alpha_text, "lift to the ordinals below an infinite alpha");
  on(enc, [&] {
    using namespace encodings;
    const std::string key = codec == "fin" ? "set" : "sequence";
    if (encode_text.empty() == decode_text.empty()) throw std::invalid_argument("give exactly one of --encode, --decode");
    if (!alpha_text.empty()) {
      const Carrier carrier(ordinals::parse_ordinal(alpha_text));
      if (!decode_text.empty()) {
        const auto beta = ordinals::parse_ordinal(decode_text);
        const auto xs = codec == "fin" ? carrier.fin_decode(beta)
                        : codec == "seq" ? carrier.seq_decode(beta)
                                         : carrier.inj_decode(beta);
        return Outcome{"ok", {{key, ordinal_list(xs)}}};
      }
      std::vector<ordinals::Ordinal> xs;
      for (const auto& v : parse_json_arg(encode_text, "--encode")) xs.push_back(ordinals::parse_ordinal(v.get<std::string>()));
      const auto code = codec == "fin" ? carrier.fin_encode(xs)
                        : codec == "seq" ? carrier.seq_encode(xs)
                                         : carrier.inj_encode(xs);
      return Outcome{"ok", {{"code", ordinals::to_string(code)}}};
    }
    if (!decode_text.empty()) {
      const BigNat code = parse_bignat(decode_text);
      if (codec == "fin") {
        json set = json::array();
        for (std::size_t x : fin_decode(code)) set.push_back(x);
        return Outcome{"ok", {{"set", set}}};
      }
      return Outcome{"ok", {{"sequence", naturals(codec == "seq" ? seq_decode(code) : inj_decode(code))}}};
    }
    const auto xs = parse_naturals(parse_json_arg(encode_text, "--encode"), "--encode");
    if (codec == "fin") {
      FinSetCode set;
      for (const auto& x : xs) set.push_back(x.convert_to<std::size_t>());
      std::sort(set.begin(), set.end());
      return Outcome{"ok", {{"code", fin_encode(set).str()}}};
    }
    return Outcome{"ok", {{"code", (codec == "seq" ? seq_encode(xs) : inj_encode(xs)).str()}}};
  });

  // star
  auto* star = app.add_subcommand("star", "n* = number of injective sequences over an n-element set");
  std::size_t star_n = 0;
  std::string star_mod;
  bool star_parity = false;
  star->add_option("--n", star_n)->required();
  auto* mod_opt = star->add_option("--mod", star_mod, "residue modulo M");
  star->add_flag("--parity", star_parity, "parity only")->excludes(mod_opt);
  on(star, [&] {
    if (star_parity) return Outcome{"ok", {{"parity", starcount::star_mod(star_n, 2) == 0 ? "even" : "odd"}}};
    if (!star_mod.empty()) return Outcome{"ok", {{"value", starcount::star_mod(star_n, parse_bignat(star_mod)).str()}}};
    return Outcome{"ok", {{"value", starcount::star(star_n).str()}}};
  });

  auto* scan = app.add_subcommand("scan-pow2", "all n <= limit with n* a power of two");
  std::size_t scan_limit = 0;
  scan->add_option("--limit", scan_limit)->required();
  on(scan, [&] { return Outcome{"ok", {{"hits", starcount::scan_pow2(scan_limit)}}}; });

  // lemmas
  auto* lem = app.add_subcommand("lemmas", "exhaustive checks of the n* arithmetic");
  lem->require_subcommand(1);
  unsigned lem_r = 4;
  std::size_t lem_limit = 10000, lem_n_max = 50, lem_k_max = 8, lem_n = 3, lem_t_max = 1000;
  auto* lem_div = lem->add_subcommand("divisibility", "2^r | n* => 2^r | (n+2^r)* and 2^r does not divide (n+t)*");
  lem_div->add_option("--r", lem_r)->check(CLI::Range(1u, 16u));
  lem_div->add_option("--limit", lem_limit);
  on(lem_div, [&] { return from_report(starcount::check_divisibility_lemma(lem_r, lem_limit)); });
  auto* lem_id = lem->add_subcommand("identity2", "(n+2^k)* == 2^k T(n) + n* (mod 2^(k+1))");
  lem_id->add_option("--n-max", lem_n_max);
  lem_id->add_option("--k-max", lem_k_max);
  on(lem_id, [&] { return from_report(starcount::check_identity_2_range(lem_n_max, lem_k_max)); });
  auto* lem_tp = lem->add_subcommand("tparity", "T(n) odd for odd n");
  lem_tp->add_option("--n-max", lem_n_max);
  on(lem_tp, [&] { return from_report(starcount::check_t_parity_range(lem_n_max)); });
  auto* lem_gap = lem->add_subcommand("gap", "n* = 2^k and (n+t)* a power of two imply 2^k | t");
  lem_gap->add_option("--n", lem_n);
  lem_gap->add_option("--t-max", lem_t_max);
  on(lem_gap, [&] { return from_report(starcount::check_star_gap_range(lem_n, lem_t_max)); });

  // mostowski
  auto* mos = app.add_subcommand("mostowski", "symmetric subsets of the rational atoms");
  mos->require_subcommand(1);
  std::string support_text = "[]", set_text, pool_text, map_text;
  std::size_t max_support = 3;
  auto* mos_enum = mos->add_subcommand("enumerate", "all sets with support inside E, in rank order");
  mos_enum->add_option("--support", support_text, "JSON array of atoms, e.g. [\"0\",\"1/2\"]");
  on(mos_enum, [&] {
    json sets = json::array();
    for (const auto& x : mostowski::enumerate_with_support(mostowski::atoms_from_json(parse_json_arg(support_text, "--support")))) {
      sets.push_back(mostowski::to_json(x));
    }
    return Outcome{"ok", {{"count", sets.size()}, {"sets", sets}}};
  });
  auto* mos_rank = mos->add_subcommand("rank", "rank of a set among those supported inside E");
  mos_rank->add_option("--support", support_text);
  mos_rank->add_option("--set", set_text, "{\"support\": [...], \"pattern\": \"...\"}")->required();
  on(mos_rank, [&] {
    const auto x = mostowski::symset_from_json(parse_json_arg(set_text, "--set"));
    return Outcome{"ok", {{"rank", mostowski::rank(x, mostowski::atoms_from_json(parse_json_arg(support_text, "--support"))).str()}}};
  });
  auto* mos_fin = mos->add_subcommand("fin-map", "Fin(E), or with --set a preimage E of the set");
  mos_fin->add_option("--support", support_text);
  mos_fin->add_option("--set", set_text);
  on(mos_fin, [&] {
    if (!set_text.empty()) {
      const auto e = mostowski::fin_preimage(mostowski::symset_from_json(parse_json_arg(set_text, "--set")));
      return Outcome{"ok", {{"preimage", mostowski::atoms_to_json(e)}}};
    }
    return Outcome{"ok", {{"set", mostowski::to_json(mostowski::fin_map(mostowski::atoms_from_json(parse_json_arg(support_text, "--support"))))}}};
  });
  auto* mos_seq = mos->add_subcommand("seq-a", "the injective atom sequence assigned to a set");
  mos_seq->add_option("--set", set_text)->required();
  on(mos_seq, [&] {
    return Outcome{"ok", {{"sequence", mostowski::atoms_to_json(mostowski::seq_a(mostowski::symset_from_json(parse_json_arg(set_text, "--set"))))}}};
  });
  auto pool_family = [&] {
    return mostowski::canonical_family(mostowski::atoms_from_json(parse_json_arg(pool_text, "--pool")), max_support);
  };
  auto* mos_inj = mos->add_subcommand("check-injective", "Seq_A pairwise distinct over every set supported in a pool");
  mos_inj->add_option("--pool", pool_text)->required();
  mos_inj->add_option("--max-support", max_support);
  on(mos_inj, [&] {
    Report r{"Seq_A outputs pairwise distinct", pool_text + ", support <= " + std::to_string(max_support)};
    std::map<std::vector<mostowski::Atom>, mostowski::SymSet> seen;
    std::size_t count = 0;
    for (const auto& y : pool_family()) {
      ++count;
      auto [it, fresh] = seen.emplace(mostowski::seq_a(y), y);
      if (!fresh) r.fail({{"first", mostowski::to_json(it->second)}, {"second", mostowski::to_json(y)}});
    }
    r.details["sets"] = count;
    return from_report(r);
  });
  auto* mos_onto = mos->add_subcommand("check-onto", "every set supported in a pool is Fin(E) for some E");
  mos_onto->add_option("--pool", pool_text)->required();
  mos_onto->add_option("--max-support", max_support);
  on(mos_onto, [&] {
    Report r{"fin_map(fin_preimage(x)) = x", pool_text + ", support <= " + std::to_string(max_support)};
    std::size_t count = 0;
    for (const auto& x : pool_family()) {
      ++count;
      if (!(mostowski::fin_map(mostowski::fin_preimage(x)) == x)) r.fail({{"set", mostowski::to_json(x)}});
    }
    r.details["sets"] = count;
    return from_report(r);
  });
  auto* mos_auto = mos->add_subcommand("automorphism", "apply a piecewise-linear automorphism to a set");
  mos_auto->add_option("--map", map_text, "JSON array of {from, slope, offset} pieces")->required();
  mos_auto->add_option("--set", set_text)->required();
  on(mos_auto, [&] {
    const auto pi = mostowski::automorphism_from_json(parse_json_arg(map_text, "--map"));
    const auto x = mostowski::symset_from_json(parse_json_arg(set_text, "--set"));
    return Outcome{"ok", {{"image", mostowski::to_json(mostowski::apply_automorphism(pi, x))}}};
  });

  // cofinite
  auto* cof = app.add_subcommand("cofinite", "finite/cofinite subsets of the atoms");
  cof->require_subcommand(1);
  std::string rows_text;
  auto* cof_dec = cof->add_subcommand("decompose", "split k rows into cofinite flags and a finite part");
  cof_dec->add_option("--rows", rows_text, "JSON array of sets")->required();
  on(cof_dec, [&] {
    std::vector<mostowski::SymSet> rows;
    for (const auto& j : parse_json_arg(rows_text, "--rows")) rows.push_back(mostowski::symset_from_json(j));
    const auto d = mostowski::cofinite_decompose(rows);
    json finite = json::array();
    for (const auto& [row, atom] : d.finite) finite.push_back({row, mostowski::atom_to_string(atom)});
    return Outcome{"ok", {{"flags", d.flags}, {"finite", finite}}};
  });

  // hereditary
  auto* her = app.add_subcommand("hereditary", "finite levels of the hereditary construction");
  her->require_subcommand(1);
  std::size_t level = 2;
  auto* her_build = her->add_subcommand("build", "build levels 0..n and summarize them");
  her_build->add_option("--level", level)->required();
  on(her_build, [&] {
    const auto s = hereditary::build_level(level);
    json payload = hereditary::level_summary(s);
    const Report levels = hereditary::check_levels(s);
    payload["check_levels"] = levels.to_json();
    if (level >= 2) payload["fact3_level_1"] = hereditary::fact3_counter(s, {0}).to_json();
    return Outcome{levels.status(), payload};
  });

  // specker
  auto* spk = app.add_subcommand("specker", "diagonal engines against oracle tables");
  spk->require_subcommand(1);
  std::string oracle_path, s0_token;
  std::size_t budget = 8, trials = 500;
  bool recommence = false;
  auto* spk_fact = spk->add_subcommand("thm3-fact", "g(x) = g(y) <=> x ~ y on random instances (uses --seed)");
  spk_fact->add_option("--trials", trials);
  on(spk_fact, [&] { return from_report(specker::thm3_fact_sweep(trials, seed)); });
  auto add_engine = [&](const std::string& name, const std::string& help,
                        std::function<Outcome(specker::BijectionOracle&)> fn) {
    auto* sub = spk->add_subcommand(name, help);
    sub->add_option("--oracle", oracle_path, "oracle JSON file")->required();
    sub->add_option("--budget", budget, "maximum number of extensions");
    on(sub, [&, fn] {
      specker::BijectionOracle oracle = specker::load_oracle(oracle_path);
      return fn(oracle);
    });
    return sub;
  };
  add_engine("thm3-run", "fin(S) stages against a finSet oracle",
             [&](specker::BijectionOracle& o) { return run_payload(specker::thm3_run(o, budget), o); });
  add_engine("lemma-run", "lemma stages against an injSeq oracle (rows read as J)",
             [&](specker::BijectionOracle& o) { return run_payload(specker::lemma_run(o, budget), o); });
  add_engine("thm4-run", "Seq(S) stages against an injSeq oracle",
             [&](specker::BijectionOracle& o) {
               specker::Thm4Options options;
               options.recommence_after_guard_failure = recommence;
               return run_payload(specker::thm4_engine(o, budget, options), o);
             })
      ->add_flag("--recommence", recommence, "run the refinement even after a failed stop guard");
  add_engine("thm5-run", "seq(S) stages against a seq oracle",
             [&](specker::BijectionOracle& o) {
               std::size_t s0 = 0;
               if (!s0_token.empty()) {
                 auto found = o.universe().find(s0_token);
                 if (!found) throw std::invalid_argument("--s0 is not a universe token");
                 s0 = *found;
               }
               specker::Thm5Run r = specker::thm5_run(s0, o, budget);
               Outcome out = run_payload(r.run, o);
               json cs = json::array();
               for (auto c : r.setup.cs) cs.push_back(o.universe().subset_to_json(c));
               out.payload["c"] = cs;
               return out;
             })
      ->add_option("--s0", s0_token, "token of s0 (default: the first universe token)");

  // selftest
  auto* self = app.add_subcommand("selftest", "run the acceptance criteria");
  on(self, [&] {
    json results = json::array();
    bool all = true;
    for (const auto& r : acceptance::run()) {
      json entry = r.to_json();
      entry.erase("elapsed_ms");  // keep the output deterministic
      results.push_back(entry);
      all = all && r.passed;
    }
    return Outcome{all ? "ok" : "counterexample", {{"passed", all}, {"criteria", results}}};
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const auto extras = app.remaining();
    if (!extras.empty() && app.get_subcommands().empty()) {
      std::cerr << "unknown subcommand '" << extras.front() << "'\n\n" << app.help();
    } else {
      std::cerr << e.what() << "\n\n" << app.help();
    }
    return exit_usage;
  }

  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = action();
  } catch (const specker::oracle_format_error& e) {
    std::cout << json{{"error", e.what()}, {"location", e.location}}.dump(pretty ? 2 : -1) << '\n';
    return exit_bad_oracle;
  } catch (const std::exception& e) {
    std::cout << json{{"error", e.what()}}.dump(pretty ? 2 : -1) << '\n';
    return 1;
  }
  json doc = out.payload;
  if (wrap) {
    const double elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    doc = {{"command", command}, {"parameters", parameters}, {"status", out.status}, {"payload", out.payload},
           {"elapsed", elapsed}};
  }
  std::cout << doc.dump(pretty ? 2 : -1) << '\n';
  return out.status == "ok" ? 0 : 1;
}
