#pragma once

// Finite levels of a permutation model whose atoms code their own finite
// sequences.
//
//   A_0 = {a}, Sq(a) = <>, G_0 trivial.
//   E_n = sequences over A_n of length <= n outside range(Sq on A_n).
//   A_{n+1} = A_n plus atoms (n+1, z, i) for z in E_n and i < 2 k_n, with
//   Sq((n+1, z, i)) = z.
//   G_{n+1}: h acts as some g in G_n on A_n and sends (n+1, z, i) to
//   (n+1, g(z), i + j mod 2 k_n).
//
// Every group element is therefore a vector of per-level shifts; shifts at
// levels without new atoms act trivially and are kept at 0.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "choiceless/report.hpp"

namespace choiceless::hereditary {

using AtomId = std::uint32_t;
using Sequence = std::vector<AtomId>;

/// All atoms (level, seq, i) sharing one seq; ids first .. first+count-1.
struct Fiber {
  std::size_t level = 0;
  Sequence seq;
  AtomId first = 0;
  std::size_t count = 0;
};

/// Element of G_n: shifts[m-1] is the shift on level-m atoms.
struct Shift {
  std::vector<std::uint64_t> shifts;
  friend bool operator==(const Shift&, const Shift&) = default;
};

inline constexpr std::size_t kDefaultDepthCap = 3;

class LevelState {
 public:
  std::size_t n() const { return level_end_.size() - 1; }
  std::size_t atom_count() const { return level_end_.back(); }
  /// |A_m| for m <= n.
  std::size_t atoms_at(std::size_t m) const { return level_end_.at(m); }
  /// k_m for m <= n.
  std::uint64_t group_size(std::size_t m) const { return k_.at(m); }
  /// |E_m| for m < n.
  std::size_t fresh_sequences(std::size_t m) const { return fresh_.at(m); }
  /// Shift modulus 2 k_{m-1} of level m, or 0 when the level added no atoms.
  std::uint64_t modulus(std::size_t m) const { return modulus_.at(m); }

  const std::vector<Fiber>& fibers() const { return fibers_; }
  const Fiber& fiber_of(AtomId x) const { return fibers_.at(records_.at(x).fiber); }
  std::size_t level_of(AtomId x) const { return fiber_of(x).level; }
  std::size_t index_of(AtomId x) const { return records_.at(x).index; }
  const Sequence& sq(AtomId x) const {
    check(x);
    return fiber_of(x).seq;
  }

  std::optional<std::size_t> fiber_index(const Sequence& z) const {
    auto it = fiber_by_seq_.find(z);
    if (it == fiber_by_seq_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<AtomId> find(std::size_t level, const Sequence& z, std::size_t i) const {
    auto f = fiber_index(z);
    if (!f || fibers_[*f].level != level || i >= fibers_[*f].count) return std::nullopt;
    return static_cast<AtomId>(fibers_[*f].first + i);
  }

  std::string name(AtomId x) const {
    const Fiber& f = fiber_of(x);
    if (f.level == 0) return "a";
    std::string out = "(" + std::to_string(f.level) + ",<";
    for (std::size_t m = 0; m < f.seq.size(); ++m) out += (m ? "," : "") + name(f.seq[m]);
    return out + ">," + std::to_string(index_of(x)) + ")";
  }

  void check(AtomId x) const {
    if (x >= atom_count()) throw std::out_of_range("unknown atom " + std::to_string(x));
  }

  /// Image of x under the group element.
  AtomId apply(const Shift& h, AtomId x) const {
    const Fiber& f = fiber_of(x);
    if (f.level == 0) return x;
    Sequence image;
    image.reserve(f.seq.size());
    for (AtomId y : f.seq) image.push_back(apply(h, y));
    const Fiber& target = fibers_[fiber_by_seq_.at(image)];
    const std::uint64_t m = modulus_[f.level];
    const std::uint64_t shift = f.level - 1 < h.shifts.size() ? h.shifts[f.level - 1] : 0;
    return static_cast<AtomId>(target.first + (index_of(x) + shift) % m);
  }

  /// Permutation table of h on A_m (m <= n).
  std::vector<AtomId> permutation(const Shift& h, std::size_t m) const {
    std::vector<AtomId> table(level_end_.at(m));
    Sequence image;
    for (AtomId x = 0; x < table.size(); ++x) {
      const Fiber& f = fiber_of(x);
      if (f.level == 0) {
        table[x] = x;
        continue;
      }
      image.clear();
      for (AtomId y : f.seq) image.push_back(table[y]);
      const Fiber& target = fibers_[fiber_by_seq_.at(image)];
      const std::uint64_t shift = f.level - 1 < h.shifts.size() ? h.shifts[f.level - 1] : 0;
      table[x] = static_cast<AtomId>(target.first + (index_of(x) + shift) % modulus_[f.level]);
    }
    return table;
  }

  /// All k_m elements of G_m, in lexicographic order of their shift vectors.
  std::vector<Shift> group(std::size_t m) const {
    std::vector<Shift> out{Shift{std::vector<std::uint64_t>(m, 0)}};
    for (std::size_t level = 1; level <= m; ++level) {
      if (modulus_[level] == 0) continue;
      std::vector<Shift> next;
      for (const Shift& s : out) {
        for (std::uint64_t j = 0; j < modulus_[level]; ++j) {
          Shift t = s;
          t.shifts[level - 1] = j;
          next.push_back(t);
        }
      }
      out = std::move(next);
    }
    std::sort(out.begin(), out.end(), [](const Shift& a, const Shift& b) { return a.shifts < b.shifts; });
    return out;
  }

 private:
  friend LevelState build_level(std::size_t, std::size_t);

  struct Record {
    std::uint32_t fiber;
    std::uint32_t index;
  };

  void add_fiber(std::size_t level, Sequence seq, std::size_t count) {
    const auto id = static_cast<std::uint32_t>(fibers_.size());
    fiber_by_seq_.emplace(seq, id);
    fibers_.push_back(Fiber{level, std::move(seq), static_cast<AtomId>(records_.size()), count});
    for (std::size_t i = 0; i < count; ++i) records_.push_back(Record{id, static_cast<std::uint32_t>(i)});
  }

  std::vector<Fiber> fibers_;
  std::vector<Record> records_;
  std::map<Sequence, std::uint32_t> fiber_by_seq_;
  std::vector<std::size_t> level_end_;
  std::vector<std::uint64_t> k_;
  std::vector<std::size_t> fresh_;
  std::vector<std::uint64_t> modulus_;
};

/// Builds A_0 .. A_n. Levels above `depth_cap` must be requested explicitly
/// (level 4 has about 1.7 million atoms).
inline LevelState build_level(std::size_t n, std::size_t depth_cap = kDefaultDepthCap) {
  if (n > depth_cap) {
    throw std::invalid_argument("level " + std::to_string(n) + " exceeds the depth cap " + std::to_string(depth_cap) +
                                "; raise the cap to build it");
  }
  LevelState s;
  s.add_fiber(0, {}, 1);
  s.level_end_.push_back(1);
  s.k_.push_back(1);
  s.modulus_.push_back(0);
  for (std::size_t m = 0; m < n; ++m) {
    const auto base = static_cast<AtomId>(s.level_end_[m]);
    std::vector<Sequence> fresh;
    Sequence current;
    std::function<void()> walk = [&] {
      if (!s.fiber_by_seq_.count(current)) fresh.push_back(current);
      if (current.size() == m) return;
      for (AtomId x = 0; x < base; ++x) {
        current.push_back(x);
        walk();
        current.pop_back();
      }
    };
    walk();
    // Length first, then lexicographic by atom id.
    std::stable_sort(fresh.begin(), fresh.end(),
                     [](const Sequence& a, const Sequence& b) { return a.size() < b.size(); });
    const std::uint64_t width = 2 * s.k_[m];
    for (auto& z : fresh) s.add_fiber(m + 1, std::move(z), width);
    s.fresh_.push_back(fresh.size());
    s.modulus_.push_back(fresh.empty() ? 0 : width);
    s.k_.push_back(fresh.empty() ? s.k_[m] : s.k_[m] * width);
    s.level_end_.push_back(s.records_.size());
  }
  return s;
}

/// f_m(x) = Sq(x)(m) when m < length of Sq(x), otherwise empty.
inline std::optional<AtomId> f(const LevelState& s, std::size_t m, AtomId x) {
  const Sequence& z = s.sq(x);
  if (m < z.size()) return z[m];
  return std::nullopt;
}

/// Classes of x ~ y iff f_m(x) = f_m(y) for all m; these are the Sq-fibers.
inline std::vector<std::vector<AtomId>> eq_classes(const LevelState& s) {
  std::map<std::vector<std::int64_t>, std::vector<AtomId>> by_signature;
  std::size_t longest = 0;
  for (const Fiber& fb : s.fibers()) longest = std::max(longest, fb.seq.size());
  for (AtomId x = 0; x < s.atom_count(); ++x) {
    std::vector<std::int64_t> signature;
    for (std::size_t m = 0; m < longest; ++m) {
      auto v = f(s, m, x);
      signature.push_back(v ? static_cast<std::int64_t>(*v) : -1);
    }
    by_signature[signature].push_back(x);
  }
  std::vector<std::vector<AtomId>> out;
  for (auto& [sig, members] : by_signature) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

/// Psi(z) = {x : Sq(x) = z}.
inline std::vector<AtomId> psi(const LevelState& s, const Sequence& z) {
  for (AtomId x : z) s.check(x);
  auto f_index = s.fiber_index(z);
  if (!f_index) throw std::invalid_argument("sequence not yet realized at this level");
  const Fiber& fb = s.fibers()[*f_index];
  std::vector<AtomId> out;
  for (std::size_t i = 0; i < fb.count; ++i) out.push_back(static_cast<AtomId>(fb.first + i));
  return out;
}

/// Counting side of the third fact at level n: C = A_n, k = 2 k_n,
/// Y = even-indexed atoms of level n+1. fix(C) is enumerated inside the
/// group of the deepest built level, and orbits are reported per level.
inline Report fact3_at_level(const LevelState& s, std::size_t n) {
  if (n < 1) throw std::invalid_argument("fact 3 needs a level n >= 1");
  if (s.n() < n + 1) {
    throw std::invalid_argument("level too shallow: fact 3 at level " + std::to_string(n) + " needs level " +
                                std::to_string(n + 1) + " built");
  }
  const std::size_t c_size = s.atoms_at(n);
  const std::uint64_t k = 2 * s.group_size(n);
  std::set<AtomId> y;
  for (AtomId x = static_cast<AtomId>(c_size); x < s.atoms_at(n + 1); ++x) {
    if (s.index_of(x) % 2 == 0) y.insert(x);
  }
  std::set<std::set<AtomId>> images;
  std::vector<std::set<AtomId>> orbits(s.atom_count());
  std::size_t fixing = 0;
  bool identity_fixes = false;
  for (const Shift& h : s.group(s.n())) {
    auto table = s.permutation(h, s.n());
    bool fixes_c = true;
    for (AtomId x = 0; x < c_size && fixes_c; ++x) fixes_c = table[x] == x;
    if (!fixes_c) continue;
    ++fixing;
    bool identity = true;
    for (AtomId x = 0; x < table.size() && identity; ++x) identity = table[x] == x;
    identity_fixes = identity_fixes || identity;
    std::set<AtomId> image;
    for (AtomId x : y) image.insert(table[x]);
    images.insert(image);
    for (AtomId x = static_cast<AtomId>(c_size); x < table.size(); ++x) orbits[x].insert(table[x]);
  }
  std::size_t min_orbit = SIZE_MAX;
  json per_level = json::array();
  for (std::size_t m = n + 1; m <= s.n(); ++m) {
    std::size_t level_min = SIZE_MAX;
    for (AtomId x = static_cast<AtomId>(s.atoms_at(m - 1)); x < s.atoms_at(m); ++x) {
      level_min = std::min(level_min, orbits[x].size());
    }
    if (level_min == SIZE_MAX) continue;
    per_level.push_back({{"level", m}, {"min_orbit", level_min}});
    min_orbit = std::min(min_orbit, level_min);
  }
  if (min_orbit == SIZE_MAX) min_orbit = 0;

  Report report{"fix(C) moves Y to exactly k sets and every atom outside C to more than k atoms",
                "C = A_" + std::to_string(n) + ", fix(C) in G_" + std::to_string(s.n())};
  json y_names = json::array();
  for (AtomId x : y) y_names.push_back(s.name(x));
  report.details = {{"n", n},
                    {"C_size", c_size},
                    {"Y", y_names},
                    {"k", k},
                    {"fixing_elements", fixing},
                    {"identity_in_fix", identity_fixes},
                    {"Y_images", images.size()},
                    {"min_orbit_outside_C", min_orbit},
                    {"min_orbit_by_level", per_level},
                    {"Y_images_equal_two", images.size() == 2},
                    {"Y_images_equal_k", images.size() == k},
                    {"min_orbit_exceeds_k", min_orbit > k}};
  if (images.size() != k || min_orbit <= k) {
    report.fail({{"Y_images", images.size()}, {"k", k}, {"min_orbit_outside_C", min_orbit}});
  }
  return report;
}

/// Picks the least n >= 1 with B inside A_n and runs the counter there.
inline Report fact3_counter(const LevelState& s, const std::vector<AtomId>& b) {
  std::size_t n = 1;
  for (AtomId x : b) {
    s.check(x);
    n = std::max(n, s.level_of(x));
  }
  return fact3_at_level(s, n);
}

/// Structural checks on a built state: Sq restricts level by level, group
/// restrictions land in the lower group, fibers map onto fibers, Psi is
/// injective, and the k_m strictly increase (reported, with the first failure).
inline Report check_levels(const LevelState& s) {
  Report report{"level invariants", "levels 0.." + std::to_string(s.n())};
  json ks = json::array();
  for (std::size_t m = 0; m <= s.n(); ++m) ks.push_back(s.group_size(m));
  report.details["k"] = ks;

  for (std::size_t m = 0; m <= s.n(); ++m) {
    if (s.group(m).size() != s.group_size(m)) report.fail({{"group_size_mismatch_at", m}});
  }
  for (std::size_t m = 1; m <= s.n(); ++m) {
    std::set<std::vector<AtomId>> lower;
    for (const Shift& g : s.group(m - 1)) lower.insert(s.permutation(g, m - 1));
    std::set<std::vector<AtomId>> distinct;
    for (const Shift& h : s.group(m)) {
      auto table = s.permutation(h, m);
      distinct.insert(table);
      std::vector<AtomId> restricted(table.begin(), table.begin() + static_cast<std::ptrdiff_t>(s.atoms_at(m - 1)));
      if (!lower.count(restricted)) report.fail({{"restriction_not_in_lower_group_at", m}});
      for (const Fiber& fb : s.fibers()) {
        if (fb.first >= s.atoms_at(m)) continue;
        Sequence image;
        for (AtomId x : fb.seq) image.push_back(table[x]);
        std::set<AtomId> mapped, target;
        for (std::size_t i = 0; i < fb.count; ++i) mapped.insert(table[fb.first + i]);
        for (AtomId x : psi(s, image)) target.insert(x);
        if (mapped != target) report.fail({{"fiber_not_mapped_onto_fiber_at", m}});
      }
    }
    if (distinct.size() != s.group_size(m)) report.fail({{"distinct_permutations_at", m}, {"count", distinct.size()}});
  }
  std::set<AtomId> covered;
  for (const Fiber& fb : s.fibers()) {
    for (AtomId x : psi(s, fb.seq)) {
      if (!covered.insert(x).second) report.fail({{"psi_not_injective_at", s.name(x)}});
    }
  }
  json increase = json::object();
  for (std::size_t m = 1; m <= s.n(); ++m) {
    if (s.group_size(m) <= s.group_size(m - 1)) {
      increase = {{"first_non_increase", {{"from", m - 1}, {"to", m}, {"k", s.group_size(m)}}}};
      break;
    }
  }
  report.details["k_strictly_increasing"] = increase.empty();
  if (!increase.empty()) report.details["k_increase_failure"] = increase["first_non_increase"];
  return report;
}

inline json level_summary(const LevelState& s) {
  json levels = json::array();
  for (std::size_t m = 0; m <= s.n(); ++m) {
    json entry{{"n", m}, {"atoms", s.atoms_at(m)}, {"k", s.group_size(m)}};
    if (m < s.n()) entry["fresh_sequences"] = s.fresh_sequences(m);
    levels.push_back(entry);
  }
  std::map<std::size_t, std::size_t> census;
  for (const Fiber& fb : s.fibers()) ++census[fb.count];
  json classes = json::object();
  for (const auto& [size, count] : census) classes[std::to_string(size)] = count;
  return {{"levels", levels}, {"class_size_census", classes}};
}

}  // namespace choiceless::hereditary
