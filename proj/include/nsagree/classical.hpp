#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "nsagree/rational.hpp"

namespace nsagree {

using StateSet = boost::dynamic_bitset<>;

/// A partition of the state space whose cells are labeled by outputs:
/// cells[o] holds the states on which the observer sees output o.
/// Empty cells are allowed (an output that never occurs).
struct LabeledPartition {
  std::vector<std::vector<int>> cells;

  bool operator==(const LabeledPartition&) const = default;
};

/// Finite (quasi-)probability space with one labeled partition per input of
/// each party. A negative mass makes the model signed; such models only arise
/// from the box-to-model bridge and are rejected by the certainty operations.
struct OntologicalModel {
  std::size_t omega_count = 0;
  std::vector<Rational> measure;
  std::vector<LabeledPartition> parts_alice;  // indexed by x
  std::vector<LabeledPartition> parts_bob;    // indexed by y

  [[nodiscard]] bool is_signed() const {
    for (const Rational& m : measure)
      if (m < 0) return true;
    return false;
  }

  [[nodiscard]] Rational mass(const StateSet& s) const {
    Rational total = 0;
    for (auto i = s.find_first(); i != StateSet::npos; i = s.find_next(i)) total += measure[i];
    return total;
  }
};

/// Throws StructuralError unless the measure sums to one and every labeled
/// partition covers each state exactly once.
inline void check_model(const OntologicalModel& m) {
  if (m.measure.size() != m.omega_count)
    throw StructuralError("model has " + std::to_string(m.measure.size()) + " masses for " +
                          std::to_string(m.omega_count) + " states");
  Rational total = 0;
  for (const Rational& v : m.measure) total += v;
  if (total != 1) throw StructuralError("model measure sums to " + to_string(total) + ", not 1");
  auto check = [&](const std::vector<LabeledPartition>& parts, const char* who) {
    for (std::size_t in = 0; in < parts.size(); ++in) {
      std::vector<int> seen(m.omega_count, 0);
      for (const auto& cell : parts[in].cells)
        for (int w : cell) {
          if (w < 0 || static_cast<std::size_t>(w) >= m.omega_count)
            throw StructuralError(std::string(who) + " partition " + std::to_string(in) + " names state " +
                                  std::to_string(w) + " outside the state space");
          ++seen[static_cast<std::size_t>(w)];
        }
      for (std::size_t w = 0; w < m.omega_count; ++w)
        if (seen[w] != 1)
          throw StructuralError(std::string(who) + " partition " + std::to_string(in) + " covers state " +
                                std::to_string(w) + " " + std::to_string(seen[w]) + " times");
    }
  };
  check(m.parts_alice, "alice");
  check(m.parts_bob, "bob");
}

/// Events of interest: E_A concerns Alice's side and is estimated by Bob,
/// E_B concerns Bob's side and is estimated by Alice.
struct EventPair {
  StateSet alice_event;
  StateSet bob_event;
};

inline bool perfectly_correlated(const OntologicalModel& m, const EventPair& e) {
  return m.mass(e.alice_event - e.bob_event) == 0 && m.mass(e.bob_event - e.alice_event) == 0;
}

/// The common-certainty tower A_0 ⊇ A_1 ⊇ ... and B_0 ⊇ B_1 ⊇ ... up to its
/// stabilization index `depth`.
struct Tower {
  std::vector<StateSet> alice;
  std::vector<StateSet> bob;
  int depth = 0;

  [[nodiscard]] const StateSet& alice_final() const { return alice.back(); }
  [[nodiscard]] const StateSet& bob_final() const { return bob.back(); }
};

namespace detail {

// Cell lookup for one party's chosen partition.
struct CellIndex {
  std::vector<int> cell_of;     // state -> label
  std::vector<StateSet> cells;  // label -> states
  std::vector<Rational> mass;   // label -> P(cell)
};

inline CellIndex index_partition(const OntologicalModel& m, const LabeledPartition& p) {
  CellIndex idx;
  idx.cell_of.assign(m.omega_count, -1);
  for (std::size_t label = 0; label < p.cells.size(); ++label) {
    StateSet s(m.omega_count);
    for (int w : p.cells[label]) {
      s.set(static_cast<std::size_t>(w));
      idx.cell_of[static_cast<std::size_t>(w)] = static_cast<int>(label);
    }
    idx.mass.push_back(m.mass(s));
    idx.cells.push_back(std::move(s));
  }
  return idx;
}

inline void require_tower_preconditions(const OntologicalModel& m, const CellIndex& alice, const CellIndex& bob) {
  if (m.is_signed()) throw PreconditionError("certainty towers need a nonnegative measure");
  for (std::size_t a = 0; a < alice.cells.size(); ++a)
    for (std::size_t b = 0; b < bob.cells.size(); ++b) {
      const StateSet join = alice.cells[a] & bob.cells[b];
      if (join.any() && m.mass(join) == 0)
        throw PreconditionError("null join cell: alice cell " + std::to_string(a) + " meets bob cell " +
                                std::to_string(b) + " with probability 0");
    }
}

// States whose observed cell assigns conditional probability `q` to `event`.
inline StateSet level_zero(const OntologicalModel& m, const CellIndex& idx, const StateSet& event, const Rational& q) {
  StateSet out(m.omega_count);
  for (std::size_t label = 0; label < idx.cells.size(); ++label) {
    if (idx.mass[label] == 0) continue;
    if (m.mass(idx.cells[label] & event) / idx.mass[label] == q) out |= idx.cells[label];
  }
  return out;
}

// States of `current` whose cell is almost surely inside `target`.
inline StateSet certain_of(const OntologicalModel& m, const CellIndex& idx, const StateSet& current,
                           const StateSet& target) {
  StateSet out(m.omega_count);
  for (std::size_t label = 0; label < idx.cells.size(); ++label) {
    const StateSet& cell = idx.cells[label];
    if (!cell.intersects(current) || idx.mass[label] == 0) continue;
    if (m.mass(cell & target) == idx.mass[label]) out |= (cell & current);
  }
  return out;
}

}  // namespace detail

/// Builds the tower for the partitions at inputs (x, y). Throws
/// PreconditionError for signed measures or a null cell of the join.
inline Tower tower(const OntologicalModel& model, const EventPair& events, const Rational& qA, const Rational& qB,
                   std::size_t x = 0, std::size_t y = 0) {
  if (x >= model.parts_alice.size() || y >= model.parts_bob.size())
    throw std::out_of_range("model has no partition for the requested input");
  const auto alice = detail::index_partition(model, model.parts_alice[x]);
  const auto bob = detail::index_partition(model, model.parts_bob[y]);
  detail::require_tower_preconditions(model, alice, bob);

  Tower t;
  t.alice.push_back(detail::level_zero(model, alice, events.bob_event, qA));
  t.bob.push_back(detail::level_zero(model, bob, events.alice_event, qB));
  for (std::size_t n = 0; n <= model.omega_count * 2; ++n) {
    StateSet next_a = detail::certain_of(model, alice, t.alice.back(), t.bob.back());
    StateSet next_b = detail::certain_of(model, bob, t.bob.back(), t.alice.back());
    if (next_a == t.alice.back() && next_b == t.bob.back()) {
      t.depth = static_cast<int>(n);
      return t;
    }
    t.alice.push_back(std::move(next_a));
    t.bob.push_back(std::move(next_b));
  }
  throw std::logic_error("certainty tower failed to stabilize");
}

/// True iff `state` lies in A_n ∩ B_n for every n.
inline bool common_certainty_at(const OntologicalModel& model, const EventPair& events, const Rational& qA,
                                const Rational& qB, std::size_t state, std::size_t x = 0, std::size_t y = 0) {
  if (state >= model.omega_count) throw std::out_of_range("state outside the model");
  const Tower t = tower(model, events, qA, qB, x, y);
  return t.alice_final().test(state) && t.bob_final().test(state);
}

/// Options for the exhaustive agreement check.
struct AgreementCheckOptions {
  int max_states = 4;
  int max_denominator = 3;
  bool uniform_only = false;
  /// Maximum number of towers evaluated before the report is marked incomplete.
  std::uint64_t instance_budget = 20'000'000;
};

struct AgreementCheckReport {
  std::uint64_t models = 0;         // (measure, partition pair) combinations satisfying the join precondition
  std::uint64_t instances = 0;      // towers evaluated: (model, events, qA, qB)
  std::uint64_t common_certainty = 0;  // instances with common certainty at some state
  std::uint64_t disagreeing = 0;    // instances with qA != qB
  std::uint64_t violations = 0;     // common certainty together with qA != qB
  std::vector<std::string> violation_examples;
  bool complete = true;
};

namespace detail {

// Set partitions of {0..n-1} as restricted growth strings, converted to labeled cells.
inline std::vector<LabeledPartition> all_partitions(int n) {
  std::vector<LabeledPartition> out;
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  auto emit = [&] {
    int blocks = 1 + *std::max_element(rgs.begin(), rgs.end());
    LabeledPartition p;
    p.cells.resize(static_cast<std::size_t>(blocks));
    for (int i = 0; i < n; ++i) p.cells[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])].push_back(i);
    out.push_back(std::move(p));
  };
  std::function<void(int, int)> rec = [&](int i, int max_used) {
    if (i == n) {
      emit();
      return;
    }
    for (int v = 0; v <= max_used + 1; ++v) {
      rgs[static_cast<std::size_t>(i)] = v;
      rec(i + 1, std::max(max_used, v));
    }
  };
  if (n > 0) {
    rgs[0] = 0;
    rec(1, 0);
  }
  return out;
}

// Probability vectors k/d (d <= max_denominator) sorted non-increasingly, each
// listed once in lowest terms. Sorting is a canonical form under state relabeling.
inline std::vector<std::vector<Rational>> canonical_measures(int n, int max_denominator, bool uniform_only) {
  std::vector<std::vector<Rational>> out;
  if (uniform_only) {
    out.emplace_back(static_cast<std::size_t>(n), Rational(1, n));
    return out;
  }
  for (int d = 1; d <= max_denominator; ++d) {
    std::vector<int> k(static_cast<std::size_t>(n), 0);
    std::function<void(int, int, int)> rec = [&](int i, int remaining, int cap) {
      if (i == n - 1) {
        if (remaining > cap) return;
        k[static_cast<std::size_t>(i)] = remaining;
        int g = d;
        for (int v : k) g = std::gcd(g, v);
        if (g != 1) return;
        std::vector<Rational> m;
        for (int v : k) m.emplace_back(v, d);
        out.push_back(std::move(m));
        return;
      }
      for (int v = std::min(cap, remaining); v >= 0; --v) {
        k[static_cast<std::size_t>(i)] = v;
        rec(i + 1, remaining - v, v);
      }
    };
    if (n == 1) {
      if (d == 1) out.push_back({Rational(1)});
    } else {
      rec(0, d, d);
    }
  }
  return out;
}

inline StateSet mask_to_set(std::size_t n, unsigned mask) {
  StateSet s(n);
  for (std::size_t i = 0; i < n; ++i)
    if (mask & (1u << i)) s.set(i);
  return s;
}

}  // namespace detail

/// Exhaustively checks the classical agreement theorem on small models: for every
/// model with at most `max_states` states, measure denominators up to
/// `max_denominator`, every pair of partitions satisfying the non-null join
/// condition and every perfectly correlated event pair, common certainty at a
/// state must force q_A = q_B. Instances are the distinct (q_A, q_B) pairs
/// realized at some state; other values yield empty towers.
inline AgreementCheckReport verify_agreement_theorem(const AgreementCheckOptions& opt) {
  if (opt.max_states < 1 || opt.max_states > 16) throw BudgetExceeded("state bound must be in 1..16");
  if (opt.max_denominator < 1) throw PreconditionError("denominator bound must be positive");
  AgreementCheckReport report;

  for (int n = 1; n <= opt.max_states; ++n) {
    const auto partitions = detail::all_partitions(n);
    const auto measures = detail::canonical_measures(n, opt.max_denominator, opt.uniform_only);
    const unsigned subsets = 1u << n;
    const std::size_t N = static_cast<std::size_t>(n);

    for (const auto& measure : measures) {
      OntologicalModel model;
      model.omega_count = N;
      model.measure = measure;
      model.parts_alice.resize(1);
      model.parts_bob.resize(1);

      // Perfectly correlated event pairs depend only on the measure.
      std::vector<EventPair> pairs;
      for (unsigned ea = 0; ea < subsets; ++ea)
        for (unsigned eb = 0; eb < subsets; ++eb) {
          EventPair e{detail::mask_to_set(N, ea), detail::mask_to_set(N, eb)};
          if (perfectly_correlated(model, e)) pairs.push_back(std::move(e));
        }

      for (const auto& pa : partitions)
        for (const auto& pb : partitions) {
          model.parts_alice[0] = pa;
          model.parts_bob[0] = pb;
          const auto alice = detail::index_partition(model, pa);
          const auto bob = detail::index_partition(model, pb);
          try {
            detail::require_tower_preconditions(model, alice, bob);
          } catch (const PreconditionError&) {
            continue;
          }
          ++report.models;

          for (const auto& events : pairs) {
            std::set<std::pair<Rational, Rational>> candidates;
            for (std::size_t w = 0; w < N; ++w) {
              const auto ca = static_cast<std::size_t>(alice.cell_of[w]);
              const auto cb = static_cast<std::size_t>(bob.cell_of[w]);
              candidates.emplace(model.mass(alice.cells[ca] & events.bob_event) / alice.mass[ca],
                                 model.mass(bob.cells[cb] & events.alice_event) / bob.mass[cb]);
            }
            for (const auto& [qA, qB] : candidates) {
              if (report.instances >= opt.instance_budget) {
                report.complete = false;
                return report;
              }
              ++report.instances;
              const Tower t = tower(model, events, qA, qB);
              const bool common = (t.alice_final() & t.bob_final()).any();
              if (common) ++report.common_certainty;
              if (qA != qB) ++report.disagreeing;
              if (common && qA != qB) {
                ++report.violations;
                if (report.violation_examples.size() < 10)
                  report.violation_examples.push_back("|Omega|=" + std::to_string(n) + " qA=" + to_string(qA) +
                                                      " qB=" + to_string(qB));
              }
            }
          }
        }
    }
  }
  return report;
}

inline AgreementCheckReport verify_agreement_theorem(int max_states, int max_denominator) {
  AgreementCheckOptions opt;
  opt.max_states = max_states;
  opt.max_denominator = max_denominator;
  return verify_agreement_theorem(opt);
}

}  // namespace nsagree
