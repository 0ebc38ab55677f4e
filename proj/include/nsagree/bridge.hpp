#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsagree/box.hpp"
#include "nsagree/classical.hpp"
#include "nsagree/linear.hpp"

namespace nsagree {

/// Raised when a table admits no (quasi-)probability model at all, which
/// happens exactly when it signals or is inconsistently normalized.
class SignalingError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t default_state_budget = 4096;

/// An instruction set: Alice's output for every x, Bob's output for every y.
struct DeterministicStrategy {
  std::vector<int> alice;
  std::vector<int> bob;
  bool operator==(const DeterministicStrategy&) const = default;
};

/// The linear system M P = C relating quasi-probabilities of instruction sets
/// to box entries. Rows follow the box entry order, columns the strategy order.
class InstructionSystem {
 public:
  explicit InstructionSystem(const Shape& shape, std::size_t budget = default_state_budget) : shape_(shape) {
    std::size_t count = 1;
    auto grow = [&](int base, int times) {
      for (int i = 0; i < times; ++i) {
        count *= static_cast<std::size_t>(base);
        if (count > budget)
          throw BudgetExceeded("shape " + to_string(shape) + " needs more than " + std::to_string(budget) +
                               " instruction sets");
      }
    };
    grow(shape.nA, shape.nX);
    grow(shape.nB, shape.nY);
    state_count_ = count;
  }

  [[nodiscard]] const Shape& shape() const { return shape_; }
  [[nodiscard]] std::size_t state_count() const { return state_count_; }

  /// Strategies are ordered lexicographically in (a_{x=0}, ..., a_{x=nX-1}, b_{y=0}, ..., b_{y=nY-1}).
  [[nodiscard]] DeterministicStrategy strategy(std::size_t index) const {
    DeterministicStrategy s;
    s.alice.resize(static_cast<std::size_t>(shape_.nX));
    s.bob.resize(static_cast<std::size_t>(shape_.nY));
    for (int y = shape_.nY - 1; y >= 0; --y) {
      s.bob[static_cast<std::size_t>(y)] = static_cast<int>(index % static_cast<std::size_t>(shape_.nB));
      index /= static_cast<std::size_t>(shape_.nB);
    }
    for (int x = shape_.nX - 1; x >= 0; --x) {
      s.alice[static_cast<std::size_t>(x)] = static_cast<int>(index % static_cast<std::size_t>(shape_.nA));
      index /= static_cast<std::size_t>(shape_.nA);
    }
    return s;
  }

  [[nodiscard]] std::size_t index_of(const DeterministicStrategy& s) const {
    std::size_t index = 0;
    for (int a : s.alice) index = index * static_cast<std::size_t>(shape_.nA) + static_cast<std::size_t>(a);
    for (int b : s.bob) index = index * static_cast<std::size_t>(shape_.nB) + static_cast<std::size_t>(b);
    return index;
  }

  /// The 0/1 coefficient matrix M.
  [[nodiscard]] Matrix coefficients() const {
    const Box probe(shape_);
    Matrix M(shape_.entry_count(), state_count_);
    for (std::size_t col = 0; col < state_count_; ++col) {
      const DeterministicStrategy s = strategy(col);
      for (int x = 0; x < shape_.nX; ++x)
        for (int y = 0; y < shape_.nY; ++y)
          M(probe.index(s.alice[static_cast<std::size_t>(x)], s.bob[static_cast<std::size_t>(y)], x, y), col) = 1;
    }
    return M;
  }

 private:
  Shape shape_;
  std::size_t state_count_ = 0;
};

/// The deterministic box of a single instruction set.
inline Box deterministic_box(const Shape& shape, const DeterministicStrategy& s) {
  Box box(shape);
  for (int x = 0; x < shape.nX; ++x)
    for (int y = 0; y < shape.nY; ++y)
      box.set(s.alice[static_cast<std::size_t>(x)], s.bob[static_cast<std::size_t>(y)], x, y, Rational(1));
  return box;
}

/// p(a,b|x,y) = P(A_x^a ∩ B_y^b). Works for signed measures too; normalization
/// and no-signaling then hold by construction.
inline Box model_to_box(const OntologicalModel& model) {
  check_model(model);
  if (model.parts_alice.empty() || model.parts_bob.empty())
    throw ShapeError("model needs at least one partition per party");
  const auto nA = model.parts_alice.front().cells.size();
  const auto nB = model.parts_bob.front().cells.size();
  for (const auto& p : model.parts_alice)
    if (p.cells.size() != nA) throw ShapeError("alice partitions carry different output sets");
  for (const auto& p : model.parts_bob)
    if (p.cells.size() != nB) throw ShapeError("bob partitions carry different output sets");

  const Shape shape{static_cast<int>(nA), static_cast<int>(nB), static_cast<int>(model.parts_alice.size()),
                    static_cast<int>(model.parts_bob.size())};
  Box box(shape);
  for (int x = 0; x < shape.nX; ++x) {
    const auto alice = detail::index_partition(model, model.parts_alice[static_cast<std::size_t>(x)]);
    for (int y = 0; y < shape.nY; ++y) {
      const auto bob = detail::index_partition(model, model.parts_bob[static_cast<std::size_t>(y)]);
      for (int a = 0; a < shape.nA; ++a)
        for (int b = 0; b < shape.nB; ++b)
          box.set(a, b, x, y, model.mass(alice.cells[static_cast<std::size_t>(a)] & bob.cells[static_cast<std::size_t>(b)]));
    }
  }
  return box;
}

/// Ontological model over instruction sets with the given (possibly signed) weights.
inline OntologicalModel instruction_set_model(const InstructionSystem& sys, std::vector<Rational> weights) {
  const Shape& s = sys.shape();
  OntologicalModel m;
  m.omega_count = sys.state_count();
  m.measure = std::move(weights);
  m.parts_alice.assign(static_cast<std::size_t>(s.nX), LabeledPartition{});
  m.parts_bob.assign(static_cast<std::size_t>(s.nY), LabeledPartition{});
  for (auto& p : m.parts_alice) p.cells.resize(static_cast<std::size_t>(s.nA));
  for (auto& p : m.parts_bob) p.cells.resize(static_cast<std::size_t>(s.nB));
  for (std::size_t w = 0; w < sys.state_count(); ++w) {
    const DeterministicStrategy st = sys.strategy(w);
    for (int x = 0; x < s.nX; ++x)
      m.parts_alice[static_cast<std::size_t>(x)].cells[static_cast<std::size_t>(st.alice[static_cast<std::size_t>(x)])]
          .push_back(static_cast<int>(w));
    for (int y = 0; y < s.nY; ++y)
      m.parts_bob[static_cast<std::size_t>(y)].cells[static_cast<std::size_t>(st.bob[static_cast<std::size_t>(y)])]
          .push_back(static_cast<int>(w));
  }
  return m;
}

/// Particular solution of M P = C by deterministic Gaussian elimination, or
/// nullopt when rank(M) < rank(M|C).
inline std::optional<std::vector<Rational>> solve_instruction_system(const InstructionSystem& sys, const Box& box) {
  if (!(box.shape() == sys.shape())) throw ShapeError("box shape does not match the instruction system");
  auto sol = solve_linear_system(sys.coefficients(), box.entries());
  if (!sol) return std::nullopt;
  return std::move(sol->x);
}

struct BoxToModelOptions {
  std::size_t budget = default_state_budget;
  /// Return the nonnegative LP decomposition when the box is local.
  bool prefer_unsigned = false;
};

/// A linear functional on boxes, f·p = sum f(ab|xy) p(ab|xy), with its maximum
/// over deterministic strategies. A box with value above local_bound is nonlocal.
struct BellFunctional {
  std::string kind;  // "chsh" or "farkas"
  Shape shape;
  std::vector<Rational> coefficients;  // box entry order
  Rational local_bound;
  Rational box_value;
};

inline Rational evaluate(const BellFunctional& f, const Box& box) {
  Rational v = 0;
  for (std::size_t i = 0; i < f.coefficients.size(); ++i) v += f.coefficients[i] * box.entries()[i];
  return v;
}

/// Max of the functional over all deterministic strategies, by enumeration.
inline Rational local_maximum(const std::vector<Rational>& coefficients, const InstructionSystem& sys) {
  std::optional<Rational> best;
  const Shape& s = sys.shape();
  const Box probe(s);
  for (std::size_t i = 0; i < sys.state_count(); ++i) {
    const DeterministicStrategy st = sys.strategy(i);
    Rational v = 0;
    for (int x = 0; x < s.nX; ++x)
      for (int y = 0; y < s.nY; ++y)
        v += coefficients[probe.index(st.alice[static_cast<std::size_t>(x)], st.bob[static_cast<std::size_t>(y)], x, y)];
    if (!best || v > *best) best = v;
  }
  return *best;
}

struct LocalityVerdict {
  bool local = false;
  /// Nonnegative weights over deterministic strategies reproducing the box.
  std::vector<std::pair<DeterministicStrategy, Rational>> decomposition;
  /// A violated Bell-type inequality when nonlocal.
  std::optional<BellFunctional> certificate;
  std::size_t pivots = 0;
};

namespace detail {

// The eight CHSH facets sum_xy s_xy c_xy <= 2 with an odd number of minus signs.
inline std::optional<BellFunctional> violated_chsh(const Box& box, const InstructionSystem& sys) {
  const Shape& shape = box.shape();
  std::optional<BellFunctional> best;
  for (int minus = 0; minus < 4; ++minus)
    for (int global : {1, -1}) {
      BellFunctional f;
      f.kind = "chsh";
      f.shape = shape;
      f.coefficients.assign(shape.entry_count(), Rational(0));
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
          const int sxy = (2 * x + y == minus ? -1 : 1) * global;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) f.coefficients[box.index(a, b, x, y)] = Rational(a == b ? sxy : -sxy);
        }
      f.local_bound = local_maximum(f.coefficients, sys);
      f.box_value = evaluate(f, box);
      if (f.box_value > f.local_bound && (!best || f.box_value > best->box_value)) best = std::move(f);
    }
  return best;
}

}  // namespace detail

/// Decides membership in the local polytope by exact phase-one simplex over the
/// instruction-set system. Binary two-input boxes get the violated CHSH facet
/// as certificate; otherwise the phase-one Farkas vector is returned.
inline LocalityVerdict is_local(const Box& box, std::size_t budget = default_state_budget) {
  const InstructionSystem sys(box.shape(), budget);
  const FeasibilityResult lp = find_nonnegative_solution(sys.coefficients(), box.entries());
  LocalityVerdict v;
  v.pivots = lp.pivots;
  v.local = lp.feasible;
  if (lp.feasible) {
    for (std::size_t i = 0; i < lp.x.size(); ++i)
      if (lp.x[i] != 0) v.decomposition.emplace_back(sys.strategy(i), lp.x[i]);
    return v;
  }
  if (box.shape().is_binary()) v.certificate = detail::violated_chsh(box, sys);
  if (!v.certificate) {
    BellFunctional f;
    f.kind = "farkas";
    f.shape = box.shape();
    f.coefficients = lp.farkas;
    f.local_bound = local_maximum(f.coefficients, sys);
    f.box_value = evaluate(f, box);
    v.certificate = std::move(f);
  }
  return v;
}

/// A (quasi-)probability ontological model reproducing `box`.
///
/// By default this is the Gaussian-elimination solution with free variables
/// set to zero; it is signed whenever any weight is negative. Throws
/// SignalingError when no solution exists.
inline OntologicalModel box_to_model(const Box& box, const BoxToModelOptions& opt = {}) {
  const InstructionSystem sys(box.shape(), opt.budget);
  if (opt.prefer_unsigned) {
    const LocalityVerdict lv = is_local(box, opt.budget);
    if (lv.local) {
      std::vector<Rational> weights(sys.state_count(), Rational(0));
      for (const auto& [strategy, w] : lv.decomposition) weights[sys.index_of(strategy)] = w;
      return instruction_set_model(sys, std::move(weights));
    }
  }
  auto solution = solve_instruction_system(sys, box);
  if (!solution) throw SignalingError("no quasi-probability model exists: the table is not no-signaling");
  Rational total = 0;
  for (const Rational& w : *solution) total += w;
  if (total != 1) throw SignalingError("quasi-probability weights sum to " + to_string(total) + ", table is not normalized");
  return instruction_set_model(sys, std::move(*solution));
}

}  // namespace nsagree
