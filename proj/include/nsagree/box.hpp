#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "nsagree/rational.hpp"

namespace nsagree {

enum class Party { alice, bob };

/// Cardinalities of the output sets A, B and input sets X, Y.
struct Shape {
  int nA = 2;
  int nB = 2;
  int nX = 2;
  int nY = 2;

  [[nodiscard]] std::size_t entry_count() const {
    return static_cast<std::size_t>(nA) * nB * nX * nY;
  }
  [[nodiscard]] bool is_binary() const { return nA == 2 && nB == 2 && nX == 2 && nY == 2; }
  bool operator==(const Shape&) const = default;
};

inline std::string to_string(const Shape& s) {
  return std::to_string(s.nA) + "x" + std::to_string(s.nB) + "x" + std::to_string(s.nX) + "x" +
         std::to_string(s.nY);
}

/// A bipartite conditional distribution p(ab|xy) with exact rational entries.
///
/// Entries are stored in (x, y, a, b) row-major order. A Box is a plain value:
/// it does not enforce the no-signaling constraints itself, use validate().
class Box {
 public:
  Box() : Box(Shape{}) {}

  explicit Box(Shape shape) : shape_(shape), table_(checked_size(shape)) {}

  Box(Shape shape, std::vector<Rational> table) : shape_(shape), table_(std::move(table)) {
    if (table_.size() != checked_size(shape))
      throw StructuralError("box table has " + std::to_string(table_.size()) + " entries, shape " +
                            to_string(shape) + " needs " + std::to_string(shape.entry_count()));
  }

  [[nodiscard]] const Shape& shape() const { return shape_; }
  [[nodiscard]] const std::vector<Rational>& entries() const { return table_; }

  [[nodiscard]] const Rational& operator()(int a, int b, int x, int y) const { return table_[index(a, b, x, y)]; }

  void set(int a, int b, int x, int y, Rational value) { table_[index(a, b, x, y)] = std::move(value); }

  /// Sum over b of p(ab|xy).
  [[nodiscard]] Rational marginal_alice(int a, int x, int y) const {
    Rational s = 0;
    for (int b = 0; b < shape_.nB; ++b) s += (*this)(a, b, x, y);
    return s;
  }

  /// Sum over a of p(ab|xy).
  [[nodiscard]] Rational marginal_bob(int b, int x, int y) const {
    Rational s = 0;
    for (int a = 0; a < shape_.nA; ++a) s += (*this)(a, b, x, y);
    return s;
  }

  [[nodiscard]] std::size_t index(int a, int b, int x, int y) const {
    if (a < 0 || a >= shape_.nA || b < 0 || b >= shape_.nB || x < 0 || x >= shape_.nX || y < 0 || y >= shape_.nY)
      throw std::out_of_range("box index (" + std::to_string(a) + "," + std::to_string(b) + "|" +
                              std::to_string(x) + "," + std::to_string(y) + ") outside shape " +
                              to_string(shape_));
    return ((static_cast<std::size_t>(x) * shape_.nY + y) * shape_.nA + a) * shape_.nB + b;
  }

  bool operator==(const Box&) const = default;

 private:
  static std::size_t checked_size(const Shape& s) {
    if (s.nA < 1 || s.nB < 1 || s.nX < 1 || s.nY < 1)
      throw StructuralError("box cardinalities must be positive, got " + to_string(s));
    return s.entry_count();
  }

  Shape shape_;
  std::vector<Rational> table_;
};

struct Violation {
  enum class Kind { negative_entry, normalization, no_signaling_alice_to_bob, no_signaling_bob_to_alice };
  Kind kind;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;

  [[nodiscard]] bool ok() const { return violations.empty(); }
  explicit operator bool() const { return ok(); }
};

inline std::string to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::negative_entry: return "negative_entry";
    case Violation::Kind::normalization: return "normalization";
    case Violation::Kind::no_signaling_alice_to_bob: return "no_signaling_alice_to_bob";
    case Violation::Kind::no_signaling_bob_to_alice: return "no_signaling_bob_to_alice";
  }
  return "unknown";
}

/// Checks nonnegativity, normalization per (x,y) and both no-signaling
/// conditions exactly. Every violated constraint is reported with its indices.
inline ValidationResult validate(const Box& box) {
  const Shape& s = box.shape();
  ValidationResult result;
  auto report = [&](Violation::Kind kind, std::string msg) { result.violations.push_back({kind, std::move(msg)}); };

  for (int x = 0; x < s.nX; ++x)
    for (int y = 0; y < s.nY; ++y) {
      Rational total = 0;
      for (int a = 0; a < s.nA; ++a)
        for (int b = 0; b < s.nB; ++b) {
          const Rational& v = box(a, b, x, y);
          if (v < 0)
            report(Violation::Kind::negative_entry, "p(" + std::to_string(a) + std::to_string(b) + "|" +
                                                         std::to_string(x) + std::to_string(y) +
                                                         ") = " + to_string(v) + " < 0");
          total += v;
        }
      if (total != 1)
        report(Violation::Kind::normalization, "sum over a,b of p(ab|" + std::to_string(x) + std::to_string(y) +
                                                   ") = " + to_string(total) + " != 1");
    }

  // Alice's input must not change Bob's marginal.
  for (int y = 0; y < s.nY; ++y)
    for (int b = 0; b < s.nB; ++b) {
      const Rational ref = box.marginal_bob(b, 0, y);
      for (int x = 1; x < s.nX; ++x) {
        const Rational m = box.marginal_bob(b, x, y);
        if (m != ref)
          report(Violation::Kind::no_signaling_alice_to_bob,
                 "p(b=" + std::to_string(b) + "|y=" + std::to_string(y) + ") is " + to_string(ref) + " at x=0 but " +
                     to_string(m) + " at x=" + std::to_string(x));
      }
    }

  for (int x = 0; x < s.nX; ++x)
    for (int a = 0; a < s.nA; ++a) {
      const Rational ref = box.marginal_alice(a, x, 0);
      for (int y = 1; y < s.nY; ++y) {
        const Rational m = box.marginal_alice(a, x, y);
        if (m != ref)
          report(Violation::Kind::no_signaling_bob_to_alice,
                 "p(a=" + std::to_string(a) + "|x=" + std::to_string(x) + ") is " + to_string(ref) + " at y=0 but " +
                     to_string(m) + " at y=" + std::to_string(y));
      }
    }
  return result;
}

/// Raised by operations that require a valid no-signaling box.
class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationResult r) : Error(describe(r)), result_(std::move(r)) {}

  [[nodiscard]] const ValidationResult& result() const { return result_; }

 private:
  static std::string describe(const ValidationResult& r) {
    std::string msg = "box is not a valid no-signaling box";
    for (std::size_t i = 0; i < r.violations.size() && i < 4; ++i) msg += "; " + r.violations[i].message;
    if (r.violations.size() > 4) msg += "; ...";
    return msg;
  }

  ValidationResult result_;
};

inline void require_valid(const Box& box) {
  ValidationResult r = validate(box);
  if (!r.ok()) throw ValidationError(std::move(r));
}

/// A conditional probability that may be undefined (null conditioning event).
/// `value` is meaningless when `defined` is false.
struct Conditional {
  Rational value;
  bool defined = false;

  [[nodiscard]] bool equals(const Rational& r) const { return defined && value == r; }
  bool operator==(const Conditional& o) const {
    return defined == o.defined && (!defined || value == o.value);
  }
};

/// Probability that `target` outputs a label in `outputs`, given the other party
/// output `given` at inputs (x, y). `outputs` is a membership mask over target labels.
inline Conditional conditional_set(const Box& box, Party target, const std::vector<bool>& outputs, int given, int x,
                                   int y) {
  const Shape& s = box.shape();
  const int n_target = target == Party::bob ? s.nB : s.nA;
  if (static_cast<int>(outputs.size()) != n_target) throw std::out_of_range("output mask size mismatch");
  Rational joint = 0;
  Rational marginal = 0;
  for (int o = 0; o < n_target; ++o) {
    const Rational& v = target == Party::bob ? box(given, o, x, y) : box(o, given, x, y);
    marginal += v;
    if (outputs[static_cast<std::size_t>(o)]) joint += v;
  }
  if (marginal == 0) return {Rational(0), false};
  return {joint / marginal, true};
}

/// p(target = output | other party = given, x, y), e.g. p(b=1|a=0,x=0,y=1).
inline Conditional conditional(const Box& box, Party target, int output, int given, int x, int y) {
  const int n_target = target == Party::bob ? box.shape().nB : box.shape().nA;
  if (output < 0 || output >= n_target) throw std::out_of_range("conditional target output out of range");
  std::vector<bool> mask(static_cast<std::size_t>(n_target), false);
  mask[static_cast<std::size_t>(output)] = true;
  return conditional_set(box, target, mask, given, x, y);
}

/// True iff p(ab|x,y) = 0 whenever a != b.
inline bool is_perfectly_correlated(const Box& box, int x, int y) {
  const Shape& s = box.shape();
  for (int a = 0; a < s.nA; ++a)
    for (int b = 0; b < s.nB; ++b)
      if (a != b && box(a, b, x, y) != 0) return false;
  return true;
}

/// True iff the events "Alice outputs `label`" and "Bob outputs `label`" at
/// (x, y) coincide up to probability zero. For binary outputs this is the same
/// as is_perfectly_correlated.
inline bool events_perfectly_correlated(const Box& box, int label, int x, int y) {
  const Shape& s = box.shape();
  for (int a = 0; a < s.nA; ++a)
    for (int b = 0; b < s.nB; ++b)
      if ((a == label) != (b == label) && box(a, b, x, y) != 0) return false;
  return true;
}

/// c_xy = p(a=b|xy) - p(a!=b|xy) for binary-output boxes.
class CorrelatorVector {
 public:
  CorrelatorVector(int nX, int nY) : nX_(nX), nY_(nY), c_(static_cast<std::size_t>(nX) * nY) {}

  [[nodiscard]] const Rational& operator()(int x, int y) const { return c_[static_cast<std::size_t>(x) * nY_ + y]; }
  Rational& operator()(int x, int y) { return c_[static_cast<std::size_t>(x) * nY_ + y]; }
  [[nodiscard]] int nX() const { return nX_; }
  [[nodiscard]] int nY() const { return nY_; }

 private:
  int nX_;
  int nY_;
  std::vector<Rational> c_;
};

inline CorrelatorVector correlators(const Box& box) {
  const Shape& s = box.shape();
  if (s.nA != 2 || s.nB != 2)
    throw ShapeError("correlators need binary outputs, got shape " + to_string(s));
  CorrelatorVector c(s.nX, s.nY);
  for (int x = 0; x < s.nX; ++x)
    for (int y = 0; y < s.nY; ++y)
      c(x, y) = box(0, 0, x, y) + box(1, 1, x, y) - box(0, 1, x, y) - box(1, 0, x, y);
  return c;
}

/// A relabeling of inputs and outputs, optionally exchanging the parties.
///
/// The permutations act on the original labels: entry p(ab|xy) moves to
/// (alice_outputs[x][a], bob_outputs[y][b] | alice_inputs[x], bob_inputs[y]).
/// When swap_parties is set the result is then transposed so that Bob becomes Alice.
struct Relabeling {
  std::vector<int> alice_inputs;
  std::vector<int> bob_inputs;
  std::vector<std::vector<int>> alice_outputs;
  std::vector<std::vector<int>> bob_outputs;
  bool swap_parties = false;

  static Relabeling identity(const Shape& s) {
    Relabeling r;
    r.alice_inputs.resize(static_cast<std::size_t>(s.nX));
    std::iota(r.alice_inputs.begin(), r.alice_inputs.end(), 0);
    r.bob_inputs.resize(static_cast<std::size_t>(s.nY));
    std::iota(r.bob_inputs.begin(), r.bob_inputs.end(), 0);
    std::vector<int> a(static_cast<std::size_t>(s.nA));
    std::iota(a.begin(), a.end(), 0);
    std::vector<int> b(static_cast<std::size_t>(s.nB));
    std::iota(b.begin(), b.end(), 0);
    r.alice_outputs.assign(static_cast<std::size_t>(s.nX), a);
    r.bob_outputs.assign(static_cast<std::size_t>(s.nY), b);
    return r;
  }

  [[nodiscard]] bool is_identity() const {
    auto ident = [](const std::vector<int>& p) {
      for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != static_cast<int>(i)) return false;
      return true;
    };
    if (swap_parties || !ident(alice_inputs) || !ident(bob_inputs)) return false;
    return std::all_of(alice_outputs.begin(), alice_outputs.end(), ident) &&
           std::all_of(bob_outputs.begin(), bob_outputs.end(), ident);
  }
};

namespace detail {
inline bool is_permutation_of(const std::vector<int>& p, int n) {
  if (static_cast<int>(p.size()) != n) return false;
  std::vector<int> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < n; ++i)
    if (sorted[static_cast<std::size_t>(i)] != i) return false;
  return true;
}
}  // namespace detail

inline Box relabel(const Box& box, const Relabeling& r) {
  const Shape& s = box.shape();
  bool ok = detail::is_permutation_of(r.alice_inputs, s.nX) && detail::is_permutation_of(r.bob_inputs, s.nY) &&
            static_cast<int>(r.alice_outputs.size()) == s.nX && static_cast<int>(r.bob_outputs.size()) == s.nY;
  for (const auto& p : r.alice_outputs) ok = ok && detail::is_permutation_of(p, s.nA);
  for (const auto& p : r.bob_outputs) ok = ok && detail::is_permutation_of(p, s.nB);
  if (!ok) throw StructuralError("relabeling does not match box shape " + to_string(s));

  const Shape out_shape = r.swap_parties ? Shape{s.nB, s.nA, s.nY, s.nX} : s;
  Box out(out_shape);
  for (int x = 0; x < s.nX; ++x)
    for (int y = 0; y < s.nY; ++y)
      for (int a = 0; a < s.nA; ++a)
        for (int b = 0; b < s.nB; ++b) {
          const int xx = r.alice_inputs[static_cast<std::size_t>(x)];
          const int yy = r.bob_inputs[static_cast<std::size_t>(y)];
          const int aa = r.alice_outputs[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)];
          const int bb = r.bob_outputs[static_cast<std::size_t>(y)][static_cast<std::size_t>(b)];
          if (r.swap_parties)
            out.set(bb, aa, yy, xx, box(a, b, x, y));
          else
            out.set(aa, bb, xx, yy, box(a, b, x, y));
        }
  return out;
}

}  // namespace nsagree
