#pragma once

#include <string>
#include <vector>

#include "nsagree/box.hpp"

namespace nsagree {

/// The two parametrized families of binary boxes: boxes with common certainty
/// of disagreement (`ccd`) and boxes with singular disagreement (`sd`).
enum class TableKind { ccd, sd };

inline std::string to_string(TableKind k) { return k == TableKind::ccd ? "ccd" : "sd"; }

struct TableParams {
  Rational r, s, t, u;
  bool operator==(const TableParams&) const = default;
};

namespace detail {
inline Box box_from_rows(const std::vector<std::vector<Rational>>& rows) {
  // rows indexed by xy in {00, 01, 10, 11}, columns by ab in {00, 01, 10, 11}.
  Box box(Shape{2, 2, 2, 2});
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          box.set(a, b, x, y, rows[static_cast<std::size_t>(2 * x + y)][static_cast<std::size_t>(2 * a + b)]);
  return box;
}
}  // namespace detail

/// Common-certainty-of-disagreement family.
///
///   xy\ab   00      01        10          11
///   00      r       0         0           1-r
///   01      r-s     s         t+s-r       1-t-s
///   10      t-u     u         r-t+u       1-r-u
///   11      t       0         0           1-t
inline Box ccd_family_box(const TableParams& p) {
  const auto& [r, s, t, u] = p;
  return detail::box_from_rows({
      {r, 0, 0, 1 - r},
      {r - s, s, t + s - r, 1 - t - s},
      {t - u, u, r - t + u, 1 - r - u},
      {t, 0, 0, 1 - t},
  });
}

/// Singular-disagreement family.
///
///   xy\ab   00      01          10          11
///   00      s       t           1-s-u-t     u
///   01      0       s+t         r           1-s-t-r
///   10      1-u-t   u+t+r-1     0           1-r
///   11      r       0           0           1-r
inline Box sd_family_box(const TableParams& p) {
  const auto& [r, s, t, u] = p;
  return detail::box_from_rows({
      {s, t, 1 - s - u - t, u},
      {0, s + t, r, 1 - s - t - r},
      {1 - u - t, u + t + r - 1, 0, 1 - r},
      {r, 0, 0, 1 - r},
  });
}

inline Box family_box(TableKind kind, const TableParams& p) {
  return kind == TableKind::ccd ? ccd_family_box(p) : sd_family_box(p);
}

/// The PR box in the frame a xor b = (x xor 1) * y.
inline Box pr_variant_box() {
  Box box(Shape{2, 2, 2, 2});
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) box.set(a, b, x, y, (a ^ b) == ((x ^ 1) & y) ? Rational(1, 2) : Rational(0));
  return box;
}

inline Box uniform_box(const Shape& shape = Shape{}) {
  Box box(shape);
  const Rational v(1, shape.nA * shape.nB);
  for (int x = 0; x < shape.nX; ++x)
    for (int y = 0; y < shape.nY; ++y)
      for (int a = 0; a < shape.nA; ++a)
        for (int b = 0; b < shape.nB; ++b) box.set(a, b, x, y, v);
  return box;
}

/// Defining conditions of the family that fail for `p`, as human-readable
/// strings ("r>0 violated"). Nonnegativity of every entry is included.
inline std::vector<std::string> family_constraint_failures(TableKind kind, const TableParams& p) {
  std::vector<std::string> failures;
  for (const auto& [name, v] : {std::pair{"r", &p.r}, {"s", &p.s}, {"t", &p.t}, {"u", &p.u}})
    if (*v < 0 || *v > 1) failures.push_back(std::string(name) + " in [0,1] violated");
  const Box box = family_box(kind, p);
  for (const Rational& e : box.entries())
    if (e < 0) {
      failures.emplace_back("nonnegative entries violated");
      break;
    }
  if (kind == TableKind::ccd) {
    if (!(p.r > 0)) failures.emplace_back("r>0 violated");
    if (p.s - p.u == p.r - p.t) failures.emplace_back("s-u!=r-t violated");
  } else {
    if (!(p.s > 0)) failures.emplace_back("s>0 violated");
    if (p.s + p.t == 0) failures.emplace_back("s+t!=0 violated");
    if (p.u + p.t == 1) failures.emplace_back("u+t!=1 violated");
  }
  return failures;
}

/// True when every entry of the family box is nonnegative.
inline bool family_entries_nonnegative(TableKind kind, const TableParams& p) {
  const Box box = family_box(kind, p);
  for (const Rational& e : box.entries())
    if (e < 0) return false;
  return true;
}

}  // namespace nsagree
