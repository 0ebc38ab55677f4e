#pragma once

// Test-only reference computations. These deliberately avoid the library's
// algorithms: they work from explicit formulas or brute force so that a bug
// in the library does not silently reproduce itself here.

#include <array>
#include <random>
#include <set>
#include <vector>

#include "nsagree/nsagree.hpp"

namespace oracle {

using nsagree::Box;
using nsagree::Rational;
using nsagree::Shape;

/// Closed-form answer for the ccd family: disagreement iff r > 0 and s-u != r-t.
inline bool ccd_family_disagrees(const nsagree::TableParams& p) { return p.r > 0 && p.s - p.u != p.r - p.t; }

/// Closed-form answer for the sd family: singular disagreement iff s > 0
/// (the remaining defining conditions only keep assignments defined).
inline bool sd_family_disagrees(const nsagree::TableParams& p) {
  return p.s > 0 && p.s + p.t != 0 && p.u + p.t != 1;
}

/// Correlators read directly from the four entries of each setting.
inline std::array<Rational, 4> correlator_table(const Box& box) {
  std::array<Rational, 4> c;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      c[static_cast<std::size_t>(2 * x + y)] =
          box(0, 0, x, y) + box(1, 1, x, y) - box(0, 1, x, y) - box(1, 0, x, y);
  return c;
}

/// Largest of the eight CHSH expressions. For a 2x2x2x2 no-signaling box the
/// box is local iff this value is at most 2.
inline Rational max_chsh(const Box& box) {
  const auto c = correlator_table(box);
  Rational best = -100;
  for (int minus = 0; minus < 4; ++minus)
    for (int sign : {1, -1}) {
      Rational v = 0;
      for (int k = 0; k < 4; ++k) v += (k == minus ? -1 : 1) * sign * c[static_cast<std::size_t>(k)];
      if (v > best) best = v;
    }
  return best;
}

inline bool local_by_chsh(const Box& box) { return max_chsh(box) <= 2; }

/// Hierarchy sets computed by iterating a fixed, generous number of rounds
/// (instead of stopping at the first repetition).
struct Sets {
  std::set<int> alpha_final;
  std::set<int> beta_final;
  std::set<int> alpha0;
  std::set<int> beta0;
};

inline Sets hierarchy_sets(const Box& box, const Rational& qA, const Rational& qB) {
  const Shape& s = box.shape();
  auto pa = [&](int a, int x, int y) {
    Rational m = 0;
    for (int b = 0; b < s.nB; ++b) m += box(a, b, x, y);
    return m;
  };
  auto pb = [&](int b, int x, int y) {
    Rational m = 0;
    for (int a = 0; a < s.nA; ++a) m += box(a, b, x, y);
    return m;
  };
  Sets out;
  for (int a = 0; a < s.nA; ++a)
    if (pa(a, 0, 1) != 0 && box(a, 1, 0, 1) == qA * pa(a, 0, 1)) out.alpha0.insert(a);
  for (int b = 0; b < s.nB; ++b)
    if (pb(b, 1, 0) != 0 && box(1, b, 1, 0) == qB * pb(b, 1, 0)) out.beta0.insert(b);
  std::set<int> al = out.alpha0;
  std::set<int> be = out.beta0;
  for (int round = 0; round < s.nA + s.nB + 4; ++round) {
    std::set<int> nal, nbe;
    for (int a : al) {
      Rational mass = 0;
      for (int b : be) mass += box(a, b, 0, 0);
      if (pa(a, 0, 0) != 0 && mass == pa(a, 0, 0)) nal.insert(a);
    }
    for (int b : be) {
      Rational mass = 0;
      for (int a : al) mass += box(a, b, 0, 0);
      if (pb(b, 0, 0) != 0 && mass == pb(b, 0, 0)) nbe.insert(b);
    }
    al = nal;
    be = nbe;
  }
  out.alpha_final = al;
  out.beta_final = be;
  return out;
}

inline std::set<int> to_set(const nsagree::OutputSet& s) {
  std::set<int> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i]) out.insert(static_cast<int>(i));
  return out;
}

/// Box of a deterministic strategy given as output lists per input.
inline Box deterministic(const Shape& shape, const std::vector<int>& alice, const std::vector<int>& bob) {
  Box box(shape);
  for (int x = 0; x < shape.nX; ++x)
    for (int y = 0; y < shape.nY; ++y)
      box.set(alice[static_cast<std::size_t>(x)], bob[static_cast<std::size_t>(y)], x, y, Rational(1));
  return box;
}

inline Box mix(const std::vector<std::pair<Box, Rational>>& parts) {
  Box out(parts.front().first.shape());
  for (const auto& [box, w] : parts) {
    std::vector<Rational> e = out.entries();
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += w * box.entries()[i];
    out = Box(out.shape(), std::move(e));
  }
  return out;
}

/// A random local box: a sparse mixture of deterministic strategies with
/// small-denominator weights. With `correlate_at_11` every strategy outputs
/// the same bit for Alice at x=1 and Bob at y=1, which makes perfect
/// correlation at (1,1) and thus nontrivial assignments common.
inline Box random_local_box(std::mt19937_64& rng, const Shape& shape, bool correlate_at_11) {
  std::uniform_int_distribution<int> count_dist(1, 4);
  std::uniform_int_distribution<int> weight_dist(1, 6);
  std::uniform_int_distribution<int> a_dist(0, shape.nA - 1);
  std::uniform_int_distribution<int> b_dist(0, shape.nB - 1);
  const int n = count_dist(rng);
  std::vector<std::pair<Box, int>> raw;
  int total = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> alice(static_cast<std::size_t>(shape.nX)), bob(static_cast<std::size_t>(shape.nY));
    for (auto& a : alice) a = a_dist(rng);
    for (auto& b : bob) b = b_dist(rng);
    if (correlate_at_11 && shape.nX > 1 && shape.nY > 1) {
      const int shared = std::min(shape.nA, shape.nB) > 1 ? std::uniform_int_distribution<int>(0, 1)(rng) : 0;
      alice[1] = shared;
      bob[1] = shared;
    }
    const int w = weight_dist(rng);
    total += w;
    raw.emplace_back(deterministic(shape, alice, bob), w);
  }
  std::vector<std::pair<Box, Rational>> parts;
  for (auto& [box, w] : raw) parts.emplace_back(std::move(box), Rational(w, total));
  return mix(parts);
}

/// A random 2x2x2x2 no-signaling box with rational entries of denominator
/// `den`. Marginals and the (0,0) corner of each setting are drawn at random;
/// corners are often pushed to their extreme values so that zeros and perfect
/// correlations show up.
inline Box random_ns_box(std::mt19937_64& rng, int den) {
  std::uniform_int_distribution<int> k(0, den);
  std::uniform_int_distribution<int> coin(0, 2);
  std::array<Rational, 2> pa{Rational(k(rng), den), Rational(k(rng), den)};
  std::array<Rational, 2> pb{Rational(k(rng), den), Rational(k(rng), den)};
  Box box(Shape{2, 2, 2, 2});
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const Rational& A = pa[static_cast<std::size_t>(x)];
      const Rational& B = pb[static_cast<std::size_t>(y)];
      const Rational lo = std::max(Rational(0), A + B - 1);
      const Rational hi = std::min(A, B);
      Rational c;
      switch (coin(rng)) {
        case 0: c = lo; break;
        case 1: c = hi; break;
        default: {
          std::vector<Rational> options;
          for (int i = 0; i <= den; ++i) {
            Rational v(i, den);
            if (v >= lo && v <= hi) options.push_back(v);
          }
          c = options.empty() ? lo : options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
        }
      }
      box.set(0, 0, x, y, c);
      box.set(0, 1, x, y, A - c);
      box.set(1, 0, x, y, B - c);
      box.set(1, 1, x, y, 1 - A - B + c);
    }
  return box;
}

/// Box entries as a plain table indexed [x][y][a][b], for comparisons that
/// should not go through the library's indexing.
inline std::vector<std::vector<std::vector<std::vector<Rational>>>> table(const Box& box) {
  const Shape& s = box.shape();
  std::vector<std::vector<std::vector<std::vector<Rational>>>> t(
      static_cast<std::size_t>(s.nX),
      std::vector<std::vector<std::vector<Rational>>>(
          static_cast<std::size_t>(s.nY),
          std::vector<std::vector<Rational>>(static_cast<std::size_t>(s.nA),
                                             std::vector<Rational>(static_cast<std::size_t>(s.nB)))));
  for (int x = 0; x < s.nX; ++x)
    for (int y = 0; y < s.nY; ++y)
      for (int a = 0; a < s.nA; ++a)
        for (int b = 0; b < s.nB; ++b)
          t[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)][static_cast<std::size_t>(a)]
           [static_cast<std::size_t>(b)] = box(a, b, x, y);
  return t;
}

/// Probability of an event on a finite space, summing masses of listed states.
inline Rational mass(const nsagree::OntologicalModel& m, const std::vector<int>& states) {
  Rational s = 0;
  for (int i : states) s += m.measure[static_cast<std::size_t>(i)];
  return s;
}

/// Reproduces the box of a model by summing, for every setting and output
/// pair, the masses of the states lying in both labeled cells.
inline Box box_of_model(const nsagree::OntologicalModel& m) {
  const Shape shape{static_cast<int>(m.parts_alice.front().cells.size()),
                    static_cast<int>(m.parts_bob.front().cells.size()), static_cast<int>(m.parts_alice.size()),
                    static_cast<int>(m.parts_bob.size())};
  Box box(shape);
  for (int x = 0; x < shape.nX; ++x)
    for (int y = 0; y < shape.nY; ++y)
      for (int a = 0; a < shape.nA; ++a)
        for (int b = 0; b < shape.nB; ++b) {
          const auto& ca = m.parts_alice[static_cast<std::size_t>(x)].cells[static_cast<std::size_t>(a)];
          const auto& cb = m.parts_bob[static_cast<std::size_t>(y)].cells[static_cast<std::size_t>(b)];
          std::vector<int> both;
          for (int w : ca)
            if (std::find(cb.begin(), cb.end(), w) != cb.end()) both.push_back(w);
          box.set(a, b, x, y, mass(m, both));
        }
  return box;
}

}  // namespace oracle
