#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nsagree/box.hpp"

namespace nsagree {

/// Membership mask over one party's output labels.
using OutputSet = std::vector<bool>;

inline std::vector<int> members(const OutputSet& s) {
  std::vector<int> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i]) out.push_back(static_cast<int>(i));
  return out;
}

inline bool contains(const OutputSet& s, int label) {
  return label >= 0 && label < static_cast<int>(s.size()) && s[static_cast<std::size_t>(label)];
}

/// The certainty sets alpha_n (Alice's outputs) and beta_n (Bob's outputs)
/// for levels n = 0..depth. Every level beyond `depth` equals the last one.
struct CertaintyHierarchy {
  std::vector<OutputSet> alphas;
  std::vector<OutputSet> betas;
  int depth = 0;
  Conditional qA;
  Conditional qB;

  [[nodiscard]] const OutputSet& alpha(int n) const {
    return alphas[static_cast<std::size_t>(std::min(n, depth))];
  }
  [[nodiscard]] const OutputSet& beta(int n) const { return betas[static_cast<std::size_t>(std::min(n, depth))]; }
  [[nodiscard]] const OutputSet& alpha_final() const { return alphas.back(); }
  [[nodiscard]] const OutputSet& beta_final() const { return betas.back(); }
};

namespace detail {

inline void require_disagreement_shape(const Box& box) {
  const Shape& s = box.shape();
  if (s.nA < 2 || s.nB < 2 || s.nX < 2 || s.nY < 2)
    throw ShapeError("disagreement analysis needs at least two inputs and outputs per party, got " + to_string(s));
}

// Alice's estimate of Bob's event b=1 (at y=1) after seeing a at x=0.
inline Conditional alice_estimate(const Box& box, int a) { return conditional(box, Party::bob, 1, a, 0, 1); }

// Bob's estimate of Alice's event a=1 (at x=1) after seeing b at y=0.
inline Conditional bob_estimate(const Box& box, int b) { return conditional(box, Party::alice, 1, b, 1, 0); }

inline CertaintyHierarchy build_hierarchy(const Box& box, const Conditional& qA, const Conditional& qB) {
  require_disagreement_shape(box);
  const Shape& s = box.shape();

  OutputSet alpha(static_cast<std::size_t>(s.nA), false);
  OutputSet beta(static_cast<std::size_t>(s.nB), false);
  if (qA.defined)
    for (int a = 0; a < s.nA; ++a) alpha[static_cast<std::size_t>(a)] = alice_estimate(box, a).equals(qA.value);
  if (qB.defined)
    for (int b = 0; b < s.nB; ++b) beta[static_cast<std::size_t>(b)] = bob_estimate(box, b).equals(qB.value);

  CertaintyHierarchy h;
  h.qA = qA;
  h.qB = qB;
  h.alphas.push_back(alpha);
  h.betas.push_back(beta);

  // Each non-final step removes at least one label, so nA + nB steps suffice.
  for (int n = 0; n <= s.nA + s.nB; ++n) {
    const OutputSet& cur_alpha = h.alphas.back();
    const OutputSet& cur_beta = h.betas.back();
    OutputSet next_alpha(cur_alpha.size(), false);
    OutputSet next_beta(cur_beta.size(), false);
    for (int a = 0; a < s.nA; ++a)
      if (cur_alpha[static_cast<std::size_t>(a)])
        next_alpha[static_cast<std::size_t>(a)] =
            conditional_set(box, Party::bob, cur_beta, a, 0, 0).equals(Rational(1));
    for (int b = 0; b < s.nB; ++b)
      if (cur_beta[static_cast<std::size_t>(b)])
        next_beta[static_cast<std::size_t>(b)] =
            conditional_set(box, Party::alice, cur_alpha, b, 0, 0).equals(Rational(1));
    if (next_alpha == cur_alpha && next_beta == cur_beta) {
      h.depth = n;
      return h;
    }
    h.alphas.push_back(std::move(next_alpha));
    h.betas.push_back(std::move(next_beta));
  }
  throw std::logic_error("certainty hierarchy failed to stabilize");
}

}  // namespace detail

/// q_A = p(b=1|a=0,x=0,y=1), Alice's estimate of Bob's event at the witness.
inline Conditional alice_assignment(const Box& box) {
  detail::require_disagreement_shape(box);
  return detail::alice_estimate(box, 0);
}

/// q_B = p(a=1|b=0,x=1,y=0), Bob's estimate of Alice's event at the witness.
inline Conditional bob_assignment(const Box& box) {
  detail::require_disagreement_shape(box);
  return detail::bob_estimate(box, 0);
}

/// Certainty sets for externally supplied assignments qA, qB. Outputs whose
/// conditioning event is null never enter alpha_0 / beta_0.
inline CertaintyHierarchy hierarchy(const Box& box, const Rational& qA, const Rational& qB) {
  return detail::build_hierarchy(box, {qA, true}, {qB, true});
}

/// Certainty sets for the assignments the box itself induces at the witness.
inline CertaintyHierarchy hierarchy(const Box& box) {
  return detail::build_hierarchy(box, alice_assignment(box), bob_assignment(box));
}

/// Smallest N with alpha_N = alpha_{N+1} and beta_N = beta_{N+1}.
inline int mutual_certainty_depth(const Box& box) { return hierarchy(box).depth; }

/// The event (a, b, x, y) at which disagreement is evaluated.
struct Witness {
  int a = 0;
  int b = 0;
  int x = 0;
  int y = 0;
};

struct DisagreementReport {
  CertaintyHierarchy hierarchy;
  bool ccd = false;
  bool sd = false;
  /// Alice's a=1 at x=1 and Bob's b=1 at y=1 coincide almost surely.
  bool perfectly_correlated = false;
  Witness witness;
  /// Why the requested notion was not detected; empty when it was.
  std::string reason;
};

namespace reason {
inline constexpr const char* null_conditioning = "null conditioning event";
inline constexpr const char* not_correlated = "events a=1 and b=1 at x=1,y=1 not perfectly correlated";
inline constexpr const char* witness_null = "p(00|00) = 0";
inline constexpr const char* agreement = "q_A = q_B";
inline constexpr const char* no_common_certainty = "witness outside common certainty";
inline constexpr const char* not_extremal = "q_A != 1 or q_B != 0";
}  // namespace reason

namespace detail {

inline DisagreementReport analyze(const Box& box) {
  DisagreementReport r;
  r.hierarchy = hierarchy(box);
  r.perfectly_correlated = events_perfectly_correlated(box, 1, 1, 1);
  const auto& qA = r.hierarchy.qA;
  const auto& qB = r.hierarchy.qB;
  const bool defined = qA.defined && qB.defined;
  const bool witness_positive = box(0, 0, 0, 0) > 0;
  const bool common = contains(r.hierarchy.alpha_final(), 0) && contains(r.hierarchy.beta_final(), 0);

  r.ccd = defined && r.perfectly_correlated && witness_positive && qA.value != qB.value && common;
  r.sd = defined && r.perfectly_correlated && witness_positive && qA.value == 1 && qB.value == 0;
  return r;
}

inline std::string common_reason(const DisagreementReport& r, const Box& box) {
  if (!r.hierarchy.qA.defined || !r.hierarchy.qB.defined) return reason::null_conditioning;
  if (!r.perfectly_correlated) return reason::not_correlated;
  if (box(0, 0, 0, 0) == 0) return reason::witness_null;
  return {};
}

}  // namespace detail

/// Common certainty of disagreement at the witness (0,0,0,0) about the
/// perfectly correlated events a=1 at x=1 and b=1 at y=1.
inline DisagreementReport detect_ccd(const Box& box) {
  DisagreementReport r = detail::analyze(box);
  if (!r.ccd) {
    r.reason = detail::common_reason(r, box);
    if (r.reason.empty())
      r.reason = r.hierarchy.qA.value == r.hierarchy.qB.value ? reason::agreement : reason::no_common_certainty;
  }
  return r;
}

/// Singular disagreement: q_A = 1 and q_B = 0 about perfectly correlated events.
inline DisagreementReport detect_sd(const Box& box) {
  DisagreementReport r = detail::analyze(box);
  if (!r.sd) {
    r.reason = detail::common_reason(r, box);
    if (r.reason.empty()) r.reason = reason::not_extremal;
  }
  return r;
}

}  // namespace nsagree
