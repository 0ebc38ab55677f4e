#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsagree/classifier.hpp"
#include "nsagree/epistemic.hpp"

namespace nsagree {

enum class ReductionMode { ccd, sd };

inline std::string to_string(ReductionMode m) { return m == ReductionMode::ccd ? "ccd" : "sd"; }

/// Coarse-graining of a box onto binary inputs and outputs.
///
/// Inputs 0 and 1 are kept. At input 0 a party answers 0 iff its output lies
/// in its group; at input 1 it answers 0 iff its output differs from 1.
struct ReductionPlan {
  ReductionMode mode = ReductionMode::ccd;
  OutputSet alice_group;
  OutputSet bob_group;
};

namespace detail {
inline int coarse_output(const OutputSet& group, int input, int output) {
  if (input == 0) return contains(group, output) ? 0 : 1;
  return output != 1 ? 0 : 1;
}

inline void require_plan_fits(const Box& box, const ReductionPlan& plan) {
  const Shape& s = box.shape();
  if (s.nA < 2 || s.nB < 2 || s.nX < 2 || s.nY < 2)
    throw ShapeError("reduction needs at least two inputs and outputs per party, got shape " + to_string(s));
  if (static_cast<int>(plan.alice_group.size()) != s.nA || static_cast<int>(plan.bob_group.size()) != s.nB)
    throw ShapeError("reduction groups do not match box shape " + to_string(s));
}
}  // namespace detail

/// The 2x2x2x2 box obtained by applying the plan's output maps, without any
/// precondition on the source box.
inline Box effective_box(const Box& box, const ReductionPlan& plan) {
  detail::require_plan_fits(box, plan);
  const Shape& s = box.shape();
  Box out(Shape{2, 2, 2, 2});
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < s.nA; ++a)
        for (int b = 0; b < s.nB; ++b) {
          const int ra = detail::coarse_output(plan.alice_group, x, a);
          const int rb = detail::coarse_output(plan.bob_group, y, b);
          out.set(ra, rb, x, y, out(ra, rb, x, y) + box(a, b, x, y));
        }
  return out;
}

/// The deterministic strategy of the reduced box induced by `strategy`.
inline DeterministicStrategy effective_strategy(const DeterministicStrategy& strategy, const ReductionPlan& plan) {
  DeterministicStrategy out;
  for (int x = 0; x < 2; ++x)
    out.alice.push_back(detail::coarse_output(plan.alice_group, x, strategy.alice[static_cast<std::size_t>(x)]));
  for (int y = 0; y < 2; ++y)
    out.bob.push_back(detail::coarse_output(plan.bob_group, y, strategy.bob[static_cast<std::size_t>(y)]));
  return out;
}

/// Pushes a local decomposition of the source box through the plan. The result
/// is a nonnegative decomposition of effective_box(source, plan).
inline std::vector<std::pair<DeterministicStrategy, Rational>> effective_decomposition(
    const std::vector<std::pair<DeterministicStrategy, Rational>>& decomposition, const ReductionPlan& plan) {
  std::vector<std::pair<DeterministicStrategy, Rational>> out;
  for (const auto& [strategy, weight] : decomposition) {
    DeterministicStrategy reduced = effective_strategy(strategy, plan);
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == reduced; });
    if (it == out.end())
      out.emplace_back(std::move(reduced), weight);
    else
      it->second += weight;
  }
  return out;
}

/// Raised when the source box does not show the requested disagreement.
class ReductionRefused : public PreconditionError {
 public:
  ReductionRefused(ReductionMode mode, DisagreementReport report)
      : PreconditionError("reduction refused: box has no " +
                          std::string(mode == ReductionMode::ccd ? "common certainty of disagreement"
                                                                 : "singular disagreement") +
                          " (" + report.reason + ")"),
        report_(std::move(report)) {}

  [[nodiscard]] const DisagreementReport& report() const { return report_; }

 private:
  DisagreementReport report_;
};

struct ReductionResult {
  Box box;
  ReductionPlan plan;
  DisagreementReport source_report;
};

/// Reduces a box with disagreement to a 2x2x2x2 box with the same assignments.
///
/// In ccd mode the input-0 groups are the final certainty sets; in sd mode
/// they are the level-zero sets. Refuses boxes that fail the corresponding
/// detector.
inline ReductionResult reduce(const Box& box, ReductionMode mode) {
  DisagreementReport report = mode == ReductionMode::ccd ? detect_ccd(box) : detect_sd(box);
  if (!(mode == ReductionMode::ccd ? report.ccd : report.sd)) throw ReductionRefused(mode, std::move(report));
  ReductionPlan plan;
  plan.mode = mode;
  if (mode == ReductionMode::ccd) {
    plan.alice_group = report.hierarchy.alpha_final();
    plan.bob_group = report.hierarchy.beta_final();
  } else {
    plan.alice_group = report.hierarchy.alpha(0);
    plan.bob_group = report.hierarchy.beta(0);
  }
  Box reduced = effective_box(box, plan);
  return {std::move(reduced), std::move(plan), std::move(report)};
}

struct GeneralVerdict {
  /// Locality refers to the source box; the remaining evidence to the
  /// reduced box when a reduction was applied.
  ClassificationVerdict verdict;
  std::optional<ReductionResult> reduction;
};

/// Classifies a box of any shape. Binary boxes go straight to classify().
/// Larger boxes are reduced when they show disagreement (ccd first, then sd)
/// and the reduced box is classified. Locality of the source is decided by
/// linear programming when the strategy count fits the budget.
inline GeneralVerdict classify_general(const Box& box, const ClassifyOptions& opt = {}) {
  require_valid(box);
  GeneralVerdict g;
  if (box.shape().is_binary()) {
    g.verdict = classify(box, opt);
    return g;
  }

  ClassificationVerdict v;
  try {
    v.locality = is_local(box, opt.budget);
    v.local = v.locality.local;
  } catch (const BudgetExceeded&) {
    v.locality_decided = false;
  }

  const Shape& s = box.shape();
  if (s.nA >= 2 && s.nB >= 2 && s.nX >= 2 && s.nY >= 2) {
    for (ReductionMode mode : {ReductionMode::ccd, ReductionMode::sd}) {
      try {
        g.reduction = reduce(box, mode);
        break;
      } catch (const ReductionRefused&) {
      }
    }
  }

  if (g.reduction) {
    // The binary reduced box has only 16 strategies; never refuse it.
    ClassifyOptions inner = opt;
    inner.budget = std::max<std::size_t>(opt.budget, 16);
    ClassificationVerdict reduced = classify(g.reduction->box, inner);
    v.ccd_form = reduced.ccd_form;
    v.sd_form = reduced.sd_form;
    v.tsirelson_gap = reduced.tsirelson_gap;
    v.hardy = reduced.hardy;
    v.relabeling = reduced.relabeling;
    // Coarse-graining preserves locality, so a nonlocal reduced box certifies
    // the source as nonlocal even when the source LP was skipped.
    if (!v.locality_decided && !reduced.local) {
      v.locality_decided = true;
      v.local = false;
    }
    if (v.locality_decided && v.local) {
      v.conclusion = Conclusion::local;
    } else {
      v.conclusion = reduced.conclusion == Conclusion::local ? Conclusion::no_obstruction_found : reduced.conclusion;
    }
  } else {
    v.conclusion = v.locality_decided && v.local ? Conclusion::local : Conclusion::no_obstruction_found;
  }
  g.verdict = std::move(v);
  return g;
}

}  // namespace nsagree
