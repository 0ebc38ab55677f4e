#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nsagree/bridge.hpp"
#include "nsagree/families.hpp"

namespace nsagree {

/// A box recognized as a member of one of the two families, with the
/// parameters read off its entries.
struct TableForm {
  TableKind kind = TableKind::ccd;
  TableParams params;
  /// All defining conditions hold (including nonnegativity of every entry).
  bool constraints_ok = false;
  std::vector<std::string> failures;
};

namespace detail {
inline void require_binary(const Box& box, const char* what) {
  if (!box.shape().is_binary())
    throw ShapeError(std::string(what) + " needs a 2x2x2x2 box, got shape " + to_string(box.shape()));
}

inline std::optional<TableForm> match_family(const Box& box, TableKind kind, TableParams p) {
  if (!(family_box(kind, p) == box)) return std::nullopt;
  TableForm f{kind, p, false, family_constraint_failures(kind, p)};
  f.constraints_ok = f.failures.empty();
  return f;
}
}  // namespace detail

/// Reads r = p(00|00), s = p(01|01), t = p(00|11), u = p(01|10) and checks that
/// the box equals the ccd family member with these parameters.
inline std::optional<TableForm> match_ccd_form(const Box& box) {
  detail::require_binary(box, "ccd form matching");
  return detail::match_family(box, TableKind::ccd, {box(0, 0, 0, 0), box(0, 1, 0, 1), box(0, 0, 1, 1), box(0, 1, 1, 0)});
}

/// Reads s = p(00|00), t = p(01|00), u = p(11|00), r = p(00|11) and checks that
/// the box equals the sd family member with these parameters.
inline std::optional<TableForm> match_sd_form(const Box& box) {
  detail::require_binary(box, "sd form matching");
  return detail::match_family(box, TableKind::sd, {box(0, 0, 1, 1), box(0, 0, 0, 0), box(0, 1, 0, 0), box(1, 1, 0, 0)});
}

/// For a box perfectly correlated at (0,0) and (1,1), returns c01 - c10.
///
/// Quantum boxes with perfect correlation on both diagonal settings have
/// c01 = c10, so a nonzero value rules out a quantum realization. Returns
/// nullopt when the premise does not hold.
inline std::optional<Rational> tsirelson_obstruction(const Box& box) {
  detail::require_binary(box, "tsirelson obstruction");
  if (!is_perfectly_correlated(box, 0, 0) || !is_perfectly_correlated(box, 1, 1)) return std::nullopt;
  const CorrelatorVector c = correlators(box);
  return c(0, 1) - c(1, 0);
}

/// p(00|00) > 0 together with p(01|11) = p(00|01) = p(10|10) = 0. No local
/// box shows this pattern.
inline bool hardy_pattern(const Box& box) {
  detail::require_binary(box, "hardy pattern");
  return box(0, 0, 0, 0) > 0 && box(0, 1, 1, 1) == 0 && box(0, 0, 0, 1) == 0 && box(1, 0, 1, 0) == 0;
}

enum class Conclusion { local, postquantum, no_obstruction_found };

inline std::string to_string(Conclusion c) {
  switch (c) {
    case Conclusion::local: return "LOCAL";
    case Conclusion::postquantum: return "POSTQUANTUM";
    case Conclusion::no_obstruction_found: return "NO_OBSTRUCTION_FOUND";
  }
  return "UNKNOWN";
}

struct ClassificationVerdict {
  bool local = false;
  /// False when the locality LP was skipped (too many deterministic strategies).
  bool locality_decided = true;
  LocalityVerdict locality;
  std::optional<TableForm> ccd_form;
  std::optional<TableForm> sd_form;
  std::optional<Rational> tsirelson_gap;
  bool hardy = false;
  Conclusion conclusion = Conclusion::no_obstruction_found;
  /// Relabeling applied before matching, when a search found a better frame.
  std::optional<Relabeling> relabeling;
};

struct ClassifyOptions {
  bool relabel_search = false;
  std::size_t budget = default_state_budget;
};

/// The 128 relabelings of a binary box: input swaps, output flips per input,
/// and exchange of the parties. The identity comes first.
inline std::vector<Relabeling> binary_relabelings() {
  std::vector<Relabeling> all;
  const std::vector<int> id{0, 1};
  const std::vector<int> flip{1, 0};
  for (int swap = 0; swap < 2; ++swap)
    for (int ix = 0; ix < 2; ++ix)
      for (int iy = 0; iy < 2; ++iy)
        for (int oa = 0; oa < 4; ++oa)
          for (int ob = 0; ob < 4; ++ob) {
            Relabeling r;
            r.swap_parties = swap == 1;
            r.alice_inputs = ix ? flip : id;
            r.bob_inputs = iy ? flip : id;
            r.alice_outputs = {(oa & 1) ? flip : id, (oa & 2) ? flip : id};
            r.bob_outputs = {(ob & 1) ? flip : id, (ob & 2) ? flip : id};
            all.push_back(std::move(r));
          }
  return all;
}

namespace detail {
inline bool form_ok(const std::optional<TableForm>& f) { return f && f->constraints_ok; }

inline void collect_evidence(const Box& box, ClassificationVerdict& v) {
  v.ccd_form = match_ccd_form(box);
  v.sd_form = match_sd_form(box);
  v.tsirelson_gap = tsirelson_obstruction(box);
  v.hardy = hardy_pattern(box);
}

inline Conclusion conclude(const ClassificationVerdict& v) {
  if (v.locality_decided && v.local) return Conclusion::local;
  if (form_ok(v.ccd_form) || form_ok(v.sd_form)) return Conclusion::postquantum;
  if (v.tsirelson_gap && *v.tsirelson_gap != 0) return Conclusion::postquantum;
  if (v.hardy && v.locality_decided && !v.local) return Conclusion::postquantum;
  return Conclusion::no_obstruction_found;
}
}  // namespace detail

/// Classifies a valid 2x2x2x2 box. Locality is decided exactly by linear
/// programming; the family forms, the correlator gap and the Hardy pattern
/// each certify post-quantumness on their own.
///
/// With relabel_search, if neither family form matches in the given labels,
/// the first relabeling under which one of them matches with all defining
/// conditions is used for the evidence and recorded in the verdict.
inline ClassificationVerdict classify(const Box& box, const ClassifyOptions& opt = {}) {
  detail::require_binary(box, "classification");
  require_valid(box);

  ClassificationVerdict v;
  v.locality = is_local(box, opt.budget);
  v.local = v.locality.local;
  detail::collect_evidence(box, v);

  if (opt.relabel_search && !detail::form_ok(v.ccd_form) && !detail::form_ok(v.sd_form)) {
    for (const Relabeling& r : binary_relabelings()) {
      const Box candidate = relabel(box, r);
      if (detail::form_ok(match_ccd_form(candidate)) || detail::form_ok(match_sd_form(candidate))) {
        detail::collect_evidence(candidate, v);
        if (!r.is_identity()) v.relabeling = r;
        break;
      }
    }
  }
  v.conclusion = detail::conclude(v);
  return v;
}

}  // namespace nsagree
