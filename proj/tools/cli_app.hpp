#pragma once

// Command-line front end. Kept in a header so the test suite can drive it
// in-process with string streams.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nsagree/nsagree.hpp"

namespace nsagree::cli {

enum ExitCode : int {
  ok = 0,
  usage = 1,
  parse_failure = 2,
  validation_failure = 3,
  budget_exceeded = 4,
  precondition_failure = 5,
};

class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;
  std::string family;
  std::string params;
  std::string grid;
  std::string mode = "auto";
  std::string shape = "2,2,2,2";
  bool relabel_search = false;
  std::size_t budget = default_state_budget;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  int omega = 4;
  int denominator = 3;
  bool uniform_only = false;
  std::uint64_t instance_budget = AgreementCheckOptions{}.instance_budget;
};

namespace detail {

inline const std::vector<std::string>& param_names() {
  static const std::vector<std::string> names{"r", "s", "t", "u"};
  return names;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

inline Rational parse_value(const std::string& text, const std::string& what) {
  try {
    return parse_rational(text);
  } catch (const ParseError& e) {
    throw UsageError(what + ": " + e.what());
  }
}

/// "r=1/2,s=1/4" -> {r: 1/2, s: 1/4}
inline std::map<std::string, Rational> parse_params(const std::string& text) {
  std::map<std::string, Rational> out;
  for (const std::string& item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("parameter \"" + item + "\" is not of the form name=value");
    const std::string name = item.substr(0, eq);
    if (std::find(param_names().begin(), param_names().end(), name) == param_names().end())
      throw UsageError("unknown parameter \"" + name + "\"");
    out[name] = parse_value(item.substr(eq + 1), "parameter " + name);
  }
  return out;
}

inline TableParams params_from_map(const std::map<std::string, Rational>& m) {
  auto get = [&](const char* n) {
    auto it = m.find(n);
    if (it == m.end()) throw UsageError(std::string("missing parameter ") + n);
    return it->second;
  };
  return {get("r"), get("s"), get("t"), get("u")};
}

/// Values of one grid axis: "lo:hi:step", "v1|v2|v3" or a single value.
inline std::vector<Rational> parse_axis(const std::string& name, const std::string& text) {
  std::vector<Rational> values;
  const std::string what = "grid axis " + name;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError(what + " must be lo:hi:step");
    const Rational lo = parse_value(parts[0], what);
    const Rational hi = parse_value(parts[1], what);
    const Rational step = parse_value(parts[2], what);
    if (!(step > 0)) throw UsageError(what + ": step must be positive");
    if (lo < 0 || hi > 1 || lo > hi) throw UsageError(what + ": range must lie within [0,1]");
    for (Rational v = lo; v <= hi; v += step) values.push_back(v);
  } else {
    for (const std::string& v : split(text, '|')) {
      Rational r = parse_value(v, what);
      if (r < 0 || r > 1) throw UsageError(what + ": value " + v + " outside [0,1]");
      values.push_back(r);
    }
  }
  if (values.empty()) throw UsageError(what + " is empty");
  return values;
}

inline std::vector<TableParams> grid_points(const RunConfig& cfg) {
  std::map<std::string, std::vector<Rational>> axes;
  for (const auto& [name, value] : parse_params(cfg.params)) axes[name] = {value};
  for (const std::string& item : split(cfg.grid, ';')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("grid item \"" + item + "\" is not of the form name=values");
    const std::string name = item.substr(0, eq);
    if (std::find(param_names().begin(), param_names().end(), name) == param_names().end())
      throw UsageError("unknown grid parameter \"" + name + "\"");
    axes[name] = parse_axis(name, item.substr(eq + 1));
  }
  for (const std::string& n : param_names())
    if (!axes.count(n)) throw UsageError("parameter " + n + " needs a value in --grid or --params");

  std::vector<TableParams> points;
  for (const Rational& r : axes["r"])
    for (const Rational& s : axes["s"])
      for (const Rational& t : axes["t"])
        for (const Rational& u : axes["u"]) points.push_back({r, s, t, u});

  if (cfg.samples > 0 && cfg.samples < points.size()) {
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> idx(points.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(cfg.samples);
    std::sort(idx.begin(), idx.end());
    std::vector<TableParams> chosen;
    for (std::size_t i : idx) chosen.push_back(points[i]);
    points = std::move(chosen);
  }
  return points;
}

inline std::string decimal(const Rational& r) {
  std::ostringstream os;
  os.precision(12);
  os << to_double(r);
  return os.str();
}

inline io::json read_json_file(const std::string& path) {
  if (path.empty()) throw UsageError("--input is required");
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return io::parse_json(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline Box read_box(const std::string& path) {
  const io::json j = read_json_file(path);
  try {
    return io::box_from_json(j);
  } catch (const Error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : target_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot write " + path);
      target_ = &file_;
    }
  }
  std::ostream& stream() { return *target_; }

 private:
  std::ofstream file_;
  std::ostream* target_;
};

inline TableKind table_kind(const std::string& family) {
  if (family == "ccd") return TableKind::ccd;
  if (family == "sd") return TableKind::sd;
  throw UsageError("family must be ccd or sd here, got \"" + family + "\"");
}

inline Shape parse_shape(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw UsageError("--shape must be nA,nB,nX,nY");
  std::vector<int> v;
  for (const auto& p : parts) {
    try {
      v.push_back(std::stoi(p));
    } catch (const std::exception&) {
      throw UsageError("--shape entry \"" + p + "\" is not an integer");
    }
  }
  return {v[0], v[1], v[2], v[3]};
}

inline int cmd_classify(const RunConfig& cfg, std::ostream& out) {
  const Box box = read_box(cfg.input);
  ClassifyOptions opt;
  opt.relabel_search = cfg.relabel_search;
  opt.budget = cfg.budget;
  const GeneralVerdict g = classify_general(box, opt);
  Output o(cfg.output, out);
  o.stream() << io::to_json(g).dump(2) << '\n';
  return ok;
}

inline int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Box box;
  if (cfg.family == "pr") {
    box = pr_variant_box();
  } else if (cfg.family == "uniform") {
    box = uniform_box(parse_shape(cfg.shape));
  } else {
    const TableKind kind = table_kind(cfg.family);
    const TableParams p = params_from_map(parse_params(cfg.params));
    for (const std::string& f : family_constraint_failures(kind, p)) err << "warning: " << f << '\n';
    box = family_box(kind, p);
  }
  Output o(cfg.output, out);
  o.stream() << io::to_json(box).dump(2) << '\n';
  return ok;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<TableKind, TableParams>> points;
  if (cfg.family == "pr") {
    points.emplace_back(TableKind::sd, TableParams{Rational(1, 2), Rational(1, 2), Rational(0), Rational(1, 2)});
  } else {
    const TableKind kind = table_kind(cfg.family);
    for (const TableParams& p : grid_points(cfg)) points.emplace_back(kind, p);
  }

  Output o(cfg.output, out);
  std::ostream& csv = o.stream();
  csv << "r,s,t,u,r_dec,s_dec,t_dec,u_dec,qA,qA_dec,qB,qB_dec,ccd,sd,local,gap,gap_dec\n";
  std::size_t skipped = 0;
  for (const auto& [kind, p] : points) {
    if (!family_entries_nonnegative(kind, p)) {
      ++skipped;
      continue;
    }
    const Box box = family_box(kind, p);
    const DisagreementReport ccd = detect_ccd(box);
    const DisagreementReport sd = detect_sd(box);
    const bool local = is_local(box, cfg.budget).local;
    const std::optional<Rational> gap = tsirelson_obstruction(box);
    auto cond = [](const Conditional& c) {
      return c.defined ? to_string(c.value) + "," + decimal(c.value) : std::string(",");
    };
    csv << to_string(p.r) << ',' << to_string(p.s) << ',' << to_string(p.t) << ',' << to_string(p.u) << ','
        << decimal(p.r) << ',' << decimal(p.s) << ',' << decimal(p.t) << ',' << decimal(p.u) << ','
        << cond(ccd.hierarchy.qA) << ',' << cond(ccd.hierarchy.qB) << ',' << (ccd.ccd ? "true" : "false") << ','
        << (sd.sd ? "true" : "false") << ',' << (local ? "true" : "false") << ','
        << (gap ? to_string(*gap) + "," + decimal(*gap) : std::string(",")) << '\n';
  }
  if (skipped > 0) err << "note: skipped " << skipped << " grid points with negative entries\n";
  return ok;
}

inline int cmd_reduce(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Box box = read_box(cfg.input);
  require_valid(box);
  std::vector<ReductionMode> modes;
  if (cfg.mode == "ccd" || cfg.mode == "auto") modes.push_back(ReductionMode::ccd);
  if (cfg.mode == "sd" || cfg.mode == "auto") modes.push_back(ReductionMode::sd);
  if (modes.empty()) throw UsageError("--mode must be ccd, sd or auto");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    try {
      const ReductionResult r = reduce(box, modes[i]);
      Output o(cfg.output, out);
      o.stream() << io::to_json(r).dump(2) << '\n';
      return ok;
    } catch (const ReductionRefused& e) {
      if (i + 1 < modes.size()) continue;
      err << "error: " << e.what() << '\n' << io::to_json(e.report()).dump(2) << '\n';
      return precondition_failure;
    }
  }
  return precondition_failure;
}

inline int cmd_ontology(const RunConfig& cfg, std::ostream& out) {
  const Box box = read_box(cfg.input);
  BoxToModelOptions opt;
  opt.budget = cfg.budget;
  opt.prefer_unsigned = true;
  const OntologicalModel model = box_to_model(box, opt);
  Output o(cfg.output, out);
  o.stream() << io::to_json(model).dump(2) << '\n';
  return ok;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  AgreementCheckOptions opt;
  opt.max_states = cfg.omega;
  opt.max_denominator = cfg.denominator;
  opt.uniform_only = cfg.uniform_only;
  opt.instance_budget = cfg.instance_budget;
  const AgreementCheckReport report = verify_agreement_theorem(opt);
  Output o(cfg.output, out);
  o.stream() << io::to_json(report).dump(2) << '\n';
  if (!report.complete) {
    err << "error: instance budget exhausted before the enumeration finished\n";
    return budget_exceeded;
  }
  return ok;
}

}  // namespace detail

/// Runs the tool on `args` (without the program name). Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact analysis of no-signaling boxes: disagreement, locality and reductions", "nsagree"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_budget = [&](CLI::App* sub) {
    sub->add_option("--budget", cfg.budget, "Maximum number of deterministic strategies for exact LP")
        ->check(CLI::PositiveNumber);
  };
  auto add_output = [&](CLI::App* sub) { sub->add_option("--output,-o", cfg.output, "Write result to this file"); };

  CLI::App* classify_cmd = app.add_subcommand("classify", "Classify a box given as JSON");
  classify_cmd->add_option("--input,-i", cfg.input, "Box JSON file")->required();
  classify_cmd->add_flag("--relabel-search", cfg.relabel_search, "Search relabelings for a family frame");
  add_budget(classify_cmd);
  add_output(classify_cmd);

  CLI::App* generate_cmd = app.add_subcommand("generate", "Instantiate a family box");
  generate_cmd->add_option("--family", cfg.family, "ccd, sd, pr or uniform")
      ->required()
      ->check(CLI::IsMember({"ccd", "sd", "pr", "uniform"}));
  generate_cmd->add_option("--params", cfg.params, "r=..,s=..,t=..,u=..");
  generate_cmd->add_option("--shape", cfg.shape, "nA,nB,nX,nY for the uniform box");
  add_output(generate_cmd);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Tabulate a family over a parameter grid as CSV");
  sweep_cmd->add_option("--family", cfg.family, "ccd, sd or pr")->required()->check(CLI::IsMember({"ccd", "sd", "pr"}));
  sweep_cmd->add_option("--grid", cfg.grid, "Axes like r=0:1:1/4;s=0|1/2;t=1/4");
  sweep_cmd->add_option("--params", cfg.params, "Fixed values for axes missing from --grid");
  sweep_cmd->add_option("--samples", cfg.samples, "Sample this many grid points instead of all");
  sweep_cmd->add_option("--seed", cfg.seed, "Seed for --samples");
  add_budget(sweep_cmd);
  add_output(sweep_cmd);

  CLI::App* reduce_cmd = app.add_subcommand("reduce", "Reduce a multi-output box to a binary box");
  reduce_cmd->add_option("--input,-i", cfg.input, "Box JSON file")->required();
  reduce_cmd->add_option("--mode", cfg.mode, "ccd, sd or auto")->check(CLI::IsMember({"ccd", "sd", "auto"}));
  add_output(reduce_cmd);

  CLI::App* ontology_cmd = app.add_subcommand("ontology", "Build a (quasi-)probability ontological model");
  ontology_cmd->add_option("--input,-i", cfg.input, "Box JSON file")->required();
  add_budget(ontology_cmd);
  add_output(ontology_cmd);

  CLI::App* verify_cmd = app.add_subcommand("verify-classical", "Exhaustively check the classical agreement theorem");
  verify_cmd->add_option("--omega", cfg.omega, "Largest state space size")->check(CLI::Range(1, 16));
  verify_cmd->add_option("--denominator", cfg.denominator, "Largest measure denominator")->check(CLI::PositiveNumber);
  verify_cmd->add_flag("--uniform-only", cfg.uniform_only, "Only uniform measures");
  verify_cmd->add_option("--budget", cfg.instance_budget, "Maximum number of towers evaluated");
  add_output(verify_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return usage;
  }

  try {
    if (classify_cmd->parsed()) return detail::cmd_classify(cfg, out);
    if (generate_cmd->parsed()) return detail::cmd_generate(cfg, out, err);
    if (sweep_cmd->parsed()) return detail::cmd_sweep(cfg, out, err);
    if (reduce_cmd->parsed()) return detail::cmd_reduce(cfg, out, err);
    if (ontology_cmd->parsed()) return detail::cmd_ontology(cfg, out);
    if (verify_cmd->parsed()) return detail::cmd_verify(cfg, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return usage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return parse_failure;
  } catch (const StructuralError& e) {
    err << "parse error: " << e.what() << '\n';
    return parse_failure;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n' << io::to_json(e.result()).dump(2) << '\n';
    return validation_failure;
  } catch (const SignalingError& e) {
    err << "validation error: " << e.what() << '\n';
    return validation_failure;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return budget_exceeded;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return precondition_failure;
  } catch (const ShapeError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return precondition_failure;
  }
  return usage;
}

}  // namespace nsagree::cli
