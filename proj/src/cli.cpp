#include "mmconc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <variant>

#include <CLI11.hpp>

#include "mmconc/doubling.hpp"
#include "mmconc/families.hpp"
#include "mmconc/io.hpp"
#include "mmconc/observable.hpp"
#include "mmconc/parallel.hpp"
#include "mmconc/separation.hpp"

namespace mmconc {

namespace {

struct Options {
  std::string space;
  std::vector<std::string> screens;
  std::vector<double> kappas;
  std::optional<double> epsilon;
  std::optional<double> radius;
  std::optional<double> target_mass;
  std::optional<std::size_t> effort;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> budget;
  std::string out;
  std::string format = "json";
  std::string family = "hamming:2..8";
  std::string method = "auto";
  int workers = 0;
};

// What a subcommand hands back: the JSON result plus a flat table for CSV.
struct Outcome {
  Json result;
  std::vector<std::string> header;
  std::vector<std::vector<Json>> rows;
  std::vector<std::string> diagnostics;
  /// Replaces the whole CSV emission when set (levy-run).
  std::optional<std::string> csv;
  Json budgets = Json::object();
  int exit_code = kExitOk;
};

std::string join_labels(const FiniteMMSpace& space, const PointSet& set) {
  std::string out;
  for (std::size_t i : set) out += (out.empty() ? "" : ";") + space.label(i);
  return out;
}

FiniteMMSpace need_space(const Options& o) {
  if (o.space.empty()) throw InputError("--space is required");
  return load_space(o.space);
}

double single_kappa(const Options& o) {
  if (o.kappas.size() != 1) throw InputError("exactly one --kappa is required");
  return o.kappas.front();
}

double need(const std::optional<double>& value, const char* flag) {
  if (!value) throw InputError(std::string(flag) + " is required");
  return *value;
}

Outcome cmd_validate(const Options& o) {
  if (o.space.empty()) throw InputError("--space is required");
  const SpaceDocument doc = parse_space_document(read_text_file(o.space), o.space);
  const RawSpace raw = doc.merge_duplicates ? merge_duplicates(doc.raw).space : doc.raw;
  const ValidationResult result = validate_space(raw);
  Outcome out;
  out.result["ok"] = result.report.ok();
  out.result["points"] = raw.labels.size();
  if (result.space) {
    out.result["total_mass"] = number(result.space->total_mass());
    out.result["diameter"] = number(result.space->diameter());
  }
  out.result["triangle_total"] = result.report.triangle_total;
  Json violations = Json::array();
  out.header = {"kind", "i", "j", "k", "value", "description"};
  for (const auto& v : result.report.violations) {
    auto slot = [&](std::size_t idx) -> Json {
      if (idx == Violation::npos) return Json();
      return idx < raw.labels.size() ? Json(raw.labels[idx]) : Json(idx);
    };
    const std::string text = v.describe(raw.labels);
    violations.push_back(Json{{"kind", to_string(v.kind)}, {"i", slot(v.i)}, {"j", slot(v.j)}, {"k", slot(v.k)},
                              {"value", number(v.value)}, {"description", text}});
    out.rows.push_back({to_string(v.kind), slot(v.i), slot(v.j), slot(v.k), number(v.value), text});
  }
  out.result["violations"] = std::move(violations);
  if (!result.report.ok()) {
    out.diagnostics.push_back(result.report.summary(raw.labels));
    out.exit_code = kExitInput;
  }
  return out;
}

Outcome cmd_sep(const Options& o) {
  const FiniteMMSpace space = need_space(o);
  const SepQuery query(o.kappas);
  SepBudget budget;
  if (o.budget) budget.max_assignments = *o.budget;
  SearchEffort effort;
  if (o.effort) effort.moves = *o.effort;

  Outcome out;
  out.budgets["max_assignments"] = budget.max_assignments;
  out.budgets["moves"] = effort.moves;
  bool exhaustive = o.method == "exact" || (o.method == "auto" && sep_exact_fits(space, query, budget));
  if (o.method != "auto" && o.method != "exact" && o.method != "search") {
    throw InputError("--method must be auto, exact or search");
  }
  const SepResult result = exhaustive ? sep_exact(space, query, budget) : sep_lower_bound(space, query, effort, o.seed);
  if (!exhaustive && o.method == "auto") {
    out.diagnostics.push_back(std::to_string(sep_assignment_count(space.size(), query.groups())) +
                              " assignments exceed the exhaustive budget; value is a certified lower bound");
  }
  out.result["value"] = number(result.value);
  out.result["feasible"] = result.feasible;
  out.result["exact"] = result.exact;
  Json witnesses = Json::array();
  out.header = {"group", "kappa", "mass", "points"};
  for (std::size_t g = 0; g < result.witnesses.size(); ++g) {
    witnesses.push_back(labels_of(space, result.witnesses[g]));
    out.rows.push_back({g, number(query.kappas()[g]), number(set_mass(space, result.witnesses[g])),
                        join_labels(space, result.witnesses[g])});
  }
  out.result["witnesses"] = std::move(witnesses);
  return out;
}

Outcome cmd_sep_real(const Options& o) {
  if (o.space.empty()) throw InputError("--space is required");
  const RealMeasure nu = parse_real_measure(read_text_file(o.space), o.space);
  const double kappa = single_kappa(o);
  SepBudget budget;
  if (o.budget) budget.max_assignments = *o.budget;
  Outcome out;
  out.budgets["max_assignments"] = budget.max_assignments;
  const QuantileGap q = sep_real_quantile(nu, kappa);
  out.result["a0"] = number(q.a0);
  out.result["b0"] = number(q.b0);
  out.result["gap"] = number(q.gap);
  out.result["degenerate"] = q.degenerate;
  out.result["total_mass"] = number(nu.total_mass());
  out.result["partial_diameter_m_minus_2kappa"] = number(partial_diameter_real(nu, nu.total_mass() - 2.0 * kappa));
  Json exact;
  if (nu.size() >= 2) {
    const FiniteMMSpace line = nu.as_space();
    const SepQuery query{kappa, kappa};
    if (sep_exact_fits(line, query, budget)) {
      exact = number(sep_exact(line, query, budget).value);
    } else {
      out.diagnostics.push_back("exhaustive Sep skipped: over budget");
    }
  }
  out.result["sep_exact"] = exact;
  out.header = {"a0", "b0", "gap", "degenerate", "sep_exact"};
  out.rows.push_back({number(q.a0), number(q.b0), number(q.gap), q.degenerate, exact});
  return out;
}

Outcome cmd_partial_diam(const Options& o) {
  if (o.space.empty()) throw InputError("--space is required");
  const double target = need(o.target_mass, "--target-mass");
  const std::string text = read_text_file(o.space);
  Outcome out;
  double value = 0.0;
  if (is_real_measure_document(text)) {
    value = partial_diameter_real(parse_real_measure(text, o.space), target);
    out.result["method"] = "real line sliding window";
  } else {
    ScreenBudget budget;
    if (o.budget) budget.max_points = static_cast<std::size_t>(*o.budget);
    out.budgets["max_points"] = budget.max_points;
    value = partial_diameter_screen(parse_space(text, o.space), target, budget);
    out.result["method"] = "threshold clique search";
  }
  out.result["target_mass"] = number(target);
  out.result["value"] = number(value);
  out.header = {"target_mass", "value"};
  out.rows.push_back({number(target), number(value)});
  return out;
}

Outcome cmd_obsdiam(const Options& o) {
  const FiniteMMSpace space = need_space(o);
  const double kappa = single_kappa(o);
  if (o.screens.size() > 1) throw InputError("obsdiam takes at most one --screen");
  Outcome out;
  Bracket bracket;
  if (o.screens.empty()) {
    RealBracketOptions opt;
    opt.seed = o.seed;
    if (o.effort) opt.effort = *o.effort;
    if (o.budget) opt.sep_budget.max_assignments = *o.budget;
    out.budgets["effort"] = opt.effort;
    out.budgets["max_assignments"] = opt.sep_budget.max_assignments;
    bracket = obsdiam_real_bracket(space, kappa, opt);
    const auto& f = std::get<RealMap>(bracket.witness);
    Json values = Json::object();
    for (std::size_t i = 0; i < space.size(); ++i) values[space.label(i)] = number(f.values[i]);
    out.result["screen"] = "R";
    out.result["witness_values"] = std::move(values);
    out.result["witness_subset"] = labels_of(space, bracket.witness_subset);
  } else {
    const FiniteMMSpace screen = load_space(o.screens.front());
    ScreenSampling opt;
    opt.seed = o.seed;
    if (o.effort) opt.samples = *o.effort;
    if (o.budget) opt.screen_budget.max_points = static_cast<std::size_t>(*o.budget);
    out.budgets["samples"] = opt.samples;
    out.budgets["max_points"] = opt.screen_budget.max_points;
    const ScreenEstimate estimate = obsdiam_screen_estimate(space, screen, kappa, opt);
    bracket = estimate.bracket;
    const auto& map = std::get<ScreenMap>(bracket.witness);
    Json targets = Json::object();
    for (std::size_t i = 0; i < space.size(); ++i) targets[space.label(i)] = screen.label(map.targets[i]);
    out.result["screen"] = o.screens.front();
    out.result["witness_map"] = std::move(targets);
    out.result["starved"] = estimate.starved;
  }
  out.result["kappa"] = number(kappa);
  out.result["lower"] = number(bracket.lower);
  out.result["upper"] = number(bracket.upper);
  out.result["upper_available"] = bracket.upper_available;
  out.result["upper_source"] = bracket.upper_source;
  out.diagnostics = bracket.diagnostics;
  out.header = {"kappa", "lower", "upper", "upper_source"};
  out.rows.push_back({number(kappa), number(bracket.lower), number(bracket.upper), bracket.upper_source});
  return out;
}

Outcome cmd_doubling(const Options& o) {
  const FiniteMMSpace space = need_space(o);
  const double horizon = need(o.radius, "--radius");
  const DoublingProfile profile = doubling_profile(space, horizon);
  Outcome out;
  out.result["horizon"] = number(horizon);
  out.result["sup"] = number(profile.sup());
  Json table = Json::array();
  out.header = {"radius", "constant"};
  for (std::size_t k = 0; k < profile.radii().size(); ++k) {
    table.push_back(Json{{"radius", number(profile.radii()[k])}, {"constant", number(profile.constants()[k])}});
    out.rows.push_back({number(profile.radii()[k]), number(profile.constants()[k])});
  }
  out.result["profile"] = std::move(table);
  if (o.epsilon) {
    const Net net = build_net(space, *o.epsilon);
    const PackingCheck check = packing_bound_check(space, profile, net, *o.epsilon);
    out.result["packing"] = Json{{"epsilon", number(*o.epsilon)},
                                 {"lemma_constant", number(check.lemma_constant)},
                                 {"bound", number(check.bound)},
                                 {"max_multiplicity", check.max_multiplicity},
                                 {"holds", check.holds}};
  }
  return out;
}

Outcome cmd_net(const Options& o) {
  const FiniteMMSpace space = need_space(o);
  const double eps = need(o.epsilon, "--epsilon");
  const Net net = build_net(space, eps);
  Outcome out;
  std::size_t multiplicity = 0;
  for (std::size_t c : net.members) multiplicity = std::max(multiplicity, packing_multiplicity(space, net, c, 5.0 * eps));
  out.result["epsilon"] = number(eps);
  out.result["members"] = labels_of(space, net.members);
  out.result["valid"] = is_valid_net(space, net);
  out.result["max_multiplicity_5eps"] = multiplicity;
  Json cover = Json::object();
  out.header = {"point", "cover"};
  for (std::size_t i = 0; i < space.size(); ++i) {
    cover[space.label(i)] = space.label(net.cover[i]);
    out.rows.push_back({space.label(i), space.label(net.cover[i])});
  }
  out.result["cover"] = std::move(cover);
  return out;
}

Outcome cmd_color(const Options& o) {
  const FiniteMMSpace space = need_space(o);
  const double eps = need(o.epsilon, "--epsilon");
  const Net net = build_net(space, eps);
  const Coloring coloring = color_net(space, net, eps);
  Outcome out;
  out.result["epsilon"] = number(eps);
  out.result["k"] = coloring.k;
  out.result["center"] = space.label(coloring.center);
  out.result["valid"] = is_valid_coloring(space, net, coloring, eps);
  Json classes = Json::array();
  out.header = {"class", "points"};
  for (std::size_t c = 0; c < coloring.classes.size(); ++c) {
    classes.push_back(labels_of(space, coloring.classes[c]));
    out.rows.push_back({c, join_labels(space, coloring.classes[c])});
  }
  out.result["classes"] = std::move(classes);
  if (o.radius) {
    const DoublingProfile profile = doubling_profile(space, *o.radius);
    const PackingCheck check = packing_bound_check(space, profile, net, eps);
    out.result["packing"] = Json{{"lemma_constant", number(check.lemma_constant)},
                                 {"bound", number(check.bound)},
                                 {"max_multiplicity", check.max_multiplicity},
                                 {"holds", check.holds}};
  }
  return out;
}

Outcome cmd_levy(const Options& o, bool seed_given) {
  if (!seed_given) throw InputError("levy-run requires an explicit --seed");
  const auto family = parse_family_range(o.family);
  std::vector<RosterScreen> roster;
  if (o.screens.empty()) {
    roster = default_roster();
  } else {
    for (const auto& path : o.screens) {
      const SpaceDocument doc = parse_space_document(read_text_file(path), path);
      std::string name = std::filesystem::path(path).stem().string();
      if (doc.screen.is_object() && doc.screen.contains("name") && doc.screen["name"].is_string()) {
        name = doc.screen["name"].get<std::string>();
      }
      roster.push_back({name, load_space(path)});
    }
  }
  LevyOptions opt;
  if (!o.kappas.empty()) opt.kappas = o.kappas;
  opt.seed = o.seed;
  if (o.effort) opt.sep_effort.moves = *o.effort;
  if (o.budget) opt.sep_budget.max_assignments = *o.budget;
  opt.horizon = o.radius;
  opt.epsilon = o.epsilon;
  const LevyReport report = run_levy_experiment(family, roster, opt);

  Outcome out;
  out.budgets["moves"] = opt.sep_effort.moves;
  out.budgets["max_assignments"] = opt.sep_budget.max_assignments;
  out.budgets["samples"] = opt.sampling.samples;
  out.result = levy_report_json(report);
  out.csv = levy_report_csv(report);
  return out;
}

void emit(const Outcome& outcome, const Options& o, const std::string& command, const std::vector<std::string>& echo,
          std::ostream& out) {
  std::string text;
  if (o.format == "csv") {
    text = outcome.csv ? *outcome.csv : table_csv(outcome.header, outcome.rows);
  } else {
    Json report;
    report["command"] = command;
    report["args"] = echo;
    report["seed"] = o.seed;
    report["budgets"] = outcome.budgets;
    report["result"] = outcome.result;
    report["diagnostics"] = outcome.diagnostics;
    text = report.dump(2) + "\n";
  }
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw InputError("cannot write '" + o.out + "'");
  file << text;
}

// The worker count changes wall time only, so it stays out of the echo.
std::vector<std::string> echo_args(const std::vector<std::string>& args) {
  std::vector<std::string> echo;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--workers") {
      ++i;
      continue;
    }
    if (args[i].rfind("--workers=", 0) == 0) continue;
    echo.push_back(args[i]);
  }
  return echo;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concentration and separation estimates on finite metric-measure spaces", "mmconc"};
  app.require_subcommand(1);
  Options o;

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"validate", "check the metric-measure axioms of a space file"},
      {"sep", "separation distance Sep(X; kappa_0, ..., kappa_N)"},
      {"sep-real", "quantile gap and Sep of a measure on the real line"},
      {"partial-diam", "partial diameter at a target mass"},
      {"obsdiam", "bracket the observable diameter into R or a screen"},
      {"doubling", "doubling profile C(r) on (0, R]"},
      {"net", "greedy maximal eps-separated net"},
      {"color", "5 eps-separated coloring of a net"},
      {"levy-run", "concentration experiment over a family and a screen roster"},
  };
  std::map<std::string, CLI::Option*> seed_options;
  for (const auto& sub : subs) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    cmd->add_option("--space", o.space, "space or atoms document");
    cmd->add_option("--screen", o.screens, "screen space document (repeatable for levy-run)");
    cmd->add_option("--kappa", o.kappas, "mass threshold (repeatable)");
    cmd->add_option("--epsilon", o.epsilon, "net scale");
    cmd->add_option("--radius", o.radius, "doubling horizon R");
    cmd->add_option("--target-mass", o.target_mass, "mass the subset must carry");
    cmd->add_option("--effort", o.effort, "search moves or samples");
    seed_options[sub.name] = cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--budget", o.budget, "exhaustive-search budget");
    cmd->add_option("--out", o.out, "write the report here instead of stdout");
    cmd->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--workers", o.workers, "OpenMP workers (results do not depend on it)");
    if (std::string(sub.name) == "levy-run") cmd->add_option("--family", o.family, "family range, e.g. hamming:2..8");
    if (std::string(sub.name) == "sep") {
      cmd->add_option("--method", o.method, "auto, exact or search");
    }
  }

  std::vector<const char*> argv{"mmconc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (o.workers > 0) set_worker_count(o.workers);
    Outcome outcome;
    if (command == "validate") outcome = cmd_validate(o);
    else if (command == "sep") outcome = cmd_sep(o);
    else if (command == "sep-real") outcome = cmd_sep_real(o);
    else if (command == "partial-diam") outcome = cmd_partial_diam(o);
    else if (command == "obsdiam") outcome = cmd_obsdiam(o);
    else if (command == "doubling") outcome = cmd_doubling(o);
    else if (command == "net") outcome = cmd_net(o);
    else if (command == "color") outcome = cmd_color(o);
    else outcome = cmd_levy(o, seed_options[command]->count() > 0);
    emit(outcome, o, command, echo_args(args), out);
    return outcome.exit_code;
  } catch (const BudgetExceeded& e) {
    err << "refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const PreconditionError& e) {
    err << "refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace mmconc
