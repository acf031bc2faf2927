// drdmf: case generation, C&CG solve, Monte Carlo evaluation and comparison.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drdmf/dro/solution_io.hpp"
#include "drdmf/netdata/ieee37.hpp"
#include "drdmf/netdata/io.hpp"
#include "drdmf/netdata/validate.hpp"
#include "drdmf/scenario/compare.hpp"
#include "drdmf/scenario/sampler.hpp"

namespace fs = std::filesystem;
using namespace drdmf;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNotConverged = 2, kInfeasible = 3, kIo = 4, kBackend = 5 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  const auto probe = fs::path(dir) / ".write_probe";
  std::ofstream f(probe);
  if (!f) throw IoError("output directory '" + dir + "' is not writable");
  f.close();
  fs::remove(probe, ec);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw IoError("cannot write '" + p.string() + "'");
  return f;
}

CaseData read_case(const std::string& path) {
  CaseData c = load_case(path);
  const auto rep = validate_case(c);
  if (!rep.ok()) {
    std::string msg = "invalid case '" + path + "':";
    for (const auto& i : rep.issues) msg += "\n  " + i;
    throw CaseError(msg, "<case>");
  }
  return c;
}

struct SolveFlags {
  std::string case_path, out = ".", backend = "highs";
  std::vector<std::string> methods{"dr-dmf"};
  double tol = 1e-4;
  int max_iter = 30;
  double mip_gap = 1e-4;
  double time_limit = 0.0;
  double budget = 0.0;
  bool price_marginal = false;
  bool verbose = false;
};

struct EvalFlags {
  std::string case_path, out = ".", backend = "highs";
  std::vector<std::string> solutions;
  std::vector<std::string> methods;
  int scenarios = 1000;
  std::uint64_t seed = 1;
  double perturbation = 0.1;
};

int cmd_gen_case(const Ieee37Options& o, const std::string& out) {
  const CaseData c = build_ieee37_case(o);
  const fs::path p(out);
  if (p.has_parent_path()) ensure_dir(p.parent_path().string());
  save_case(c, out);
  std::cout << "wrote " << out << " (" << c.nodes.size() << " nodes, " << c.edges.size() << " lines, T="
            << c.horizon_steps << ", fingerprint " << case_fingerprint(c) << ")\n";
  return kOk;
}

int cmd_solve(const SolveFlags& f) {
  const CaseData c = read_case(f.case_path);
  ensure_dir(f.out);
  CcgOptions opt;
  opt.tol = f.tol;
  opt.max_iter = f.max_iter;
  for (auto* s : {&opt.master.solve, &opt.subproblem.solve}) {
    s->backend = f.backend;
    s->verbose = false;
  }
  // Only the master may stop early: its incumbent stays feasible and its dual
  // bound stays valid, which is not true of a truncated subproblem.
  if (f.time_limit > 0) opt.master.solve.time_limit = f.time_limit;
  if (f.budget > 0) opt.time_budget = f.budget;
  opt.price_marginal = f.price_marginal;
  opt.master.solve.mip_rel_gap = f.mip_gap;
  opt.master.solve.mip_heuristic_effort = 0.3;
  if (f.verbose)
    opt.on_iteration = [](const IterationRecord& r) {
      std::cerr << "iter " << r.iteration << "  LB " << r.lower_bound << "  UB " << r.upper_bound << "  ("
                << r.master_seconds << " s master, " << r.subproblem_seconds << " s subproblem)\n";
    };
  int code = kOk;
  std::vector<CcgSeed> found;
  // Later methods are seeded with earlier incumbents they can represent.
  for (const auto& tag : f.methods) {
    const Method m = parse_method(tag);
    opt.seeds = found;
    if (m != Method::kDrDmf) opt.initial_cuts.clear();
    const Solution sol = run_ccg(c, m, opt);
    found.push_back({sol.first_stage, sol.beta});
    // dr-dmf after dr-smf starts from the support dr-smf found worst.
    if (m == Method::kDrSmf)
      for (const auto& p : sol.worst_scenarios)
        if (p.probability > 1e-9) opt.initial_cuts.push_back(p.u);
    write_json_file(solution_to_json(sol, c), (fs::path(f.out) / ("solution_" + tag + ".json")).string());
    auto csv = open_out(fs::path(f.out) / ("iterations_" + tag + ".csv"));
    write_iteration_csv(csv, sol.state);
    std::cout << tag << ": objective " << sol.objective << ", " << sol.state.log.size() << " iteration(s), "
              << (sol.converged ? "converged" : "NOT converged: " + sol.diagnostic) << "\n";
    if (!sol.converged) code = kNotConverged;
  }
  return code;
}

std::vector<std::pair<std::string, StoredSolution>> load_solutions(const EvalFlags& f, const CaseData& c) {
  std::vector<std::string> paths = f.solutions;
  for (const auto& m : f.methods) paths.push_back((fs::path(f.out) / ("solution_" + m + ".json")).string());
  if (paths.empty()) throw std::invalid_argument("no solutions given (use --solution or --method)");
  std::vector<std::pair<std::string, StoredSolution>> out;
  for (const auto& p : paths) {
    json j;
    try {
      j = read_json_file(p);
    } catch (const std::ios_base::failure& e) {
      throw IoError(e.what());
    }
    auto s = solution_from_json(j, c);
    out.emplace_back(method_tag(s.method), std::move(s));
  }
  return out;
}

std::vector<ScenarioRealization> scenarios_for(const EvalFlags& f, const CaseData& c) {
  SamplerConfig cfg;
  cfg.n_scenarios = f.scenarios;
  cfg.seed = f.seed;
  cfg.perturbation = f.perturbation;
  return sample_scenarios(c, cfg);
}

json run_meta(const EvalFlags& f, const CaseData& c) {
  return {{"case_fingerprint", case_fingerprint(c)},
          {"scenarios", f.scenarios},
          {"seed", f.seed},
          {"perturbation", f.perturbation}};
}

int cmd_evaluate(const EvalFlags& f) {
  const CaseData c = read_case(f.case_path);
  ensure_dir(f.out);
  const auto sols = load_solutions(f, c);
  const auto scen = scenarios_for(f, c);
  const SecondStageModel model(c);
  solver::SolveOptions so;
  so.backend = f.backend;
  for (const auto& [tag, s] : sols) {
    const auto st = evaluate_policy(s.first_stage, scen, model, so);
    json j = run_meta(f, c);
    j["method"] = tag;
    j["stats"] = stats_to_json(st);
    write_json_file(j, (fs::path(f.out) / ("stats_" + tag + ".json")).string());
    auto csv = open_out(fs::path(f.out) / ("stats_" + tag + ".csv"));
    csv.precision(10);
    csv << "scenario,total";
    for (int t = 0; t < c.horizon_steps; ++t) csv << ",step" << t + 1;
    csv << '\n';
    for (std::size_t i = 0; i < st.scenario_total.size(); ++i) {
      csv << i << ',' << st.scenario_total[i];
      for (double v : st.scenario_step[i]) csv << ',' << v;
      csv << '\n';
    }
    auto box = open_out(fs::path(f.out) / ("boxplot_" + tag + ".csv"));
    write_box_csv(box, {tag}, {st});
    std::cout << tag << ": expected VoLL " << st.expected_total << " $ over " << scen.size() << " scenarios\n";
  }
  return kOk;
}

int cmd_compare(const EvalFlags& f) {
  const CaseData c = read_case(f.case_path);
  ensure_dir(f.out);
  const auto sols = load_solutions(f, c);
  const auto scen = scenarios_for(f, c);
  const SecondStageModel model(c);
  solver::SolveOptions so;
  so.backend = f.backend;
  std::vector<std::string> tags;
  std::vector<FirstStageDecision> xs;
  for (const auto& [tag, s] : sols) {
    tags.push_back(tag);
    xs.push_back(s.first_stage);
  }
  const auto table = compare_methods(tags, xs, scen, model, so);
  json j = run_meta(f, c);
  j["table"] = table_to_json(table);
  write_json_file(j, (fs::path(f.out) / "comparison.json").string());
  auto csv = open_out(fs::path(f.out) / "comparison.csv");
  write_table_csv(csv, table);
  auto box = open_out(fs::path(f.out) / "boxplot.csv");
  write_box_csv(box, table.methods, table.stats);
  write_table_csv(std::cout, table);
  for (std::size_t m = 1; m < tags.size(); ++m)
    std::cout << "reduction of " << tags[0] << " vs " << tags[m] << ": " << 100.0 * table.reduction[m] << " %\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust dynamic microgrid formation"};
  app.require_subcommand(1);

  Ieee37Options gen;
  std::string gen_out = "case.json";
  auto* g = app.add_subcommand("gen-case", "write the IEEE 37-node study case");
  g->add_option("--out", gen_out, "output case file")->capture_default_str();
  g->add_option("--horizon", gen.horizon_steps, "number of time steps")->capture_default_str();
  g->add_option("--step-hours", gen.step_hours, "hours per step")->capture_default_str();
  g->add_option("--k", gen.k, "N-k contingency budget")->capture_default_str();
  g->add_option("--n-sw-max", gen.n_sw_max, "switch actions per step")->capture_default_str();
  g->add_option("--capacity-ratio", gen.dg_capacity_ratio, "DG capacity / peak demand")->capture_default_str();
  g->add_option("--typhoon-hazard", gen.typhoon_hazard, "per-step hazard on swept lines")->capture_default_str();
  g->add_option("--background-hazard", gen.background_hazard, "per-step hazard elsewhere")->capture_default_str();

  SolveFlags sf;
  auto* s = app.add_subcommand("solve", "solve by column-and-constraint generation");
  s->add_option("--case", sf.case_path, "case file")->required();
  s->add_option("--method", sf.methods, "dr-dmf | dr-smf | ro-dmf (repeatable)")->capture_default_str();
  s->add_option("--tol", sf.tol, "relative optimality gap")->capture_default_str();
  s->add_option("--max-iter", sf.max_iter, "iteration limit")->capture_default_str();
  s->add_option("--mip-gap", sf.mip_gap, "relative MIP gap of the master")->capture_default_str();
  s->add_option("--time-limit", sf.time_limit, "seconds per master MILP (0 = none)")->capture_default_str();
  s->add_option("--budget", sf.budget, "seconds of C&CG per method (0 = none)")->capture_default_str();
  s->add_flag("--price-marginal", sf.price_marginal, "also price candidates at their marginal-damage beta");
  s->add_option("--backend", sf.backend, "solver backend")->capture_default_str();
  s->add_option("--out", sf.out, "output directory")->capture_default_str();
  s->add_flag("-v,--verbose", sf.verbose, "print iterations");

  EvalFlags ef;
  auto add_eval = [&](CLI::App* a) {
    a->add_option("--case", ef.case_path, "case file")->required();
    a->add_option("--solution", ef.solutions, "solution file (repeatable)");
    a->add_option("--method", ef.methods, "read <out>/solution_<method>.json (repeatable)");
    a->add_option("--scenarios", ef.scenarios, "Monte Carlo sample size")->capture_default_str();
    a->add_option("--seed", ef.seed, "sampler seed")->capture_default_str();
    a->add_option("--perturbation", ef.perturbation, "relative disturbance of failure rates")->capture_default_str();
    a->add_option("--backend", ef.backend, "solver backend")->capture_default_str();
    a->add_option("--out", ef.out, "output directory")->capture_default_str();
  };
  auto* e = app.add_subcommand("evaluate", "Monte Carlo VoLL of stored solutions");
  add_eval(e);
  auto* cmp = app.add_subcommand("compare", "compare stored solutions on common scenarios");
  add_eval(cmp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return cmd_gen_case(gen, gen_out);
    if (*s) return cmd_solve(sf);
    if (*e) return cmd_evaluate(ef);
    if (*cmp) return cmd_compare(ef);
  } catch (const InfeasibleModel& err) {
    std::cerr << "infeasible: " << err.what() << "\n";
    return kInfeasible;
  } catch (const CaseError& err) {
    std::cerr << "case error: " << err.what() << "\n";
    return kIo;
  } catch (const SolutionError& err) {
    std::cerr << "solution error: " << err.what() << "\n";
    return kIo;
  } catch (const IoError& err) {
    std::cerr << "i/o error: " << err.what() << "\n";
    return kIo;
  } catch (const std::ios_base::failure& err) {
    std::cerr << "i/o error: " << err.what() << "\n";
    return kIo;
  } catch (const solver::BackendError& err) {
    std::cerr << "backend error: " << err.what() << "\n";
    return kBackend;
  } catch (const SolverFailure& err) {
    std::cerr << "solver failure: " << err.what() << "\n";
    return kBackend;
  } catch (const DualBoundError& err) {
    std::cerr << "solver failure: " << err.what() << "\n";
    return kBackend;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
