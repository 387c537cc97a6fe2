#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "robustsense/instances.hpp"
#include "robustsense/json_io.hpp"
#include "robustsense/milp.hpp"
#include "robustsense/pipeline.hpp"
#include "robustsense/robust.hpp"
#include "robustsense/search.hpp"
#include "robustsense/sensitivity.hpp"

namespace rs = robustsense;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitCheck = 4;

struct Options {
  std::string instance = "builtin:search";
  std::string case_name;
  std::optional<int> kappa;
  std::vector<double> deltas;
  std::string robust_mode = "exact";
  int samples = 500;
  std::uint64_t seed = 20220101;
  std::string format = "markdown";
  std::string out;
  int tech_scenarios = 20;
  double tech_alpha1 = -2.0;
  std::string tech_bounds = "base";
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--instance", o.instance, "instance file, builtin:search or builtin:tech")
      ->envname("ROBUSTSENSE_INSTANCE");
  cmd->add_option("--case", o.case_name, "perturbation case A, B or C (search instances)")
      ->envname("ROBUSTSENSE_CASE");
  cmd->add_option("--kappa", o.kappa, "cell cap for search instances")
      ->envname("ROBUSTSENSE_KAPPA");
  cmd->add_option("--delta", o.deltas, "uncertainty radius, repeatable")
      ->envname("ROBUSTSENSE_DELTA");
  cmd->add_option("--robust-mode", o.robust_mode, "exact or sampled")
      ->envname("ROBUSTSENSE_ROBUST_MODE");
  cmd->add_option("--samples", o.samples, "scenario count for the sampled mode")
      ->envname("ROBUSTSENSE_SAMPLES");
  cmd->add_option("--seed", o.seed, "seed for sampling and generators")
      ->envname("ROBUSTSENSE_SEED");
  cmd->add_option("--format", o.format, "csv, markdown or json")->envname("ROBUSTSENSE_FORMAT");
  cmd->add_option("--out", o.out, "write output to a file instead of stdout")
      ->envname("ROBUSTSENSE_OUT");
  cmd->add_option("--tech-scenarios", o.tech_scenarios, "scenario count for builtin:tech")
      ->envname("ROBUSTSENSE_TECH_SCENARIOS");
  cmd->add_option("--tech-alpha1", o.tech_alpha1, "first penalty slope for builtin:tech")
      ->envname("ROBUSTSENSE_TECH_ALPHA1");
  cmd->add_option("--tech-bounds", o.tech_bounds,
                  "bounds variant for builtin:tech: base, low-upper, high-lower")
      ->envname("ROBUSTSENSE_TECH_BOUNDS");
}

void apply_search_overrides(rs::ProblemInstance& inst, const Options& o) {
  if (!o.case_name.empty()) {
    if (inst.blocks.size() != 20)
      throw std::invalid_argument("case selection needs the 20-cell search layout");
    rs::SearchCase c = rs::search_case_from_name(o.case_name);
    for (int k = 0; k < 20; ++k) {
      bool on = false;
      switch (c) {
        case rs::SearchCase::A: on = true; break;
        case rs::SearchCase::B: on = k >= 6 && k <= 12; break;
        case rs::SearchCase::C: on = k >= 13 && k <= 19; break;
      }
      inst.blocks[k].perturbable = on;
    }
  }
  if (o.kappa) {
    rs::SearchInstance si = rs::search_from_problem(inst);  // validates the shape
    (void)si;
    inst.feasible.constraints.at(1).rhs = *o.kappa;
  }
}

rs::ProblemInstance load(const Options& o) {
  if (o.instance == "builtin:search") {
    rs::SearchCase c =
        o.case_name.empty() ? rs::SearchCase::A : rs::search_case_from_name(o.case_name);
    double delta = o.deltas.empty() ? 5.0 : o.deltas.front();
    rs::SearchInstance si = rs::build_search_instance(c, o.kappa.value_or(8), delta);
    return rs::to_problem_instance(si);
  }
  if (o.instance == "builtin:tech") {
    rs::TechInvestConfig cfg;
    cfg.scenarios = o.tech_scenarios;
    cfg.alpha1 = o.tech_alpha1;
    cfg.bounds = rs::bounds_variant_from_name(o.tech_bounds);
    cfg.seed = o.seed;
    return rs::build_tech_instance(cfg);
  }
  rs::ProblemInstance inst = rs::load_instance(o.instance);
  apply_search_overrides(inst, o);
  return inst;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw std::invalid_argument("cannot write '" + o.out + "'");
  f << text;
}

rs::SolveReport nominal_solve(const rs::ProblemInstance& inst) {
  bool detection = true;
  for (const auto& blk : inst.blocks)
    for (const auto& t : blk.terms)
      if (!std::holds_alternative<rs::NegExpDetection>(t)) detection = false;
  if (detection && !inst.blocks.empty()) {
    rs::SearchInstance si = rs::search_from_problem(inst);
    return rs::solve_search(si, si.sweep);
  }
  rs::LinearizedModel lin = rs::linearize_summax(inst);
  rs::SolveReport rep = rs::solve_milp(lin.model);
  if (rep.status != rs::SolveStatus::Infeasible) rep.x = lin.decisions(rep.x);
  return rep;
}

int cmd_solve(const Options& o) {
  rs::ProblemInstance inst = load(o);
  rs::SolveReport rep = nominal_solve(inst);
  if (rep.status == rs::SolveStatus::Infeasible) {
    emit(o, "status infeasible\n");
    return kExitSolver;
  }
  if (o.format == "json") {
    nlohmann::json j = {{"status", rs::status_name(rep.status)},
                        {"value", rep.value},
                        {"bound", rep.bound},
                        {"nodes", rep.node_count},
                        {"x", rep.x}};
    emit(o, j.dump(2) + "\n");
  } else {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "status %s\nvalue %.12g\nnodes %ld\n",
                  rs::status_name(rep.status), rep.value, rep.node_count);
    emit(o, buf);
  }
  return kExitOk;
}

int cmd_sense(const Options& o) {
  rs::ProblemInstance inst = load(o);
  rs::SolveReport rep = nominal_solve(inst);
  if (rep.status == rs::SolveStatus::Infeasible) {
    emit(o, "status infeasible\n");
    return kExitSolver;
  }
  rs::SensitivityReport sens = rs::sensitivity_report(inst, {rep.x}, rep.value);
  nlohmann::json j = rs::to_json(sens);
  nlohmann::json preds = nlohmann::json::array();
  for (double d : o.deltas)
    preds.push_back({{"delta", d},
                     {"q_tilde", rs::predict_robust_value(rep.value, sens.lip_radius, d)}});
  j["predictions"] = preds;
  if (o.format == "json") {
    emit(o, j.dump(2) + "\n");
  } else {
    std::string text;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "q0 %.12g\nlip_radius %.12g\nlip_full %.12g\n", sens.q0,
                  sens.lip_radius, sens.lip_full);
    text = buf;
    for (double d : o.deltas) {
      std::snprintf(buf, sizeof(buf), "q_tilde(%g) %.12g\n", d,
                    rs::predict_robust_value(rep.value, sens.lip_radius, d));
      text += buf;
    }
    emit(o, text);
  }
  return kExitOk;
}

int cmd_robust(const Options& o) {
  rs::ProblemInstance inst = load(o);
  rs::PipelineOptions popts;
  popts.robust =
      o.robust_mode == "sampled" ? rs::RobustChoice::Sampled : rs::RobustChoice::Exact;
  if (o.robust_mode != "sampled" && o.robust_mode != "exact")
    throw std::invalid_argument("robust mode must be exact or sampled");
  popts.samples = o.samples;
  popts.seed = o.seed;
  std::vector<double> deltas = o.deltas.empty() ? std::vector<double>{5.0} : o.deltas;
  auto rows = rs::run_pipeline(inst, deltas, popts);
  emit(o, rs::render(rows, rs::render_format_from_name(o.format)));
  for (const auto& r : rows)
    if (r.status != "ok") return kExitSolver;
  return kExitOk;
}

int cmd_table1(const Options& o, bool check) {
  auto rows = rs::run_search_table();
  emit(o, rs::render(rows, rs::render_format_from_name(o.format)));
  if (!check) return kExitOk;
  rs::TableCheck tc = rs::check_against_reference(rows);
  if (tc.pass) {
    std::cerr << "reference check: all rows within tolerance\n";
    return kExitOk;
  }
  std::cerr << "reference check failed:\n";
  for (const auto& m : tc.mismatches) std::cerr << "  " << m << "\n";
  return kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sum-of-max robust sensitivity toolkit"};
  app.require_subcommand(1);
  Options o;

  CLI::App* solve = app.add_subcommand("solve", "solve the nominal problem");
  add_common(solve, o);
  CLI::App* sense = app.add_subcommand("sense", "nominal solve plus sensitivity estimates");
  add_common(sense, o);
  CLI::App* robust =
      app.add_subcommand("robust", "full nominal/sensitivity/robust comparison");
  add_common(robust, o);
  CLI::App* table1 = app.add_subcommand("table1", "the bundled 12-row search study");
  add_common(table1, o);
  bool check = false;
  table1->add_flag("--check", check, "verify against the reference values (exit 4 on mismatch)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(o);
    if (sense->parsed()) return cmd_sense(o);
    if (robust->parsed()) return cmd_robust(o);
    if (table1->parsed()) return cmd_table1(o, check);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitConfig;
}
