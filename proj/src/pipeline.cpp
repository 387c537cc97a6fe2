#include "robustsense/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "robustsense/instances.hpp"
#include "robustsense/milp.hpp"
#include "robustsense/robust.hpp"
#include "robustsense/search.hpp"

namespace robustsense {

namespace {

bool all_detection(const ProblemInstance& inst) {
  for (const auto& blk : inst.blocks)
    for (const auto& t : blk.terms)
      if (!std::holds_alternative<NegExpDetection>(t)) return false;
  return !inst.blocks.empty();
}

SolveReport nominal_solve(const ProblemInstance& inst) {
  if (all_detection(inst)) {
    SearchInstance si = search_from_problem(inst);
    return solve_search(si, si.sweep);
  }
  LinearizedModel lin = linearize_summax(inst);
  SolveReport rep = solve_milp(lin.model);
  if (rep.status == SolveStatus::Optimal || rep.status == SolveStatus::GapReached)
    rep.x = lin.decisions(rep.x);
  return rep;
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == ',') c = ';';
  return s;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

}  // namespace

std::vector<PipelineRow> run_pipeline(const ProblemInstance& inst,
                                      const std::vector<double>& deltas,
                                      const PipelineOptions& opts) {
  validate(inst);
  std::vector<PipelineRow> rows;
  rows.reserve(deltas.size());

  SolveReport nominal;
  SensitivityReport sens;
  std::string fail;
  try {
    nominal = nominal_solve(inst);
    if (nominal.status == SolveStatus::Infeasible)
      throw std::runtime_error("nominal problem is infeasible");
    sens = sensitivity_report(inst, {nominal.x}, nominal.value, opts.tie_tol);
  } catch (const std::exception& e) {
    fail = e.what();
  }

  for (double delta : deltas) {
    PipelineRow row;
    row.label = opts.label;
    row.delta = delta;
    if (!fail.empty()) {
      row.status = fail;
      rows.push_back(std::move(row));
      continue;
    }
    row.q0 = nominal.value;
    row.lip_radius = sens.lip_radius;
    row.q_tilde = predict_robust_value(nominal.value, sens.lip_radius, std::fabs(delta));
    try {
      UncertaintySpec spec;
      spec.radius = delta;
      RobustReport rob;
      if (opts.robust == RobustChoice::Exact)
        rob = solve_robust_exact(inst, spec);
      else
        rob = solve_robust_sampled(inst, spec, opts.samples, opts.seed);
      row.q_lower = rob.lower;
      row.q_upper = rob.upper;
      row.bracketed = rob.bracketed();
      row.err_pct =
          std::max(error_pct(row.q_tilde, rob.lower), error_pct(row.q_tilde, rob.upper));
    } catch (const std::exception& e) {
      row.status = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<PipelineRow> run_search_table() {
  std::vector<PipelineRow> rows;
  for (SearchCase c : {SearchCase::A, SearchCase::B, SearchCase::C}) {
    for (double delta : {5.0, 10.0}) {
      for (int kappa : {8, 16}) {
        SearchInstance si = build_search_instance(c, kappa, delta);
        PipelineOptions opts;
        opts.label = search_case_name(c);
        auto part = run_pipeline(to_problem_instance(si), {delta}, opts);
        part.at(0).kappa = kappa;
        rows.push_back(std::move(part.at(0)));
      }
    }
  }
  return rows;
}

RenderFormat render_format_from_name(const std::string& name) {
  if (name == "csv") return RenderFormat::Csv;
  if (name == "markdown" || name == "md") return RenderFormat::Markdown;
  if (name == "json") return RenderFormat::Json;
  throw std::invalid_argument("unknown format '" + name + "'");
}

std::string render(const std::vector<PipelineRow>& rows, RenderFormat fmt_kind) {
  if (rows.empty()) throw std::invalid_argument("nothing to render");
  std::ostringstream out;
  switch (fmt_kind) {
    case RenderFormat::Csv: {
      out << "label,delta,kappa,q0,lip_radius,q_tilde,q_lower,q_upper,bracketed,err_pct,status\n";
      char buf[512];
      for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf),
                      "%s,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%s\n",
                      r.label.c_str(), r.delta, r.kappa, r.q0, r.lip_radius, r.q_tilde,
                      r.q_lower, r.q_upper, r.bracketed ? 1 : 0, r.err_pct,
                      one_line(r.status).c_str());
        out << buf;
      }
      return out.str();
    }
    case RenderFormat::Markdown: {
      out << "case | delta | kappa | q(0) | lip q(0) | q~(delta) | q(delta) | % error\n";
      out << "--- | --- | --- | --- | --- | --- | --- | ---\n";
      for (const auto& r : rows) {
        if (r.status != "ok") {
          out << r.label << " | " << fmt("%g", r.delta) << " | " << r.kappa
              << " | - | - | - | - | - (" << one_line(r.status) << ")\n";
          continue;
        }
        out << r.label << " | " << fmt("%g", r.delta) << " | " << r.kappa << " | "
            << fmt("%.3f", r.q0) << " | " << fmt("%.5f", r.lip_radius) << " | "
            << fmt("%.3f", r.q_tilde) << " | ";
        if (r.bracketed)
          out << "[" << fmt("%.3f", r.q_lower) << " " << fmt("%.3f", r.q_upper) << "]";
        else
          out << fmt("%.3f", r.q_upper);
        out << " | " << fmt("%.1f", r.err_pct) << "\n";
      }
      return out.str();
    }
    case RenderFormat::Json: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : rows) {
        arr.push_back({{"label", r.label},
                       {"delta", r.delta},
                       {"kappa", r.kappa},
                       {"q0", r.q0},
                       {"lip_radius", r.lip_radius},
                       {"q_tilde", r.q_tilde},
                       {"q_lower", r.q_lower},
                       {"q_upper", r.q_upper},
                       {"bracketed", r.bracketed},
                       {"err_pct", r.err_pct},
                       {"status", r.status}});
      }
      return arr.dump(2) + "\n";
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<PipelineRow> parse_rows(const std::string& text, RenderFormat fmt_kind) {
  std::vector<PipelineRow> rows;
  if (fmt_kind == RenderFormat::Json) {
    nlohmann::json arr = nlohmann::json::parse(text);
    for (const auto& j : arr) {
      PipelineRow r;
      r.label = j.at("label").get<std::string>();
      r.delta = j.at("delta").get<double>();
      r.kappa = j.at("kappa").get<int>();
      r.q0 = j.at("q0").get<double>();
      r.lip_radius = j.at("lip_radius").get<double>();
      r.q_tilde = j.at("q_tilde").get<double>();
      r.q_lower = j.at("q_lower").get<double>();
      r.q_upper = j.at("q_upper").get<double>();
      r.bracketed = j.at("bracketed").get<bool>();
      r.err_pct = j.at("err_pct").get<double>();
      r.status = j.at("status").get<std::string>();
      rows.push_back(std::move(r));
    }
    return rows;
  }
  if (fmt_kind != RenderFormat::Csv)
    throw std::invalid_argument("only csv and json can be parsed back");
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::string cur;
    std::istringstream ls(line);
    while (std::getline(ls, cur, ',')) fields.push_back(cur);
    if (fields.size() < 11) throw std::invalid_argument("malformed csv row: " + line);
    PipelineRow r;
    r.label = fields[0];
    r.delta = std::stod(fields[1]);
    r.kappa = std::stoi(fields[2]);
    r.q0 = std::stod(fields[3]);
    r.lip_radius = std::stod(fields[4]);
    r.q_tilde = std::stod(fields[5]);
    r.q_lower = std::stod(fields[6]);
    r.q_upper = std::stod(fields[7]);
    r.bracketed = fields[8] == "1";
    r.err_pct = std::stod(fields[9]);
    r.status = fields[10];
    rows.push_back(std::move(r));
  }
  return rows;
}

const std::vector<ReferenceRow>& search_reference_table() {
  static const std::vector<ReferenceRow> table = {
      {"A", 5, 8, 0.448, 0.00389, 0.467, 0.476, 1.8},
      {"A", 5, 16, 0.282, 0.01386, 0.351, 0.364, 3.5},
      {"A", 10, 8, 0.448, 0.00389, 0.486, 0.532, 8.5},
      {"A", 10, 16, 0.282, 0.01386, 0.421, 0.479, 12.2},
      {"B", 5, 8, 0.448, 0.00052, 0.450, 0.451, 0.1},
      {"B", 5, 16, 0.282, 0.00590, 0.312, 0.317, 1.6},
      {"B", 10, 8, 0.448, 0.00052, 0.453, 0.457, 0.9},
      {"B", 10, 16, 0.282, 0.00590, 0.341, 0.365, 6.5},
      {"C", 5, 8, 0.448, 0.00336, 0.464, 0.467, 0.5},
      {"C", 5, 16, 0.282, 0.00688, 0.317, 0.324, 2.3},
      {"C", 10, 8, 0.448, 0.00336, 0.481, 0.501, 3.8},
      {"C", 10, 16, 0.282, 0.00688, 0.351, 0.388, 9.4},
  };
  return table;
}

TableCheck check_against_reference(const std::vector<PipelineRow>& rows) {
  const auto& ref = search_reference_table();
  TableCheck out;
  if (rows.size() != ref.size()) {
    out.pass = false;
    out.mismatches.push_back("expected " + std::to_string(ref.size()) + " rows, got " +
                             std::to_string(rows.size()));
    return out;
  }
  char buf[256];
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const auto& r = rows[i];
    const auto& e = ref[i];
    auto complain = [&](const char* what, double got, double want, double tol) {
      std::snprintf(buf, sizeof(buf), "row %zu (%s d=%g k=%d) %s: got %.6f, reference %.6f (tol %g)",
                    i, e.label, e.delta, e.kappa, what, got, want, tol);
      out.pass = false;
      out.mismatches.emplace_back(buf);
    };
    if (r.status != "ok") {
      out.pass = false;
      out.mismatches.push_back("row " + std::to_string(i) + " failed: " + r.status);
      continue;
    }
    if (std::fabs(r.q0 - e.q0) > 0.002) complain("q0", r.q0, e.q0, 0.002);
    if (std::fabs(r.lip_radius - e.lip) > 0.00002) complain("lip", r.lip_radius, e.lip, 0.00002);
    if (std::fabs(r.q_tilde - e.q_tilde) > 0.002) complain("q_tilde", r.q_tilde, e.q_tilde, 0.002);
    if (std::fabs(r.q_upper - e.q_delta) > 0.002) complain("q_delta", r.q_upper, e.q_delta, 0.002);
    if (std::fabs(r.err_pct - e.err) > 0.2) complain("err_pct", r.err_pct, e.err, 0.2);
  }
  return out;
}

}  // namespace robustsense
