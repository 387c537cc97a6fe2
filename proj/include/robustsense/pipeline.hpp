#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "robustsense/core.hpp"
#include "robustsense/sensitivity.hpp"

namespace robustsense {

// One line of the nominal -> sensitivity -> prediction -> robust comparison.
struct PipelineRow {
  std::string label;
  double delta = 0.0;
  int kappa = 0;  // 0 when not applicable
  double q0 = 0.0;
  double lip_radius = 0.0;
  double q_tilde = 0.0;
  double q_lower = 0.0;  // robust value, or bracket when bracketed
  double q_upper = 0.0;
  bool bracketed = false;
  double err_pct = 0.0;
  std::string status = "ok";
};

enum class RobustChoice { Exact, Sampled };

struct PipelineOptions {
  RobustChoice robust = RobustChoice::Exact;
  int samples = 500;
  std::uint64_t seed = 20220101;
  double tie_tol = kDefaultTieTol;
  std::string label;
};

/// Nominal solve, modulus estimate, prediction and robust solve for each
/// radius, in input order. Solver failures surface in the row status; the
/// remaining rows are still produced.
std::vector<PipelineRow> run_pipeline(const ProblemInstance& inst,
                                      const std::vector<double>& deltas,
                                      const PipelineOptions& opts = {});

/// The bundled search study: cases A/B/C x delta {5,10} x cap {8,16},
/// twelve rows, exact robust path.
std::vector<PipelineRow> run_search_table();

enum class RenderFormat { Csv, Markdown, Json };

RenderFormat render_format_from_name(const std::string& name);

/// csv at full precision, markdown at table precision (values 3 decimals,
/// modulus 5, error 1; brackets as "[lower upper]"), json lossless.
std::string render(const std::vector<PipelineRow>& rows, RenderFormat fmt);

/// Inverse of render for csv and json.
std::vector<PipelineRow> parse_rows(const std::string& text, RenderFormat fmt);

// Reference values and print tolerances for the bundled search study.
struct ReferenceRow {
  const char* label;
  double delta;
  int kappa;
  double q0, lip, q_tilde, q_delta, err;
};

const std::vector<ReferenceRow>& search_reference_table();

struct TableCheck {
  bool pass = true;
  std::vector<std::string> mismatches;
};

/// Compares computed rows against the reference table: values to 0.002,
/// modulus to 0.00002, error to 0.2 points.
TableCheck check_against_reference(const std::vector<PipelineRow>& rows);

}  // namespace robustsense
