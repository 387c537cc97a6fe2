#pragma once

#include <cstdint>

#include "robustsense/core.hpp"
#include "robustsense/search.hpp"

namespace robustsense {

// Perturbation scope of the bundled search study: every cell, cells 7-13,
// or cells 14-20 (1-based).
enum class SearchCase { A, B, C };

SearchCase search_case_from_name(const std::string& name);
const char* search_case_name(SearchCase c);

/// The bundled 20-cell search study: tiered priors 0.02/0.04/0.06/0.08,
/// speed 200 mph, 3600 sq-mile cells, 20 h budget, sweep width 20 miles.
SearchInstance build_search_instance(SearchCase c, int kappa, double delta);

struct TechInvestConfig {
  enum class BoundsVariant { Base, LowUpper, HighLower };

  int technologies = 10;  // T
  int scenarios = 20;     // N; desk-scale default, the full study uses 100
  double alpha1 = -2.0;   // over-investment slope, -2 or -5
  BoundsVariant bounds = BoundsVariant::Base;
  // contribution coefficients cluster around 1
  double coeff_lo = 0.7;
  double coeff_hi = 1.3;
  std::uint64_t seed = 20220101;
};

TechInvestConfig::BoundsVariant bounds_variant_from_name(const std::string& name);

/// Technology-investment model: minimize total spend plus expected gap
/// penalties over 3 areas x N scenarios; one 5-piece penalty block per
/// (area, scenario), L2 parameter balls, indicator bounds per technology.
/// Deterministic in the seed. Investment bounds are synthetic defaults:
/// base 2/20, low-upper 2/12, high-lower 6/20.
ProblemInstance build_tech_instance(const TechInvestConfig& cfg);

}  // namespace robustsense
