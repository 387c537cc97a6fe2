#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "robustsense/core.hpp"
#include "robustsense/lp.hpp"

namespace robustsense {

// Ball of radius |radius| around the center, per block norm, as a product
// over blocks. An empty center means the instance nominal.
struct UncertaintySpec {
  std::vector<std::vector<double>> center;
  double radius = 0.0;
};

std::vector<std::vector<double>> spec_center(const ProblemInstance& inst,
                                             const UncertaintySpec& spec);

enum class RobustMode { ExactMonotone, ExactAffine, SampledBracket };

const char* robust_mode_name(RobustMode m);

struct RobustReport {
  RobustMode mode = RobustMode::ExactMonotone;
  double lower = 0.0;  // lower == upper on the exact paths
  double upper = 0.0;
  std::vector<double> x;
  std::vector<std::vector<double>> witness;  // worst-case parameter per block
  int sample_count = 0;
  std::uint64_t seed = 0;
  SolveReport solve;

  bool bracketed() const { return mode == RobustMode::SampledBracket; }
};

/// Exact per-block sup at a fixed decision: affine blocks get the dual-norm
/// offset, detection blocks (nonnegative effort) the monotone rule u - delta.
/// Returns the value and the blockwise worst-case witness.
std::pair<double, std::vector<std::vector<double>>> worst_case_value(
    const ProblemInstance& inst, const std::vector<double>& x, const UncertaintySpec& spec);

enum class SolverSelector { Auto, SearchEnumeration, Milp };

/// Exact robust solve where structure permits: monotone substitution for
/// detection instances, linear worst-case augmentation for affine instances.
/// Throws "no exact rule" otherwise.
RobustReport solve_robust_exact(const ProblemInstance& inst, const UncertaintySpec& spec,
                                SolverSelector selector = SolverSelector::Auto);

/// Deterministic offsets within the radius-delta ball. L2 is uniform in the
/// ball, Linf (and Abs on dim 1) componentwise uniform; L1 is unsupported.
std::vector<std::vector<double>> sample_ball(int dim, NormKind norm, double delta, int count,
                                             std::uint64_t seed);

/// Scenario-expanded robust solve for affine instances: the sampled MILP
/// furnishes the lower bound, an exact sup evaluation at its minimizer the
/// upper bound. The first scenario is always the center.
RobustReport solve_robust_sampled(const ProblemInstance& inst, const UncertaintySpec& spec,
                                  int count, std::uint64_t seed,
                                  SolverSelector selector = SolverSelector::Auto);

/// 100 |q_tilde - q_delta| / |q_delta|, from unrounded inputs.
double error_pct(double q_tilde, double q_delta);

nlohmann::json to_json(const RobustReport& rep);

}  // namespace robustsense
