#pragma once

#include <string>
#include <variant>
#include <vector>

namespace robustsense {

// Per-block norm on the parameter space. Abs is the scalar case (dim 1).
enum class NormKind { Abs, L2, L1, Linf };

NormKind dual_of(NormKind k);
const char* norm_name(NormKind k);
NormKind norm_from_name(const std::string& name);

/// ||g|| under the given norm. Abs requires dim 1.
double norm_value(const std::vector<double>& g, NormKind norm);

/// max{<g,w> : ||w|| <= 1}, i.e. the dual norm of g, in closed form.
double dual_norm(const std::vector<double>& g, NormKind norm);

/// A w attaining the dual-norm maximum, ||w|| <= 1 (ties to lowest index).
std::vector<double> dual_norm_argmax(const std::vector<double>& g, NormKind norm);

// One entry of the inner product sum_t u_t z_t(x): parameter coordinate
// `param` picks up coeff * x[var].
struct Loading {
  int param = 0;
  int var = 0;
  double coeff = 1.0;
};

// f(u, x) = slope * (base - sum_t u_t z_t(x)) + intercept
struct BilinearAffinePiece {
  double slope = 0.0;
  double intercept = 0.0;
  double base = 0.0;
  std::vector<Loading> loadings;
};

// f(u, x) = weight * exp(-rate_scale * u * x[var]); scalar parameter only.
// weight is a detection prior, rate_scale the speed/area ratio.
struct NegExpDetection {
  double weight = 0.0;
  double rate_scale = 0.0;
  int var = 0;
};

// The term family is closed: two kinds, both with analytic parameter
// gradients and decidable worst-case structure (affine / monotone).
using Term = std::variant<BilinearAffinePiece, NegExpDetection>;

struct MaxBlock {
  std::vector<Term> terms;       // r_k >= 1
  std::vector<double> nominal;   // parameter dimension m_k
  NormKind norm = NormKind::L2;
  bool perturbable = true;

  int dim() const { return static_cast<int>(nominal.size()); }
};

enum class Relation { LessEqual, Equal, GreaterEqual };

const char* relation_name(Relation r);

struct LinearConstraint {
  std::vector<double> coeffs;  // length n_cont + n_bin
  Relation rel = Relation::LessEqual;
  double rhs = 0.0;
};

struct VarBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Compact feasible set: finite box bounds plus linear constraints.
// Continuous variables come first, binaries after.
struct FeasibleSet {
  int n_cont = 0;
  int n_bin = 0;
  std::vector<VarBounds> bounds;
  std::vector<LinearConstraint> constraints;

  int n_vars() const { return n_cont + n_bin; }
  bool is_binary(int j) const { return j >= n_cont; }
};

struct ProblemInstance {
  FeasibleSet feasible;
  std::vector<double> f0;  // linear cost over decisions
  std::vector<MaxBlock> blocks;
};

/// Structural validation; throws std::invalid_argument naming the offender.
void validate(const ProblemInstance& inst);

/// z_t(x) for each parameter coordinate of an affine piece.
std::vector<double> piece_loading_values(const BilinearAffinePiece& piece, int dim,
                                         const std::vector<double>& x);

double term_value(const Term& t, const std::vector<double>& u, const std::vector<double>& x);

/// Analytic gradient of the term in its parameter argument.
std::vector<double> term_grad_u(const Term& t, const std::vector<double>& u,
                                const std::vector<double>& x);

/// f0(x) + sum_k max_i f_ik(u^k, x), blocks summed left to right.
double evaluate_objective(const ProblemInstance& inst,
                          const std::vector<std::vector<double>>& u,
                          const std::vector<double>& x);

/// Bounds + linear constraints satisfied to absolute tolerance.
bool is_feasible(const ProblemInstance& inst, const std::vector<double>& x, double tol = 1e-7);

/// Copy of all block nominals, indexable as the u argument of evaluate_objective.
std::vector<std::vector<double>> nominal_parameters(const ProblemInstance& inst);

}  // namespace robustsense
